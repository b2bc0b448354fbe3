"""Trusted checker for a small intensional type theory with circle and torus
higher inductive types, plus the harness for its shipped proof corpus."""

import sys

# Deep proof terms make the recursive evaluator exceed CPython's default
# recursion limit long before the C stack is at risk on a large thread stack.
if sys.getrecursionlimit() < 100_000:
    sys.setrecursionlimit(100_000)

__all__ = ["__version__"]
__version__ = "0.1.0"
