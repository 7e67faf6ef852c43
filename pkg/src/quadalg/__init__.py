"""quadalg: exact computational algebra for the quadratic hierarchy.

Square groups, square and quadratic rings, crossed extensions and their
obstruction classes, the matrix category of a square ring with its tracks,
and cohomology of finite categories with natural-system coefficients, all in
exact integer arithmetic with independent oracles for every computed value.
"""
from __future__ import annotations

__version__ = "0.1.0"
