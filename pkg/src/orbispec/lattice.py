"""Lattices given by rational Gram matrices, duals, and exact shell enumeration.

The geometry of a lattice lives entirely in its Gram matrix; coordinates of
lattice vectors are always taken with respect to the lattice's own basis, so
ambient embeddings with irrational entries never appear at runtime.
Enumeration uses an exact rational UDU^T decomposition with integer-sqrt
interval bounds (no floating point), and output is deterministic: vectors in
strictly increasing lexicographic order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exact import (
    Mat,
    IntVec,
    Vec,
    ceil_minus_sqrt,
    det,
    floor_plus_sqrt,
    inverse,
    mat,
    rational_sqrt,
)


@dataclass(frozen=True)
class Lattice:
    """Full-rank lattice described by a symmetric positive-definite Gram matrix."""

    gram: Mat

    def __init__(self, gram):
        g = mat(gram)
        n = len(g)
        if any(len(row) != n for row in g):
            raise ValueError("Gram matrix must be square")
        if g != tuple(tuple(g[j][i] for j in range(n)) for i in range(n)):
            raise ValueError("Gram matrix must be symmetric")
        for k in range(1, n + 1):
            minor = tuple(row[:k] for row in g[:k])
            if det(minor) <= 0:
                raise ValueError("Gram matrix is not positive definite")
        object.__setattr__(self, "gram", g)

    @property
    def dim(self) -> int:
        return len(self.gram)

    def norm(self, v) -> Fraction:
        """Squared length m^T G m of an integer coordinate vector."""
        g = self.gram
        return sum(g[i][j] * v[i] * v[j] for i in range(self.dim) for j in range(self.dim))


@lru_cache(maxsize=None)
def dual(lat: Lattice) -> Lattice:
    """Dual lattice: Gram matrix G^{-1}, coordinates w.r.t. the dual basis."""
    return Lattice(inverse(lat.gram))


@lru_cache(maxsize=None)
def _udu(gram: Mat):
    """Decompose G = U D U^T with U unit upper-triangular.

    Gives the completed-square form q(x) = sum_i d_i (x_i + s_i)^2 where
    s_i depends only on x_j with j < i, so enumeration can fix coordinates
    in index order (which yields lexicographic output for free).
    """
    n = len(gram)
    s = [[Fraction(x) for x in row] for row in gram]
    d = [Fraction(0)] * n
    u = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    for i in reversed(range(n)):
        piv = s[i][i]
        if piv <= 0:
            raise ValueError("Gram matrix is not positive definite")
        d[i] = piv
        for j in range(i):
            u[j][i] = s[j][i] / piv
        for a in range(i):
            for b in range(i):
                s[a][b] -= u[a][i] * u[b][i] * piv
    return tuple(d), tuple(tuple(row) for row in u)


def _enumerate(gram: Mat, bound: Fraction, exact_value: Fraction | None):
    """Core recursion shared by shell and ball enumeration.

    With exact_value set, yields only vectors of that exact norm (still
    pruning with <= bound at intermediate levels); otherwise yields
    (vector, value) pairs for every norm <= bound.
    """
    n = len(gram)
    d, u = _udu(gram)
    x = [0] * n
    out = []

    def rec(i: int, remaining: Fraction):
        s_i = sum(u[j][i] * x[j] for j in range(i))
        if i == n - 1:
            if exact_value is not None:
                b = remaining / d[i]
                t = rational_sqrt(b)
                if t is None:
                    return
                for cand in sorted({-s_i - t, -s_i + t}):
                    if cand.denominator == 1:
                        x[i] = int(cand)
                        out.append(tuple(x))
            else:
                b = remaining / d[i]
                lo = ceil_minus_sqrt(-s_i, b)
                hi = floor_plus_sqrt(-s_i, b)
                for xi in range(lo, hi + 1):
                    x[i] = xi
                    value = bound - remaining + d[i] * (xi + s_i) ** 2
                    out.append((tuple(x), value))
            return
        b = remaining / d[i]
        lo = ceil_minus_sqrt(-s_i, b)
        hi = floor_plus_sqrt(-s_i, b)
        for xi in range(lo, hi + 1):
            x[i] = xi
            term = d[i] * (xi + s_i) ** 2
            rec(i + 1, remaining - term)

    rec(0, bound)
    return out


def enumerate_shell(lat: Lattice, mu) -> list[IntVec]:
    """All integer vectors m with m^T G m = mu, in lexicographic order."""
    mu = Fraction(mu)
    if mu < 0:
        raise ValueError("mu must be nonnegative")
    if mu == 0:
        return [tuple(0 for _ in range(lat.dim))]
    return _enumerate(lat.gram, mu, mu)


def points_up_to(lat: Lattice, cutoff) -> list[tuple[IntVec, Fraction]]:
    """All (m, m^T G m) with norm <= cutoff, vectors in lexicographic order."""
    cutoff = Fraction(cutoff)
    if cutoff < 0:
        raise ValueError("cutoff must be nonnegative")
    return _enumerate(lat.gram, cutoff, None)


def norm_values(lat: Lattice, cutoff) -> list[Fraction]:
    """Sorted distinct values m^T G m <= cutoff, starting with 0."""
    return sorted({value for _, value in points_up_to(lat, cutoff)})


def shells_up_to(lat: Lattice, cutoff) -> dict[Fraction, list[IntVec]]:
    """Shell decomposition of the ball of squared radius cutoff."""
    buckets: dict[Fraction, list[IntVec]] = {}
    for v, value in points_up_to(lat, cutoff):
        buckets.setdefault(value, []).append(v)
    return buckets
