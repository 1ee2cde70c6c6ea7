"""Exact rational linear algebra, integer kernels, and sums of roots of unity.

All arithmetic uses arbitrary-precision rationals (``fractions.Fraction``);
no floating point appears anywhere in the package.  Vectors are tuples of
Fractions, matrices are tuples of row tuples, integer data uses plain int
tuples.  Every value is immutable and hashable, so results can be shared
freely across threads and all operations here are pure.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt, lcm
from typing import Iterable

Vec = tuple[Fraction, ...]
Mat = tuple[tuple[Fraction, ...], ...]
IntVec = tuple[int, ...]
IntMat = tuple[tuple[int, ...], ...]


class NotRational(ValueError):
    """A cyclotomic sum did not reduce to a rational number."""


# ---------------------------------------------------------------------------
# constructors and serialization

def vec(entries: Iterable) -> Vec:
    return tuple(Fraction(x) for x in entries)


def mat(rows: Iterable[Iterable]) -> Mat:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def as_int(x) -> int:
    """Exact conversion to int; rejects non-integral values."""
    if isinstance(x, int):
        return x
    f = Fraction(x)
    if f.denominator != 1:
        raise ValueError(f"not an integer: {x!r}")
    return f.numerator


def int_vec(entries: Iterable) -> IntVec:
    return tuple(as_int(x) for x in entries)


def int_mat(rows: Iterable[Iterable]) -> IntMat:
    return tuple(tuple(as_int(x) for x in row) for row in rows)


def format_rational(q) -> str:
    """Render a rational as "p/q", or "p" when the denominator is 1."""
    return str(Fraction(q))


def parse_rational(s: str) -> Fraction:
    # tolerate a unicode minus sign in input files
    return Fraction(s.strip().replace("−", "-"))


# ---------------------------------------------------------------------------
# elementary vector/matrix operations (work for int and Fraction entries)

def identity(n: int) -> IntMat:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zero_matrix(rows: int, cols: int) -> IntMat:
    return tuple(tuple(0 for _ in range(cols)) for _ in range(rows))


def transpose(m):
    return tuple(tuple(row[i] for row in m) for i in range(len(m[0])))


def mat_mul(a, b):
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def mat_vec(m, v):
    return tuple(sum(x * y for x, y in zip(row, v)) for row in m)


def mat_sub(a, b):
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def vec_add(u, v):
    return tuple(x + y for x, y in zip(u, v))


def vec_sub(u, v):
    return tuple(x - y for x, y in zip(u, v))


def vec_neg(u):
    return tuple(-x for x in u)


def vec_scale(c, u):
    return tuple(c * x for x in u)


def dot(u, v):
    return sum(x * y for x, y in zip(u, v))


def is_integral(u) -> bool:
    return all(Fraction(x).denominator == 1 for x in u)


def reduce_mod1(u) -> Vec:
    """Componentwise reduction into [0, 1)."""
    return tuple(Fraction(x) % 1 for x in u)


def det(m) -> Fraction:
    """Determinant by fraction-based Gaussian elimination."""
    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    result = Fraction(1)
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            result = -result
        result *= a[col][col]
        inv = 1 / a[col][col]
        for i in range(col + 1, n):
            if a[i][col] != 0:
                f = a[i][col] * inv
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return result


def inverse(m) -> Mat:
    """Inverse of a square rational matrix; raises ValueError if singular."""
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(1 if i == j else 0) for j in range(n)]
         for i, row in enumerate(m)]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] != 0), None)
        if piv is None:
            raise ValueError("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        pv = a[col][col]
        a[col] = [x / pv for x in a[col]]
        for i in range(n):
            if i != col and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return tuple(tuple(row[n:]) for row in a)


def int_inverse(m) -> IntMat:
    """Inverse of a unimodular integer matrix, again over the integers."""
    return int_mat(inverse(m))


def rank(m) -> int:
    rows = [[Fraction(x) for x in row] for row in m]
    if not rows:
        return 0
    r = 0
    ncols = len(rows[0])
    for col in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][col]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return r


# ---------------------------------------------------------------------------
# integer kernels via unimodular column reduction

def kernel_saturated(m_rows) -> list[IntVec]:
    """Basis of the saturated integer kernel {m in Z^r : M m = 0}.

    Denominators are cleared row by row (this does not change the kernel),
    then unimodular column operations bring the matrix to column echelon
    form; the columns of the transformation matrix that map onto zero
    columns form a basis of the full kernel sublattice.  The vectors are
    primitive (columns of a unimodular matrix) and returned sorted.
    """
    rows = [list(row) for row in m_rows]
    if not rows or not rows[0]:
        return []
    a = []
    for row in rows:
        fr = [Fraction(x) for x in row]
        scale = lcm(*(x.denominator for x in fr))
        a.append([int(x * scale) for x in fr])
    nrows, ncols = len(a), len(a[0])
    cols = [[a[i][j] for i in range(nrows)] for j in range(ncols)]
    ucols = [[1 if i == j else 0 for i in range(ncols)] for j in range(ncols)]
    lead = 0
    for i in range(nrows):
        if lead >= ncols:
            break
        while True:
            nz = [j for j in range(lead, ncols) if cols[j][i] != 0]
            if len(nz) <= 1:
                break
            j0 = min(nz, key=lambda j: abs(cols[j][i]))
            for j in nz:
                if j == j0:
                    continue
                q = cols[j][i] // cols[j0][i]
                if q:
                    cols[j] = [x - q * y for x, y in zip(cols[j], cols[j0])]
                    ucols[j] = [x - q * y for x, y in zip(ucols[j], ucols[j0])]
        nz = [j for j in range(lead, ncols) if cols[j][i] != 0]
        if nz:
            j0 = nz[0]
            cols[lead], cols[j0] = cols[j0], cols[lead]
            ucols[lead], ucols[j0] = ucols[j0], ucols[lead]
            lead += 1
    basis = []
    for j in range(lead, ncols):
        v = ucols[j]
        for x in v:
            if x:
                if x < 0:
                    v = [-y for y in v]
                break
        basis.append(tuple(v))
    basis.sort()
    return basis


def solve_affine(m_rows, c) -> tuple[Vec, list[IntVec]] | None:
    """Solve M x = c over the rationals.

    Returns a particular solution together with a basis of the saturated
    integer kernel of M, or None when the system is inconsistent.
    """
    rows = [[Fraction(x) for x in row] + [Fraction(ci)]
            for row, ci in zip(m_rows, c)]
    if len(rows) != len(list(m_rows)):
        raise ValueError("dimension mismatch between matrix and right-hand side")
    if not rows:
        return (), []
    ncols = len(rows[0]) - 1
    lead = 0
    pivots: list[int] = []
    for col in range(ncols):
        piv = next((i for i in range(lead, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[lead], rows[piv] = rows[piv], rows[lead]
        pv = rows[lead][col]
        rows[lead] = [x / pv for x in rows[lead]]
        for i in range(len(rows)):
            if i != lead and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[lead])]
        pivots.append(col)
        lead += 1
        if lead == len(rows):
            break
    for i in range(lead, len(rows)):
        if rows[i][ncols] != 0:
            return None
    x0 = [Fraction(0)] * ncols
    for k, col in enumerate(pivots):
        x0[col] = rows[k][ncols]
    return tuple(x0), kernel_saturated(m_rows)


# ---------------------------------------------------------------------------
# exact square roots and gcds of rationals

def sqrt_floor(x: Fraction) -> int:
    """floor(sqrt(x)) for a nonnegative rational."""
    if x < 0:
        raise ValueError("negative argument")
    return isqrt(x.numerator * x.denominator) // x.denominator


def floor_plus_sqrt(alpha: Fraction, beta: Fraction) -> int:
    """floor(alpha + sqrt(beta)) computed exactly, beta >= 0."""
    a, b = alpha.numerator, alpha.denominator
    p, q = beta.numerator, beta.denominator
    return (a + isqrt(b * b * p * q) // q) // b


def ceil_minus_sqrt(alpha: Fraction, beta: Fraction) -> int:
    """ceil(alpha - sqrt(beta)) computed exactly, beta >= 0."""
    return -floor_plus_sqrt(-alpha, beta)


def rational_sqrt(x: Fraction) -> Fraction | None:
    """Exact square root of a nonnegative rational, or None if irrational."""
    if x < 0:
        raise ValueError("negative argument")
    rp, rq = isqrt(x.numerator), isqrt(x.denominator)
    if rp * rp == x.numerator and rq * rq == x.denominator:
        return Fraction(rp, rq)
    return None


def frac_gcd(values: Iterable[Fraction]) -> Fraction:
    """gcd of a collection of rationals (0 if all are 0)."""
    g = Fraction(0)
    for v in values:
        v = abs(Fraction(v))
        if v == 0:
            continue
        if g == 0:
            g = v
        else:
            g = Fraction(gcd(g.numerator * v.denominator, v.numerator * g.denominator),
                         g.denominator * v.denominator)
    return g


# ---------------------------------------------------------------------------
# cyclotomic sums

@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients of the n-th cyclotomic polynomial, lowest degree first."""
    if n < 1:
        raise ValueError("n must be positive")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _exact_polydiv(poly, cyclotomic_polynomial(d))
    return tuple(poly)


def _exact_polydiv(num: list[int], den) -> list[int]:
    # exact division of integer polynomials; den is monic
    num = list(num)
    dn = len(den) - 1
    out = [0] * (len(num) - dn)
    for k in reversed(range(len(out))):
        c = num[k + dn]
        out[k] = c
        if c:
            for i, dcoef in enumerate(den):
                num[k + i] -= c * dcoef
    if any(num):
        raise ArithmeticError("polynomial division was not exact")
    return out


class CyclotomicSum:
    """A finite integer combination sum_q c_q * e^(2*pi*i*q), q rational.

    Exponents are stored reduced into [0, 1); zero coefficients are dropped.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        d: dict[Fraction, int] = {}
        if coeffs:
            for q, c in dict(coeffs).items():
                c = as_int(c)
                if c == 0:
                    continue
                q = Fraction(q) % 1
                c0 = d.get(q, 0) + c
                if c0:
                    d[q] = c0
                else:
                    d.pop(q, None)
        self.coeffs = d

    @classmethod
    def root(cls, q, coeff: int = 1) -> "CyclotomicSum":
        return cls({Fraction(q): coeff})

    def add_root(self, q, coeff: int = 1) -> None:
        # in-place accumulation; used only while building a sum
        q = Fraction(q) % 1
        c = self.coeffs.get(q, 0) + coeff
        if c:
            self.coeffs[q] = c
        else:
            self.coeffs.pop(q, None)

    def __add__(self, other: "CyclotomicSum") -> "CyclotomicSum":
        out = CyclotomicSum(self.coeffs)
        for q, c in other.coeffs.items():
            out.add_root(q, c)
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, CyclotomicSum) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __repr__(self) -> str:
        terms = ", ".join(f"{q}: {c}" for q, c in sorted(self.coeffs.items()))
        return f"CyclotomicSum({{{terms}}})"

    def evaluate(self) -> Fraction:
        return cyclo_eval(self)


def cyclo_eval(s: CyclotomicSum) -> Fraction:
    """Exact rational value of a cyclotomic sum.

    The sum is written in the power basis of the N-th root of unity, N the
    lcm of the exponent denominators, and reduced modulo the N-th cyclotomic
    polynomial.  Raises NotRational if any coefficient survives outside the
    rational component.
    """
    if not s.coeffs:
        return Fraction(0)
    n = lcm(*(q.denominator for q in s.coeffs))
    coeffs = [0] * n
    for q, c in s.coeffs.items():
        coeffs[int(q * n) % n] += c
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    for k in reversed(range(deg, n)):
        c = coeffs[k]
        if c:
            coeffs[k] = 0
            for i, dcoef in enumerate(phi[:-1]):
                coeffs[k - deg + i] -= c * dcoef
    if any(coeffs[1:deg]):
        raise NotRational(f"cyclotomic sum is irrational: {s!r}")
    return Fraction(coeffs[0])
