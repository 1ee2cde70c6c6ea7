"""Affine isometries and crystallographic groups in lattice coordinates.

A crystallographic group is stored as a lattice plus one affine representative
per coset of the translation subgroup.  Linear parts are integer matrices P
with P^T G P = G, translations are rational vectors; the map is x -> P x + c.
Finite quotients modulo a sublattice (isometry groups of the covering torus)
are the input to the almost-conjugacy machinery.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exact import (
    IntMat,
    Mat,
    Vec,
    as_int,
    det,
    identity,
    int_inverse,
    int_mat,
    inverse,
    is_integral,
    mat,
    mat_mul,
    mat_vec,
    reduce_mod1,
    transpose,
    vec,
    vec_add,
    vec_neg,
    vec_sub,
)
from .lattice import Lattice


class ValidationError(ValueError):
    """A crystallographic group failed validation."""


class NotOrthogonal(ValidationError):
    def __init__(self, index: int):
        super().__init__(f"linear part of coset representative {index} does not preserve the Gram matrix")
        self.index = index


class NotClosed(ValidationError):
    def __init__(self, i: int, j: int):
        super().__init__(f"composition of coset representatives {i} and {j} leaves the group modulo the lattice")
        self.i, self.j = i, j


class BadIdentity(ValidationError):
    def __init__(self, msg: str = "group needs exactly one identity representative with lattice-trivial translation"):
        super().__init__(msg)


class NotSublattice(ValueError):
    """Sublattice matrix is not integral of full rank."""


class NotInvariant(ValueError):
    """Some linear part does not preserve the sublattice."""

    def __init__(self, linear: IntMat):
        super().__init__(f"sublattice is not invariant under {linear}")
        self.linear = linear


class BoundExceeded(RuntimeError):
    """Group closure exceeded the safety bound."""

    def __init__(self, bound: int):
        super().__init__(f"closure exceeded {bound} elements")
        self.bound = bound


@dataclass(frozen=True)
class AffineIsometry:
    """The affine map x -> P x + c in lattice coordinates."""

    linear: IntMat
    transl: Vec

    def __init__(self, linear, transl):
        object.__setattr__(self, "linear", int_mat(linear))
        object.__setattr__(self, "transl", vec(transl))
        if len(self.linear) != len(self.transl):
            raise ValueError("dimension mismatch between linear part and translation")

    @property
    def dim(self) -> int:
        return len(self.transl)

    def apply(self, x) -> Vec:
        return vec_add(mat_vec(self.linear, x), self.transl)


def compose(a: AffineIsometry, b: AffineIsometry) -> AffineIsometry:
    """(P_a, c_a) composed after (P_b, c_b): (P_a P_b, P_a c_b + c_a)."""
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    return AffineIsometry(mat_mul(a.linear, b.linear),
                          vec_add(mat_vec(a.linear, b.transl), a.transl))


def invert(a: AffineIsometry) -> AffineIsometry:
    pinv = int_inverse(a.linear)
    return AffineIsometry(pinv, vec_neg(mat_vec(pinv, a.transl)))


@dataclass(frozen=True)
class CrystalGroup:
    """Lattice plus coset representatives of the group modulo its translations."""

    lattice: Lattice
    reps: tuple[AffineIsometry, ...]

    def __init__(self, lattice: Lattice, reps):
        object.__setattr__(self, "lattice", lattice)
        object.__setattr__(self, "reps", tuple(reps))

    @property
    def dim(self) -> int:
        return self.lattice.dim

    @property
    def order_mod_translations(self) -> int:
        return len(self.reps)


def validate(g: CrystalGroup) -> None:
    """Check orthogonality, closure modulo the lattice, and the identity coset.

    Raises NotOrthogonal / NotClosed / BadIdentity naming the offending data.
    """
    n = g.dim
    gram = g.lattice.gram
    idm = identity(n)
    linears = [rep.linear for rep in g.reps]
    if len(set(linears)) != len(linears):
        raise ValidationError("coset representatives have duplicate linear parts")
    for i, rep in enumerate(g.reps):
        if rep.dim != n:
            raise ValidationError(f"representative {i} has wrong dimension")
        if mat_mul(mat_mul(transpose(rep.linear), gram), rep.linear) != gram:
            raise NotOrthogonal(i)
    try:
        id_index = linears.index(idm)
    except ValueError:
        raise BadIdentity("no identity coset representative") from None
    if not is_integral(g.reps[id_index].transl):
        raise BadIdentity("identity representative must have a lattice translation")
    by_linear = {rep.linear: rep for rep in g.reps}
    for i, a in enumerate(g.reps):
        for j, b in enumerate(g.reps):
            prod = mat_mul(a.linear, b.linear)
            target = by_linear.get(prod)
            if target is None:
                raise NotClosed(i, j)
            t = vec_add(mat_vec(a.linear, b.transl), a.transl)
            if not is_integral(vec_sub(t, target.transl)):
                raise NotClosed(i, j)


def point_group(g: CrystalGroup) -> list[IntMat]:
    """Linear parts of the coset representatives, identity first."""
    idm = identity(g.dim)
    rest = [rep.linear for rep in g.reps if rep.linear != idm]
    return [idm] + rest


# ---------------------------------------------------------------------------
# finite quotients modulo a sublattice

AffElem = tuple[IntMat, Vec]  # (P, c) with c reduced into [0,1)^n


def aff_identity(n: int) -> AffElem:
    return identity(n), tuple(Fraction(0) for _ in range(n))


def aff_mul(a: AffElem, b: AffElem) -> AffElem:
    return mat_mul(a[0], b[0]), reduce_mod1(vec_add(mat_vec(a[0], b[1]), a[1]))


def aff_inv(a: AffElem) -> AffElem:
    pinv = int_inverse(a[0])
    return pinv, reduce_mod1(vec_neg(mat_vec(pinv, a[1])))


@dataclass(frozen=True)
class FiniteAffineGroup:
    """Finite group of torus isometries: pairs (P, c mod 1) in sublattice coordinates."""

    dim: int
    elements: tuple[AffElem, ...]
    generators: tuple[AffElem, ...]
    gram: Mat | None = None

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, elem: AffElem) -> bool:
        return elem in set(self.elements)

    def element_set(self) -> frozenset:
        return frozenset(self.elements)


def _coset_box(sub: IntMat) -> list[Vec]:
    """Coset representatives of Z^n modulo the column span of an integer matrix."""
    n = len(sub)
    # bring to upper-triangular column form by integer column operations
    m = [[sub[i][j] for i in range(n)] for j in range(n)]  # column-major
    for i in reversed(range(n)):
        while True:
            nz = [j for j in range(i + 1) if m[j][i] != 0]
            if len(nz) <= 1:
                break
            j0 = min(nz, key=lambda j: abs(m[j][i]))
            for j in nz:
                if j != j0:
                    q = m[j][i] // m[j0][i]
                    if q:
                        m[j] = [x - q * y for x, y in zip(m[j], m[j0])]
        nz = [j for j in range(i + 1) if m[j][i] != 0]
        if not nz:
            raise NotSublattice("sublattice matrix is singular")
        m[i], m[nz[0]] = m[nz[0]], m[i]
        if m[i][i] < 0:
            m[i] = [-x for x in m[i]]
    hcols = m  # column-major, upper triangular with positive diagonal
    import itertools

    reps = []
    for digits in itertools.product(*(range(hcols[j][j]) for j in range(n))):
        reps.append(vec(digits))
    return reps


def quotient_mod_sublattice(g: CrystalGroup, sub) -> FiniteAffineGroup:
    """Finite isometry group of the torus R^n / Lambda', in Lambda'-coordinates.

    `sub` gives the sublattice basis as integer columns in Lambda-coordinates;
    it must be invariant under every linear part.  The result has order
    (#point group) * [Lambda : Lambda'].
    """
    n = g.dim
    try:
        s = int_mat(sub)
    except ValueError:
        raise NotSublattice("sublattice matrix must be integral") from None
    if len(s) != n or any(len(row) != n for row in s):
        raise NotSublattice("sublattice matrix must be square of the lattice dimension")
    dets = det(s)
    if dets == 0:
        raise NotSublattice("sublattice matrix is singular")
    sinv = inverse(s)
    for rep in g.reps:
        conj = mat_mul(mat_mul(sinv, rep.linear), s)
        if not all(is_integral(row) for row in conj):
            raise NotInvariant(rep.linear)
    index = abs(as_int(dets))
    cosets = _coset_box(s)
    elements = []
    for rep in g.reps:
        p_new = int_mat(mat_mul(mat_mul(sinv, rep.linear), s))
        for lam in cosets:
            c_new = reduce_mod1(mat_vec(sinv, vec_add(rep.transl, lam)))
            elements.append((p_new, c_new))
    if len(set(elements)) != len(g.reps) * index:
        raise ValidationError("quotient elements are not distinct; input group is invalid")
    gram_new = mat_mul(mat_mul(transpose(s), g.lattice.gram), s)
    return FiniteAffineGroup(dim=n, elements=tuple(sorted(elements)),
                             generators=tuple(sorted(elements)), gram=mat(gram_new))


def closure(generators, bound: int = 10 ** 6, dim: int | None = None,
            gram=None) -> FiniteAffineGroup:
    """Multiplicative closure of torus isometries, with a safety bound.

    Accepts (P, c) pairs; translations are reduced mod 1.  Raises
    BoundExceeded when the closure grows past `bound` elements.
    """
    gens = [(int_mat(p), reduce_mod1(vec(c))) for p, c in generators]
    if not gens:
        raise ValueError("need at least one generator")
    n = dim if dim is not None else len(gens[0][0])
    ident = aff_identity(n)
    elems = {ident}
    frontier = [ident]
    for gen in gens:
        if gen not in elems:
            elems.add(gen)
            frontier.append(gen)
    while frontier:
        nxt = []
        for x in frontier:
            for gen in gens:
                y = aff_mul(x, gen)
                if y not in elems:
                    elems.add(y)
                    nxt.append(y)
                    if len(elems) > bound:
                        raise BoundExceeded(bound)
        frontier = nxt
    return FiniteAffineGroup(dim=n, elements=tuple(sorted(elems)),
                             generators=tuple(gens), gram=mat(gram) if gram is not None else None)
