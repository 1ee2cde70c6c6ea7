"""Finite orthogonal matrix groups: almost-conjugacy, conjugacy, m-numbers,
and sphere strata.

Almost conjugacy (each ambient conjugacy class meets both groups equally
often) is decided either against the full orthogonal group, where the
characteristic polynomial classifies conjugacy, or inside an explicit finite
ambient group by brute-force class tabulation.  The m-numbers m(G, H) are
maximal orders of subgroups conjugate into H; with H a block frame
stabilizer they reduce to fixed-space dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations

from .crystal import FiniteAffineGroup, aff_inv, aff_mul
from .exact import Mat, det, identity, inverse, mat, mat_mul, mat_sub, rank, transpose


class AmbientMismatch(ValueError):
    """An element of one of the groups is missing from the finite ambient group."""


class UnsupportedGroupClass(ValueError):
    """Operation only implemented for signed-diagonal groups."""


@dataclass(frozen=True)
class FiniteOrthGroup:
    """Finite group of rational orthogonal matrices."""

    elements: tuple[Mat, ...]

    def __init__(self, elements):
        elems = tuple(sorted({mat(m) for m in elements}))
        if not elems:
            raise ValueError("group must be nonempty")
        n = len(elems[0])
        idm = mat(identity(n))
        eset = set(elems)
        for m in elems:
            if len(m) != n or any(len(row) != n for row in m):
                raise ValueError("elements must be square of equal dimension")
            if mat_mul(transpose(m), m) != idm:
                raise ValueError(f"element is not orthogonal: {m}")
        for a in elems:
            for b in elems:
                if mat_mul(a, b) not in eset:
                    raise ValueError("element set is not closed under multiplication")
        if idm not in eset:
            raise ValueError("group must contain the identity")
        object.__setattr__(self, "elements", elems)

    @property
    def dim(self) -> int:
        return len(self.elements[0])

    @property
    def order(self) -> int:
        return len(self.elements)

    def is_signed_diagonal(self) -> bool:
        n = self.dim
        for m in self.elements:
            for i in range(n):
                for j in range(n):
                    if i == j:
                        if m[i][j] not in (1, -1):
                            return False
                    elif m[i][j] != 0:
                        return False
        return True


@dataclass(frozen=True)
class Conjugate:
    conjugator: Mat


@dataclass(frozen=True)
class ProvablyNot:
    witness: str


@dataclass(frozen=True)
class Inconclusive:
    detail: str


def char_poly(m: Mat) -> tuple[Fraction, ...]:
    """Coefficients (e_0, ..., e_n) of the characteristic polynomial via
    principal-minor sums; a full conjugacy invariant for orthogonal matrices."""
    n = len(m)
    coeffs = []
    for k in range(n + 1):
        total = Fraction(0)
        for rows in combinations(range(n), k):
            sub = tuple(tuple(m[i][j] for j in rows) for i in rows)
            total += det(sub)
        coeffs.append(total)
    return tuple(coeffs)


def _diag_vector(m: Mat) -> tuple[Fraction, ...] | None:
    n = len(m)
    for i in range(n):
        for j in range(n):
            if i != j and m[i][j] != 0:
                return None
    return tuple(m[i][i] for i in range(n))


def _even_signed_perm_conjugator(a: Mat, b: Mat) -> Mat | None:
    """A determinant +1 signed permutation matrix p with p a p^{-1} = b.

    Implemented for diagonal a, b: conjugation by a signed permutation just
    permutes diagonal entries, and signs can always be adjusted to make the
    determinant +1 without changing the conjugation.
    """
    da, db = _diag_vector(a), _diag_vector(b)
    if da is None or db is None:
        return None
    n = len(da)
    if sorted(da) != sorted(db):
        return None
    used: set[int] = set()
    sigma = [0] * n
    for i in range(n):
        j = next(jj for jj in range(n) if jj not in used and da[jj] == db[i])
        sigma[i] = j
        used.add(j)
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        rows[i][sigma[i]] = Fraction(1)
    p = mat(rows)
    if det(p) < 0:
        rows[0] = [-x for x in rows[0]]  # sign flip fixes the determinant
        p = mat(rows)
    assert mat_mul(mat_mul(p, a), inverse(p)) == b
    return p


def _conjugacy_classes(elements, mul, inv, generators):
    """Conjugacy classes by orbit closure under conjugation by generators."""
    remaining = set(elements)
    classes = []
    gens = [(h, inv(h)) for h in generators]
    for x in sorted(elements):
        if x not in remaining:
            continue
        orbit = {x}
        frontier = [x]
        while frontier:
            nxt = []
            for y in frontier:
                for h, hinv in gens:
                    z = mul(mul(h, y), hinv)
                    if z not in orbit:
                        orbit.add(z)
                        nxt.append(z)
            frontier = nxt
        classes.append(frozenset(orbit))
        remaining -= orbit
    return classes


def almost_conjugate(g1, g2, ambient):
    """Class-preserving bijection between two finite groups, or None.

    ambient="orthogonal" matches elements of two FiniteOrthGroups by
    characteristic polynomial (the O(n) class invariant) and certifies each
    matched pair with an even signed-permutation conjugator when the elements
    are diagonal.  With a finite ambient group (FiniteOrthGroup or
    FiniteAffineGroup) its conjugacy classes are tabulated by brute force and
    both groups must be contained in it.
    """
    e1, e2 = list(g1.elements), list(g2.elements)
    if len(e1) != len(e2):
        return None
    if ambient == "orthogonal":
        inv1: dict = {}
        inv2: dict = {}
        for x in e1:
            inv1.setdefault(char_poly(x), []).append(x)
        for x in e2:
            inv2.setdefault(char_poly(x), []).append(x)
        if {k: len(v) for k, v in inv1.items()} != {k: len(v) for k, v in inv2.items()}:
            return None
        pairs = []
        for key in sorted(inv1):
            for a, b in zip(inv1[key], inv2[key]):
                _even_signed_perm_conjugator(a, b)  # certificate when diagonal
                pairs.append((a, b))
        return pairs
    if isinstance(ambient, FiniteOrthGroup):
        elements = ambient.elements
        mul, inv = mat_mul, inverse
        gens = ambient.elements
    elif isinstance(ambient, FiniteAffineGroup):
        elements = ambient.elements
        mul, inv = aff_mul, aff_inv
        gens = ambient.generators
    else:
        raise TypeError("ambient must be 'orthogonal', a FiniteOrthGroup, or a FiniteAffineGroup")
    eset = set(elements)
    for x in e1 + e2:
        if x not in eset:
            raise AmbientMismatch(f"element not in ambient group: {x}")
    pairs = []
    for cls in _conjugacy_classes(elements, mul, inv, gens):
        m1 = sorted(x for x in e1 if x in cls)
        m2 = sorted(x for x in e2 if x in cls)
        if len(m1) != len(m2):
            return None
        pairs.extend(zip(m1, m2))
    return pairs


def fixed_dim(mats) -> int:
    """Dimension of the common 1-eigenspace, the intersection of ker(M - I)."""
    mats = [mat(m) for m in mats]
    if not mats:
        raise ValueError("need at least one matrix to know the dimension")
    n = len(mats[0])
    rows = []
    for m in mats:
        rows.extend(mat_sub(m, identity(n)))
    return n - rank(rows)


def subgroups(g: FiniteOrthGroup) -> list[tuple[Mat, ...]]:
    """Every subgroup, by exhaustive scan over subsets closed under products.

    Feasible for the catalog orders; guarded by a 2^16-subset bound.
    """
    if 2 ** (g.order - 1) > 65536:
        raise ValueError("subgroup scan bound exceeded (2^16 subsets)")
    idm = mat(identity(g.dim))
    others = [m for m in g.elements if m != idm]
    out = []
    for r in range(len(others) + 1):
        for combo in combinations(others, r):
            subset = frozenset(combo) | {idm}
            if all(mat_mul(a, b) in subset for a in subset for b in subset):
                out.append(tuple(sorted(subset)))
    return out


def max_order_with_fixed_dim(g: FiniteOrthGroup, d: int) -> tuple[int, list[tuple[Mat, ...]]]:
    """Largest subgroup order with common fixed space of dimension >= d.

    Realizes the maximal intersection with conjugates of a block subgroup
    stabilizing a d-frame: such a conjugate contains exactly the elements
    fixing the frame pointwise.
    """
    if not 0 <= d <= g.dim:
        raise ValueError(f"d out of range 0..{g.dim}")
    best = 0
    witnesses: list[tuple[Mat, ...]] = []
    for s in subgroups(g):
        if fixed_dim(s) >= d:
            if len(s) > best:
                best, witnesses = len(s), [s]
            elif len(s) == best:
                witnesses.append(s)
    return best, witnesses


def _diag_group_codewords(s) -> frozenset:
    words = []
    for m in s:
        dv = _diag_vector(m)
        if dv is None or any(x not in (1, -1) for x in dv):
            raise UnsupportedGroupClass("signed-diagonal elements required")
        words.append(tuple(0 if x == 1 else 1 for x in dv))
    return frozenset(words)


def _perm_conjugate_words(words: frozenset, sigma) -> frozenset:
    return frozenset(tuple(w[sigma[i]] for i in range(len(sigma))) for w in words)


def _eigenspace_signature(words: frozenset):
    """Column-class sizes of the binary code: joint 1/-1 eigenspace dimensions."""
    n = len(next(iter(words)))
    cols = [tuple(w[i] for w in sorted(words)) for i in range(n)]
    sizes: dict[tuple, int] = {}
    for c in cols:
        sizes[c] = sizes.get(c, 0) + 1
    return tuple(sorted(sizes.values()))


def m_number_finite_H(g: FiniteOrthGroup, h: FiniteOrthGroup) -> int:
    """Max order of a subgroup of g conjugate in O(n) to a subgroup of h.

    Catalog scope: signed-diagonal elementary abelian 2-groups, where
    orthogonal conjugacy of subgroups coincides with conjugacy by coordinate
    permutations (joint eigenspaces are coordinate subspaces and the
    eigenspace dimension signature is the matching invariant).
    """
    if not (g.is_signed_diagonal() and h.is_signed_diagonal()):
        raise UnsupportedGroupClass("signed-diagonal groups required")
    n = g.dim
    h_subs = [_diag_group_codewords(s) for s in subgroups(h)]
    best = 0
    for s in subgroups(g):
        if len(s) <= best:
            continue
        words = _diag_group_codewords(s)
        sig = _eigenspace_signature(words)
        candidates = [hw for hw in h_subs
                      if len(hw) == len(words) and _eigenspace_signature(hw) == sig]
        if not candidates:
            continue
        for sigma in permutations(range(n)):
            conj = _perm_conjugate_words(words, sigma)
            if conj in candidates:
                best = len(s)
                break
    return best


def conjugate_in_orthogonal(g1: FiniteOrthGroup, g2: FiniteOrthGroup):
    """Decide conjugacy of two finite groups inside O(n).

    Compares the multiset of (subgroup order, common fixed dimension) over
    all subgroups, then joint-eigenspace signatures for signed-diagonal
    elementary abelian 2-groups; on a mismatch returns ProvablyNot with the
    witnessing invariant.  When all invariants agree, searches for a signed
    permutation conjugator; Inconclusive is reported honestly if none is
    found in that search space.
    """
    if g1.dim != g2.dim or g1.order != g2.order:
        raise ValueError("groups must have the same dimension and order")
    prof1 = sorted((len(s), fixed_dim(s)) for s in subgroups(g1))
    prof2 = sorted((len(s), fixed_dim(s)) for s in subgroups(g2))
    if prof1 != prof2:
        c1 = {p: prof1.count(p) for p in set(prof1) | set(prof2)}
        c2 = {p: prof2.count(p) for p in set(prof1) | set(prof2)}
        diff = next(p for p in sorted(c1) if c1[p] != c2[p])
        witness = (f"subgroup profile differs at (order={diff[0]}, fixed_dim={diff[1]}): "
                   f"{c1[diff]} subgroup(s) in the first group vs {c2[diff]} in the second")
        return ProvablyNot(witness=witness)
    if g1.is_signed_diagonal() and g2.is_signed_diagonal():
        w1 = _diag_group_codewords(g1.elements)
        w2 = _diag_group_codewords(g2.elements)
        if _eigenspace_signature(w1) != _eigenspace_signature(w2):
            return ProvablyNot(witness="joint eigenspace dimension signatures differ: "
                                       f"{_eigenspace_signature(w1)} vs {_eigenspace_signature(w2)}")
        n = g1.dim
        for sigma in permutations(range(n)):
            if _perm_conjugate_words(w1, sigma) == w2:
                rows = [[Fraction(0)] * n for _ in range(n)]
                for i in range(n):
                    rows[i][sigma[i]] = Fraction(1)
                return Conjugate(conjugator=mat(rows))
        return Inconclusive(detail="invariants match but no permutation conjugator exists "
                                   "in the signed-permutation search space")
    return Inconclusive(detail="conjugator search implemented for signed-diagonal groups only")


def ambient_core(g: FiniteOrthGroup) -> FiniteOrthGroup:
    """G intersected with {+-I}: the common core of all conjugates of G.

    Any element lying in every conjugate of a finite group has a finite
    conjugacy class in the ambient orthogonal group, which forces it into
    the center {+-I}.
    """
    n = g.dim
    idm = mat(identity(n))
    neg = mat(tuple(tuple(-x for x in row) for row in idm))
    kept = [m for m in g.elements if m in (idm, neg)]
    return FiniteOrthGroup(kept)


@dataclass(frozen=True)
class SphereStratum:
    """One component family of maximal-isotropy points on the unit sphere.

    dimension of the stratum is fixed_dim - 1; quotient_kind records whether
    some group element acts as -Id on the fixed subspace (projective quotient).
    For fixed_dim == 1 `components` is the point count after identification.
    """

    fixed_dim: int
    quotient_kind: str  # "projective" | "sphere"
    components: int


def sphere_strata(g: FiniteOrthGroup) -> list[SphereStratum]:
    """Maximal-isotropy strata of the unit sphere modulo a signed-diagonal group."""
    if not g.is_signed_diagonal():
        raise UnsupportedGroupClass("signed-diagonal groups required")
    n = g.dim
    subs = subgroups(g)
    best = 0
    for s in subs:
        if fixed_dim(s) >= 1:
            best = max(best, len(s))
    if best <= 1:
        return []

    def fix_coords(s) -> tuple[int, ...]:
        return tuple(i for i in range(n) if all(m[i][i] == 1 for m in s))

    seen: set[tuple[int, ...]] = set()
    out = []
    for s in subs:
        if len(s) != best:
            continue
        coords = fix_coords(s)
        if not coords or coords in seen:
            continue
        # the subgroup must be saturated: exactly the elements acting as the
        # identity on its fixed subspace, otherwise the stratum is empty
        saturated = [m for m in g.elements if all(m[i][i] == 1 for i in coords)]
        if len(saturated) != len(s):
            continue
        seen.add(coords)
        minus_id = any(all(m[i][i] == -1 for i in coords) for m in g.elements)
        kind = "projective" if minus_id else "sphere"
        d = len(coords)
        components = 1 if d >= 2 else (1 if minus_id else 2)
        out.append(SphereStratum(fixed_dim=d, quotient_kind=kind, components=components))
    out.sort(key=lambda s: (-s.fixed_dim, s.quotient_kind))
    return out
