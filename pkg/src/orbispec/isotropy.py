"""Fixed-point sets, stabilizers, maximal isotropy, and singular strata.

The singular set of R^n / Gamma is the union of the fixed sets of torsion
elements.  For n <= 3 these are points and lines (planes are detected but not
analyzed further).  Strata are computed per Gamma-orbit of fixed subspaces:
a line's image in the quotient is a circle when its setwise stabilizer acts
only by translations, and an interval when some element reverses it; points
where the stabilizer jumps (crossings, mirror points) split off as point
strata and cut the one-dimensional strata into open segments.  All lengths
are reported squared (rational, via the Gram matrix).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct
from math import ceil, gcd

from .crystal import AffineIsometry, CrystalGroup, validate
from .exact import (
    IntMat,
    IntVec,
    Vec,
    dot,
    frac_gcd,
    identity,
    is_integral,
    kernel_saturated,
    mat_sub,
    mat_vec,
    rank,
    reduce_mod1,
    solve_affine,
    vec,
    vec_add,
    vec_neg,
    vec_sub,
)


class UnsupportedDimension(ValueError):
    """Exhaustive strata analysis is implemented for n <= 3 only."""


@dataclass(frozen=True)
class AffineSubspace:
    """Base point plus linearly independent integer directions, lattice coordinates."""

    base: Vec
    directions: tuple[IntVec, ...]

    @property
    def dim(self) -> int:
        return len(self.directions)


@dataclass(frozen=True)
class IsotropyType:
    """Isomorphism type of a finite stabilizer, named per its structure."""

    order: int
    kind: str  # "cyclic" | "klein" | "dihedral" | "other"
    element_orders: tuple[int, ...]

    @property
    def name(self) -> str:
        if self.kind == "cyclic":
            return f"Z{self.order}"
        if self.kind == "klein":
            return "Z2xZ2"
        if self.kind == "dihedral":
            return f"D{self.order // 2}"
        return f"Other({self.order},{list(self.element_orders)})"

    def __str__(self) -> str:
        return self.name

    @classmethod
    def cyclic(cls, n: int) -> "IsotropyType":
        orders = tuple(sorted(n // gcd(n, j) for j in range(n)))
        return cls(order=n, kind="cyclic", element_orders=orders)

    @classmethod
    def klein(cls) -> "IsotropyType":
        return cls(order=4, kind="klein", element_orders=(1, 2, 2, 2))

    @classmethod
    def dihedral(cls, m: int) -> "IsotropyType":
        # dihedral group with 2m elements
        rot = [m // gcd(m, j) for j in range(m)]
        return cls(order=2 * m, kind="dihedral",
                   element_orders=tuple(sorted(rot + [2] * m)))


@dataclass(frozen=True)
class Stratum:
    isotropy: IsotropyType
    dim: int
    topology: str | None  # "point" | "circle" | "segment"; None for dim-2 detection
    sq_length: Fraction | None
    count: int


# ---------------------------------------------------------------------------
# element-level operations

def fixed_set(g: CrystalGroup, element: AffineIsometry) -> AffineSubspace | None:
    """Solution set of P x + c = x, or None when the element acts freely."""
    n = g.dim
    m = mat_sub(identity(n), element.linear)
    sol = solve_affine(m, element.transl)
    if sol is None:
        return None
    base, kern = sol
    return AffineSubspace(base=base, directions=tuple(kern))


def stabilizer(g: CrystalGroup, point) -> tuple[list[AffineIsometry], IsotropyType]:
    """All group elements fixing the point, with the type of their image in F.

    For each coset representative the lattice translation that could fix x is
    the single candidate lambda = (I - P) x - c; the element is in the
    stabilizer exactly when lambda is integral.  Distinct stabilizer elements
    therefore have distinct linear parts (the map to F is injective).
    """
    x = vec(point)
    n = g.dim
    elems = []
    for rep in g.reps:
        lam = vec_sub(mat_vec(mat_sub(identity(n), rep.linear), x), rep.transl)
        if is_integral(lam):
            elems.append(AffineIsometry(rep.linear, vec_add(rep.transl, lam)))
    return elems, classify_linear_group([e.linear for e in elems])


def _matrix_order(p: IntMat, cap: int = 64) -> int:
    from .exact import mat_mul
    n = len(p)
    idm = identity(n)
    q = p
    for k in range(1, cap + 1):
        if q == idm:
            return k
        q = mat_mul(q, p)
    raise ValueError("element order exceeds cap; group data is corrupt")


def classify_linear_group(mats: list[IntMat]) -> IsotropyType:
    """Classify a finite matrix group by order and element-order multiset.

    Groups of order <= 12 are distinguished by (order, abelian?, element
    orders); dihedral vs cyclic is decided by element orders.  Anything not
    recognized is reported as Other rather than misnamed.
    """
    from .exact import mat_mul
    order = len(mats)
    if order == 0:
        raise ValueError("empty stabilizer; the identity is always present")
    orders = sorted(_matrix_order(p) for p in mats)
    if max(orders) == order:
        return IsotropyType(order=order, kind="cyclic", element_orders=tuple(orders))
    abelian = all(mat_mul(a, b) == mat_mul(b, a) for a in mats for b in mats)
    if order == 4 and orders == [1, 2, 2, 2]:
        return IsotropyType(order=4, kind="klein", element_orders=(1, 2, 2, 2))
    if order % 2 == 0 and not abelian:
        m = order // 2
        by_order = {p for p in mats if _matrix_order(p) == m}
        for r in by_order:
            from .exact import int_inverse
            rinv = int_inverse(r)
            powers = set()
            q = identity(len(r))
            for _ in range(m):
                powers.add(q)
                q = mat_mul(q, r)
            outside = [s for s in mats if s not in powers]
            if all(_matrix_order(s) == 2 and mat_mul(mat_mul(s, r), s) == rinv
                   for s in outside):
                return IsotropyType(order=order, kind="dihedral",
                                    element_orders=tuple(orders))
    return IsotropyType(order=order, kind="other", element_orders=tuple(orders))


# ---------------------------------------------------------------------------
# window scan: every fixed subspace class modulo the lattice

def _window_radii(g: CrystalGroup, rep: AffineIsometry) -> list[int]:
    # for x in [0,1)^n, lambda = (I-P)x - c is bounded by row sums of |I-P|
    # plus the largest |c_i|
    n = g.dim
    m = mat_sub(identity(n), rep.linear)
    cmax = max((abs(ci) for ci in rep.transl), default=Fraction(0))
    return [ceil(sum(abs(x) for x in row) + cmax) for row in m]


@dataclass
class _SubspaceClass:
    base: Vec
    directions: tuple[IntVec, ...]
    covectors: tuple[IntVec, ...]  # saturated integer covectors vanishing on the span

    @property
    def dim(self) -> int:
        return len(self.directions)


def _covectors(directions: tuple[IntVec, ...], n: int) -> tuple[IntVec, ...]:
    if not directions:
        return tuple(identity(n))
    return tuple(kernel_saturated(list(directions)))


def _same_span(a: tuple[IntVec, ...], b: tuple[IntVec, ...]) -> bool:
    if len(a) != len(b):
        return False
    if not a:
        return True
    rows = [list(v) for v in a]
    r = rank(rows)
    for v in b:
        if rank(rows + [list(v)]) != r:
            return False
    return True


def _in_span_mod_lattice(cls: _SubspaceClass, w) -> bool:
    # w in span(directions) + Z^n  iff  every saturated covector pairs integrally
    return all(Fraction(dot(y, w)).denominator == 1 for y in cls.covectors)


def _class_matches(cls: _SubspaceClass, sub: AffineSubspace) -> bool:
    return (_same_span(cls.directions, sub.directions)
            and _in_span_mod_lattice(cls, vec_sub(sub.base, cls.base)))


def _collect_classes(g: CrystalGroup) -> list[_SubspaceClass]:
    """All fixed subspaces of torsion elements, deduplicated modulo the lattice."""
    n = g.dim
    idm = identity(n)
    classes: list[_SubspaceClass] = []
    for rep in g.reps:
        if rep.linear == idm:
            continue
        m = mat_sub(idm, rep.linear)
        radii = _window_radii(g, rep)
        for lam in iproduct(*(range(-r, r + 1) for r in radii)):
            sol = solve_affine(m, vec_add(rep.transl, vec(lam)))
            if sol is None:
                continue
            sub = AffineSubspace(base=sol[0], directions=tuple(sol[1]))
            if not any(_class_matches(c, sub) for c in classes):
                classes.append(_SubspaceClass(base=sub.base,
                                              directions=sub.directions,
                                              covectors=_covectors(sub.directions, n)))
    return classes


def _pointwise_stabilizer(g: CrystalGroup, cls: _SubspaceClass) -> list[AffineIsometry]:
    """Elements fixing the subspace pointwise: P d = d on directions, lambda integral."""
    n = g.dim
    out = []
    for rep in g.reps:
        if any(mat_vec(rep.linear, d) != tuple(d) for d in cls.directions):
            continue
        lam = vec_sub(mat_vec(mat_sub(identity(n), rep.linear), cls.base), rep.transl)
        if is_integral(lam):
            out.append(AffineIsometry(rep.linear, vec_add(rep.transl, lam)))
    return out


# ---------------------------------------------------------------------------
# lines: parameters, setwise actions, orbits

def _shift_param(cls: _SubspaceClass, w) -> Fraction | None:
    """Rational t with w - t*d in Z^n for the line's primitive direction d.

    Valid t form a coset t0 + Z (the direction is primitive), so w_i0 - t*d_i0
    hits each residue class modulo |d_i0| exactly once; scanning |d_i0|
    consecutive integers finds the solution whenever one exists.
    """
    d = cls.directions[0]
    if not _in_span_mod_lattice(cls, w):
        return None
    i0 = next(i for i, di in enumerate(d) if di != 0)
    wi = Fraction(w[i0])
    di = d[i0]
    k0 = wi.__floor__()
    for k in range(k0, k0 + abs(di)):
        t = (wi - k) / di
        if all(Fraction(w[j] - t * d[j]).denominator == 1 for j in range(len(d))):
            return t
    return None


@dataclass
class _LineData:
    cls: _SubspaceClass
    stab_type: IsotropyType
    step: Fraction               # generator of the induced translation group on params
    mirrors: tuple[Fraction, ...]  # reversing shift parameters (empty if none)
    sq_dir: Fraction             # d^T G d for the primitive direction


def _line_data(g: CrystalGroup, cls: _SubspaceClass) -> _LineData:
    d = cls.directions[0]
    sq_dir = g.lattice.norm(d)
    trans: list[Fraction] = [Fraction(1)]  # lattice translation along the primitive direction
    mirrors: list[Fraction] = []
    neg_d = vec_neg(d)
    for rep in g.reps:
        pd = mat_vec(rep.linear, d)
        if pd == tuple(d):
            eps = 1
        elif pd == neg_d:
            eps = -1
        else:
            continue
        w = vec_sub(vec_add(mat_vec(rep.linear, cls.base), rep.transl), cls.base)
        s = _shift_param(cls, w)
        if s is None:
            continue
        if eps == 1:
            trans.append(s)
        else:
            mirrors.append(s)
    if len(mirrors) > 1:
        trans.extend(m - mirrors[0] for m in mirrors[1:])
    step = frac_gcd(trans)
    stab = _pointwise_stabilizer(g, cls)
    return _LineData(cls=cls, stab_type=classify_linear_group([e.linear for e in stab]),
                     step=step, mirrors=tuple(mirrors), sq_dir=sq_dir)


def _apply_to_class(rep: AffineIsometry, cls: _SubspaceClass) -> AffineSubspace:
    return AffineSubspace(base=vec_add(mat_vec(rep.linear, cls.base), rep.transl),
                          directions=tuple(tuple(mat_vec(rep.linear, d)) for d in cls.directions))


def _orbits(g: CrystalGroup, classes: list[_SubspaceClass]) -> list[list[int]]:
    """Partition subspace classes into Gamma-orbits."""
    parent = list(range(len(classes)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[rj] = ri

    for i, cls in enumerate(classes):
        for rep in g.reps:
            image = _apply_to_class(rep, cls)
            # image directions may need re-saturation in sign only; spans match
            for j, other in enumerate(classes):
                if other.dim == cls.dim and _same_span(other.directions, image.directions) \
                        and _in_span_mod_lattice(other, vec_sub(image.base, other.base)):
                    union(i, j)
                    break
            else:
                raise AssertionError("orbit image missing from class list; window too small")
    groups: dict[int, list[int]] = {}
    for i in range(len(classes)):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


# ---------------------------------------------------------------------------
# special points

def _point_orbit(g: CrystalGroup, p: Vec) -> frozenset:
    """Gamma-orbit of a point on the torus (coordinates mod 1)."""
    start = reduce_mod1(p)
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for x in frontier:
            for rep in g.reps:
                y = reduce_mod1(rep.apply(x))
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(seen)


def _line_crossings(a: _SubspaceClass, b: _SubspaceClass) -> list[Vec]:
    """Intersection points of line class a with all lattice translates of b."""
    da, db = a.directions[0], b.directions[0]
    if _same_span((da,), (db,)):
        return []
    n = len(da)
    rows = [(Fraction(da[i]), Fraction(-db[i])) for i in range(n)]
    radii = [ceil(abs(a.base[i] - b.base[i]) + abs(da[i]) + abs(db[i])) for i in range(n)]
    points = []
    for lam in iproduct(*(range(-r, r + 1) for r in radii)):
        rhs = vec_add(vec_sub(b.base, a.base), vec(lam))
        sol = solve_affine(rows, rhs)
        if sol is None:
            continue
        t = sol[0][0]
        points.append(reduce_mod1(vec_add(a.base, tuple(t * x for x in da))))
    return points


def _param_on_line(cls: _SubspaceClass, p: Vec) -> Fraction | None:
    return _shift_param(cls, vec_sub(p, cls.base))


# ---------------------------------------------------------------------------
# the inventory

def singular_strata(g: CrystalGroup) -> list[Stratum]:
    """Full stratum inventory of the singular set (n <= 3).

    Returns aggregated strata: (isotropy type, dimension, topology, squared
    length, component count).  Dimension-2 fixed sets are detected and
    counted but not analyzed further.
    """
    n = g.dim
    if n > 3:
        raise UnsupportedDimension(n)
    validate(g)
    classes = _collect_classes(g)
    line_idx = [i for i, c in enumerate(classes) if c.dim == 1]
    point_idx = [i for i, c in enumerate(classes) if c.dim == 0]
    plane_idx = [i for i, c in enumerate(classes) if c.dim == 2]

    line_data = {i: _line_data(g, classes[i]) for i in line_idx}

    # candidate special points: isolated fixes, line crossings, mirror points
    candidates: list[Vec] = []
    for i in point_idx:
        candidates.append(reduce_mod1(classes[i].base))
    for ii, i in enumerate(line_idx):
        for j in line_idx[ii + 1:]:
            candidates.extend(_line_crossings(classes[i], classes[j]))
    for i in line_idx:
        data = line_data[i]
        if data.mirrors:
            m0 = data.mirrors[0] / 2
            d = classes[i].directions[0]
            for t in (m0, m0 + data.step / 2):
                candidates.append(reduce_mod1(vec_add(classes[i].base,
                                                      tuple(t * x for x in d))))

    # keep the genuinely special ones: stabilizer bigger than every incident line's
    special: dict[Vec, int] = {}
    for p in candidates:
        if p in special:
            continue
        elems, _ = stabilizer(g, p)
        incident_orders = [line_data[i].stab_type.order for i in line_idx
                           if _param_on_line(classes[i], p) is not None]
        threshold = max(incident_orders, default=1)
        if len(elems) > threshold:
            special[p] = len(elems)

    # group special points into orbits
    point_orbits: list[frozenset] = []
    assigned: set = set()
    for p in special:
        if p in assigned:
            continue
        orbit = _point_orbit(g, p)
        assigned |= orbit
        point_orbits.append(orbit)

    raw: list[tuple[IsotropyType, int, str | None, Fraction | None]] = []

    for orbit in point_orbits:
        rep_point = min(orbit)
        _, t = stabilizer(g, rep_point)
        raw.append((t, 0, "point", None))

    # one-dimensional strata per line orbit
    special_points_all = set().union(*point_orbits) if point_orbits else set()
    if line_idx:
        line_classes = [classes[i] for i in line_idx]
        for orbit in _orbits(g, line_classes):
            rep_i = line_idx[orbit[0]]
            data = line_data[rep_i]
            cls = classes[rep_i]
            g_step = data.step
            params = set()
            for p in special_points_all:
                t = _param_on_line(cls, p)
                if t is not None:
                    params.add(t)
            if data.mirrors:
                m0 = data.mirrors[0] / 2
                half = g_step / 2
                folded = set()
                for t in params:
                    u = (t - m0) % g_step
                    folded.add(m0 + (u if u <= half else g_step - u))
                folded.add(m0)
                folded.add(m0 + half)
                pts = sorted(folded)
                for a, b in zip(pts, pts[1:]):
                    raw.append((data.stab_type, 1, "segment", (b - a) ** 2 * data.sq_dir))
            else:
                folded = sorted({t % g_step for t in params})
                if not folded:
                    raw.append((data.stab_type, 1, "circle", g_step ** 2 * data.sq_dir))
                else:
                    cyc = folded + [folded[0] + g_step]
                    for a, b in zip(cyc, cyc[1:]):
                        raw.append((data.stab_type, 1, "segment", (b - a) ** 2 * data.sq_dir))

    if plane_idx:
        plane_classes = [classes[i] for i in plane_idx]
        for orbit in _orbits(g, plane_classes):
            rep_i = plane_idx[orbit[0]]
            stab = _pointwise_stabilizer(g, classes[rep_i])
            t = classify_linear_group([e.linear for e in stab])
            raw.append((t, 2, None, None))

    # aggregate equal strata
    counts: dict[tuple, int] = {}
    for key in raw:
        counts[key] = counts.get(key, 0) + 1
    out = [Stratum(isotropy=t, dim=d, topology=topo, sq_length=sq, count=c)
           for (t, d, topo, sq), c in counts.items()]
    out.sort(key=lambda s: (s.dim, -s.isotropy.order, s.isotropy.name,
                            s.sq_length if s.sq_length is not None else Fraction(0)))
    return out


def max_isotropy(g: CrystalGroup) -> tuple[int, list[IsotropyType]]:
    """Maximal stabilizer order over all points, with the types realizing it."""
    strata = singular_strata(g)
    if not strata:
        return 1, [IsotropyType(order=1, kind="cyclic", element_orders=(1,))]
    top = max(s.isotropy.order for s in strata)
    types = []
    for s in strata:
        if s.isotropy.order == top and s.isotropy not in types:
            types.append(s.isotropy)
    return top, types
