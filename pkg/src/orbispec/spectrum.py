"""Eigenvalue multiplicities on k-forms of flat orbifold quotients.

The multiplicity of the eigenvalue 4*pi^2*mu on k-forms of R^n / Gamma is an
average over the point group of exterior-power traces weighted by cyclotomic
sums over fixed dual-lattice shell vectors.  Everything is computed in exact
rational/cyclotomic arithmetic; mu is always the normalized rational
parameter, never the eigenvalue itself.

`oracle_multiplicity` recomputes the same number by an independent route: it
builds the explicit matrix of every coset representative acting on the
Fourier eigenbasis of the covering torus and takes the exact trace of the
averaged projection.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .crystal import CrystalGroup
from .exact import (
    CyclotomicSum,
    IntMat,
    cyclo_eval,
    det,
    dot,
    mat_vec,
    transpose,
)
from .lattice import dual, enumerate_shell, norm_values, shells_up_to


class IntegralityFailure(ArithmeticError):
    """The multiplicity formula produced a non-integer; the group data is corrupt."""


@dataclass(frozen=True)
class SpectrumTable:
    """Multiplicities d for every dual norm value mu <= cutoff (zeros included)."""

    k: int
    cutoff: Fraction
    entries: tuple[tuple[Fraction, int], ...]

    def as_dict(self) -> dict[Fraction, int]:
        return dict(self.entries)


@dataclass(frozen=True)
class FirstDifference:
    """Smallest mu where two spectra disagree, with both multiplicities."""

    mu: Fraction
    d_a: int
    d_b: int


def trace_k(p: IntMat, k: int) -> int:
    """Trace of the induced action on alternating k-forms.

    Equals the sum of the principal k x k minors (a coefficient of the
    characteristic polynomial), hence basis independent and computable from
    the integer lattice-coordinate matrix. trace_k(P, 0) = 1 and
    trace_k(P, n) = det(P).
    """
    n = len(p)
    if not 0 <= k <= n:
        raise ValueError(f"form degree {k} out of range 0..{n}")
    total = 0
    for rows in combinations(range(n), k):
        sub = tuple(tuple(p[i][j] for j in rows) for i in rows)
        total += int(det(sub))
    return total


def _fixed_filter(p: IntMat, shell) -> list:
    """Shell vectors fixed by the dual action of P (i.e. P^T m = m)."""
    pt = transpose(p)
    return [m for m in shell if mat_vec(pt, m) == tuple(m)]


def _phase_sum(fixed, transl) -> CyclotomicSum:
    s = CyclotomicSum()
    for m in fixed:
        s.add_root(dot(m, transl))
    return s


def e_term(g: CrystalGroup, rep_index: int, mu) -> CyclotomicSum:
    """Cyclotomic sum over dual shell vectors fixed by one coset representative.

    The exponent <v, b> equals m . c: dual coordinates dotted with the
    lattice-coordinate translation (valid on fixed vectors).
    """
    rep = g.reps[rep_index]
    shell = enumerate_shell(dual(g.lattice), mu)
    return _phase_sum(_fixed_filter(rep.linear, shell), rep.transl)


def _multiplicity_from_shell(g: CrystalGroup, k: int, shell) -> int:
    total = Fraction(0)
    for rep in g.reps:
        tr = trace_k(rep.linear, k)
        if tr == 0:
            continue
        value = cyclo_eval(_phase_sum(_fixed_filter(rep.linear, shell), rep.transl))
        total += tr * value
    d = total / len(g.reps)
    if d.denominator != 1 or d < 0:
        raise IntegralityFailure(f"formula value {d} is not a nonnegative integer")
    return int(d)


def multiplicity(g: CrystalGroup, k: int, mu) -> int:
    """Multiplicity of the eigenvalue 4*pi^2*mu on k-forms of the quotient."""
    shell = enumerate_shell(dual(g.lattice), mu)
    return _multiplicity_from_shell(g, k, shell)


def spectrum_table(g: CrystalGroup, k: int, cutoff) -> SpectrumTable:
    """Multiplicities for every dual norm value up to the cutoff.

    Zero multiplicities are recorded explicitly so comparisons can tell
    "eigenvalue absent" from "not computed".
    """
    cutoff = Fraction(cutoff)
    buckets = shells_up_to(dual(g.lattice), cutoff)
    entries = []
    for mu in sorted(buckets):
        entries.append((mu, _multiplicity_from_shell(g, k, buckets[mu])))
    return SpectrumTable(k=k, cutoff=cutoff, entries=tuple(entries))


def compare(g_a: CrystalGroup, g_b: CrystalGroup, k: int, cutoff) -> FirstDifference | None:
    """First spectral difference up to the cutoff, or None when equal.

    Iterates over the union of both dual norm-value sets, so candidate
    eigenvalues present in only one lattice are still compared.
    """
    ta = spectrum_table(g_a, k, cutoff).as_dict()
    tb = spectrum_table(g_b, k, cutoff).as_dict()
    for mu in sorted(set(ta) | set(tb)):
        da = ta.get(mu, 0)
        db = tb.get(mu, 0)
        if da != db:
            return FirstDifference(mu=mu, d_a=da, d_b=db)
    return None


def oracle_multiplicity(g: CrystalGroup, k: int, mu) -> int:
    """Brute-force multiplicity via the Fourier eigenbasis of the covering torus.

    Builds the matrix of each coset representative acting by pullback on the
    basis {e^(2 pi i <v,x>) dx_I : |v|^2 = mu, |I| = k}, sums them, and takes
    the exact trace of the resulting projection (times the group order).
    Intended for small mu; must agree with `multiplicity` everywhere.
    """
    n = g.dim
    if not 0 <= k <= n:
        raise ValueError(f"form degree {k} out of range 0..{n}")
    shell = enumerate_shell(dual(g.lattice), mu)
    pos = {m: i for i, m in enumerate(shell)}
    subsets = list(combinations(range(n), k))
    sub_pos = {s: i for i, s in enumerate(subsets)}

    # summed matrix of all pullback operators, stored sparsely
    summed: dict[tuple[int, int], CyclotomicSum] = {}
    for rep in g.reps:
        p = rep.linear
        pt = transpose(p)
        minors = {}
        for src in subsets:
            for dst in subsets:
                sub = tuple(tuple(p[i][j] for j in dst) for i in src)
                minors[(src, dst)] = int(det(sub))
        for m in shell:
            image = tuple(mat_vec(pt, m))
            phase = dot(m, rep.transl)
            for src in subsets:
                col = (pos[m], sub_pos[src])
                for dst in subsets:
                    coeff = minors[(src, dst)]
                    if coeff == 0:
                        continue
                    row = (pos[image], sub_pos[dst])
                    key = (row[0] * len(subsets) + row[1], col[0] * len(subsets) + col[1])
                    acc = summed.get(key)
                    if acc is None:
                        acc = CyclotomicSum()
                        summed[key] = acc
                    acc.add_root(phase, coeff)

    trace = CyclotomicSum()
    dim_basis = len(shell) * len(subsets)
    for b in range(dim_basis):
        entry = summed.get((b, b))
        if entry is not None:
            for q, c in entry.coeffs.items():
                trace.add_root(q, c)
    d = cyclo_eval(trace) / len(g.reps)
    if d.denominator != 1 or d < 0:
        raise IntegralityFailure(f"oracle value {d} is not a nonnegative integer")
    return int(d)


def union_norm_values(g_a: CrystalGroup, g_b: CrystalGroup, cutoff) -> list[Fraction]:
    """Sorted union of both groups' dual norm values up to the cutoff."""
    va = set(norm_values(dual(g_a.lattice), cutoff))
    vb = set(norm_values(dual(g_b.lattice), cutoff))
    return sorted(va | vb)
