"""Exact degree-2 linear algebra on Pluecker determinants and the SAGBI certificate.

The field is the rationals.  Vectors are sparse ``dict``s with integer
entries; elimination is fraction-free, dividing out the content after every
step so entries stay small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Hashable, Iterable, Mapping, Sequence

from .exceptions import InstanceTooLarge
from .groebner import (
    BracketRing,
    GbReport,
    Monomial,
    buchberger_check,
    dim2_image,
    g_a_generators,
    kernel_binomials_deg2,
    mono,
    revlex_key,
    std_monomials_deg2,
)
from .matchfield import (
    Composition,
    GridMonomial,
    Perm,
    SymbolicWeight,
    check_subset,
    determinant_terms,
    is_eligible,
    lambda_eval,
    r_subsets,
    weight_vector,
)
from .matchfield import monomial_weight as _grid_weight

DEFAULT_KERNEL_LIMITS = {2: 6, 3: 6}

SCOPE_NOTE = (
    "degree-2 certificate: quadratic Groebner basis of the matching field ideal plus "
    "equality of degree-2 parts; no computation in degree >= 3"
)


class XPolynomial:
    """Polynomial in the grid variables with rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[GridMonomial, Rational] | None = None):
        self.terms: dict[GridMonomial, Rational] = {m: c for m, c in (terms or {}).items() if c != 0}

    @property
    def degree(self) -> int:
        return max((m.degree for m in self.terms), default=-1)

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, XPolynomial) and self.terms == other.terms

    def __add__(self, other: "XPolynomial") -> "XPolynomial":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return XPolynomial(out)

    def __neg__(self) -> "XPolynomial":
        return XPolynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "XPolynomial") -> "XPolynomial":
        return self + (-other)

    def __mul__(self, other: "XPolynomial | int | Fraction") -> "XPolynomial":
        if not isinstance(other, XPolynomial):
            return XPolynomial({m: c * other for m, c in self.terms.items()})
        out: dict[GridMonomial, Rational] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1 * m2
                out[m] = out.get(m, 0) + c1 * c2
        return XPolynomial(out)

    __rmul__ = __mul__

    def evaluate(self, point: Mapping[tuple[int, int], Rational]) -> Rational:
        total: Rational = 0
        for m, c in self.terms.items():
            val = c
            for pos in m.factors:
                val *= point.get(pos, 0)
            total += val
        return total

    def __repr__(self) -> str:
        if not self.terms:
            return "XPolynomial(0)"
        parts = [f"{c}*{m}" for m, c in sorted(self.terms.items(), key=lambda t: t[0].factors)]
        return "XPolynomial(" + " + ".join(parts) + ")"


def det_polynomial(r: int, I: Sequence[int]) -> XPolynomial:
    """``det`` of the ``r x r`` submatrix of the grid on columns ``I``."""
    I = tuple(I)
    if len(I) != r:
        raise ValueError(f"|I| = {len(I)} != r = {r}")
    return _det(check_subset(I, max(I)))


@lru_cache(maxsize=None)
def _det(I: tuple[int, ...]) -> XPolynomial:
    return XPolynomial({m: s for s, m in determinant_terms(I)})


def monomial_weight(m: GridMonomial, a: Composition, r: int | None = None) -> SymbolicWeight:
    """Symbolic weight of ``m`` under the block diagonal matrix of ``a``.

    ``r`` defaults to the largest row used by ``m`` (at least 2).
    """
    if r is None:
        r = max([2, *(row for row, _ in m.factors)])
    return _grid_weight(m, weight_vector(a, r))


def variable_weights(ring: BracketRing) -> list[SymbolicWeight]:
    """Weight of each variable ``P_I``: the weight of its matched monomial."""
    return [_grid_weight(ring.image((k,)), ring.weights) for k in range(len(ring))]


def add_weights(*ws: SymbolicWeight) -> SymbolicWeight:
    return tuple(map(sum, zip(*ws)))


# -- sparse exact linear algebra -------------------------------------------------

SparseVec = dict[Hashable, int]


def _primitive(*vecs: SparseVec) -> tuple[SparseVec, ...]:
    g = 0
    for v in vecs:
        for c in v.values():
            g = math.gcd(g, c)
    if g <= 1:
        return vecs
    return tuple({k: c // g for k, c in v.items()} for v in vecs)


def _axpy(bp: int, v: SparseVec, vk: int, b: SparseVec) -> SparseVec:
    """``bp * v - vk * b`` with zero entries dropped."""
    out = {k: bp * c for k, c in v.items()}
    for k, c in b.items():
        val = out.get(k, 0) - vk * c
        if val:
            out[k] = val
        else:
            out.pop(k, None)
    return out


def column_dependencies(columns: Sequence[SparseVec], key=None) -> list[SparseVec]:
    """Basis of ``{c : sum_j c_j columns[j] = 0}`` as primitive integer vectors.

    Columns are inserted one at a time into an echelon basis pivoted on the
    ``key``-maximal coordinate; a column reducing to zero yields one kernel
    vector supported on itself and earlier columns.
    """
    pick = (lambda v: max(v)) if key is None else (lambda v: max(v, key=key))
    basis: dict[Hashable, tuple[SparseVec, SparseVec]] = {}
    kernel = []
    for j, col in enumerate(columns):
        vec, combo = dict(col), {j: 1}
        while vec:
            p = pick(vec)
            if p not in basis:
                basis[p] = _primitive(vec, combo)
                break
            bvec, bcombo = basis[p]
            bp, vk = bvec[p], vec[p]
            vec, combo = _primitive(_axpy(bp, vec, vk, bvec), _axpy(bp, combo, vk, bcombo))
        else:
            (combo,) = _primitive(combo)
            if combo[j] < 0:
                combo = {k: -c for k, c in combo.items()}
            kernel.append(combo)
    return kernel


def row_echelon(rows: Iterable[SparseVec], order: Sequence[Hashable]) -> list[SparseVec]:
    """Integer echelon form with pivots taken first-in-``order``; rows are primitive."""
    pos = {k: t for t, k in enumerate(order)}
    pivots: dict[Hashable, SparseVec] = {}
    for row in rows:
        v = dict(row)
        while v:
            p = min(v, key=pos.__getitem__)
            if p not in pivots:
                (v,) = _primitive(v)
                if v[p] < 0:
                    v = {k: -c for k, c in v.items()}
                pivots[p] = v
                break
            b = pivots[p]
            (v,) = _primitive(_axpy(b[p], v, v[p], b))
    return [pivots[p] for p in sorted(pivots, key=pos.__getitem__)]


def in_span(vec: SparseVec, echelon: Sequence[SparseVec], order: Sequence[Hashable]) -> bool:
    """Membership in the span of rows in echelon form for ``order``."""
    pos = {k: t for t, k in enumerate(order)}
    by_pivot = {min(row, key=pos.__getitem__): row for row in echelon}
    v = dict(vec)
    while v:
        p = min(v, key=pos.__getitem__)
        b = by_pivot.get(p)
        if b is None:
            return False
        (v,) = _primitive(_axpy(b[p], v, v[p], b))
    return True


# -- degree-2 Pluecker relations ----------------------------------------------------


def check_kernel_bounds(r: int, n: int, limits: Mapping[int, int] | None = DEFAULT_KERNEL_LIMITS) -> None:
    if not 2 <= r < n:
        raise ValueError(f"need 2 <= r < n, got r={r}, n={n}")
    if limits is None:
        return
    if r not in limits or n > limits[r]:
        raise InstanceTooLarge(f"degree-2 Pluecker kernel for (r, n) = ({r}, {n}) exceeds limits {dict(limits)}")


@dataclass(frozen=True)
class PluckerKernel:
    """Degree-2 Pluecker relations.

    ``monomials[k]`` is a pair of r-subsets ``(I, J)`` with ``I <= J``; each
    basis vector maps monomial positions to integer coefficients.
    """

    r: int
    n: int
    monomials: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    basis: tuple[SparseVec, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def as_subsets(self, vec: SparseVec) -> dict[tuple[tuple[int, ...], tuple[int, ...]], int]:
        return {self.monomials[k]: c for k, c in vec.items()}


@lru_cache(maxsize=None)
def _plucker_kernel(r: int, n: int) -> PluckerKernel:
    subsets = list(r_subsets(n, r))
    monomials = [(subsets[i], subsets[j]) for i in range(len(subsets)) for j in range(i, len(subsets))]
    columns = []
    for I, J in monomials:
        prod = det_polynomial(r, I) * det_polynomial(r, J)
        columns.append({m.factors: int(c) for m, c in prod.terms.items()})
    return PluckerKernel(r, n, tuple(monomials), tuple(column_dependencies(columns)))


def plucker_kernel_deg2(r: int, n: int, limits: Mapping[int, int] | None = DEFAULT_KERNEL_LIMITS) -> PluckerKernel:
    """Exact basis of the quadratic relations among the maximal minors."""
    check_kernel_bounds(r, n, limits)
    return _plucker_kernel(r, n)


def _ring_monomial(ring: BracketRing, I: tuple[int, ...], J: tuple[int, ...]) -> Monomial:
    return mono((ring.index[_column(ring, I)], ring.index[_column(ring, J)]))


def _column(ring: BracketRing, I: tuple[int, ...]) -> tuple[int, ...]:
    if lambda_eval(ring.a, I) is Perm.SWAP:
        return (I[1], I[0], *I[2:])
    return I


def monomial_sign(ring: BracketRing, m: Monomial) -> int:
    """Product of the signs of the matched permutations of the factors of ``m``."""
    s = 1
    for b in ring.brackets(m):
        if b.swapped:
            s = -s
    return s


@dataclass(frozen=True)
class InitialSpace:
    """Initial forms of the degree-2 Pluecker relations for one weight.

    ``order`` lists the quadratic monomials by increasing weight, revlex-larger
    first among equal weights; ``echelon`` is the relation space in echelon
    form for that order and ``forms`` holds the lowest-weight part of each row.
    """

    ring: BracketRing
    order: tuple[Monomial, ...]
    echelon: tuple[SparseVec, ...]
    forms: tuple[SparseVec, ...]

    @property
    def dim(self) -> int:
        return len(self.forms)

    def contains(self, vec: SparseVec) -> bool:
        return in_span(vec, self.forms, self.order)

    def format(self, vec: SparseVec) -> str:
        terms = sorted(vec.items(), key=lambda t: revlex_key(t[0]))
        return " ".join(f"{'+' if c > 0 else '-'}{abs(c) if abs(c) != 1 else ''}{self.ring.format(m)}" for m, c in terms)


def initial_space_deg2(
    r: int, n: int, a: Composition, limits: Mapping[int, int] | None = DEFAULT_KERNEL_LIMITS
) -> InitialSpace:
    """Span of the lowest-weight parts of all degree-2 Pluecker relations."""
    kernel = plucker_kernel_deg2(r, n, limits)
    ring = BracketRing.of(r, n, a)
    vw = variable_weights(ring)
    weight = {m: add_weights(*(vw[k] for k in m)) for m in ring.degree2_monomials()}
    order = tuple(sorted(weight, key=lambda m: (weight[m], revlex_key(m))))
    rows = []
    for vec in kernel.basis:
        rows.append({_ring_monomial(ring, *kernel.monomials[k]): c for k, c in vec.items()})
    echelon = row_echelon(rows, order)
    pos = {m: t for t, m in enumerate(order)}
    forms = []
    for row in echelon:
        low = weight[min(row, key=pos.__getitem__)]
        forms.append({m: c for m, c in row.items() if weight[m] == low})
    return InitialSpace(ring, order, tuple(echelon), tuple(forms))


def signed_matching_binomials(r: int, n: int, a: Composition) -> list[SparseVec]:
    """Degree-2 spanning binomials of the matching field ideal, each ``P_I`` scaled by its sign."""
    ring = BracketRing.of(r, n, a)
    out = []
    for b in kernel_binomials_deg2(r, n, a, unsafe=True):
        out.append({b.lead: monomial_sign(ring, b.lead), b.trail: -monomial_sign(ring, b.trail)})
    return out


# -- the certificate ---------------------------------------------------------------


@dataclass
class SagbiCertificate:
    r: int
    n: int
    a: Composition
    eligible: bool
    plucker_kernel_dim: int
    initial_space_dim: int
    matching_ideal_dim: int
    containment: bool
    buchberger_passed: bool
    dim2: int
    diagonal_dim2: int
    std_monomials: int
    gb_report: GbReport | None = field(default=None, repr=False)
    scope: str = SCOPE_NOTE

    @property
    def dims_equal(self) -> bool:
        return self.plucker_kernel_dim == self.initial_space_dim == self.matching_ideal_dim

    @property
    def dim2_equal(self) -> bool:
        return self.dim2 == self.diagonal_dim2 == self.std_monomials

    @property
    def ok(self) -> bool:
        return self.dims_equal and self.containment and self.buchberger_passed and self.dim2_equal

    @property
    def verdict(self) -> str:
        return "OK" if self.ok else "FAIL"

    @property
    def hypotheses(self) -> str:
        return "within" if self.eligible else "outside-hypotheses"


def sagbi_certificate(
    r: int,
    n: int,
    a: Composition,
    limits: Mapping[int, int] | None = DEFAULT_KERNEL_LIMITS,
    gb_report: GbReport | None = None,
) -> SagbiCertificate:
    """Assemble the degree-2 SAGBI certificate for the weight matrix of ``a``.

    Checks: the seven-family generators pass Buchberger's criterion; the
    initial space of the degree-2 Pluecker relations has the dimension of the
    degree-2 matching field ideal and contains it (signs attached); the
    degree-2 dimension of the toric ring equals that of the diagonal case.
    """
    check_kernel_bounds(r, n, limits)
    ring = BracketRing.of(r, n, a)
    G = g_a_generators(r, n, a)
    report = gb_report if gb_report is not None else buchberger_check(G)
    space = initial_space_deg2(r, n, a, limits)
    kernel = plucker_kernel_deg2(r, n, limits)
    dim2 = dim2_image(r, n, a, unsafe=True)
    n_quadratic = math.comb(len(ring) + 1, 2)
    containment = all(space.contains(v) for v in signed_matching_binomials(r, n, a))
    return SagbiCertificate(
        r=r,
        n=n,
        a=a,
        eligible=is_eligible(a),
        plucker_kernel_dim=kernel.dim,
        initial_space_dim=space.dim,
        matching_ideal_dim=n_quadratic - dim2,
        containment=containment,
        buchberger_passed=report.passed,
        dim2=dim2,
        diagonal_dim2=dim2_image(r, n, Composition((n,)), unsafe=True),
        std_monomials=len(std_monomials_deg2(r, n, a, G)),
        gb_report=report,
    )
