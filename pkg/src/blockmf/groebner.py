"""Binomial Groebner engine on the Pluecker variables of a block diagonal matching field.

Monomials are tuples of variable indices sorted in *descending* order, with
index 0 the largest variable.  For monomials of equal degree the reverse
lexicographic order then coincides with plain tuple comparison reversed: the
smaller tuple is the larger monomial.  All binomials are pure differences
``lead - trail`` with unit coefficients, so reduction never leaves the class
of binomials.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .exceptions import InstanceTooLarge, InternalInconsistency, NotStandard
from .matchfield import (
    BracketVariable,
    Composition,
    GridMonomial,
    WeightData,
    bracket_of,
    matched_monomial,
    monomial_weight,
    r_subsets,
    weight_vector,
)

Monomial = tuple[int, ...]

MAX_N = 9
MAX_R = 4


def check_bounds(r: int, n: int, unsafe: bool = False) -> None:
    if not 2 <= r < n:
        raise ValueError(f"need 2 <= r < n, got r={r}, n={n}")
    if not unsafe and (n > MAX_N or r > MAX_R):
        raise InstanceTooLarge(f"(r, n) = ({r}, {n}) exceeds n <= {MAX_N}, r <= {MAX_R}")


# -- monomial arithmetic ------------------------------------------------------


def mono(indices: Iterable[int]) -> Monomial:
    return tuple(sorted(indices, reverse=True))


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(sorted(a + b, reverse=True))


def mono_div(m: Monomial, d: Monomial) -> Monomial | None:
    """``m / d`` or ``None`` when ``d`` does not divide ``m``."""
    rest = list(m)
    for v in d:
        try:
            rest.remove(v)
        except ValueError:
            return None
    return tuple(rest)


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    ca, cb = _counts(a), _counts(b)
    out = []
    for v in set(ca) | set(cb):
        out.extend([v] * max(ca.get(v, 0), cb.get(v, 0)))
    return mono(out)


def coprime(a: Monomial, b: Monomial) -> bool:
    return not set(a) & set(b)


def _counts(m: Monomial) -> dict[int, int]:
    c: dict[int, int] = {}
    for v in m:
        c[v] = c.get(v, 0) + 1
    return c


def compare_revlex(m1: Monomial, m2: Monomial) -> int:
    """Degree-compatible reverse lexicographic comparison; returns -1, 0 or 1.

    Among equal degrees ``m1 > m2`` iff, at the smallest variable where the
    exponents differ, ``m1`` has the smaller exponent.
    """
    if len(m1) != len(m2):
        return 1 if len(m1) > len(m2) else -1
    if m1 == m2:
        return 0
    return 1 if m1 < m2 else -1


def revlex_key(m: Monomial) -> tuple:
    """Sort key putting revlex-larger monomials first."""
    return (-len(m), m)


@dataclass(frozen=True, order=True)
class Binomial:
    """``lead - trail`` with ``lead`` the initial monomial."""

    lead: Monomial
    trail: Monomial

    @classmethod
    def oriented(cls, u: Monomial, v: Monomial) -> "Binomial":
        if u == v:
            raise ValueError("zero binomial")
        return cls(u, v) if compare_revlex(u, v) > 0 else cls(v, u)

    @property
    def degree(self) -> int:
        return len(self.lead)


# -- reduction and Buchberger's criterion --------------------------------------


class Reducer:
    """Rewrites monomials with the rules ``lead -> trail`` of a binomial set.

    Every rule must be oriented (``lead`` revlex-greater than ``trail``); the
    rewriting then strictly decreases a monomial of fixed degree and
    terminates.  Among several applicable rules the first found is used:
    divisors are tried in ``itertools.combinations`` order of the monomial,
    lowest rule degree first.
    """

    def __init__(self, binomials: Iterable[Binomial]):
        self.rules: dict[int, dict[Monomial, Monomial]] = defaultdict(dict)
        for b in binomials:
            if compare_revlex(b.lead, b.trail) <= 0:
                raise ValueError(f"binomial {b} is not oriented")
            # keep the first rule for a repeated lead; the others still enter S-pairs
            self.rules[len(b.lead)].setdefault(b.lead, b.trail)
        self.degrees = sorted(self.rules)
        self.steps = 0

    def find(self, m: Monomial) -> tuple[Monomial, Monomial] | None:
        """An applicable rule ``(lead, trail)`` for ``m``, or ``None``."""
        for d in self.degrees:
            if d > len(m):
                break
            table = self.rules[d]
            for sub in itertools.combinations(m, d):
                trail = table.get(sub)
                if trail is not None:
                    return sub, trail
        return None

    def reduce(self, m: Monomial) -> Monomial:
        while True:
            hit = self.find(m)
            if hit is None:
                return m
            lead, trail = hit
            m = mono_mul(mono_div(m, lead), trail)
            self.steps += 1

    def is_standard(self, m: Monomial) -> bool:
        return self.find(m) is None


def normal_form(f: Binomial | tuple[Monomial, Monomial], G: Iterable[Binomial] | Reducer) -> Binomial | None:
    """Reduce both sides of ``f`` modulo ``G``; ``None`` means the sides met (zero)."""
    red = G if isinstance(G, Reducer) else Reducer(G)
    u, v = (f.lead, f.trail) if isinstance(f, Binomial) else f
    u, v = red.reduce(u), red.reduce(v)
    if u == v:
        return None
    return Binomial.oriented(u, v)


def s_pair(f: Binomial, g: Binomial) -> tuple[Monomial, Monomial]:
    """The two monomials of ``S(f, g) = (L/lead f) trail f - (L/lead g) trail g``."""
    L = mono_lcm(f.lead, g.lead)
    return mono_mul(mono_div(L, f.lead), f.trail), mono_mul(mono_div(L, g.lead), g.trail)


@dataclass
class GbReport:
    passed: bool
    generators: int
    pairs: int = 0
    coprime_skipped: int = 0
    reduced: int = 0
    reduction_steps: int = 0
    witness: tuple[Binomial, Binomial, Binomial] | None = None  # f, g, nonzero remainder


def buchberger_check(G: Sequence[Binomial]) -> GbReport:
    """Decide whether the oriented binomials ``G`` form a Groebner basis.

    Pairs with coprime leads are skipped; the rest are processed by increasing
    degree of the lcm of their leads.  Stops at the first S-pair whose normal
    form is nonzero and records it as the witness.
    """
    G = sorted(set(G))
    red = Reducer(G)
    total = len(G) * (len(G) - 1) // 2
    by_var: dict[int, list[int]] = defaultdict(list)
    for k, g in enumerate(G):
        for v in set(g.lead):
            by_var[v].append(k)
    pairs: set[tuple[int, int]] = set()
    for members in by_var.values():
        pairs.update(itertools.combinations(members, 2))
    queue = sorted(pairs, key=lambda p: (len(mono_lcm(G[p[0]].lead, G[p[1]].lead)), p))
    report = GbReport(passed=True, generators=len(G), pairs=total, coprime_skipped=total - len(queue))
    for i, j in queue:
        f, g = G[i], G[j]
        rem = normal_form(s_pair(f, g), red)
        report.reduced += 1
        if rem is not None:
            report.passed = False
            report.witness = (f, g, rem)
            break
    report.reduction_steps = red.steps
    return report


# -- the Pluecker variable ring for (r, n, a) ----------------------------------


class BracketRing:
    """Variables ``P_I`` of one matching field, indexed by the variable order.

    Index 0 is the largest variable: variables are ordered by their bracket
    columns, and at the first row where two columns differ the smaller entry
    wins.
    """

    def __init__(self, r: int, n: int, a: Composition):
        if a.n != n:
            raise ValueError(f"composition {a} does not sum to n={n}")
        if not 2 <= r < n:
            raise ValueError(f"need 2 <= r < n, got r={r}, n={n}")
        self.r, self.n, self.a = r, n, a
        self.weights: WeightData = weight_vector(a, r)
        self.variables: list[BracketVariable] = sorted(bracket_of(a, I) for I in r_subsets(n, r))
        self.index: dict[tuple[int, ...], int] = {b.column: k for k, b in enumerate(self.variables)}
        self._images = [matched_monomial(b.column).factors for b in self.variables]

    @classmethod
    @lru_cache(maxsize=None)
    def of(cls, r: int, n: int, a: Composition) -> "BracketRing":
        return cls(r, n, a)

    def __len__(self) -> int:
        return len(self.variables)

    def __repr__(self) -> str:
        return f"BracketRing(r={self.r}, n={self.n}, a=({self.a}))"

    def is_variable(self, column: Sequence[int]) -> bool:
        return tuple(column) in self.index

    def monomial(self, *columns: Sequence[int] | BracketVariable | str) -> Monomial:
        idx = []
        for c in columns:
            if isinstance(c, str):
                c = BracketVariable.parse(c)
            if isinstance(c, BracketVariable):
                c = c.column
            try:
                idx.append(self.index[tuple(c)])
            except KeyError:
                raise ValueError(f"{list(c)} is not a variable of {self!r}") from None
        return mono(idx)

    def brackets(self, m: Monomial) -> list[BracketVariable]:
        """Factors of ``m``, largest variable first."""
        return [self.variables[k] for k in sorted(m)]

    def format(self, m: Monomial | Binomial) -> str:
        if isinstance(m, Binomial):
            return f"{self.format(m.lead)} - {self.format(m.trail)}"
        return "".join(str(b) for b in self.brackets(m))

    def serialize(self, m: Monomial) -> list[str]:
        return [str(b) for b in self.brackets(m)]

    def image(self, m: Monomial) -> GridMonomial:
        """``pi_lambda`` of a monomial."""
        return GridMonomial(tuple(f for k in m for f in self._images[k]))

    def image_key(self, m: Monomial) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(f for k in m for f in self._images[k]))

    def weight(self, m: Monomial) -> tuple[int, ...]:
        return monomial_weight(self.image(m), self.weights)

    def degree2_monomials(self) -> list[Monomial]:
        """All quadratic monomials, revlex-largest first."""
        N = len(self.variables)
        return sorted(((j, i) for i in range(N) for j in range(i, N)), key=revlex_key)


# -- the generating set from the seven binomial families ------------------------


def _merge(p: Sequence[int], q: Sequence[int], start: int) -> tuple[list[int], list[int]]:
    """Entrywise min / max of two columns from position ``start`` on."""
    lo = [min(x, y) for x, y in zip(p[start:], q[start:])]
    hi = [max(x, y) for x, y in zip(p[start:], q[start:])]
    return lo, hi


def _family_images(P: BracketVariable, Q: BracketVariable, w: WeightData) -> list[tuple[int, tuple, tuple]]:
    """Second monomials ``(case, col1, col2)`` of every family whose hypotheses hold for ``P Q``."""
    out = []
    p, q = P.column, Q.column
    r = len(p)
    I, J = P.subset, Q.subset
    sp, sq = P.swapped, Q.swapped
    lo, hi = _merge(I, J, 2)

    if not sp and not sq and I[0] < J[0]:
        lo1, hi1 = _merge(I, J, 1)
        out.append((1, (I[0], *lo1), (J[0], *hi1)))
    if sp and not sq and I[1] < J[0]:
        out.append((2, (I[1], I[0], *lo), (J[0], J[1], *hi)))
    if not sp and sq and I[0] < J[1]:
        # for r = 2 there is no third entry: "i_2 < j_3" holds vacuously, "j_3 <= i_2" fails
        if r < 3 or I[1] < J[2]:
            out.append((3, (I[0], I[1], *lo), (J[1], J[0], *hi)))
        if r >= 3 and J[2] <= I[1]:
            out.append((4, (I[0], J[0], *lo), (J[1], I[1], *hi)))
    if sp and sq and I[1] < J[1]:
        out.append((5, (I[1], I[0], *lo), (J[1], J[0], *hi)))
    if p[0] == q[0]:
        lo1, hi1 = _merge(p, q, 1)
        out.append((6, (p[0], *lo1), (p[0], *hi1)))
    if (
        w.at(p[0]) > w.at(q[1])
        and w.at(q[0]) > w.at(p[1])
        and p[0] < q[0]
        and q[1] < p[1]
        and all(x <= y for x, y in zip(p[2:], q[2:]))
    ):
        out.append((7, (p[0], q[1], *p[2:]), (q[0], p[1], *q[2:])))
    return out


def g_a_generators_by_case(r: int, n: int, a: Composition) -> dict[Binomial, set[int]]:
    """Map every nonzero generator to the set of families (1..7) producing it."""
    ring = BracketRing.of(r, n, a)
    found: dict[Binomial, set[int]] = defaultdict(set)
    for P in ring.variables:
        for Q in ring.variables:
            for case, c1, c2 in _family_images(P, Q, ring.weights):
                if not (ring.is_variable(c1) and ring.is_variable(c2)):
                    raise InternalInconsistency(f"family {case} on {P}{Q} produced non-variable {list(c1)}, {list(c2)}")
                lead = ring.monomial(P, Q)
                trail = ring.monomial(c1, c2)
                if lead == trail:
                    continue
                found[Binomial(lead, trail)].add(case)
    return dict(found)


def g_a_generators(r: int, n: int, a: Composition) -> list[Binomial]:
    """The quadratic binomials of the seven families, deduplicated and sorted.

    Each is stated with the monomial ``P Q`` it was built from as ``lead``;
    nothing is reoriented here.
    """
    return sorted(g_a_generators_by_case(r, n, a))


# -- degree-2 oracles ----------------------------------------------------------


def _collision_classes(ring: BracketRing) -> list[list[Monomial]]:
    classes: dict[tuple, list[Monomial]] = defaultdict(list)
    for m in ring.degree2_monomials():
        classes[ring.image_key(m)].append(m)
    return list(classes.values())


def kernel_binomials_deg2(r: int, n: int, a: Composition, unsafe: bool = False) -> list[Binomial]:
    """Spanning set of the degree-2 part of the matching field ideal, by brute force.

    Degree-2 monomials are grouped by their image; in each class the
    revlex-largest member minus every other member is emitted.
    """
    check_bounds(r, n, unsafe)
    ring = BracketRing.of(r, n, a)
    out = []
    for cls in _collision_classes(ring):
        top = cls[0]  # classes inherit revlex-descending order
        out.extend(Binomial(top, m) for m in cls[1:])
    return sorted(out)


def dim2_image(r: int, n: int, a: Composition, unsafe: bool = False) -> int:
    """Number of distinct images of quadratic monomials, the degree-2 dimension of the toric ring."""
    check_bounds(r, n, unsafe)
    ring = BracketRing.of(r, n, a)
    return len({ring.image_key(m) for m in ring.degree2_monomials()})


def std_monomials_deg2(r: int, n: int, a: Composition, generators: Sequence[Binomial] | None = None) -> list[Monomial]:
    """Quadratic monomials that are not an initial monomial of the generating set."""
    ring = BracketRing.of(r, n, a)
    G = g_a_generators(r, n, a) if generators is None else generators
    leads = {g.lead for g in G}
    return [m for m in ring.degree2_monomials() if m not in leads]


def hook_content_dim2(r: int, n: int) -> int:
    """Semistandard tableaux of shape ``(2,)*r`` with entries in ``[n]``."""
    num, den = 1, 1
    for i in range(1, r + 1):
        for j in (1, 2):
            num *= n + j - i
            den *= (2 - j) + (r - i) + 1
    val = Fraction(num, den)
    assert val.denominator == 1
    return int(val)


def spans_agree(r: int, n: int, a: Composition, generators: Sequence[Binomial] | None = None) -> bool:
    """Does the generating set span the whole degree-2 part of the matching field ideal?

    Both spans consist of differences inside collision classes, so they agree
    iff every generator stays inside one class and connects all its members.
    """
    ring = BracketRing.of(r, n, a)
    G = g_a_generators(r, n, a) if generators is None else generators
    parent: dict[Monomial, Monomial] = {}

    def find(x: Monomial) -> Monomial:
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in G:
        if g.degree != 2:
            continue
        if ring.image_key(g.lead) != ring.image_key(g.trail):
            return False
        parent[find(g.lead)] = find(g.trail)
    for cls in _collision_classes(ring):
        if len({find(m) for m in cls}) != 1:
            return False
    return True


def classify_std_monomial(
    u: Monomial, ring: BracketRing, generators: Sequence[Binomial] | None = None
) -> tuple[int, tuple]:
    """Case label and key of a standard quadratic monomial.

    Write ``u = [l_1; l_2; ...][m_1; m_2; ...]`` with the larger variable first.
    The case is ``|{l_1, l_2, m_1, m_2}| - 1``.  The key holds the top entries
    (for case 2 the shared entry first, then the other two sorted; otherwise
    the sorted set) and the two tails ``(l_3.., m_3..)``.
    """
    G = g_a_generators(ring.r, ring.n, ring.a) if generators is None else generators
    if u in {g.lead for g in G}:
        raise NotStandard(f"{ring.format(u)} is an initial monomial")
    if len(u) != 2:
        raise ValueError("expected a quadratic monomial")
    L, M = (b.column for b in ring.brackets(u))
    top = {L[0], L[1], M[0], M[1]}
    case = len(top) - 1
    tails = (L[2:], M[2:])
    if case == 2:
        (lam,) = {L[0], L[1]} & {M[0], M[1]}
        return case, ((lam, *sorted(top - {lam})), tails)
    return case, (tuple(sorted(top)), tails)


def quadratic_monomial_count(N: int) -> int:
    return math.comb(N + 1, 2)
