"""Compositions, block diagonal weights, matching fields and the monomial map.

Indices are 1-based throughout: rows 1..r and columns 1..n of the variable
grid ``x[i][j]``.  A weight of a grid monomial is a :data:`SymbolicWeight`, an
integer tuple ``(c_{r-2}, ..., c_1, c_w)`` where ``c_t`` is the total
coefficient of ``beta**t`` and ``c_w`` the total row-2 weight.  Tuples compare
lexicographically, which is the order of the real weights for all sufficiently
large ``beta``; no numeric value of ``beta`` is ever chosen.
"""

from __future__ import annotations

import enum
import itertools
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

from .exceptions import NonUniqueMinimum

SymbolicWeight = tuple[int, ...]


@dataclass(frozen=True)
class Composition:
    """An ordered tuple of positive integers; its partial sums delimit blocks."""

    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        parts = tuple(self.parts)
        if not parts:
            raise ValueError("a composition needs at least one part")
        for p in parts:
            if not isinstance(p, int) or isinstance(p, bool) or p < 1:
                raise ValueError(f"composition parts must be positive integers, got {p!r}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def parse(cls, text: str) -> "Composition":
        """Parse ``"2,2,2"`` into a composition."""
        try:
            parts = tuple(int(tok) for tok in text.split(","))
        except ValueError:
            raise ValueError(f"cannot parse composition {text!r}: expected comma-separated integers") from None
        return cls(parts)

    @property
    def n(self) -> int:
        return sum(self.parts)

    @property
    def s(self) -> int:
        return len(self.parts)

    @property
    def alphas(self) -> tuple[int, ...]:
        """Partial sums ``(0, a_1, a_1 + a_2, ..., n)``."""
        return (0, *itertools.accumulate(self.parts))

    def __str__(self) -> str:
        return ",".join(map(str, self.parts))


def compositions(n: int) -> Iterator[Composition]:
    """Yield all ``2**(n-1)`` compositions of ``n``.

    The order is deterministic: cut points are enumerated as binary words,
    starting from the single block ``(n)``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    for mask in range(1 << (n - 1)):
        parts = []
        run = 1
        for k in range(n - 1):
            if mask >> k & 1:
                parts.append(run)
                run = 1
            else:
                run += 1
        parts.append(run)
        yield Composition(tuple(parts))


def blocks(a: Composition) -> list[range]:
    """Return the blocks ``I_k`` as ranges of 1-based column indices."""
    al = a.alphas
    return [range(al[k - 1] + 1, al[k] + 1) for k in range(1, a.s + 1)]


@dataclass(frozen=True)
class WeightData:
    """Second row ``w`` of a weight matrix together with the row count ``r``.

    Rows 3..r are symbolic: column ``j`` carries ``n + 1 - j`` times
    ``beta**(t-2)`` in row ``t``.  Row 1 is zero.
    """

    w: tuple[int, ...]
    r: int = 2

    def __post_init__(self) -> None:
        object.__setattr__(self, "w", tuple(self.w))
        if sorted(self.w) != list(range(1, len(self.w) + 1)):
            raise ValueError(f"w must be a permutation of 1..n, got {self.w}")
        if self.r < 2:
            raise ValueError("r must be at least 2")

    @property
    def n(self) -> int:
        return len(self.w)

    def at(self, j: int) -> int:
        """Row-2 weight of column ``j`` (1-based)."""
        return self.w[j - 1]

    def beta_coefficient(self, j: int) -> int:
        return self.n + 1 - j

    def with_rows(self, r: int) -> "WeightData":
        return WeightData(self.w, r)


def weight_vector(a: Composition, r: int = 2) -> WeightData:
    """Row 2 of the block diagonal weight matrix: block k reads alpha_k down to alpha_{k-1}+1."""
    al = a.alphas
    w: list[int] = []
    for k in range(1, a.s + 1):
        w.extend(range(al[k], al[k - 1], -1))
    return WeightData(tuple(w), r)


def diagonal_weight(n: int, r: int = 2) -> WeightData:
    return weight_vector(Composition((n,)), r)


def satisfies_interval_condition(w: Sequence[int]) -> bool:
    """``i < j`` and ``w_i > w_j`` forces ``w`` to decrease strictly on ``[i, j]``."""
    n = len(w)
    for i in range(n):
        for j in range(i + 1, n):
            if w[i] > w[j] and any(w[k] <= w[k + 1] for k in range(i, j)):
                return False
    return True


def satisfies_tail_condition(w: Sequence[int]) -> bool:
    """``i < j`` and ``w_i < w_j > w_{j+1} > w_{j+2}`` forces ``w`` to decrease on ``[j, n]``.

    Indices here are 0-based; the condition only bites when ``j + 2`` exists.
    """
    n = len(w)
    for j in range(1, n - 2):
        if not (w[j] > w[j + 1] > w[j + 2]):
            continue
        if not any(w[i] < w[j] for i in range(j)):
            continue
        if any(w[k] <= w[k + 1] for k in range(j, n - 1)):
            return False
    return True


def is_eligible(a: Composition) -> bool:
    """Every interior part is 1 or 2."""
    return all(p in (1, 2) for p in a.parts[1:-1])


def check_subset(I: Sequence[int], n: int) -> tuple[int, ...]:
    """Validate a strictly increasing subset of ``[n]`` and return it as a tuple."""
    I = tuple(I)
    if any(not 1 <= i <= n for i in I):
        raise ValueError(f"{I} is not a subset of [1..{n}]")
    if any(x >= y for x, y in zip(I, I[1:])):
        raise ValueError(f"{I} is not strictly increasing")
    return I


def r_subsets(n: int, r: int) -> Iterator[tuple[int, ...]]:
    return itertools.combinations(range(1, n + 1), r)


class Perm(enum.Enum):
    """The only two permutations a block diagonal matching field uses."""

    ID = "id"
    SWAP = "swap"


def lambda_eval(a: Composition, I: Sequence[int]) -> Perm:
    """Evaluate the block diagonal matching field on the subset ``I``.

    Returns SWAP exactly when the first block meeting ``I`` meets it in a
    single element.
    """
    I = check_subset(I, a.n)
    if len(I) < 2:
        raise ValueError("need |I| >= 2")
    for blk in blocks(a):
        hits = sum(1 for i in I if i in blk)
        if hits:
            return Perm.SWAP if hits == 1 else Perm.ID
    raise AssertionError("unreachable: blocks partition [n]")


def swap_by_weight(w: WeightData, I: Sequence[int]) -> bool:
    return w.at(I[0]) < w.at(I[1])


@dataclass(frozen=True, order=True)
class BracketVariable:
    """A Pluecker variable written as its matched column ``[c_1; c_2; ...; c_r]``.

    ``column[k]`` is the column index matched to row ``k + 1``.  Ordering of
    instances is lexicographic on ``column``; that is the variable order where
    smaller columns are *larger* variables.
    """

    column: tuple[int, ...]

    def __post_init__(self) -> None:
        c = tuple(self.column)
        object.__setattr__(self, "column", c)
        if len(c) < 2 or len(set(c)) != len(c):
            raise ValueError(f"bad bracket column {c}")
        tail = c[2:]
        if any(x >= y for x, y in zip(tail, tail[1:])) or (tail and tail[0] <= max(c[0], c[1])):
            raise ValueError(f"bracket {c}: entries 3..r must increase and exceed the first two")

    @property
    def subset(self) -> tuple[int, ...]:
        return tuple(sorted(self.column))

    @property
    def swapped(self) -> bool:
        return self.column[0] > self.column[1]

    @property
    def r(self) -> int:
        return len(self.column)

    def __str__(self) -> str:
        return "[" + ";".join(map(str, self.column)) + "]"

    @classmethod
    def parse(cls, text: str) -> "BracketVariable":
        body = text.strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise ValueError(f"bad bracket {text!r}")
        return cls(tuple(int(t) for t in body[1:-1].split(";")))


def bracket_of(a: Composition, I: Sequence[int]) -> BracketVariable:
    I = check_subset(I, a.n)
    if lambda_eval(a, I) is Perm.SWAP:
        return BracketVariable((I[1], I[0], *I[2:]))
    return BracketVariable(I)


@dataclass(frozen=True)
class GridMonomial:
    """A monomial in the ``x[i][j]`` grid stored as a sorted multiset of ``(row, col)``."""

    factors: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "factors", tuple(sorted(self.factors)))

    @classmethod
    def from_exponents(cls, exps: dict[tuple[int, int], int]) -> "GridMonomial":
        if any(e < 0 for e in exps.values()):
            raise ValueError("negative exponent")
        return cls(tuple(pos for pos, e in exps.items() for _ in range(e)))

    @property
    def degree(self) -> int:
        return len(self.factors)

    @cached_property
    def exponents(self) -> dict[tuple[int, int], int]:
        return dict(Counter(self.factors))

    def row_sums(self, r: int) -> tuple[int, ...]:
        sums = [0] * r
        for row, _ in self.factors:
            sums[row - 1] += 1
        return tuple(sums)

    def __mul__(self, other: "GridMonomial") -> "GridMonomial":
        return GridMonomial(self.factors + other.factors)

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        return "*".join(f"x{i},{j}" if e == 1 else f"x{i},{j}^{e}" for (i, j), e in sorted(self.exponents.items()))


def matched_monomial(column: Sequence[int]) -> GridMonomial:
    """``x[1][c_1] * x[2][c_2] * ...`` for a bracket column."""
    return GridMonomial(tuple((k + 1, c) for k, c in enumerate(column)))


def pi_lambda(a: Composition, I: Sequence[int]) -> GridMonomial:
    """Image of ``P_I`` under the monomial map of the block diagonal matching field."""
    return matched_monomial(bracket_of(a, I).column)


def monomial_weight(m: GridMonomial, weights: WeightData) -> SymbolicWeight:
    """Symbolic weight ``(c_{r-2}, ..., c_1, c_w)`` of a grid monomial."""
    r, n = weights.r, weights.n
    acc = [0] * (r - 1)
    for row, col in m.factors:
        if row > r or not 1 <= col <= n:
            raise ValueError(f"x{row},{col} lies outside the {r}x{n} grid")
        if row == 2:
            acc[-1] += weights.at(col)
        elif row >= 3:
            acc[r - row] += n + 1 - col
    return tuple(acc)


def determinant_terms(I: Sequence[int]) -> Iterator[tuple[int, GridMonomial]]:
    """Yield ``(sign, monomial)`` for the ``r!`` terms of ``det(x_I)``.

    The term for a permutation ``sigma`` is ``x[sigma(1)][i_1] ... x[sigma(r)][i_r]``.
    """
    r = len(I)
    for perm in itertools.permutations(range(r)):
        inversions = sum(1 for p, q in itertools.combinations(perm, 2) if p > q)
        yield (-1) ** inversions, GridMonomial(tuple((perm[k] + 1, I[k]) for k in range(r)))


def initial_term(weights: WeightData, I: Sequence[int]) -> GridMonomial:
    """Unique lowest-weight term of ``det(x_I)`` by enumerating all ``r!`` terms."""
    I = check_subset(I, weights.n)
    if len(I) != weights.r:
        raise ValueError(f"|I| = {len(I)} but weights have r = {weights.r}")
    best: list[GridMonomial] = []
    best_wt = None
    for _, mono in determinant_terms(I):
        wt = monomial_weight(mono, weights)
        if best_wt is None or wt < best_wt:
            best, best_wt = [mono], wt
        elif wt == best_wt:
            best.append(mono)
    if len(best) != 1:
        raise NonUniqueMinimum(f"det(x_{I}) has {len(best)} terms of minimal weight {best_wt}")
    return best[0]


def greedy_initial_term(weights: WeightData, I: Sequence[int]) -> GridMonomial:
    """Lowest-weight term of ``det(x_I)`` without enumeration.

    Row r takes the largest column, row r-1 the next, down to row 3; of the
    two leftover columns row 2 takes the one of smaller ``w``.
    """
    I = tuple(I)
    r = len(I)
    factors = [(r - k, I[-1 - k]) for k in range(r - 2)]
    p, q = I[0], I[1]
    if weights.at(p) > weights.at(q):
        p, q = q, p
    factors += [(2, p), (1, q)]
    return GridMonomial(tuple(factors))


def initial_form_det(a: Composition, r: int, I: Sequence[int]) -> GridMonomial:
    """Initial form of ``det(x_I)`` with respect to the block diagonal weights of ``a``."""
    return initial_term(weight_vector(a, r), I)


def coherence_failures(a: Composition, r: int) -> list[tuple[int, ...]]:
    """Subsets where the initial determinant term differs from ``pi_lambda``.

    Raises :class:`NonUniqueMinimum` if any determinant has a tied minimum.
    """
    weights = weight_vector(a, r)
    return [I for I in r_subsets(a.n, r) if initial_term(weights, I) != pi_lambda(a, I)]
