"""Exact Wigner 3j symbols at zero magnetic numbers and the zonal product algebra built on them.

The closed form for the symbol with all magnetic numbers zero vanishes for an
odd degree sum and otherwise equals, with J = l1+l2+l3 and g = J/2,

    (-1)^g * sqrt( (J-2*l3)! (J-2*l2)! (J-2*l1)! / (J+1)! )
           * g! / ( (g-l1)! (g-l2)! (g-l3)! ).

All squares are held as exact rationals (gmpy2.mpq over GMP integers), which
makes Kronecker collapses and the Gaunt normalization sum(2l+1)(3j)^2 = 1
checkable by integer equality.  Floats are derived from the exact square by a
correctly rounded conversion, so value**2 tracks the rational to a few ulp.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import gmpy2
from gmpy2 import fac, mpq, mpz

__all__ = [
    "CapacityError",
    "PathBudgetError",
    "ThreeJZero",
    "TriangleRange",
    "PathLattice",
    "threej_zero",
    "triangle_range",
    "gaunt_expand",
    "gaunt_normalization_holds",
    "m_product_integral",
    "a_seq",
    "A_SEQ_LIMIT",
    "scaled_threej",
    "weighted_sum",
    "quadruple_product_statistic",
    "write_threej_csv",
]

DEGREE_SUM_CAP = 100_000

A_SEQ_LIMIT = (2.0 / math.pi) ** 0.25


class CapacityError(ValueError):
    """Degree sum beyond the configured arbitrary-precision cap."""


class PathBudgetError(RuntimeError):
    """Path lattice too large for the configured budget."""

    def __init__(self, size: int, budget: int):
        self.size = size
        self.budget = budget
        super().__init__(f"path lattice has {size} paths, budget is {budget}")


@dataclass(frozen=True)
class TriangleRange:
    """Integers ell with |l1-l2| <= ell <= l1+l2."""

    lo: int
    hi: int

    def __iter__(self) -> Iterator[int]:
        return iter(range(self.lo, self.hi + 1))

    def __contains__(self, ell) -> bool:
        return self.lo <= ell <= self.hi

    def __len__(self) -> int:
        return self.hi - self.lo + 1


def triangle_range(l1: int, l2: int) -> TriangleRange:
    if l1 < 0 or l2 < 0:
        raise ValueError("degrees must be non-negative")
    return TriangleRange(abs(l1 - l2), l1 + l2)


@dataclass(frozen=True)
class ThreeJZero:
    """Sign, exact rational square, and float value of a zero-m 3j symbol."""

    degrees: tuple[int, int, int]
    sign: int
    square: object  # gmpy2.mpq
    value: float


def _threej_square_raw(l1: int, l2: int, l3: int):
    """(sign, exact square) straight from the closed form; no cache, no sorting."""
    total = l1 + l2 + l3
    if total % 2 == 1:
        return 0, mpq(0)
    a = l1 + l2 - l3
    b = l1 + l3 - l2
    c = l2 + l3 - l1
    if a < 0 or b < 0 or c < 0:
        return 0, mpq(0)
    half = total // 2
    num = fac(a) * fac(b) * fac(c) * fac(half) ** 2
    den = fac(total + 1) * (fac(a // 2) * fac(b // 2) * fac(c // 2)) ** 2
    sign = 1 if half % 2 == 0 else -1
    return sign, mpq(num, den)


@lru_cache(maxsize=1 << 22)
def _threej_canonical(l1: int, l2: int, l3: int):
    return _threej_square_raw(l1, l2, l3)


def threej_zero(l1: int, l2: int, l3: int, cap: int | None = None) -> ThreeJZero:
    """Exact 3j symbol at zero magnetic numbers, memoized on the sorted triple.

    The symbol is invariant under degree permutations (the sign factor is
    (-1)^(J/2) with J even), so the cache key is canonical.
    """
    if min(l1, l2, l3) < 0:
        raise ValueError("degrees must be non-negative")
    limit = DEGREE_SUM_CAP if cap is None else cap
    if l1 + l2 + l3 > limit:
        raise CapacityError(f"degree sum {l1 + l2 + l3} exceeds cap {limit}")
    sign, square = _threej_canonical(*sorted((l1, l2, l3)))
    value = sign * math.sqrt(float(square))
    return ThreeJZero(degrees=(l1, l2, l3), sign=sign, square=square, value=value)


def _square_step(l1: int, l2: int, l3: int) -> tuple[int, int]:
    """Integer ratio (p, q) with (3j)^2(l3+2) = (p/q) * (3j)^2(l3)."""
    a = l1 + l2 - l3
    b = l1 + l3 - l2
    c = l2 + l3 - l1
    total = l1 + l2 + l3
    half = total // 2
    p = (b + 1) * (b + 2) * (c + 1) * (c + 2) * ((half + 1) * (a // 2)) ** 2
    q = a * (a - 1) * (total + 2) * (total + 3) * ((b // 2 + 1) * (c // 2 + 1)) ** 2
    return p, q


def _square_row(l1: int, l2: int) -> list[tuple[int, object]]:
    """Exact (3j)^2 for every even-parity ell in the triangle range, by ratio recurrence."""
    lo = abs(l1 - l2)
    hi = l1 + l2
    _, sq = _threej_square_raw(l1, l2, lo)
    row = [(lo, sq)]
    for l3 in range(lo, hi, 2):
        p, q = _square_step(l1, l2, l3)
        sq = sq * mpq(p, q)
        row.append((l3 + 2, sq))
    return row


@lru_cache(maxsize=4096)
def gaunt_expand(l1: int, l2: int) -> tuple[tuple[int, object], ...]:
    """Coefficients of v_{l1} v_{l2} = sum (2l+1)(3j)^2 v_l, exact rationals.

    Only the even-parity (nonvanishing) degrees appear.  The coefficients sum
    to exactly 1: evaluate the expansion at the pole where every v_l is 1.
    """
    if l1 < 0 or l2 < 0:
        raise ValueError("degrees must be non-negative")
    if l1 > l2:
        l1, l2 = l2, l1
    return tuple((ell, (2 * ell + 1) * sq) for ell, sq in _square_row(l1, l2))


def gaunt_normalization_holds(l1: int, l2: int) -> bool:
    """Exact integer check that sum_l (2l+1)(3j)^2 equals 1.

    Accumulates the row over a running common denominator (no gcd on the big
    accumulators), then compares numerator and denominator products.
    """
    lo = abs(l1 - l2)
    hi = l1 + l2
    _, sq0 = _threej_square_raw(l1, l2, lo)
    n0 = (2 * lo + 1) * sq0.numerator
    d0 = sq0.denominator
    acc = mpz(n0)   # running sum numerator over d0 * prod(q)
    term = mpz(n0)  # current term numerator over the same denominator
    qprod = mpz(1)
    for l3 in range(lo, hi, 2):
        p, q = _square_step(l1, l2, l3)
        p *= 2 * l3 + 5
        q *= 2 * l3 + 1
        g = gmpy2.gcd(mpz(p), mpz(q))
        p //= g
        q //= g
        term *= p
        acc = acc * q + term
        qprod *= q
    return acc == d0 * qprod


@dataclass(frozen=True)
class PathLattice:
    """Chained triangle-admissible tuples z with z_1 = degrees[0], z_i in the
    triangle range of (z_{i-1}, degrees[i])."""

    degrees: tuple[int, ...]

    def __post_init__(self):
        if len(self.degrees) < 1 or min(self.degrees) < 0:
            raise ValueError("need a non-empty sequence of non-negative degrees")

    def paths(self, prune_parity: bool = False) -> Iterator[tuple[int, ...]]:
        """Lazy depth-first enumeration; parity pruning keeps only tuples whose
        chained 3j factors can be nonzero."""

        def walk(prefix: tuple[int, ...], i: int) -> Iterator[tuple[int, ...]]:
            if i == len(self.degrees):
                yield prefix
                return
            z = prefix[-1]
            ell = self.degrees[i]
            lo, hi = abs(z - ell), z + ell
            step = 2 if prune_parity else 1
            start = lo if not prune_parity else lo + ((z + ell + lo) % 2)
            for nxt in range(start, hi + 1, step):
                yield from walk(prefix + (nxt,), i + 1)

        return walk((self.degrees[0],), 1)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return self.paths()

    def size(self, prune_parity: bool = True) -> int:
        """Number of paths, by dynamic programming (cheap even when huge)."""
        counts = {self.degrees[0]: 1}
        for ell in self.degrees[1:]:
            new: dict[int, int] = {}
            for z, n in counts.items():
                lo, hi = abs(z - ell), z + ell
                step = 2 if prune_parity else 1
                start = lo if not prune_parity else lo + ((z + ell + lo) % 2)
                for nxt in range(start, hi + 1, step):
                    new[nxt] = new.get(nxt, 0) + n
            counts = new
        return sum(counts.values())


def m_product_integral(degrees: Sequence[int], path_budget: int = 10**7):
    """Exact (1/4pi) * integral over S of the product of zonal harmonics.

    Folds the degree list through Gaunt expansions (a dynamic-programming
    walk of the path lattice), finishing with the Kronecker pairing against
    the last degree.  Symmetric in its arguments.  Raises PathBudgetError,
    naming the lattice size, when the lattice exceeds the budget.
    """
    degs = list(degrees)
    if len(degs) < 2:
        raise ValueError("need at least two degrees")
    if min(degs) < 0:
        raise ValueError("degrees must be non-negative")
    if len(degs) == 2:
        return mpq(1, 2 * degs[0] + 1) if degs[0] == degs[1] else mpq(0)

    lattice = PathLattice(tuple(degs[:-1]))
    size = lattice.size(prune_parity=True)
    if size > path_budget:
        raise PathBudgetError(size, path_budget)

    coeffs = {degs[0]: mpq(1)}
    for ell in degs[1:-1]:
        folded: dict[int, object] = {}
        for z, cz in coeffs.items():
            for w, gw in gaunt_expand(z, ell):
                if w in folded:
                    folded[w] += cz * gw
                else:
                    folded[w] = cz * gw
        coeffs = folded
    last = degs[-1]
    return coeffs.get(last, mpq(0)) / (2 * last + 1)


def threej_square_float_table(degrees: Sequence[int]) -> dict[tuple[int, int, int], float]:
    """Float (3j)^2 for every sorted triple drawn from `degrees`.

    One exact evaluation per degree pair, then the ratio recurrence rolled in
    floating point along the third degree (the ratios are exact small
    rationals, so rolling loses only a few ulp per step).  Built for the
    triple sums of the construction family, where the degree set is small but
    the degrees themselves are large.
    """
    return dict(_float_table_cached(tuple(sorted(set(degrees)))))


@lru_cache(maxsize=8)
def _float_table_cached(degs: tuple[int, ...]) -> dict[tuple[int, int, int], float]:
    if degs and degs[0] < 0:
        raise ValueError("degrees must be non-negative")
    table: dict[tuple[int, int, int], float] = {}
    for i, d1 in enumerate(degs):
        for d2 in degs[i:]:
            targets = [d3 for d3 in degs if d2 <= d3 <= d1 + d2]
            if not targets:
                continue
            for d3 in targets:
                if (d1 + d2 + d3) % 2:
                    table[(d1, d2, d3)] = 0.0
            even_targets = [d3 for d3 in targets if (d1 + d2 + d3) % 2 == 0]
            if not even_targets:
                continue
            l3 = even_targets[0]
            _, sq = _threej_square_raw(d1, d2, l3)
            val = float(sq)
            remaining = iter(even_targets)
            nxt = next(remaining)
            while True:
                if l3 == nxt:
                    table[(d1, d2, l3)] = val
                    nxt = next(remaining, None)
                    if nxt is None:
                        break
                p, q = _square_step(d1, d2, l3)
                val *= p / q
                l3 += 2
    return table


def a_seq(k: int) -> float:
    """a_k = sqrt((2k)!)/k! * (2k)^(1/4) / 2^k, via log-gamma; increases to (2/pi)^(1/4)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    log_val = (
        0.5 * math.lgamma(2 * k + 1)
        - math.lgamma(k + 1)
        + 0.25 * math.log(2 * k)
        - k * math.log(2.0)
    )
    return math.exp(log_val)


def scaled_threej(l1: int, l2: int, l3: int) -> float:
    """(l1+l2+l3) times the 3j value; requires an admissible triple with degree sum 0 mod 4
    (so the symbol is positive and the quadruple lower bound applies)."""
    if l3 not in triangle_range(l1, l2):
        raise ValueError(f"l3={l3} outside the triangle range of ({l1}, {l2})")
    total = l1 + l2 + l3
    if total % 4 != 0:
        raise ValueError(f"degree sum {total} is not 0 mod 4")
    return total * threej_zero(l1, l2, l3).value


def weighted_sum(l1: int, l2: int, exact: bool = False):
    """sum over the triangle range of ell * (3j)^2; float by default, exact on request."""
    if l1 < 0 or l2 < 0:
        raise ValueError("degrees must be non-negative")
    row = _square_row(min(l1, l2), max(l1, l2))
    if exact:
        total = mpq(0)
        for ell, sq in row:
            total += ell * sq
        return total
    return math.fsum(ell * float(sq) for ell, sq in row)


def quadruple_product_statistic(l1: int, l2: int, l3: int) -> float:
    """|3j| * [(l1+l2-l3+1)(l1+l3-l2+1)(l2+l3-l1+1)(l1+l2+l3+1)]^(1/4)."""
    sym = threej_zero(l1, l2, l3)
    a = l1 + l2 - l3 + 1
    b = l1 + l3 - l2 + 1
    c = l2 + l3 - l1 + 1
    d = l1 + l2 + l3 + 1
    return abs(sym.value) * (float(a) * b * c * d) ** 0.25


def write_threej_csv(path, triples: Iterable[tuple[int, int, int]] | None = None,
                     max_degree: int | None = None) -> int:
    """Audit dump of 3j data as CSV rows (l1, l2, l3, sign, numerator, denominator).

    Dumps the given triples, or every sorted triangle-admissible triple with
    degrees <= max_degree.  Returns the number of rows written.
    """
    if triples is None:
        if max_degree is None:
            raise ValueError("give triples or max_degree")
        triples = (
            (a, b, c)
            for a in range(max_degree + 1)
            for b in range(a, max_degree + 1)
            for c in range(b, min(a + b, max_degree) + 1)
        )
    count = 0
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["l1", "l2", "l3", "sign", "numerator", "denominator"])
        for l1, l2, l3 in triples:
            sym = threej_zero(l1, l2, l3)
            writer.writerow([l1, l2, l3, sym.sign, sym.square.numerator, sym.square.denominator])
            count += 1
    return count
