"""The counterexample family u = -ell^(-2-alpha) * sum of zonal harmonics, and its invariants.

For k >= 7, ell = 2^k, the family sums the zonal harmonics of degrees
ell + 4i for i = 0 .. ell/32 (all degrees 0 mod 4, pinned to [ell, 9ell/8]),
with the common coefficient -ell^(-2-alpha).  The modules below compute its
Sobolev/C1 norms exactly or by dense sampling, the cubic functional
(1/4pi) int |grad u|^2 Lap u by two independent routes (triple sums over
exact 3j squares, and quadrature), and the remainder structure of the
Minkowski deficit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from gmpy2 import mpq

from . import geometry, wigner
from .legendre import (
    LegendreProfile,
    QuadratureRule,
    rule_for_products,
    sphere_integrate,
    sup_norms,
)

__all__ = [
    "TripleBudgetError",
    "ConstructionParams",
    "HarmonicSum",
    "SweepRow",
    "build_u",
    "w12_norm",
    "c1_norm",
    "delta_moment",
    "cubic_term_exact",
    "cubic_term_quadrature",
    "bracket_values",
    "deficit_analysis",
]

TRIPLE_CAP_DEFAULT = 4_000_000

MIN_K = 7
MAX_K = 13


class TripleBudgetError(RuntimeError):
    """Triple sum too large for the configured budget."""

    def __init__(self, count: int, budget: int):
        self.count = count
        self.budget = budget
        super().__init__(f"triple sum has {count} terms, budget is {budget}")


@dataclass(frozen=True)
class ConstructionParams:
    """(k, alpha) driving the family; ell = 2^k, degrees ell + 4i, i <= ell/32."""

    k: int
    alpha: float

    def __post_init__(self):
        if self.k < MIN_K:
            raise ValueError(f"k must be >= {MIN_K}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")

    @property
    def ell(self) -> int:
        return 2**self.k

    @property
    def n_terms(self) -> int:
        return 2 ** (self.k - 5) + 1

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(self.ell + 4 * i for i in range(self.n_terms))

    @property
    def coefficient(self) -> float:
        return -float(self.ell) ** (-2.0 - self.alpha)


class HarmonicSum(LegendreProfile):
    """Finite zonal-harmonic sum with zero mean (no degree-0 term allowed)."""

    def __init__(self, terms, label: str = ""):
        super().__init__(terms, label)
        if any(ell == 0 for ell, _ in self.terms):
            raise ValueError("a zero-mean harmonic sum cannot carry a degree-0 term")


def build_u(params: ConstructionParams) -> HarmonicSum:
    """The canonical family member for (k, alpha)."""
    c = params.coefficient
    return HarmonicSum(
        [(ell, c) for ell in params.degrees],
        label=f"u[k={params.k},alpha={params.alpha}]",
    )


def _resolve(source) -> HarmonicSum:
    if isinstance(source, ConstructionParams):
        return build_u(source)
    if isinstance(source, HarmonicSum):
        return source
    raise TypeError("expected ConstructionParams or HarmonicSum")


def w12_norm(hsum: HarmonicSum) -> float:
    """W^{1,2} norm, exact through the zonal inner products (no quadrature):
    sqrt( sum c^2 * 4 pi (1 + ell(ell+1)) / (2 ell + 1) )."""
    total = math.fsum(
        c * c * 4.0 * math.pi * (1.0 + ell * (ell + 1)) / (2 * ell + 1)
        for ell, c in hsum.terms
    )
    return math.sqrt(total)


def c1_norm(hsum: HarmonicSum) -> float:
    """sup |u| + sup |grad u| over a dense refined grid."""
    if not hsum.terms:
        return 0.0
    c0, c1 = sup_norms(hsum)
    return c0 + c1


def delta_moment(hsum: HarmonicSum, m: int, rule: QuadratureRule | None = None) -> float:
    """int_S (Lap u)^m for even m; exact via orthogonality at m = 2, quadrature beyond.

    At m = 2 the value is sum c^2 * 4 pi * ell^2 (ell+1)^2 / (2 ell + 1).
    For m >= 4 the integrand is a polynomial of degree m * band_limit and the
    default rule is sized to integrate it exactly.
    """
    if m < 2 or m % 2 != 0:
        raise ValueError("m must be an even integer >= 2")
    if not hsum.terms:
        return 0.0
    if m == 2:
        return math.fsum(
            c * c * 4.0 * math.pi * (ell * (ell + 1)) ** 2 / (2 * ell + 1)
            for ell, c in hsum.terms
        )
    rule = rule or rule_for_products(m, hsum.band_limit)
    arr = rule.nodes
    _, ut, utt = hsum.evaluate(arr)
    lap = (1.0 - arr * arr) * utt - 2.0 * arr * ut
    return sphere_integrate(lap**m, rule, degree=m * hsum.band_limit)


def _square_table(degrees: Sequence[int]) -> np.ndarray:
    """Symmetric (n, n, n) array of float (3j)^2 over the degree list."""
    degs = list(degrees)
    n = len(degs)
    flat = wigner.threej_square_float_table(degs)
    idx = {d: i for i, d in enumerate(sorted(set(degs)))}
    table = np.zeros((len(idx), len(idx), len(idx)))
    for (d1, d2, d3), val in flat.items():
        i, j, k = idx[d1], idx[d2], idx[d3]
        for a, b, c in ((i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)):
            table[a, b, c] = val
    order = [idx[d] for d in degs]
    return table[np.ix_(order, order, order)]


def cubic_term_exact(source, triple_budget: int = TRIPLE_CAP_DEFAULT,
                     exact_accumulation: bool = False):
    """(1/4pi) int |grad u|^2 Lap u via the triple sum over exact 3j squares:

        -1/2 sum_{i,j,k} c_i c_j c_k A_i [A_j + A_k - A_i] (3j)^2,   A = ell(ell+1).

    The sum is partitioned over the first index and reduced with exact (fsum)
    partial sums in index order, so the result is independent of any thread
    partitioning.  With exact_accumulation (uniform-coefficient sums only)
    the integer-weighted 3j squares are accumulated as exact rationals and
    scaled once at the end; returns (value, exact_sum) in that case.
    """
    hsum = _resolve(source)
    if not hsum.terms:
        return (0.0, mpq(0)) if exact_accumulation else 0.0
    degs = [ell for ell, _ in hsum.terms]
    coeffs = np.array([c for _, c in hsum.terms])
    n = len(degs)
    if n**3 > triple_budget:
        raise TripleBudgetError(n**3, triple_budget)
    A = np.array([ell * (ell + 1) for ell in degs], dtype=float)

    if exact_accumulation:
        cs = {c for _, c in hsum.terms}
        if len(cs) != 1:
            raise ValueError("exact accumulation requires a uniform coefficient")
        coeff = cs.pop()
        total = mpq(0)
        ai = [ell * (ell + 1) for ell in degs]
        for i, d1 in enumerate(degs):
            for j, d2 in enumerate(degs):
                for k, d3 in enumerate(degs):
                    sq = wigner.threej_zero(d1, d2, d3).square
                    if sq:
                        total += ai[i] * (ai[j] + ai[k] - ai[i]) * sq
        value = -0.5 * coeff**3 * float(total)
        return value, total

    table = _square_table(degs)
    partials = []
    for i in range(n):
        bracket = A[:, None] + A[None, :] - A[i]  # A_j + A_k - A_i over (j, k)
        terms = (coeffs[:, None] * coeffs[None, :]) * bracket * table[i]
        partials.append(coeffs[i] * A[i] * math.fsum(terms.ravel().tolist()))
    return -0.5 * math.fsum(partials)


def cubic_term_quadrature(source, rule: QuadratureRule | None = None) -> float:
    """(1/4pi) int |grad u|^2 Lap u by direct quadrature of the profile."""
    hsum = _resolve(source)
    if not hsum.terms:
        return 0.0
    rule = rule or rule_for_products(3, hsum.band_limit)
    arr = rule.nodes
    _, ut, utt = hsum.evaluate(arr)
    s2 = 1.0 - arr * arr
    integrand = s2 * ut * ut * (s2 * utt - 2.0 * arr * ut)
    return sphere_integrate(integrand, rule, degree=3 * hsum.band_limit) / (4.0 * math.pi)


def bracket_values(params: ConstructionParams) -> np.ndarray:
    """All N^3 bracket values A_j + A_k - A_i over the family degrees."""
    A = np.array([ell * (ell + 1) for ell in params.degrees], dtype=float)
    return A[None, :, None] + A[None, None, :] - A[:, None, None]


@dataclass(frozen=True)
class SweepRow:
    """One (k, alpha) row of the verification sweep."""

    k: int
    alpha: float
    ell: int
    w12_norm: float
    c1_norm: float
    delta_moments: tuple[tuple[int, float], ...]
    cubic_exact: float
    cubic_quadrature: float
    cubic_scaled: float
    deficit: float
    deficit_scaled: float
    traceless_energy: float
    remainder_ratio_half: float
    remainder_ratio_one: float

    _BASE_COLUMNS = ("k", "alpha", "ell", "w12_norm", "c1_norm")
    _TAIL_COLUMNS = ("cubic_exact", "cubic_quadrature", "cubic_scaled",
                     "deficit", "deficit_scaled", "traceless_energy",
                     "remainder_ratio_half", "remainder_ratio_one")

    @staticmethod
    def csv_columns(moments: Sequence[int]) -> list[str]:
        cols = list(SweepRow._BASE_COLUMNS)
        cols += [f"delta_moment_{m}" for m in moments]
        cols += list(SweepRow._TAIL_COLUMNS)
        return cols

    def csv_row(self) -> list[str]:
        vals = [str(self.k), repr(self.alpha), str(self.ell),
                repr(self.w12_norm), repr(self.c1_norm)]
        vals += [repr(v) for _, v in self.delta_moments]
        vals += [repr(getattr(self, c)) for c in self._TAIL_COLUMNS]
        return vals

    def to_dict(self) -> dict:
        out = {c: getattr(self, c) for c in self._BASE_COLUMNS}
        out.update({f"delta_moment_{m}": v for m, v in self.delta_moments})
        out.update({c: getattr(self, c) for c in self._TAIL_COLUMNS})
        return out


def deficit_analysis(params: ConstructionParams | None,
                     moments: Sequence[int] = (2, 4),
                     triple_budget: int = TRIPLE_CAP_DEFAULT,
                     rule: QuadratureRule | None = None) -> SweepRow:
    """Populate a SweepRow: exact norms, both cubic routes, the true deficit,
    and the remainder ratios |M + kappa int |grad u|^2 Lap u| / (ell^(-2-2a) + ell^(-1-4a))
    for kappa in {1/2, 1}.

    `params=None` is the u = 0 sentinel (round sphere row, deficit 0).
    """
    if params is None:
        hsum = HarmonicSum([], label="u=0")
        ell, k, alpha = 1, 0, 0.0
    else:
        hsum = build_u(params)
        ell, k, alpha = params.ell, params.k, params.alpha

    w12 = w12_norm(hsum)
    c1 = c1_norm(hsum)
    mom = tuple((m, delta_moment(hsum, m)) for m in moments)
    cubic_e = cubic_term_exact(hsum, triple_budget=triple_budget)
    cubic_q = cubic_term_quadrature(hsum)
    report = geometry.surface_report(hsum, rule=rule)

    cubic_full = 4.0 * math.pi * cubic_e  # int_S |grad u|^2 Lap u
    scale = float(ell) ** (1.0 + 3.0 * alpha)
    remainder_scale = float(ell) ** (-2.0 - 2.0 * alpha) + float(ell) ** (-1.0 - 4.0 * alpha)
    return SweepRow(
        k=k,
        alpha=alpha,
        ell=ell,
        w12_norm=w12,
        c1_norm=c1,
        delta_moments=mom,
        cubic_exact=cubic_e,
        cubic_quadrature=cubic_q,
        cubic_scaled=scale * cubic_full,
        deficit=report.deficit,
        deficit_scaled=scale * report.deficit,
        traceless_energy=report.traceless_energy,
        remainder_ratio_half=abs(report.deficit + 0.5 * cubic_full) / remainder_scale,
        remainder_ratio_one=abs(report.deficit + 1.0 * cubic_full) / remainder_scale,
    )
