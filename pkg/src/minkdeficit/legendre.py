"""Legendre polynomials, Gauss-Legendre quadrature, and axisymmetric calculus on the sphere.

An axisymmetric function on the unit sphere S is represented by its profile
along the third coordinate t = x3 in [-1, 1], together with two t-derivatives.
Every sphere integral of such a function reduces to 2*pi times a 1D integral
over t, which is what :func:`sphere_integrate` evaluates.

The zonal harmonic of degree ell is v_ell(t) = P_ell(-t); it satisfies
-Lap v_ell = ell*(ell+1) * v_ell for the sphere Laplacian.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "LegendreSample",
    "QuadratureRule",
    "RadialProfile",
    "LegendreProfile",
    "ConstantProfile",
    "CallableProfile",
    "legendre_eval",
    "legendre_eval_many",
    "legendre_value_table",
    "v_eval",
    "zonal_profile",
    "random_band_limited",
    "gauss_legendre_rule",
    "rule_for_products",
    "sphere_integrate",
    "axisym_grad_sq",
    "axisym_laplacian",
    "hessian_cubic",
    "sup_norms",
]

SPHERE_AREA = 4.0 * math.pi


def _check_domain(t):
    arr = np.asarray(t, dtype=float)
    if arr.size and (arr.min() < -1.0 or arr.max() > 1.0):
        raise ValueError("evaluation point outside [-1, 1]")
    return arr


@dataclass(frozen=True)
class LegendreSample:
    """P_ell and its first two derivatives at a point (or array of points)."""

    degree: int
    point: float | np.ndarray
    value: float | np.ndarray
    d1: float | np.ndarray
    d2: float | np.ndarray


def _recurrence(max_degree: int, t: np.ndarray, capture: Iterable[int]):
    """Run the three-term recurrence up to max_degree, capturing rows.

    (ell+1) P_{ell+1} = (2 ell+1) t P_ell - ell P_{ell-1}, differentiated
    once and twice for the derivative rows.  Returns {ell: (P, P', P'')}.
    """
    wanted = set(capture)
    out: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}

    p_prev = np.ones_like(t)
    d_prev = np.zeros_like(t)
    s_prev = np.zeros_like(t)
    if 0 in wanted:
        out[0] = (p_prev.copy(), d_prev.copy(), s_prev.copy())
    if max_degree == 0:
        return out

    p = t.copy()
    d = np.ones_like(t)
    s = np.zeros_like(t)
    if 1 in wanted:
        out[1] = (p.copy(), d.copy(), s.copy())

    for ell in range(1, max_degree):
        a = (2 * ell + 1) / (ell + 1)
        b = ell / (ell + 1)
        p_next = a * t * p - b * p_prev
        d_next = a * (p + t * d) - b * d_prev
        s_next = a * (2.0 * d + t * s) - b * s_prev
        p_prev, p = p, p_next
        d_prev, d = d, d_next
        s_prev, s = s, s_next
        if ell + 1 in wanted:
            out[ell + 1] = (p.copy(), d.copy(), s.copy())
    return out


def legendre_eval(ell: int, t) -> LegendreSample:
    """Evaluate P_ell(t), P_ell'(t), P_ell''(t) by stable recurrence."""
    if ell < 0:
        raise ValueError("degree must be non-negative")
    scalar = np.isscalar(t)
    arr = _check_domain(t)
    rows = _recurrence(ell, np.atleast_1d(arr), (ell,))
    p, d, s = rows[ell]
    if scalar:
        return LegendreSample(ell, float(arr), float(p[0]), float(d[0]), float(s[0]))
    return LegendreSample(ell, arr, p.reshape(arr.shape), d.reshape(arr.shape), s.reshape(arr.shape))


def legendre_eval_many(degrees: Sequence[int], t) -> dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """One recurrence pass returning (P, P', P'') for each requested degree."""
    if not degrees:
        return {}
    if min(degrees) < 0:
        raise ValueError("degrees must be non-negative")
    arr = np.atleast_1d(_check_domain(t))
    return _recurrence(max(degrees), arr, degrees)


def legendre_value_table(max_degree: int, t) -> np.ndarray:
    """Array of shape (max_degree+1, len(t)) with P_ell(t) values only."""
    arr = np.atleast_1d(_check_domain(t))
    table = np.empty((max_degree + 1, arr.size))
    table[0] = 1.0
    if max_degree >= 1:
        table[1] = arr
    for ell in range(1, max_degree):
        table[ell + 1] = ((2 * ell + 1) * arr * table[ell] - ell * table[ell - 1]) / (ell + 1)
    return table


def v_eval(ell: int, t):
    """Zonal harmonic v_ell(t) = P_ell(-t)."""
    scalar = np.isscalar(t)
    arr = _check_domain(t)
    val = legendre_eval(ell, -arr).value
    return float(val) if scalar else val


# ---------------------------------------------------------------------------
# profiles


class RadialProfile:
    """Axisymmetric function on S accessed through its t-profile.

    Subclasses implement :meth:`evaluate` returning (u, u_t, u_tt), each
    broadcast over the input array.  band_limit is the maximum Legendre
    degree when the profile is band-limited, else None.
    """

    label: str = ""
    band_limit: int | None = None

    def evaluate(self, t) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        raise NotImplementedError

    def __call__(self, t):
        u = self.evaluate(t)[0]
        return float(u[0]) if np.isscalar(t) else u


class LegendreProfile(RadialProfile):
    """Finite sum u(t) = sum_i c_i * v_{ell_i}(t) with exact derivatives."""

    def __init__(self, terms: Iterable[tuple[int, float]], label: str = ""):
        merged: dict[int, float] = {}
        for ell, c in terms:
            if ell < 0:
                raise ValueError("degrees must be non-negative")
            merged[ell] = merged.get(ell, 0.0) + float(c)
        self.terms = tuple(sorted(merged.items()))
        self.label = label
        self.band_limit = max((ell for ell, _ in self.terms), default=0)

    def evaluate(self, t):
        arr = np.atleast_1d(_check_domain(t))
        u = np.zeros_like(arr)
        ut = np.zeros_like(arr)
        utt = np.zeros_like(arr)
        if self.terms:
            rows = _recurrence(self.band_limit, -arr, [ell for ell, _ in self.terms])
            for ell, c in self.terms:
                p, d, s = rows[ell]
                u += c * p
                ut -= c * d      # d/dt P(-t) = -P'(-t)
                utt += c * s
        return u, ut, utt

    def coefficient(self, ell: int) -> float:
        return dict(self.terms).get(ell, 0.0)


class ConstantProfile(RadialProfile):
    def __init__(self, value: float, label: str = ""):
        self.value = float(value)
        self.label = label or f"const({value})"
        self.band_limit = 0

    def evaluate(self, t):
        arr = np.atleast_1d(_check_domain(t))
        z = np.zeros_like(arr)
        return np.full_like(arr, self.value), z, z.copy()


class CallableProfile(RadialProfile):
    """Profile backed by an arbitrary fn(t) -> (u, u_t, u_tt)."""

    def __init__(self, fn: Callable, label: str = "", band_limit: int | None = None):
        self.fn = fn
        self.label = label
        self.band_limit = band_limit

    def evaluate(self, t):
        arr = np.atleast_1d(_check_domain(t))
        u, ut, utt = self.fn(arr)
        return (np.broadcast_to(np.asarray(u, dtype=float), arr.shape).copy(),
                np.broadcast_to(np.asarray(ut, dtype=float), arr.shape).copy(),
                np.broadcast_to(np.asarray(utt, dtype=float), arr.shape).copy())


def zonal_profile(ell: int, coeff: float = 1.0) -> LegendreProfile:
    return LegendreProfile([(ell, coeff)], label=f"v{ell}" if coeff == 1.0 else f"{coeff}*v{ell}")


def random_band_limited(rng: np.random.Generator, max_degree: int = 12,
                        amplitude: float = 0.05, min_degree: int = 1) -> LegendreProfile:
    """Random zero-mean band-limited profile with C1 norm about `amplitude`."""
    degrees = range(min_degree, max_degree + 1)
    coeffs = [(ell, rng.standard_normal() / (1.0 + ell) ** 1.5) for ell in degrees]
    prof = LegendreProfile(coeffs, label=f"random<=L{max_degree}")
    c0, c1 = sup_norms(prof)
    scale = amplitude / max(c0 + c1, 1e-300)
    return LegendreProfile([(ell, c * scale) for ell, c in coeffs], label=prof.label)


# ---------------------------------------------------------------------------
# quadrature


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree <= exact_degree."""

    nodes: np.ndarray
    weights: np.ndarray
    exact_degree: int

    def __len__(self):
        return self.nodes.size


@lru_cache(maxsize=128)
def gauss_legendre_rule(n: int) -> QuadratureRule:
    """n-point Gauss-Legendre rule via Newton iteration on P_n.

    Initial guesses from the Chebyshev-like asymptotic node locations;
    iterated to 1e-15 and symmetrized about 0.
    """
    if n < 1:
        raise ValueError("need at least one node")
    j = np.arange(n)
    x = np.cos(math.pi * (j + 0.75) / (n + 0.5))
    dp = np.ones_like(x)
    for _ in range(100):
        rows = _recurrence(n, x, (n,))
        p, dp, _ = rows[n]
        dx = p / dp
        x -= dx
        if np.max(np.abs(dx)) <= 1e-15:
            break
    rows = _recurrence(n, x, (n,))
    p, dp, _ = rows[n]
    x -= p / dp  # final polish
    x = np.sort(x)
    x = 0.5 * (x - x[::-1])  # enforce exact antisymmetry
    dp = _recurrence(n, x, (n,))[n][1]
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    w = 0.5 * (w + w[::-1])
    x.setflags(write=False)
    w.setflags(write=False)
    return QuadratureRule(nodes=x, weights=w, exact_degree=2 * n - 1)


def rule_for_products(m: int, max_degree: int) -> QuadratureRule:
    """Rule sized for a product of m Legendre factors of degree <= max_degree.

    Node count ceil((m*L+4)/2) + 8: exact for the polynomial part with headroom
    for derivative weights.
    """
    n = (m * max_degree + 4 + 1) // 2 + 8
    return gauss_legendre_rule(n)


def sphere_integrate(phi, rule: QuadratureRule, degree: int | None = None) -> float:
    """Integrate an axisymmetric integrand over S: 2*pi * sum w_j phi(t_j).

    phi is a callable over node arrays or an array of node values.  Passing
    `degree` warns when the rule cannot integrate that polynomial degree
    exactly.  Accumulation uses exact (fsum) summation.
    """
    if degree is not None and degree > rule.exact_degree:
        warnings.warn(
            f"integrand degree {degree} exceeds rule capacity {rule.exact_degree}",
            stacklevel=2,
        )
    vals = phi(rule.nodes) if callable(phi) else np.asarray(phi, dtype=float)
    vals = np.broadcast_to(vals, rule.nodes.shape)
    return 2.0 * math.pi * math.fsum((rule.weights * vals).tolist())


# ---------------------------------------------------------------------------
# axisymmetric differential operators


def axisym_grad_sq(profile: RadialProfile, t):
    """|grad_S u|^2 at t, equal to (1-t^2) * u_t(t)^2."""
    arr = np.atleast_1d(_check_domain(t))
    _, ut, _ = profile.evaluate(arr)
    out = (1.0 - arr * arr) * ut * ut
    return float(out[0]) if np.isscalar(t) else out


def axisym_laplacian(profile: RadialProfile, t):
    """Sphere Laplacian of u at t: d/dt[(1-t^2) u_t] = (1-t^2) u_tt - 2 t u_t."""
    arr = np.atleast_1d(_check_domain(t))
    _, ut, utt = profile.evaluate(arr)
    out = (1.0 - arr * arr) * utt - 2.0 * arr * ut
    return float(out[0]) if np.isscalar(t) else out


def hessian_cubic(profile: RadialProfile, t):
    """Hess u (grad u, grad u) at t via the identity 0.5 <grad u, grad |grad u|^2>.

    In the t-profile this is (1-t^2) u_t^2 [ (1-t^2) u_tt - t u_t ]; no
    Christoffel symbols are needed.
    """
    arr = np.atleast_1d(_check_domain(t))
    _, ut, utt = profile.evaluate(arr)
    one_mt2 = 1.0 - arr * arr
    out = one_mt2 * ut * ut * (one_mt2 * utt - arr * ut)
    return float(out[0]) if np.isscalar(t) else out


# ---------------------------------------------------------------------------
# sup norms


def _refine_peaks(fn, grid: np.ndarray, vals: np.ndarray, count: int = 6) -> float:
    """Parabolic refinement of the largest local maxima of |fn| on a grid."""
    best = float(np.max(vals))
    order = np.argsort(vals)[::-1][:count]
    for j in order:
        if j == 0 or j == vals.size - 1:
            continue
        t0, t1, t2 = grid[j - 1], grid[j], grid[j + 1]
        f0, f1, f2 = vals[j - 1], vals[j], vals[j + 1]
        denom = (f0 - 2.0 * f1 + f2)
        if denom >= -1e-300:
            continue
        tv = t1 + 0.5 * (f0 - f2) / denom * (t1 - t0)
        tv = min(1.0, max(-1.0, tv))
        best = max(best, float(fn(np.array([tv]))[0]))
    return best


def sup_norms(profile: RadialProfile, oversample: int = 4) -> tuple[float, float]:
    """(sup |u|, sup |grad u|) by dense sampling plus local refinement.

    Uses a uniform t-grid of oversample * band_limit points together with a
    Chebyshev-spaced grid (which clusters where Legendre extrema do), then
    refines the top candidates parabolically.
    """
    limit = profile.band_limit if profile.band_limit else 32
    n = max(257, oversample * limit + 1)
    uniform = np.linspace(-1.0, 1.0, n)
    cheb = np.cos(np.linspace(0.0, math.pi, n))

    def absu(ts):
        return np.abs(profile.evaluate(ts)[0])

    def gradnorm(ts):
        _, ut, _ = profile.evaluate(ts)
        return np.sqrt(np.maximum(1.0 - ts * ts, 0.0)) * np.abs(ut)

    c0 = 0.0
    c1 = 0.0
    for grid in (uniform, cheb):
        grid = np.sort(grid)
        c0 = max(c0, _refine_peaks(absu, grid, absu(grid)))
        c1 = max(c1, _refine_peaks(gradnorm, grid, gradnorm(grid)))
    return c0, c1
