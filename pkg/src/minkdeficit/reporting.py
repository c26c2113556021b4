"""Machine-readable check records, sweep serialization, and log-log exponent fits."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .family import SweepRow

__all__ = [
    "OutputRecord",
    "RECORD_CSV_COLUMNS",
    "fit_exponent",
    "write_records_csv",
    "write_records_json",
    "write_sweep_csv",
    "write_sweep_json",
    "read_sweep_csv",
    "TRACEABILITY",
]

# runtime is deliberately absent: record CSVs must be byte-identical across
# reruns with the same config and seed.
RECORD_CSV_COLUMNS = ("suite", "check_id", "status", "measured", "expected", "tolerance")


@dataclass(frozen=True)
class OutputRecord:
    """One check outcome: pass/fail for gated checks, info for exploratory output."""

    suite: str
    check_id: str
    status: str  # "pass" | "fail" | "info"
    measured: float | str
    expected: float | str
    tolerance: float | None
    runtime: float


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


def write_records_csv(path, records: Iterable[OutputRecord]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORD_CSV_COLUMNS)
        for rec in records:
            writer.writerow([rec.suite, rec.check_id, rec.status,
                             _fmt(rec.measured), _fmt(rec.expected), _fmt(rec.tolerance)])


def write_records_json(path, records: Iterable[OutputRecord]) -> None:
    payload = [
        {
            "suite": rec.suite,
            "check_id": rec.check_id,
            "status": rec.status,
            "measured": rec.measured,
            "expected": rec.expected,
            "tolerance": rec.tolerance,
            "runtime": rec.runtime,
        }
        for rec in records
    ]
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


SWEEP_SCHEMA_VERSION = "1"


def write_sweep_csv(path, rows: Sequence[SweepRow]) -> None:
    if not rows:
        raise ValueError("no sweep rows to write")
    moments = [m for m, _ in rows[0].delta_moments]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"# sweep schema {SWEEP_SCHEMA_VERSION}"])
        writer.writerow(SweepRow.csv_columns(moments))
        for row in rows:
            writer.writerow(row.csv_row())


def write_sweep_json(path, rows: Sequence[SweepRow]) -> None:
    payload = {"schema": SWEEP_SCHEMA_VERSION, "rows": [row.to_dict() for row in rows]}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def read_sweep_csv(path) -> list[dict]:
    """Rows of a sweep CSV as dicts with numeric fields parsed."""
    out = []
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    for raw in reader:
        row = {}
        for key, val in raw.items():
            if key in ("k", "ell"):
                row[key] = int(val)
            else:
                row[key] = float(val)
        out.append(row)
    return out


def fit_exponent(pairs: Sequence[tuple[float, float]]) -> tuple[float, float, float]:
    """Least-squares fit of value ~ C * ell^slope on (log ell, log value).

    Needs at least 3 pairs with positive values; returns
    (slope, intercept, max_residual) with the residual measured in log space.
    """
    if len(pairs) < 3:
        raise ValueError("need at least 3 (ell, value) pairs")
    if any(v <= 0.0 for _, v in pairs) or any(x <= 0.0 for x, _ in pairs):
        raise ValueError("exponent fits need positive scales and values")
    xs = [math.log(x) for x, _ in pairs]
    ys = [math.log(v) for _, v in pairs]
    n = len(xs)
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    sxx = math.fsum((x - mx) ** 2 for x in xs)
    sxy = math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = my - slope * mx
    max_residual = max(abs(y - (slope * x + intercept)) for x, y in zip(xs, ys))
    return slope, intercept, max_residual


# Claim traceability: every statement the harness is responsible for, mapped to
# the check ids that exercise it.  Emitted by the report command.
TRACEABILITY: tuple[tuple[str, str, tuple[str, ...]], ...] = (
    ("legendre-generating-function",
     "P_ell defined by (1-2st+t^2)^(-1/2) = sum P_ell(s) t^ell",
     ("basis:generating-function-reconstruction",)),
    ("zonal-eigenrelation",
     "-Lap v_ell = ell(ell+1) v_ell on the sphere",
     ("basis:eigenrelation",)),
    ("zonal-inner-products",
     "(1/4pi) int v_a v_b = delta_ab/(2a+1); gradient and Laplacian analogues",
     ("basis:orthogonality-matrix", "basis:gradient-inner-product",
      "basis:laplacian-inner-product")),
    ("zonal-sup-bounds",
     "sup|v_ell| = O(1) and sup|grad v_ell| = O(ell)",
     ("basis:zonal-sup-bound", "basis:gradient-sup-bound")),
    ("graph-identities",
     "g(u), g(u)^-1, nu(u), h(u) of a normal graph over the sphere",
     ("geometry:metric-inverse-identity", "geometry:area-element-identity",
      "geometry:mean-curvature-double-path")),
    ("area-meanH-expansion",
     "area = 4pi + O(|u|_W12^2); int H = 8pi + int Hess u(grad u, grad u) + remainders",
     ("geometry:taylor-area-bounded", "geometry:taylor-meanh-slope")),
    ("triangle-range",
     "admissible degrees |l1-l2| <= ell <= l1+l2",
     ("wigner:triangle-range",)),
    ("threej-closed-form",
     "zero-m 3j symbol: parity zero, sign (-1)^(J/2), exact factorial square",
     ("wigner:threej-exact-values", "wigner:parity-annihilation",
      "wigner:permutation-symmetry", "wigner:threej-float-consistency")),
    ("gaunt-product",
     "v_l1 v_l2 = sum (2l+1)(3j)^2 v_l over the triangle range",
     ("wigner:gaunt-normalization", "wigner:gaunt-pointwise")),
    ("m-product-formula",
     "(1/4pi) int of an m-fold zonal product as a path-lattice sum of 3j squares",
     ("wigner:m2-collapse", "wigner:triple-product-dual-oracle",
      "wigner:m4-dual-oracle", "wigner:path-lattice-m3-reduction")),
    ("triple-product-derivative-identity",
     "int Lap v1 grad v2 . grad v3 = -(1/2) A1 [A2+A3-A1] int v1 v2 v3",
     ("wigner:triple-product-derivative-identity",)),
    ("threej-lower-bound",
     "(l1+l2+l3) 3j >= sqrt(2/pi) - delta for admissible 0 mod 4 triples; a_k -> (2/pi)^(1/4)",
     ("wigner:a-seq-start", "wigner:a-seq-limit", "wigner:a-seq-monotone",
      "wigner:scaled-threej-floor", "wigner:scaled-threej-degenerate-growth")),
    ("threej-upper-bound",
     "|3j| times the quadruple gap product^(1/4) is uniformly bounded",
     ("wigner:quadruple-product-statistic",)),
    ("weighted-summation-bound",
     "sum ell (3j)^2 over the triangle range is uniformly bounded",
     ("wigner:weighted-sum-values", "wigner:weighted-sum-bounded")),
    ("w12-scaling",
     "|u_ell|_W12 = O(ell^(-1-alpha)) for the construction family",
     ("report:w12-slope",)),
    ("c1-scaling",
     "|u_ell|_C1 = O(ell^(-alpha)) for the construction family",
     ("report:c1-slope",)),
    ("delta-moment-scaling",
     "int (Lap u_ell)^2 = O(ell^(-2 alpha)); higher even moments by quadrature",
     ("report:delta-moment-2-slope", "sweep:delta-moment-dual-oracle")),
    ("cubic-term-positivity",
     "liminf ell^(1+3a) int |grad u|^2 Lap u > 0, with floor 2^-18 and bracket >= ell^2/2",
     ("sweep:cubic-positive", "sweep:cubic-scaled-floor", "sweep:bracket-floor",
      "sweep:cubic-dual-oracle")),
    ("deficit-remainder",
     "M = -int |grad u|^2 Lap u + O(ell^(-2-2a)) + O(ell^(-1-4a)); ratios stay bounded",
     ("report:remainder-ratio-bounded", "report:kappa-stabilization")),
    ("traceless-energy-decay",
     "int |h_traceless|^2 over the graph tends to zero along the family",
     ("sweep:traceless-energy-decreasing",)),
    ("schur-gauss-bonnet",
     "int(H-Hbar)^2 = 2 int|h_traceless|^2 - sqrt(64pi) M/sqrt(area) - M^2/area; Gauss curvature integral 4pi",
     ("geometry:schur-identity-residual", "geometry:gauss-bonnet-integral",
      "geometry:sphere-report", "geometry:dilation-covariance")),
)
