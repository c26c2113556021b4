"""Sphere-graph Minkowski-deficit numerics: zonal harmonics, exact 3j algebra, geometry sweeps."""

__version__ = "0.1.0"

from .family import (  # noqa: F401
    ConstructionParams,
    HarmonicSum,
    SweepRow,
    build_u,
    cubic_term_exact,
    cubic_term_quadrature,
    deficit_analysis,
)
from .geometry import (  # noqa: F401
    SurfaceReport,
    mean_curvature,
    surface_report,
    taylor_pieces,
)
from .legendre import (  # noqa: F401
    LegendreProfile,
    QuadratureRule,
    RadialProfile,
    gauss_legendre_rule,
    legendre_eval,
    sphere_integrate,
    v_eval,
    zonal_profile,
)
from .reporting import fit_exponent  # noqa: F401
from .wigner import (  # noqa: F401
    ThreeJZero,
    gaunt_expand,
    m_product_integral,
    threej_zero,
    triangle_range,
    weighted_sum,
)
