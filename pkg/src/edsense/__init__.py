"""Exact energy-detection performance over two-format fading channels.

The package is organized bottom-up:

- ``specfun``: scalar special functions (regularized incomplete gamma and its
  inverse, modified Bessel I, Kummer 1F1, Marcum Q) built on ascending series
  and continued fractions, with explicit convergence controls.
- ``integrals``: the weighted Marcum-Q integral evaluated three mutually
  checking ways — closed form (integer shape), truncated series with a
  certified error bound, and direct adaptive quadrature.
- ``fading``: the two-format fading model — parameter derivations, the SNR
  density, and a moment-based shape estimator.
- ``detection``: square-law detector operating points (false alarm, threshold
  inversion, conditional detection) and fading-averaged detection probability
  via the integral triad, plus curve/table generators.
- ``cli``: deterministic CSV/JSON table output for the above.
"""

from .errors import (
    ConvergenceError,
    DomainError,
    InstabilityError,
    RangeLimitError,
)
from .specfun import (
    DEFAULT_CONTROL,
    SeriesControl,
    bessel_i,
    inv_reg_upper_gamma,
    kummer_1f1,
    marcum_q,
    reg_upper_gamma,
)
from .integrals import (
    IntegralParams,
    SeriesResult,
    closed_form,
    quadrature_oracle,
    series,
    truncation_bound,
)
from .fading import (
    EtaMuParams,
    Format,
    derive_params,
    mu_from_moments,
    snr_pdf,
)
from .detection import (
    CurveRow,
    CurveTable,
    DetectorConfig,
    RocPoint,
    avg_pd_eta_mu,
    avg_pd_for_pf,
    avg_pd_quadrature,
    pd_vs_snr_curve,
    prob_detection_awgn,
    prob_false_alarm,
    roc_curve,
    threshold_for_pf,
)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DomainError",
    "InstabilityError",
    "RangeLimitError",
    "DEFAULT_CONTROL",
    "SeriesControl",
    "bessel_i",
    "inv_reg_upper_gamma",
    "kummer_1f1",
    "marcum_q",
    "reg_upper_gamma",
    "IntegralParams",
    "SeriesResult",
    "closed_form",
    "quadrature_oracle",
    "series",
    "truncation_bound",
    "EtaMuParams",
    "Format",
    "derive_params",
    "mu_from_moments",
    "snr_pdf",
    "CurveRow",
    "CurveTable",
    "DetectorConfig",
    "RocPoint",
    "avg_pd_eta_mu",
    "avg_pd_for_pf",
    "avg_pd_quadrature",
    "pd_vs_snr_curve",
    "prob_detection_awgn",
    "prob_false_alarm",
    "roc_curve",
    "threshold_for_pf",
    "__version__",
]
