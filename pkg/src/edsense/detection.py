"""Energy-detection performance over the two-format fading model.

The detector thresholds a chi-square energy statistic with ``2u`` degrees of
freedom (``u`` is the time-bandwidth product) against ``lambda``:

* false alarm   — regularized upper gamma of ``(u, lambda/2)``;
* detection     — Marcum Q of order ``u`` at ``(sqrt(2*gamma), sqrt(lambda))``;
* average detection over fading — the detection probability integrated
  against the SNR density.

The averaged probability has two routes.  :func:`avg_pd_quadrature`
integrates the definition directly and works for any real ``mu > 0``; it is
the oracle.  :func:`avg_pd_eta_mu` is the closed route for integer ``mu``:
the density's half-integer Bessel factor unfolds into ``mu`` exponential
terms, each reducing the average to the closed-form weighted Marcum-Q
integral (computed by :mod:`edsense.integrals`), so no new series appears.

The closed route alternates in sign, so it carries a cancellation guard:
when the estimated roundoff of the term sum exceeds its certified budget it
raises :class:`InstabilityError` and callers fall back to the oracle.  The
time-bandwidth product may be any positive real in both routes (only ``mu``
is restricted by the closed route).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy import integrate

from .errors import ConvergenceError, DomainError, InstabilityError
from .fading import EtaMuParams, snr_pdf
from .integrals import IntegralParams, closed_form
from .specfun import SeriesControl, inv_reg_upper_gamma, marcum_q, reg_upper_gamma

__all__ = [
    "DetectorConfig",
    "RocPoint",
    "CurveRow",
    "CurveTable",
    "prob_false_alarm",
    "threshold_for_pf",
    "prob_detection_awgn",
    "avg_pd_quadrature",
    "avg_pd_eta_mu",
    "avg_pd_for_pf",
    "pd_vs_snr_curve",
    "roc_curve",
]

# |H| below this raises InstabilityError in the closed route (the term
# coefficients carry 1/H^(mu+l) and blow up at the symmetric point).
H_DEGENERATE = 1e-6

# Estimated roundoff of the alternating term sum above which the closed
# route refuses to answer.  Calibrated so the standard acceptance grids
# stay a factor ~4 below (worst observed term sum ~2.4e7 -> ~2.4e-8).
_ROUNDOFF_BUDGET = 1e-7
_TERM_RELATIVE_ERROR = 1e-15

# The alternating sum amplifies each term's relative error by up to
# sum|terms|/|result| (~2e7 on the worst grid points), so the per-term
# integrals must be evaluated to the last ulp, not the default tolerance.
_TERM_CONTROL = SeriesControl(rel_tol=1e-16, max_terms=10_000)


@dataclass(frozen=True)
class DetectorConfig:
    """Detector operating point: time-bandwidth product ``u``, energy
    threshold ``lam``, and average SNR ``gamma_bar`` (linear scale)."""

    u: float
    lam: float
    gamma_bar: float

    def __post_init__(self) -> None:
        if not (self.u > 0.0):
            raise DomainError(f"DetectorConfig requires u > 0, got {self.u!r}")
        if not (self.lam > 0.0):
            raise DomainError(f"DetectorConfig requires lam > 0, got {self.lam!r}")
        if not (self.gamma_bar > 0.0):
            raise DomainError(
                f"DetectorConfig requires gamma_bar > 0, got {self.gamma_bar!r}"
            )


@dataclass(frozen=True)
class RocPoint:
    """One operating point of the complementary ROC: ``pm = 1 - pd``.

    Failed rows carry ``nan`` in ``pd``/``pm``.
    """

    pf: float
    pd: float
    pm: float

    def __post_init__(self) -> None:
        if not (0.0 < self.pf < 1.0):
            raise DomainError(f"RocPoint requires 0 < pf < 1, got {self.pf!r}")
        if not math.isnan(self.pd):
            if not (0.0 <= self.pd <= 1.0):
                raise DomainError(f"RocPoint pd out of [0,1]: {self.pd!r}")
            if self.pm != 1.0 - self.pd:
                raise DomainError("RocPoint requires pm == 1 - pd exactly")


@dataclass(frozen=True)
class CurveRow:
    abscissa: float
    analytic: float
    oracle: float


@dataclass(frozen=True)
class CurveTable:
    """Ordered sweep rows plus per-row failure notes (for diagnostics)."""

    abscissa_name: str
    rows: tuple[CurveRow, ...]
    notes: tuple[str, ...] = field(default=())


def prob_false_alarm(u: float, lam: float) -> float:
    """Probability the energy statistic exceeds ``lam`` under noise only."""
    if not (u > 0.0):
        raise DomainError(f"prob_false_alarm requires u > 0, got {u!r}")
    if not (lam > 0.0):
        raise DomainError(f"prob_false_alarm requires lam > 0, got {lam!r}")
    return reg_upper_gamma(u, 0.5 * lam)


def threshold_for_pf(u: float, pf: float) -> float:
    """Energy threshold achieving false-alarm probability ``pf``."""
    if not (0.0 < pf < 1.0):
        raise DomainError(f"threshold_for_pf requires 0 < pf < 1, got {pf!r}")
    return 2.0 * inv_reg_upper_gamma(u, pf)


def prob_detection_awgn(u: float, gamma: float, lam: float) -> float:
    """Detection probability at instantaneous SNR ``gamma`` (no fading)."""
    if not (gamma >= 0.0):
        raise DomainError(f"prob_detection_awgn requires gamma >= 0, got {gamma!r}")
    if not (lam > 0.0):
        raise DomainError(f"prob_detection_awgn requires lam > 0, got {lam!r}")
    return marcum_q(u, math.sqrt(2.0 * gamma), math.sqrt(lam))


def avg_pd_quadrature(
    cfg: DetectorConfig, params: EtaMuParams, abs_tol: float = 1e-9
) -> float:
    """Oracle route: quadrature of the detection probability against the SNR
    density.  Valid for any real ``mu > 0``.

    Internally integrates in the normalized variable ``t = gamma/gamma_bar``
    so the integration window is independent of the SNR scale.
    """
    if not (abs_tol > 0.0):
        raise DomainError(f"abs_tol must be > 0, got {abs_tol!r}")
    u, lam, gbar = cfg.u, cfg.lam, cfg.gamma_bar
    mu, h = params.mu, params.h
    sqrt_lam = math.sqrt(lam)
    decay = 2.0 * mu * (h - abs(params.H))  # slowest tail rate in t-space

    def unit_pdf(t: float) -> float:
        return gbar * snr_pdf(gbar * t, gbar, params)

    upper = (40.0 + 2.0 * mu + 12.0 * math.sqrt(mu)) / decay
    while unit_pdf(upper) / decay > abs_tol * 1e-3:
        upper *= 1.25

    def integrand(t: float) -> float:
        if t <= 0.0:
            return 0.0
        q = unit_pdf(t)
        if q == 0.0:
            return 0.0
        return marcum_q(u, math.sqrt(2.0 * gbar * t), sqrt_lam) * q

    value, est_err = integrate.quad(
        integrand, 0.0, upper, epsabs=0.5 * abs_tol, epsrel=1e-11, limit=400
    )
    if not (est_err <= abs_tol):
        raise ConvergenceError(
            f"averaging quadrature error estimate {est_err:.3e} exceeds "
            f"abs_tol={abs_tol:.3e} for cfg={cfg}"
        )
    return min(1.0, max(0.0, value))


def avg_pd_eta_mu(cfg: DetectorConfig, params: EtaMuParams) -> float:
    """Closed route for integer ``mu``: the average detection probability as
    a signed combination of ``2*mu`` closed-form integral evaluations.

    Term ``l`` pairs the coefficient
    ``D_l = (mu)_l h^mu mu^(mu-l) / (l! (mu-l-1)! 4^l |H|^(mu+l) gbar^(mu-l))``
    with the two integrals at decay rates ``2*mu*(h -+ |H|)/gbar`` (orders:
    power weight ``mu - l``, Marcum order ``u``, scale ``sqrt(2)``, threshold
    ``sqrt(lam)``), signed ``(-1)^l`` and ``(-1)^mu`` respectively.

    Raises :class:`DomainError` for non-integer ``mu`` and
    :class:`InstabilityError` when ``|H|`` is degenerate or the alternating
    sum would lose its certified accuracy; callers then use
    :func:`avg_pd_quadrature`.
    """
    mu_int = round(params.mu)
    if abs(params.mu - mu_int) > 1e-9 or mu_int < 1:
        raise DomainError(
            f"avg_pd_eta_mu requires integer mu >= 1 (got mu={params.mu!r}); "
            f"use avg_pd_quadrature for real mu"
        )
    abs_h = abs(params.H)
    if abs_h < H_DEGENERATE:
        raise InstabilityError(
            f"|H|={abs_h:.3e} is below the symmetric-fading degeneracy "
            f"threshold {H_DEGENERATE}; use avg_pd_quadrature"
        )
    u, lam, gbar = cfg.u, cfg.lam, cfg.gamma_bar
    h = params.h
    mu = float(mu_int)
    sqrt2 = math.sqrt(2.0)
    sqrt_lam = math.sqrt(lam)
    s_minus = 2.0 * mu * (h - abs_h) / gbar
    s_plus = 2.0 * mu * (h + abs_h) / gbar
    sign_mu = -1.0 if mu_int % 2 else 1.0

    terms: list[float] = []
    for l in range(mu_int):
        ln_coeff = (
            math.lgamma(mu + l)
            - math.lgamma(mu)  # rising factorial (mu)_l
            + mu * math.log(h)
            + (mu - l) * math.log(mu)
            - math.lgamma(l + 1.0)
            - math.lgamma(mu - l)
            - 2.0 * l * math.log(2.0)
            - (mu + l) * math.log(abs_h)
            - (mu - l) * math.log(gbar)
        )
        coeff = math.exp(ln_coeff)
        k_order = mu_int - l
        t_minus = 2.0 * closed_form(
            IntegralParams(a=sqrt2, b=sqrt_lam, k=float(k_order), m=u, p=s_minus),
            _TERM_CONTROL,
        )
        t_plus = 2.0 * closed_form(
            IntegralParams(a=sqrt2, b=sqrt_lam, k=float(k_order), m=u, p=s_plus),
            _TERM_CONTROL,
        )
        terms.append((-1.0 if l % 2 else 1.0) * coeff * t_minus)
        terms.append(sign_mu * coeff * t_plus)

    value = math.fsum(terms)
    est_roundoff = _TERM_RELATIVE_ERROR * sum(abs(t) for t in terms)
    if est_roundoff > _ROUNDOFF_BUDGET:
        raise InstabilityError(
            f"alternating-sum cancellation: estimated roundoff "
            f"{est_roundoff:.2e} exceeds budget {_ROUNDOFF_BUDGET:.0e} "
            f"(eta={params.eta}, mu={params.mu}); use avg_pd_quadrature"
        )
    return min(1.0, max(0.0, value))


def avg_pd_for_pf(
    u: float,
    pf: float,
    gamma_bar: float,
    params: EtaMuParams,
    oracle_abs_tol: float = 1e-9,
) -> float:
    """Average detection probability at a target false-alarm rate.

    Composition of :func:`threshold_for_pf` with the closed route, falling
    back to the quadrature oracle for non-integer ``mu`` or when the closed
    route reports instability.
    """
    if not (0.0 < pf < 1.0):
        raise DomainError(f"avg_pd_for_pf requires 0 < pf < 1, got {pf!r}")
    cfg = DetectorConfig(u=u, lam=threshold_for_pf(u, pf), gamma_bar=gamma_bar)
    if abs(params.mu - round(params.mu)) > 1e-9:
        return avg_pd_quadrature(cfg, params, oracle_abs_tol)
    try:
        return avg_pd_eta_mu(cfg, params)
    except InstabilityError:
        return avg_pd_quadrature(cfg, params, oracle_abs_tol)


def pd_vs_snr_curve(
    u: float,
    pf: float,
    params: EtaMuParams,
    snr_db_grid: list[float],
    oracle_abs_tol: float = 1e-9,
) -> CurveTable:
    """Average-detection sweep over average SNR (dB): rows of
    (snr_db, closed-or-fallback value, oracle value); failed rows get nan.
    """
    if not (u > 0.0):
        raise DomainError(f"pd_vs_snr_curve requires u > 0, got {u!r}")
    if not (0.0 < pf < 1.0):
        raise DomainError(f"pd_vs_snr_curve requires 0 < pf < 1, got {pf!r}")
    grid = [float(s) for s in snr_db_grid]
    if len(grid) == 0:
        raise DomainError("snr_db_grid must be nonempty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("snr_db_grid must be strictly increasing")
    rows: list[CurveRow] = []
    notes: list[str] = []
    for snr_db in grid:
        gbar = 10.0 ** (snr_db / 10.0)
        try:
            analytic = avg_pd_for_pf(u, pf, gbar, params, oracle_abs_tol)
            lam = threshold_for_pf(u, pf)
            cfg = DetectorConfig(u=u, lam=lam, gamma_bar=gbar)
            oracle = avg_pd_quadrature(cfg, params, oracle_abs_tol)
            rows.append(CurveRow(snr_db, analytic, oracle))
        except (DomainError, ConvergenceError, InstabilityError, OverflowError) as exc:
            rows.append(CurveRow(snr_db, math.nan, math.nan))
            notes.append(f"snr_db={snr_db:g}: {exc}")
    return CurveTable(abscissa_name="snr_db", rows=tuple(rows), notes=tuple(notes))


def roc_curve(
    u: float,
    snr_db: float,
    params: EtaMuParams,
    pf_grid: list[float],
    oracle_abs_tol: float = 1e-9,
) -> list[RocPoint]:
    """Complementary-ROC sweep at fixed average SNR (dB); missed-detection
    probability is exactly ``1 - pd`` per point.  Failed rows carry nan.
    """
    if not (u > 0.0):
        raise DomainError(f"roc_curve requires u > 0, got {u!r}")
    grid = [float(x) for x in pf_grid]
    if len(grid) == 0:
        raise DomainError("pf_grid must be nonempty")
    if any(not (0.0 < x < 1.0) for x in grid):
        raise DomainError("pf_grid values must lie strictly inside (0, 1)")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("pf_grid must be strictly increasing")
    gbar = 10.0 ** (snr_db / 10.0)
    points: list[RocPoint] = []
    for pf in grid:
        try:
            pd = avg_pd_for_pf(u, pf, gbar, params, oracle_abs_tol)
            points.append(RocPoint(pf=pf, pd=pd, pm=1.0 - pd))
        except (DomainError, ConvergenceError, InstabilityError, OverflowError):
            points.append(RocPoint(pf=pf, pd=math.nan, pm=math.nan))
    return points
