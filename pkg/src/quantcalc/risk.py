"""Risk measures and the derived single-parameter model families.

The conditional value-at-risk used throughout is the *mean excess over the
quantile*, CVaR[X;p] = E[X - Q(p) | X > Q(p)]; this equals the mean residual
life evaluated at Q(p).  (Other texts call "CVaR" the conditional tail mean
Q(p) + our CVaR; the excess convention is the one every identity module
formula is written against.)  The average value-at-risk is the lower-tail
conditional mean AVaR[X;v] = E[X | X <= Q(v)] = (1/v) * int_0^v Q(u) du.

Each derived model is materialized as a full :class:`QuantileModel`, so the
spread/lift constructions and the order checkers compose with them directly:

    ResidualAtQuantile(p)    X - Q(p) given X > Q(p)
    ProportionalResidual(p)  (X - Q(p)) / Q(p) given X > Q(p)
    StarModel(v)             cdf Q(v x)/Q(v) on (0, 1)
    HatModel(v)              cdf Q(x)/Q(v) on (0, v)
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from .distributions import QuantileModel, Support
from .errors import DomainError, InfiniteMean, InvalidParameter, MissingDensity, QZero
from .numerics import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    chebyshev_nodes,
    erfc,
    integral_value,
    upper_incomplete_gamma,
)
from .orders import Status, Verdict, Witness

__all__ = [
    "var",
    "cvar",
    "right_spread",
    "avar",
    "geo_max_exp_cvar",
    "rayleigh_cvar",
    "frechet_partial_mean",
    "frechet_avar",
    "ResidualAtQuantile",
    "ProportionalResidual",
    "StarModel",
    "HatModel",
    "DerivedModelKind",
    "derive",
    "proportionality_check",
    "RiskCurve",
    "risk_curve",
]


def var(x_model: QuantileModel, p: float) -> float:
    """Value-at-risk at level p: the quantile Q(p)."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"value-at-risk level must be in (0,1), got {p}")
    return float(x_model.quantile(p))


def cvar(
    x_model: QuantileModel,
    p: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Mean excess over the p-quantile, (1-p)^-1 int_p^1 (Q(t) - Q(p)) dt.

    ``p = 0`` returns the mean.  Needs a finite mean; the quadrature runs in
    quantile space so heavy upper tails are still handled adaptively.
    """
    if not 0.0 <= p < 1.0:
        raise DomainError(f"cvar level must be in [0,1), got {p}")
    if not math.isfinite(x_model.mean):
        raise InfiniteMean(f"{x_model.name} has no finite mean")
    if p == 0.0:
        return x_model.mean
    qp = float(x_model.quantile(p))
    tail = integral_value(
        x_model.quantile, p, 1.0, spec, what=f"tail integral of {x_model.name}"
    )
    return tail / (1.0 - p) - qp


def right_spread(
    x_model: QuantileModel,
    p: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Excess-wealth transform int_{Q(p)}^inf survival = (1-p) * cvar."""
    return (1.0 - p) * cvar(x_model, p, spec)


def avar(
    x_model: QuantileModel,
    v: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Lower-tail conditional mean E[X | X <= Q(v)] = (1/v) int_0^v Q(u) du.

    Only integrability of Q near 0 is needed, so models with infinite mean
    (heavy right tails) still have an average value-at-risk for every v < 1.
    """
    if not 0.0 < v < 1.0:
        raise DomainError(f"avar level must be in (0,1), got {v}")
    part = integral_value(
        x_model.quantile, 0.0, v, spec, what=f"lower partial mean of {x_model.name}"
    )
    return part / v


# -- closed-form companions (the "printed formula" side of the cross-checks) --


def geo_max_exp_cvar(lam: float, delta: float, p: float) -> float:
    """Closed-form mean excess of the geometric-maximum-of-exponentials law."""
    if not (lam > 0 and 0 < delta < 1 and 0 <= p < 1):
        raise DomainError("bad parameters for geo_max_exp_cvar")
    return -math.log(p + (1.0 - p) * delta) / (lam * (1.0 - p) * (1.0 - delta))


def rayleigh_cvar(alpha: float, p: float) -> float:
    """Closed-form mean excess of the Rayleigh-type law via erfc."""
    if not (alpha > 0 and 0 <= p < 1):
        raise DomainError("bad parameters for rayleigh_cvar")
    s = math.sqrt(-math.log1p(-p)) if p > 0 else 0.0
    return math.sqrt(math.pi) * float(erfc(s)) / (2.0 * math.sqrt(alpha) * (1.0 - p))


def frechet_partial_mean(c: float, gamma: float, v: float) -> float:
    """int_0^v Q(u) du = c**(1/gamma) * Gamma(1 - 1/gamma, -log v).

    The substitution s = -log u turns the lower partial quantile integral of
    F(x) = exp(-c x**-gamma) into an upper incomplete gamma tail; the order
    1 - 1/gamma is nonpositive once gamma <= 1, which the gamma routine
    supports.
    """
    if not (c > 0 and gamma > 0 and 0 < v < 1):
        raise DomainError("bad parameters for frechet_partial_mean")
    return c ** (1.0 / gamma) * upper_incomplete_gamma(1.0 - 1.0 / gamma, -math.log(v))


def frechet_avar(c: float, gamma: float, v: float) -> float:
    """Closed-form AVaR of the Frechet-type law: frechet_partial_mean / v."""
    return frechet_partial_mean(c, gamma, v) / v


# -- derived models ------------------------------------------------------------


@dataclass(frozen=True)
class ResidualAtQuantile:
    p: float


@dataclass(frozen=True)
class ProportionalResidual:
    p: float


@dataclass(frozen=True)
class StarModel:
    v: float


@dataclass(frozen=True)
class HatModel:
    v: float


DerivedModelKind = Union[ResidualAtQuantile, ProportionalResidual, StarModel, HatModel]


def _check_level(value: float, what: str):
    if not 0.0 < value < 1.0:
        raise DomainError(f"{what} must lie strictly inside (0,1), got {value}")


def _finite_upper(parent: QuantileModel, shift: float, scale: float = 1.0) -> float:
    up = parent.support.upper
    return math.inf if math.isinf(up) else (up - shift) / scale


def _residual_at_quantile(
    parent: QuantileModel, p: float, spec: QuadratureSpec
) -> QuantileModel:
    _check_level(p, "residual level p")
    qp = float(parent.quantile(p))
    q, qd, big_f, little_f = (
        parent.quantile,
        parent.quantile_density,
        parent.cdf,
        parent.pdf,
    )

    def warp(u):
        return 1.0 - (1.0 - np.asarray(u)) * (1.0 - p)

    pdf = None
    if little_f is not None:
        def pdf(x):
            return np.asarray(little_f(np.asarray(x) + qp)) / (1.0 - p)

    return QuantileModel(
        name=f"residual({parent.name},p={p:g})",
        quantile=lambda u: np.asarray(q(warp(u))) - qp,
        quantile_density=lambda u: np.asarray(qd(warp(u))) * (1.0 - p),
        cdf=lambda x: (np.asarray(big_f(np.asarray(x) + qp)) - p) / (1.0 - p),
        pdf=pdf,
        mean=cvar(parent, p, spec),
        support=Support(0.0, _finite_upper(parent, qp)),
        class_d=math.isfinite(parent.mean),
    )


def _proportional_residual(
    parent: QuantileModel, p: float, spec: QuadratureSpec
) -> QuantileModel:
    _check_level(p, "residual level p")
    qp = float(parent.quantile(p))
    if qp <= 0.0:
        raise QZero(f"{parent.name}: Q({p}) = {qp}; proportional residual undefined")
    base = _residual_at_quantile(parent, p, spec)
    q, qd, big_f, little_f = base.quantile, base.quantile_density, base.cdf, base.pdf

    pdf = None
    if little_f is not None:
        def pdf(x):
            return np.asarray(little_f(np.asarray(x) * qp)) * qp

    return QuantileModel(
        name=f"prop-residual({parent.name},p={p:g})",
        quantile=lambda u: np.asarray(q(u)) / qp,
        quantile_density=lambda u: np.asarray(qd(u)) / qp,
        cdf=lambda x: np.asarray(big_f(np.asarray(x) * qp)),
        pdf=pdf,
        mean=base.mean / qp,
        support=Support(0.0, _finite_upper(parent, qp, scale=qp)),
        class_d=base.class_d,
    )


def _star_model(parent: QuantileModel, v: float, spec: QuadratureSpec) -> QuantileModel:
    _check_level(v, "tail level v")
    if parent.pdf is None:
        raise MissingDensity(f"{parent.name}: star model needs the parent density")
    qv = float(parent.quantile(v))
    if qv <= 0.0:
        raise QZero(f"{parent.name}: Q({v}) = {qv}")
    q, qd, big_f, little_f = (
        parent.quantile,
        parent.quantile_density,
        parent.cdf,
        parent.pdf,
    )
    return QuantileModel(
        name=f"star({parent.name},v={v:g})",
        quantile=lambda u: np.asarray(big_f(qv * np.asarray(u))) / v,
        quantile_density=lambda u: np.asarray(little_f(qv * np.asarray(u))) * qv / v,
        cdf=lambda x: np.asarray(q(v * np.asarray(x))) / qv,
        pdf=lambda x: v * np.asarray(qd(v * np.asarray(x))) / qv,
        mean=1.0 - avar(parent, v, spec) / qv,
        support=Support(0.0, 1.0),
        class_d=parent.support.lower == 0.0,
    )


def _hat_model(parent: QuantileModel, v: float, spec: QuadratureSpec) -> QuantileModel:
    _check_level(v, "tail level v")
    if parent.pdf is None:
        raise MissingDensity(f"{parent.name}: hat model needs the parent density")
    qv = float(parent.quantile(v))
    if qv <= 0.0:
        raise QZero(f"{parent.name}: Q({v}) = {qv}")
    q, qd, big_f, little_f = (
        parent.quantile,
        parent.quantile_density,
        parent.cdf,
        parent.pdf,
    )
    return QuantileModel(
        name=f"hat({parent.name},v={v:g})",
        quantile=lambda u: np.asarray(big_f(qv * np.asarray(u))),
        quantile_density=lambda u: np.asarray(little_f(qv * np.asarray(u))) * qv,
        cdf=lambda x: np.asarray(q(np.asarray(x))) / qv,
        pdf=lambda x: np.asarray(qd(np.asarray(x))) / qv,
        mean=v * (1.0 - avar(parent, v, spec) / qv),
        support=Support(0.0, v),
        class_d=parent.support.lower == 0.0,
    )


def derive(
    x_model: QuantileModel,
    kind: DerivedModelKind,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> QuantileModel:
    """Materialize a derived law as a first-class quantile model.

    Means come from the closed risk-measure identities (cvar for residuals,
    avar for the tail-ratio models), so the derived models slot straight into
    the spread construction without re-deriving anything.
    """
    if isinstance(kind, ResidualAtQuantile):
        return _residual_at_quantile(x_model, kind.p, spec)
    if isinstance(kind, ProportionalResidual):
        return _proportional_residual(x_model, kind.p, spec)
    if isinstance(kind, StarModel):
        return _star_model(x_model, kind.v, spec)
    if isinstance(kind, HatModel):
        return _hat_model(x_model, kind.v, spec)
    raise InvalidParameter(f"unknown derived-model kind {kind!r}")


def proportionality_check(
    x_model: QuantileModel,
    y_model: QuantileModel,
    grid_size: int = 512,
    tol: float = 1e-9,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> Verdict:
    """Is Q_X / Q_Y constant, i.e. do the models share a scale family?

    Constancy of the quantile ratio on the grid is the primary probe; the
    equivalent formulation through the mean-excess ratio cvar_X(p)/cvar_Y(p)
    is spot-checked at a handful of levels as an independent route.
    """
    us = chebyshev_nodes(grid_size)
    qx = np.asarray(x_model.quantile(us), dtype=float)
    qy = np.asarray(y_model.quantile(us), dtype=float)
    mask = qy > 1e-12
    if int(mask.sum()) < 2:
        return Verdict(Status.INCONCLUSIVE, None, grid_size, tol, note="ratio undefined")
    ratio = qx[mask] / qy[mask]
    ref = float(np.median(ratio))
    dev = np.abs(ratio - ref)
    worst = int(np.argmax(dev))
    if dev[worst] > tol * (1.0 + abs(ref)):
        return Verdict(
            Status.FAILS,
            Witness(float(us[mask][worst]), "quantile ratio constant", float(dev[worst])),
            grid_size,
            tol,
        )
    if math.isfinite(x_model.mean) and math.isfinite(y_model.mean):
        for p in (0.2, 0.5, 0.8):
            r = cvar(x_model, p, spec) / cvar(y_model, p, spec)
            if abs(r - ref) > 1e-7 * (1.0 + abs(ref)):
                return Verdict(
                    Status.FAILS,
                    Witness(p, "mean-excess ratio constant", float(abs(r - ref))),
                    grid_size,
                    tol,
                )
    return Verdict(
        Status.HOLDS_ON_GRID, None, grid_size, tol, note=f"constant ratio {ref!r}"
    )


@dataclass(frozen=True)
class RiskCurve:
    """A risk measure traced over levels, serializable as `p,value` CSV."""

    measure: str
    points: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        ps = [p for p, _ in self.points]
        if any(not 0.0 < p < 1.0 for p in ps) or any(
            b <= a for a, b in zip(ps, ps[1:])
        ):
            raise InvalidParameter("curve levels must be strictly increasing in (0,1)")

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("p,value\n")
        for p, value in self.points:
            buf.write(f"{p:.12g},{value:.12g}\n")
        return buf.getvalue()


_MEASURES = {
    "var": lambda m, p, spec: var(m, p),
    "cvar": cvar,
    "avar": avar,
    "rspread": right_spread,
    "pcvar": lambda m, p, spec: cvar(m, p, spec) / var(m, p),
}


def risk_curve(
    x_model: QuantileModel,
    measure: str,
    levels,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> RiskCurve:
    """Evaluate one of var/cvar/avar/rspread/pcvar over a grid of levels."""
    key = measure.lower()
    if key not in _MEASURES:
        raise InvalidParameter(f"unknown measure {measure!r}; choose {sorted(_MEASURES)}")
    fn = _MEASURES[key]
    pts = tuple((float(p), float(fn(x_model, float(p), spec))) for p in levels)
    return RiskCurve(measure=key, points=pts)
