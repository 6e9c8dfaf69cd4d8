"""Quantile-first distribution models and the family catalog.

A :class:`QuantileModel` exposes a law through its quantile function Q(u) and
quantile density q(u) = Q'(u), with the cdf/pdf along for the ride.  The
``class_d`` flag marks the nonnegative, absolutely continuous, finite-mean
laws with Q(0+) = 0 on which the Lorenz-lift machinery is built; families
violating either requirement (Pareto type I starts at its scale, heavy-tail
shapes lose the mean) still construct fine but carry ``class_d=False``.

All function slots are vectorized over numpy arrays and are only meant to be
evaluated strictly inside their domains: u in (0,1), x inside the support.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import special as _sci_special
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, InfiniteMean, InvalidParameter, MissingDensity
from .numerics import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    find_root,
    integral_value,
)

__all__ = [
    "Support",
    "QuantileModel",
    "FamilySpec",
    "make_model",
    "exponential",
    "uniform",
    "power_unit",
    "power_scale",
    "lomax",
    "pareto1",
    "rayleigh",
    "geo_max_exp",
    "frechet_type",
    "block_piecewise",
    "tabulated",
    "tabulated_from_csv",
    "mean",
    "reversed_hazard",
    "mean_residual_life",
    "equilibrium_density",
    "conditional_mean_between_quantiles",
]


@dataclass(frozen=True)
class Support:
    """Closure of the set where the law lives; lower equals Q(0+)."""

    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise InvalidParameter(f"empty support [{self.lower}, {self.upper}]")
        if self.lower < 0:
            raise InvalidParameter("supports start at or above zero here")


@dataclass(frozen=True)
class QuantileModel:
    """A distribution seen through its quantile function.

    quantile / quantile_density map (0,1) -> reals; cdf / pdf (the latter
    optional) map the support interior.  ``mean`` may be ``math.inf``.
    """

    name: str
    quantile: Callable
    quantile_density: Callable
    cdf: Callable
    pdf: Optional[Callable]
    mean: float
    support: Support
    class_d: bool

    def __repr__(self):  # the closures are noise in test output
        return f"QuantileModel({self.name})"


@dataclass(frozen=True)
class FamilySpec:
    """Catalog tag plus positional parameters, e.g. FamilySpec('lomax', (2, 1))."""

    family: str
    params: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))


def _validated(model: QuantileModel, spec: QuadratureSpec) -> QuantileModel:
    """Check the class-D bookkeeping of a freshly built model.

    Q(0+) = 0 is probed at u = 1e-12 (to 1e-9 when the quantile decays fast
    enough to see it; square-root or logarithmic decay cannot reach 1e-9 at
    any floating probe, so those get a monotone-decay consistency check
    instead).  When a closed-form mean is present and finite it must match
    the quadrature of Q to 1e-8 relative.
    """
    if model.class_d:
        if model.support.lower != 0.0:
            raise InvalidParameter(
                f"{model.name}: flagged class-D but support starts at "
                f"{model.support.lower}"
            )
        q12 = float(model.quantile(1e-12))
        if q12 < -1e-9 or not math.isfinite(q12):
            raise InvalidParameter(
                f"{model.name}: flagged class-D but Q(1e-12) = {q12!r}"
            )
        if q12 > 1e-9:
            q6, q3 = float(model.quantile(1e-6)), float(model.quantile(1e-3))
            if not q12 < q6 < q3:
                raise InvalidParameter(
                    f"{model.name}: Q does not decay toward 0 "
                    f"({q12!r}, {q6!r}, {q3!r})"
                )
    if model.class_d and math.isfinite(model.mean):
        quad_mean = integral_value(
            model.quantile, 0.0, 1.0, spec, what=f"mean of {model.name}"
        )
        if abs(quad_mean - model.mean) > 1e-8 * max(1.0, abs(model.mean)):
            raise InvalidParameter(
                f"{model.name}: closed-form mean {model.mean!r} disagrees with "
                f"quadrature {quad_mean!r}"
            )
    return model


def exponential(lam: float, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> QuantileModel:
    """Exponential law, F(x) = 1 - exp(-lam*x), Q(u) = -log(1-u)/lam."""
    if not lam > 0:
        raise InvalidParameter("exponential rate must be positive")
    return _validated(
        QuantileModel(
            name=f"exp({lam:g})",
            quantile=lambda u: -np.log1p(-np.asarray(u)) / lam,
            quantile_density=lambda u: 1.0 / (lam * (1.0 - np.asarray(u))),
            cdf=lambda x: -np.expm1(-lam * np.asarray(x)),
            pdf=lambda x: lam * np.exp(-lam * np.asarray(x)),
            mean=1.0 / lam,
            support=Support(0.0, math.inf),
            class_d=True,
        ),
        spec,
    )


def uniform(a: float, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> QuantileModel:
    """Uniform law on (0, a)."""
    if not a > 0:
        raise InvalidParameter("uniform upper endpoint must be positive")
    return _validated(
        QuantileModel(
            name=f"uniform(0,{a:g})",
            quantile=lambda u: a * np.asarray(u),
            quantile_density=lambda u: np.full_like(np.asarray(u, dtype=float), a),
            cdf=lambda x: np.clip(np.asarray(x) / a, 0.0, 1.0),
            pdf=lambda x: np.where(
                (np.asarray(x) > 0) & (np.asarray(x) < a), 1.0 / a, 0.0
            ),
            mean=a / 2.0,
            support=Support(0.0, a),
            class_d=True,
        ),
        spec,
    )


def power_unit(alpha: float, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> QuantileModel:
    """Power law on the unit interval: F(x) = x**alpha for 0 <= x <= 1."""
    if not alpha > 0:
        raise InvalidParameter("power exponent must be positive")
    inv = 1.0 / alpha
    return _validated(
        QuantileModel(
            name=f"powerunit({alpha:g})",
            quantile=lambda u: np.asarray(u) ** inv,
            quantile_density=lambda u: inv * np.asarray(u) ** (inv - 1.0),
            cdf=lambda x: np.clip(np.asarray(x), 0.0, 1.0) ** alpha,
            pdf=lambda x: alpha * np.asarray(x) ** (alpha - 1.0),
            mean=alpha / (alpha + 1.0),
            support=Support(0.0, 1.0),
            class_d=True,
        ),
        spec,
    )


def power_scale(
    scale: float, shape: float, spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> QuantileModel:
    """Scaled power law: F(x) = (x/scale)**shape on (0, scale)."""
    if not (scale > 0 and shape > 0):
        raise InvalidParameter("power_scale needs positive scale and shape")
    inv = 1.0 / shape
    return _validated(
        QuantileModel(
            name=f"powerscale({scale:g},{shape:g})",
            quantile=lambda u: scale * np.asarray(u) ** inv,
            quantile_density=lambda u: scale * inv * np.asarray(u) ** (inv - 1.0),
            cdf=lambda x: np.clip(np.asarray(x) / scale, 0.0, 1.0) ** shape,
            pdf=lambda x: (shape / scale) * (np.asarray(x) / scale) ** (shape - 1.0),
            mean=scale * shape / (shape + 1.0),
            support=Support(0.0, scale),
            class_d=True,
        ),
        spec,
    )


def lomax(
    shape: float, scale: float, spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> QuantileModel:
    """Lomax (shifted Pareto): F(x) = 1 - (1 + x/scale)**(-shape), shape > 1.

    Q(u) = scale * ((1-u)**(-1/shape) - 1), mean scale/(shape-1).
    """
    if not shape > 1:
        raise InvalidParameter("lomax needs shape > 1 for a finite mean")
    if not scale > 0:
        raise InvalidParameter("lomax scale must be positive")
    inv = 1.0 / shape
    return _validated(
        QuantileModel(
            name=f"lomax({shape:g},{scale:g})",
            quantile=lambda u: scale * ((1.0 - np.asarray(u)) ** (-inv) - 1.0),
            quantile_density=lambda u: (scale * inv)
            * (1.0 - np.asarray(u)) ** (-1.0 - inv),
            cdf=lambda x: 1.0 - (1.0 + np.asarray(x) / scale) ** (-shape),
            pdf=lambda x: (shape / scale)
            * (1.0 + np.asarray(x) / scale) ** (-shape - 1.0),
            mean=scale / (shape - 1.0),
            support=Support(0.0, math.inf),
            class_d=True,
        ),
        spec,
    )


def pareto1(
    scale: float, shape: float, spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> QuantileModel:
    """Pareto type I: F(x) = 1 - (scale/x)**shape for x >= scale, shape > 1.

    Finite mean, but Q(0+) = scale > 0, so the model is not class-D; it is
    still a valid member of proportional-quantile pairs.
    """
    if not scale > 0:
        raise InvalidParameter("pareto1 scale must be positive")
    if not shape > 1:
        raise InvalidParameter("pareto1 needs shape > 1 for a finite mean")
    inv = 1.0 / shape
    return QuantileModel(
        name=f"pareto1({scale:g},{shape:g})",
        quantile=lambda u: scale * (1.0 - np.asarray(u)) ** (-inv),
        quantile_density=lambda u: (scale * inv)
        * (1.0 - np.asarray(u)) ** (-1.0 - inv),
        cdf=lambda x: np.where(
            np.asarray(x) >= scale, 1.0 - (scale / np.asarray(x)) ** shape, 0.0
        ),
        pdf=lambda x: np.where(
            np.asarray(x) >= scale,
            shape * scale**shape * np.asarray(x) ** (-shape - 1.0),
            0.0,
        ),
        mean=scale * shape / (shape - 1.0),
        support=Support(scale, math.inf),
        class_d=False,
    )


def rayleigh(alpha: float, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> QuantileModel:
    """Rayleigh-type law: F(x) = 1 - exp(-alpha*x^2), Q(u) = sqrt(-log(1-u)/alpha)."""
    if not alpha > 0:
        raise InvalidParameter("rayleigh rate must be positive")
    rt = math.sqrt(alpha)

    def _q(u):
        u = np.asarray(u)
        return np.sqrt(-np.log1p(-u)) / rt

    def _qd(u):
        u = np.asarray(u)
        return 1.0 / (2.0 * rt * (1.0 - u) * np.sqrt(-np.log1p(-u)))

    return _validated(
        QuantileModel(
            name=f"rayleigh({alpha:g})",
            quantile=_q,
            quantile_density=_qd,
            cdf=lambda x: -np.expm1(-alpha * np.asarray(x) ** 2),
            pdf=lambda x: 2.0
            * alpha
            * np.asarray(x)
            * np.exp(-alpha * np.asarray(x) ** 2),
            mean=math.sqrt(math.pi / alpha) / 2.0,
            support=Support(0.0, math.inf),
            class_d=True,
        ),
        spec,
    )


def geo_max_exp(
    lam: float, delta: float, spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> QuantileModel:
    """Maximum of a geometric number of independent exponentials.

    With rate ``lam`` and geometric parameter ``delta`` in (0,1):

        Q(u) = log((delta + (1-delta)u) / (delta(1-u))) / lam
        q(u) = 1 / (lam (1-u) (delta + (1-delta)u))
        F(x) = delta(1-E) / (delta + (1-delta)E),  E = exp(-lam x)

    The mean is -log(delta) / (lam (1-delta)).
    """
    if not lam > 0:
        raise InvalidParameter("geo_max_exp rate must be positive")
    if not 0.0 < delta < 1.0:
        raise InvalidParameter("geo_max_exp geometric parameter must be in (0,1)")

    def _q(u):
        u = np.asarray(u)
        return np.log((delta + (1.0 - delta) * u) / (delta * (1.0 - u))) / lam

    def _qd(u):
        u = np.asarray(u)
        return 1.0 / (lam * (1.0 - u) * (delta + (1.0 - delta) * u))

    def _cdf(x):
        e = np.exp(-lam * np.asarray(x))
        return delta * (1.0 - e) / (delta + (1.0 - delta) * e)

    def _pdf(x):
        e = np.exp(-lam * np.asarray(x))
        return lam * delta * e / (delta + (1.0 - delta) * e) ** 2

    return _validated(
        QuantileModel(
            name=f"geomax({lam:g},{delta:g})",
            quantile=_q,
            quantile_density=_qd,
            cdf=_cdf,
            pdf=_pdf,
            mean=-math.log(delta) / (lam * (1.0 - delta)),
            support=Support(0.0, math.inf),
            class_d=True,
        ),
        spec,
    )


def frechet_type(
    c: float, gamma: float, spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> QuantileModel:
    """Frechet-type law: F(x) = exp(-c * x**(-gamma)) for x > 0.

    Q(u) = (c / -log u)**(1/gamma); the mean c**(1/gamma) * Gamma(1 - 1/gamma)
    is finite only for gamma > 1, so gamma <= 1 models carry class_d=False.
    """
    if not (c > 0 and gamma > 0):
        raise InvalidParameter("frechet_type needs positive c and gamma")
    inv = 1.0 / gamma
    finite_mean = gamma > 1.0
    mu = c**inv * float(_sci_special.gamma(1.0 - inv)) if finite_mean else math.inf

    def _q(u):
        u = np.asarray(u)
        return (c / -np.log(u)) ** inv

    def _qd(u):
        u = np.asarray(u)
        return inv * c**inv * (-np.log(u)) ** (-inv - 1.0) / u

    def _cdf(x):
        x = np.asarray(x)
        return np.exp(-c * x ** (-gamma))

    def _pdf(x):
        x = np.asarray(x)
        return np.exp(-c * x ** (-gamma)) * c * gamma * x ** (-gamma - 1.0)

    return _validated(
        QuantileModel(
            name=f"frechet({c:g},{gamma:g})",
            quantile=_q,
            quantile_density=_qd,
            cdf=_cdf,
            pdf=_pdf,
            mean=mu,
            support=Support(0.0, math.inf),
            class_d=finite_mean,
        ),
        spec,
    )


_BLOCK_LO = math.exp(-2.0)  # F(1)
_BLOCK_HI = math.exp(-0.5)  # F(2)


def block_piecewise() -> QuantileModel:
    """Three-piece law whose reversed hazard rises on (1, 2).

    F(x) = exp(-1 - 1/x) on (0,1), exp((x^2-5)/2) on [1,2), exp(-1/x) on
    [2, inf); the reversed hazard f/F is 1/x^2, x, 1/x^2 on those pieces, so
    x * tau(x) = x^2 increases across the middle piece.  The right tail decays
    like 1/x, so the mean is infinite and the model is not class-D.
    """

    def _cdf(x):
        x = np.asarray(x, dtype=float)
        return np.piecewise(
            x,
            [x <= 0, (x > 0) & (x < 1), (x >= 1) & (x < 2), x >= 2],
            [
                0.0,
                lambda t: np.exp(-1.0 - 1.0 / t),
                lambda t: np.exp((t**2 - 5.0) / 2.0),
                lambda t: np.exp(-1.0 / t),
            ],
        )

    def _tau(x):
        x = np.asarray(x, dtype=float)
        return np.piecewise(
            x,
            [(x > 0) & (x < 1), (x >= 1) & (x < 2), x >= 2],
            [lambda t: t**-2, lambda t: t, lambda t: t**-2],
        )

    def _pdf(x):
        return _cdf(x) * _tau(x)

    def _q(u):
        u_in = np.asarray(u, dtype=float)
        uu = np.atleast_1d(np.clip(u_in, 1e-300, 1.0 - 1e-16))
        lo = uu < _BLOCK_LO
        hi = uu >= _BLOCK_HI
        midmask = ~(lo | hi)
        out = np.empty_like(uu)
        out[lo] = -1.0 / (1.0 + np.log(uu[lo]))
        out[midmask] = np.sqrt(5.0 + 2.0 * np.log(uu[midmask]))
        out[hi] = -1.0 / np.log(uu[hi])
        return out.reshape(u_in.shape) if u_in.ndim else float(out[0])

    def _qd(u):
        # 1 / f(Q(u)); the pdf is bounded away from 0 on the support interior
        return 1.0 / _pdf(_q(u))

    return QuantileModel(
        name="block",
        quantile=_q,
        quantile_density=_qd,
        cdf=_cdf,
        pdf=_pdf,
        mean=math.inf,
        support=Support(0.0, math.inf),
        class_d=False,
    )


def tabulated(
    us: Sequence[float],
    qs: Sequence[float],
    name: str = "tabulated",
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> QuantileModel:
    """Model interpolated from (u, Q(u)) pairs.

    ``us`` must be strictly increasing inside (0,1) and ``qs`` nondecreasing.
    Q uses monotone piecewise-cubic interpolation, held constant beyond the
    tabulated range; q comes from centered differences (h = 1e-6, one-sided at
    the range ends).  The cdf inverts Q numerically where Q is strictly
    increasing; for flat tables (a point mass in disguise) cdf/pdf are absent.
    """
    u_arr = np.asarray(us, dtype=float)
    q_arr = np.asarray(qs, dtype=float)
    if u_arr.ndim != 1 or u_arr.size < 4 or u_arr.shape != q_arr.shape:
        raise InvalidParameter("tabulated needs >= 4 matching (u, Q) pairs")
    if np.any(u_arr <= 0) or np.any(u_arr >= 1) or np.any(np.diff(u_arr) <= 0):
        raise InvalidParameter("tabulated u grid must be strictly increasing in (0,1)")
    if np.any(np.diff(q_arr) < 0):
        raise InvalidParameter("tabulated Q values must be nondecreasing")
    if q_arr[0] < 0:
        raise InvalidParameter("tabulated Q values must be nonnegative")

    u_lo, u_hi = float(u_arr[0]), float(u_arr[-1])
    q_lo, q_hi = float(q_arr[0]), float(q_arr[-1])
    strictly_increasing = bool(np.all(np.diff(q_arr) > 0))
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        interp = PchipInterpolator(u_arr, q_arr, extrapolate=False)

    def _q(u):
        u = np.asarray(u, dtype=float)
        out = interp(np.clip(u, u_lo, u_hi))
        return out if u.ndim else float(out)

    def _qd(u, h=1e-6):
        u = np.asarray(u, dtype=float)
        up = np.minimum(u + h, u_hi)
        dn = np.maximum(u - h, u_lo)
        out = (interp(np.clip(up, u_lo, u_hi)) - interp(np.clip(dn, u_lo, u_hi))) / (
            up - dn
        )
        return out if u.ndim else float(out)

    if strictly_increasing:

        def _cdf_scalar(x):
            if x <= q_lo:
                return u_lo if x == q_lo else 0.0
            if x >= q_hi:
                return 1.0
            return find_root(lambda u: float(interp(u)) - x, u_lo, u_hi, tol=1e-12)

        _cdf = np.vectorize(_cdf_scalar, otypes=[float])

        def _pdf(x):
            return 1.0 / _qd(_cdf(x))

    else:
        _cdf = None
        _pdf = None

    # a table only defines Q to interpolation precision; the knot kinks slow
    # the adaptive integrator, so the mean tolerance matches data resolution
    mean_spec = QuadratureSpec(
        abs_tol=1e-9,
        rel_tol=1e-8,
        max_subdivisions=spec.max_subdivisions,
        endpoint_shrink=spec.endpoint_shrink,
    )
    quad_mean = integral_value(_q, 0.0, 1.0, mean_spec, what=f"mean of {name}")
    class_d = strictly_increasing and abs(q_lo) <= 1e-9 and quad_mean > 0

    if _cdf is None:
        # a generalized inverse exists even for flat tables, but checks that
        # need a density must see MissingDensity instead of silent zeros

        def _cdf_missing(x):
            raise MissingDensity(f"{name}: cdf undefined for a flat table")

        _cdf = _cdf_missing

    return QuantileModel(
        name=name,
        quantile=_q,
        quantile_density=_qd,
        cdf=_cdf,
        pdf=_pdf,
        mean=quad_mean,
        support=Support(q_lo, q_hi) if q_hi > q_lo else Support(0.0, 1e-300),
        class_d=class_d,
    )


def tabulated_from_csv(path, name: Optional[str] = None) -> QuantileModel:
    """Read a two-column ``u,Q`` CSV (header optional) into a tabulated model."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for i, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise InvalidParameter(f"{path}: line {i + 1} is not 'u,Q'")
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except ValueError:
                if i == 0:  # tolerate a header row
                    continue
                raise InvalidParameter(f"{path}: non-numeric data at line {i + 1}")
    if not rows:
        raise InvalidParameter(f"{path}: no data rows")
    us, qs = zip(*rows)
    return tabulated(us, qs, name=name or f"tabulated({path})")


_FAMILY_BUILDERS = {
    "exp": (exponential, 1),
    "uniform": (uniform, 1),
    "powerunit": (power_unit, 1),
    "powerscale": (power_scale, 2),
    "lomax": (lomax, 2),
    "pareto1": (pareto1, 2),
    "rayleigh": (rayleigh, 1),
    "geomax": (geo_max_exp, 2),
    "frechet": (frechet_type, 2),
    "block": (block_piecewise, 0),
}


def make_model(spec: FamilySpec) -> QuantileModel:
    """Build the catalog member described by a :class:`FamilySpec`."""
    key = spec.family.lower()
    if key not in _FAMILY_BUILDERS:
        raise InvalidParameter(
            f"unknown family {spec.family!r}; choose from "
            f"{sorted(_FAMILY_BUILDERS)} or use tabulated()"
        )
    builder, nparams = _FAMILY_BUILDERS[key]
    if len(spec.params) != nparams:
        raise InvalidParameter(
            f"family {key!r} takes {nparams} parameter(s), got {len(spec.params)}"
        )
    return builder(*spec.params)


def mean(model: QuantileModel) -> float:
    """Finite mean of the model, or :class:`InfiniteMean`."""
    if not math.isfinite(model.mean):
        raise InfiniteMean(f"{model.name} has no finite mean")
    return model.mean


def reversed_hazard(model: QuantileModel, x: float) -> float:
    """Reversed hazard rate tau(x) = f(x) / F(x) on the support interior."""
    if model.pdf is None:
        raise MissingDensity(f"{model.name} carries no density")
    if not model.support.lower < x < model.support.upper:
        raise DomainError(f"x={x} outside the support interior of {model.name}")
    big_f = float(model.cdf(x))
    if big_f <= 0.0:
        raise DomainError(f"F({x}) = 0 for {model.name}; reversed hazard undefined")
    return float(model.pdf(x)) / big_f


def mean_residual_life(
    model: QuantileModel,
    t: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """E[X - t | X > t], computed in quantile space.

    With p = F(t) the conditional mean above t is the partial quantile
    integral int_p^1 Q(u) du / (1-p), so the residual mean is that minus t.
    """
    if t < 0:
        raise DomainError("mean_residual_life needs t >= 0")
    if not math.isfinite(model.mean):
        raise InfiniteMean(f"{model.name} has no finite mean")
    p = float(model.cdf(t)) if t > 0 else 0.0
    if p >= 1.0:
        raise DomainError(f"F({t}) = 1; no residual life beyond t")
    tail = integral_value(
        model.quantile, p, 1.0, spec, what=f"tail mean of {model.name}"
    )
    return tail / (1.0 - p) - t


def equilibrium_density(model: QuantileModel, x: float) -> float:
    """Density of the stationary-excess (equilibrium) law, (1 - F(x)) / E[X]."""
    if not model.class_d:
        raise DomainError(f"{model.name} is not class-D")
    if x < 0:
        raise DomainError("equilibrium density lives on x >= 0")
    surv = 1.0 - (float(model.cdf(x)) if x > 0 else 0.0)
    return surv / model.mean


def conditional_mean_between_quantiles(
    model: QuantileModel,
    g: Callable[[float], float],
    p1: float,
    p2: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """E[g(X) | Q(p1) < X <= Q(p2)] = int_{p1}^{p2} g(Q(u)) du / (p2 - p1)."""
    if not 0.0 <= p1 < p2 <= 1.0:
        raise DomainError(f"need 0 <= p1 < p2 <= 1, got ({p1}, {p2})")
    val = integral_value(
        lambda u: g(model.quantile(u)),
        p1,
        p2,
        spec,
        what=f"conditional mean of {model.name}",
    )
    return val / (p2 - p1)
