"""Laws on the unit interval built from quantile functions.

Two constructions do all the work here.  The Lorenz lift of a class-D model X
is the unit-interval law whose cdf is the Lorenz curve of X; its density is
Q(u)/E[X].  The spread lift of an ordered pair (X, Y) generalizes it: the
density is the normalized quantile gap (Q_Y(u) - Q_X(u)) / (E[Y] - E[X]),
which is a genuine density exactly when X is dominated by Y in the usual
stochastic order.  Lifting X against the zero law recovers the Lorenz lift.

Dominance is only ever checked on a finite grid (Chebyshev-spaced, clustered
at the endpoints); a pass is recorded as "verified on grid", never as proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from .distributions import QuantileModel, power_unit
from .errors import (
    DomainError,
    EqualMeans,
    InvalidParameter,
    InvalidSampleSize,
    NotStochasticallyOrdered,
)
from .numerics import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    chebyshev_boundaries,
    chebyshev_nodes,
    cumulative_integral,
    find_root,
    integral_value,
)

__all__ = [
    "UnitVariable",
    "MixtureCoefficient",
    "LorenzFixedPoint",
    "lorenz_curve",
    "lorenz_lift",
    "spread_lift",
    "generalized_lorenz",
    "mixture_decomposition",
    "unit_moment",
    "unit_expectation",
    "lorenz_fixed_point",
    "sample",
]

_ST_GRID = 1024  # dominance-check resolution for spread_lift
_ST_TOL = 1e-9
_TABLE_PANELS = 2048


@dataclass(frozen=True)
class UnitVariable:
    """Absolutely continuous law on (0,1) given by a pointwise density.

    The cdf is cached at construction: panelwise Gauss quadrature of the
    density on a Chebyshev-clustered grid, glued with a monotone cubic
    interpolant.  ``normalization_check`` records the full integral of the
    density; construction rejects anything farther than 1e-6 from 1.
    """

    density: Callable
    provenance: str
    normalization_check: float
    _grid: np.ndarray
    _cum: np.ndarray
    _cdf_interp: PchipInterpolator

    def cdf(self, u):
        """Cached distribution function, clamped into [0, 1]."""
        u_in = np.asarray(u, dtype=float)
        out = np.clip(self._cdf_interp(np.clip(u_in, 0.0, 1.0)), 0.0, 1.0)
        return out if u_in.ndim else float(out)

    def inverse_cdf(self, q):
        """Piecewise-linear inverse of the cached cdf table (for sampling)."""
        q_in = np.asarray(q, dtype=float)
        total = self._cum[-1]
        out = np.interp(np.clip(q_in, 0.0, 1.0) * total, self._cum, self._grid)
        return out if q_in.ndim else float(out)

    def mean(self, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
        return integral_value(
            lambda u: u * self.density(u), 0.0, 1.0, spec, what="unit-variable mean"
        )

    def __repr__(self):
        return f"UnitVariable({self.provenance})"


def _build_unit_variable(
    density: Callable,
    provenance: str,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> UnitVariable:
    grid = chebyshev_boundaries(_TABLE_PANELS)
    cum = cumulative_integral(density, grid, spec)
    probe = chebyshev_nodes(512)
    dens = np.asarray(density(probe), dtype=float)
    if np.any(dens < -1e-9):
        u_bad = float(probe[int(np.argmin(dens))])
        raise InvalidParameter(
            f"{provenance}: density is negative at u={u_bad:.6g} "
            f"({float(dens.min()):.3g})"
        )
    total = float(cum[-1])
    if abs(total - 1.0) > 1e-6:
        raise InvalidParameter(
            f"{provenance}: density integrates to {total!r}, not 1"
        )
    # densities may underflow to 0 over whole panels; PCHIP's slope formula
    # then divides by zero internally but still yields the right flat segment
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        interp = PchipInterpolator(grid, cum, extrapolate=False)
    return UnitVariable(
        density=density,
        provenance=provenance,
        normalization_check=total,
        _grid=grid,
        _cum=cum,
        _cdf_interp=interp,
    )


@dataclass(frozen=True)
class MixtureCoefficient:
    """Weight c with f_spread = c * f_liftY + (1-c) * f_liftX."""

    c: float


@dataclass(frozen=True)
class LorenzFixedPoint:
    """Exponent at which the unit power law equals its own Lorenz lift.

    ``alpha`` solves (alpha+1)/alpha = alpha, i.e. alpha^2 - alpha - 1 = 0;
    ``sup_distance`` is the sup-norm gap between the Lorenz curve and the cdf
    at the root.  The reciprocal exponent 1/alpha is *not* a fixed point; its
    sup-distance is reported so the mismatch is visible rather than silent.
    """

    alpha: float
    sup_distance: float
    reciprocal_alpha: float
    reciprocal_sup_distance: float

    @property
    def reciprocal_is_fixed_point(self) -> bool:
        return self.reciprocal_sup_distance < 1e-8


def lorenz_curve(
    x_model: QuantileModel,
    p: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Lorenz curve L(p) = int_0^p Q(u) du / E[X] of a class-D model."""
    if not x_model.class_d or not x_model.mean > 0:
        raise DomainError(f"{x_model.name}: Lorenz curve needs class-D, mean > 0")
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"Lorenz curve argument must be in [0,1], got {p}")
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0
    part = integral_value(
        x_model.quantile, 0.0, p, spec, what=f"Lorenz partial of {x_model.name}"
    )
    return part / x_model.mean


def lorenz_lift(
    x_model: QuantileModel,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> UnitVariable:
    """Unit law with density Q(u)/E[X]; its cdf is the Lorenz curve of X."""
    if not x_model.class_d or not x_model.mean > 0:
        raise DomainError(f"{x_model.name}: Lorenz lift needs class-D, mean > 0")
    mu = x_model.mean
    q = x_model.quantile
    return _build_unit_variable(
        lambda u: q(u) / mu, f"lift({x_model.name})", spec
    )


def _check_grid_dominance(x_model: QuantileModel, y_model: QuantileModel):
    """Q_X <= Q_Y on the Chebyshev grid, with a witness on failure."""
    us = chebyshev_nodes(_ST_GRID)
    gap = np.asarray(x_model.quantile(us)) - np.asarray(y_model.quantile(us))
    worst = int(np.argmax(gap))
    if gap[worst] > _ST_TOL:
        raise NotStochasticallyOrdered(float(us[worst]), float(gap[worst]))


def _spread_inputs(x_model: QuantileModel, y_model: QuantileModel):
    ex, ey = x_model.mean, y_model.mean
    if not (math.isfinite(ex) and math.isfinite(ey)):
        raise DomainError("spread construction needs finite means")
    if ex == ey:
        raise EqualMeans(f"E[{x_model.name}] = E[{y_model.name}] = {ex!r}")
    _check_grid_dominance(x_model, y_model)
    if ex > ey:  # dominance on a finite grid can miss what the means see
        raise NotStochasticallyOrdered(
            math.nan, ex - ey, f"E[{x_model.name}] > E[{y_model.name}]"
        )
    return ex, ey


def spread_lift(
    x_model: QuantileModel,
    y_model: QuantileModel,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> UnitVariable:
    """Unit law of the normalized quantile gap of a dominated pair.

    Density (Q_Y(u) - Q_X(u)) / (E[Y] - E[X]); defined when E[X] < E[Y] and
    Q_X <= Q_Y holds on the check grid ("verified on grid" in provenance).
    """
    ex, ey = _spread_inputs(x_model, y_model)
    qx, qy = x_model.quantile, y_model.quantile
    scale = ey - ex
    return _build_unit_variable(
        lambda u: (np.asarray(qy(u)) - np.asarray(qx(u))) / scale,
        f"spread({x_model.name},{y_model.name}; st verified on grid)",
        spec,
    )


def generalized_lorenz(
    x_model: QuantileModel,
    y_model: QuantileModel,
    p: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Normalized partial integral of the quantile gap; cdf of the spread lift."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"argument must be in [0,1], got {p}")
    ex, ey = _spread_inputs(x_model, y_model)
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0
    qx, qy = x_model.quantile, y_model.quantile
    part = integral_value(
        lambda u: np.asarray(qy(u)) - np.asarray(qx(u)),
        0.0,
        p,
        spec,
        what="generalized Lorenz partial",
    )
    return part / (ey - ex)


def mixture_decomposition(
    x_model: QuantileModel,
    y_model: QuantileModel,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> MixtureCoefficient:
    """Coefficient c = E[Y]/(E[Y]-E[X]) of the two-lift mixture identity.

    The spread density of (X, Y) decomposes as c * f_liftY + (1-c) * f_liftX;
    the decomposition is re-verified pointwise on a grid before returning.
    """
    if not (x_model.class_d and y_model.class_d):
        raise DomainError("mixture decomposition needs two class-D models")
    ex, ey = _spread_inputs(x_model, y_model)
    c = ey / (ey - ex)
    us = chebyshev_nodes(64)
    f_spread = (np.asarray(y_model.quantile(us)) - np.asarray(x_model.quantile(us))) / (
        ey - ex
    )
    combo = c * np.asarray(y_model.quantile(us)) / ey + (1.0 - c) * np.asarray(
        x_model.quantile(us)
    ) / ex
    err = np.max(np.abs(f_spread - combo) / (1.0 + np.abs(f_spread)))
    if err > 1e-8:
        raise InvalidParameter(
            f"mixture identity violated by {err:.3g} for "
            f"({x_model.name}, {y_model.name})"
        )
    return MixtureCoefficient(c=c)


def unit_moment(
    x_model: QuantileModel,
    k: int,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """k-th moment of the Lorenz lift, E[U^k Q(U)] / E[Q(U)]."""
    if k < 0 or int(k) != k:
        raise DomainError(f"moment order must be a nonnegative integer, got {k}")
    if not x_model.class_d or not x_model.mean > 0:
        raise DomainError(f"{x_model.name}: unit moments need class-D, mean > 0")
    if k == 0:
        return 1.0
    q = x_model.quantile
    num = integral_value(
        lambda u: u**k * q(u), 0.0, 1.0, spec, what=f"moment {k} numerator"
    )
    return num / x_model.mean


def unit_expectation(
    x_model: QuantileModel,
    h: Callable[[float], float],
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """E[h(L)] for the Lorenz lift L of X, as int_0^1 h(u) Q(u) du / E[X]."""
    if not x_model.class_d or not x_model.mean > 0:
        raise DomainError(f"{x_model.name}: unit expectation needs class-D")
    q = x_model.quantile
    val = integral_value(
        lambda u: h(u) * q(u), 0.0, 1.0, spec, what="unit expectation"
    )
    return val / x_model.mean


def lorenz_fixed_point(
    tol: float = 1e-12,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> LorenzFixedPoint:
    """Exponent of the unit power family that is its own Lorenz lift.

    For F(x) = x**a the Lorenz curve is p**((a+1)/a), so the fixed point
    solves (a+1)/a = a.  The root is located numerically from the Lorenz
    machinery itself (discrepancy at p = 1/2), then certified by a sup-norm
    scan; the reciprocal exponent is scanned too, because it is a tempting
    but wrong candidate (it solves the reciprocal equation a = a/(a+1) ... ).
    """

    def discrepancy(a: float) -> float:
        return lorenz_curve(power_unit(a), 0.5, spec) - 0.5**a

    alpha = find_root(discrepancy, 1.2, 2.2, tol=tol)

    def sup_distance(a: float) -> float:
        ps = np.linspace(0.01, 0.99, 99)
        model = power_unit(a)
        vals = [abs(lorenz_curve(model, float(p), spec) - float(p) ** a) for p in ps]
        return max(vals)

    return LorenzFixedPoint(
        alpha=alpha,
        sup_distance=sup_distance(alpha),
        reciprocal_alpha=1.0 / alpha,
        reciprocal_sup_distance=sup_distance(1.0 / alpha),
    )


def sample(v: UnitVariable, n: int, seed: int) -> np.ndarray:
    """n inverse-transform draws from a unit law; deterministic per seed."""
    if int(n) != n or n < 0:
        raise InvalidSampleSize(f"sample size must be a nonnegative integer, got {n}")
    if n == 0:
        return np.empty(0)
    rng = np.random.default_rng(seed)
    return v.inverse_cdf(rng.random(int(n)))
