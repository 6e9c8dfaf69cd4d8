"""Numerical verifiers for the expectation identities of the quantile calculus.

Every verifier computes both sides of an identity by independent adaptive
quadratures and reports the residual; nothing is ever established
symbolically.  The identities all have the shape

    E[(g(1) - g(U)) * w(U)]  =  E[g'(Z)] * scale  (+ boundary term),

with U uniform on (0,1), w a quantile-density-like weight, and Z a unit law
built from quantile functions:

  * Taylor form: w = q, Z the Lorenz lift of X, scale E[X]; the order-n
    variant expands the left side through derivatives of g, leaving a
    remainder expectation under the lift.
  * Mean-value form: w = q_Y - q_X for a dominated pair, Z the spread lift,
    scale E[Y] - E[X].
  * Proportional form: w = phi' for a shared quantile shape phi, Z the
    normalized shape phi/eta.

Laws whose support starts above 0 (quantile Q(0+) = Q0 > 0) satisfy the
identities only after shifting to X - Q0; all verifiers apply that shift
automatically, which on the right-hand side appears as the boundary term
-(g(1) - g(0)) * Q0.  For class-D inputs the term is exactly zero and the
plain identities are reproduced.

One numeric limit is worth knowing: families like exp(-c x**-gamma) put
quantile-density mass Q(u) ~ (-log u)**(-1/gamma) below any u, so the
q-weighted (Taylor) side cannot be resolved in double precision at all --
roughly a fifth of the integral lives below u = 1e-12.  Verifiers then
report an honest residual instead of passing; the lift, spread, star, and
hat constructions for such laws are unaffected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .distributions import QuantileModel
from .errors import (
    DomainError,
    HypothesisFailed,
    InsufficientDerivatives,
    InvalidParameter,
    InvalidSampleSize,
    NonMonotonePhi,
)
from .numerics import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    chebyshev_nodes,
    erfc,
    integral_value,
    log_integral,
)
from .orders import (
    Status,
    Witness,
    check_ifr,
    check_nbu,
    check_order,
    check_xtau_decreasing,
)
from .risk import (
    HatModel,
    ProportionalResidual,
    ResidualAtQuantile,
    StarModel,
    avar,
    cvar,
    derive,
)
from .unitlaw import _build_unit_variable, sample, spread_lift

__all__ = [
    "TestFunction",
    "power_function",
    "polynomial",
    "exp_function",
    "log1p_function",
    "constant",
    "tail_power_phi",
    "phi_from_model",
    "IdentityReport",
    "verify_taylor1",
    "verify_taylor_n",
    "verify_corollary_power",
    "verify_mvt",
    "verify_proportional",
    "NbuPair",
    "IfrPair",
    "Risk1Pair",
    "Risk2Pair",
    "AvarPair",
    "HatPair",
    "ApplicationPair",
    "verify_application",
    "residual_gain_density",
    "residual_pair_density",
    "proportional_gain_density",
    "proportional_pair_density",
    "star_pair_density",
    "hat_pair_density",
    "rayleigh_proportional_pair_density",
    "frechet_star_pair_density",
    "exponential_hat_pair_density",
    "TaylorCase",
    "MvtCase",
    "ProportionalCase",
    "monte_carlo_crosscheck",
]

DEFAULT_TOL_ABS = 1e-6
DEFAULT_TOL_REL = 1e-6
_STRICT_SLACK = 1e-10


# -- test functions -------------------------------------------------------------


@dataclass(frozen=True)
class TestFunction:
    """A function on (0,1) with evaluable derivatives up to ``max_order``.

    ``boundary_value`` is the (finite) limit at 1 where one exists; shape
    functions that diverge there carry None and cannot be used as a g.
    ``value_at_zero`` is the right limit at 0, consumed by the boundary-term
    bookkeeping of the verifiers.
    """

    name: str
    eval: Callable
    derivative_factory: Callable[[int], Callable]
    max_order: int
    boundary_value: Optional[float]
    value_at_zero: float = 0.0

    def __call__(self, u):
        return self.eval(u)

    def derivative(self, k: int) -> Callable:
        if k == 0:
            return self.eval
        if not 1 <= k <= self.max_order:
            raise InsufficientDerivatives(
                f"{self.name}: derivative order {k} exceeds max_order={self.max_order}"
            )
        return self.derivative_factory(k)

    def __post_init__(self):
        if self.max_order < 1:
            raise InvalidParameter("test functions carry at least one derivative")
        d1 = self.derivative_factory(1)
        h = 1e-6
        for u in (0.25, 0.5, 0.75):
            fd = (float(self.eval(u + h)) - float(self.eval(u - h))) / (2 * h)
            an = float(d1(u))
            if abs(fd - an) > 1e-5 * (1.0 + abs(an)):
                raise InvalidParameter(
                    f"{self.name}: analytic derivative {an} != finite difference "
                    f"{fd} at u={u}"
                )


def _falling(alpha: float, k: int) -> float:
    out = 1.0
    for j in range(k):
        out *= alpha - j
    return out


def power_function(alpha: float, max_order: int = 8) -> TestFunction:
    """g(u) = u**alpha with analytic derivatives, alpha > 0."""
    if not alpha > 0:
        raise InvalidParameter("power exponent must be positive")

    def deriv(k):
        coeff = _falling(alpha, k)
        return lambda u: coeff * np.asarray(u) ** (alpha - k)

    return TestFunction(
        name=f"pow({alpha:g})",
        eval=lambda u: np.asarray(u) ** alpha,
        derivative_factory=deriv,
        max_order=max_order,
        boundary_value=1.0,
        value_at_zero=0.0,
    )


def polynomial(coeffs, max_order: int = 8) -> TestFunction:
    """g(u) = sum coeffs[k] * u**k (ascending order)."""
    cs = np.asarray(coeffs, dtype=float)
    if cs.ndim != 1 or cs.size == 0:
        raise InvalidParameter("polynomial needs a 1-D coefficient list")

    def deriv(k):
        dk = np.polynomial.polynomial.polyder(cs, k) if k <= cs.size - 1 else np.zeros(1)
        return lambda u: np.polynomial.polynomial.polyval(np.asarray(u), dk)

    return TestFunction(
        name=f"poly({','.join(f'{c:g}' for c in cs)})",
        eval=lambda u: np.polynomial.polynomial.polyval(np.asarray(u), cs),
        derivative_factory=deriv,
        max_order=max_order,
        boundary_value=float(cs.sum()),
        value_at_zero=float(cs[0]),
    )


def exp_function(max_order: int = 8) -> TestFunction:
    """g(u) = exp(u); every derivative is itself."""
    return TestFunction(
        name="exp",
        eval=lambda u: np.exp(np.asarray(u)),
        derivative_factory=lambda k: lambda u: np.exp(np.asarray(u)),
        max_order=max_order,
        boundary_value=math.e,
        value_at_zero=1.0,
    )


def log1p_function(max_order: int = 8) -> TestFunction:
    """g(u) = log(1+u); k-th derivative (-1)**(k-1) (k-1)! / (1+u)**k."""

    def deriv(k):
        coeff = (-1.0) ** (k - 1) * math.factorial(k - 1)
        return lambda u: coeff / (1.0 + np.asarray(u)) ** k

    return TestFunction(
        name="log1p",
        eval=lambda u: np.log1p(np.asarray(u)),
        derivative_factory=deriv,
        max_order=max_order,
        boundary_value=math.log(2.0),
        value_at_zero=0.0,
    )


def constant(c: float = 1.0) -> TestFunction:
    """g(u) = c; both sides of every identity collapse to zero."""
    return TestFunction(
        name=f"const({c:g})",
        eval=lambda u: np.full_like(np.asarray(u, dtype=float), c),
        derivative_factory=lambda k: lambda u: np.zeros_like(
            np.asarray(u, dtype=float)
        ),
        max_order=8,
        boundary_value=c,
        value_at_zero=c,
    )


def tail_power_phi(beta: float, max_order: int = 4) -> TestFunction:
    """Shape phi(u) = (1-u)**(-1/beta): the Pareto-I quantile shape.

    Increasing, integrable for beta > 1, and phi(0+) = 1 rather than 0, so
    the proportional identity picks up a boundary term.
    """
    if not beta > 1:
        raise InvalidParameter("tail power shape needs beta > 1 to be integrable")
    s = 1.0 / beta

    def deriv(k):
        coeff = 1.0
        for j in range(k):
            coeff *= s + j
        return lambda u: coeff * (1.0 - np.asarray(u)) ** (-(s + k))

    return TestFunction(
        name=f"tailpow({beta:g})",
        eval=lambda u: (1.0 - np.asarray(u)) ** (-s),
        derivative_factory=deriv,
        max_order=max_order,
        boundary_value=None,
        value_at_zero=1.0,
    )


def phi_from_model(x_model: QuantileModel) -> TestFunction:
    """The model's own quantile function as a proportional shape (scale 1)."""
    up = x_model.support.upper
    return TestFunction(
        name=f"phi[{x_model.name}]",
        eval=x_model.quantile,
        derivative_factory=lambda k: _only_first(x_model.quantile_density, k),
        max_order=1,
        boundary_value=float(up) if math.isfinite(up) else None,
        value_at_zero=float(x_model.support.lower),
    )


def _only_first(fn, k):
    if k != 1:
        raise InsufficientDerivatives("model shapes carry one derivative")
    return fn


# -- reports --------------------------------------------------------------------


@dataclass(frozen=True)
class IdentityReport:
    identity: str
    lhs: float
    rhs: float
    abs_residual: float
    rel_residual: float
    passed: bool
    tol_abs: float
    tol_rel: float
    notes: str = ""

    def csv_row(self) -> str:
        ident = self.identity.replace(",", ";")  # model names may carry commas
        return (
            f"{ident},{self.lhs:.12g},{self.rhs:.12g},"
            f"{self.abs_residual:.6g},{self.rel_residual:.6g},{self.passed}"
        )


def _residuals(lhs: float, rhs: float):
    abs_res = abs(lhs - rhs)
    denom = max(abs(lhs), abs(rhs))
    if denom == 0.0:
        return abs_res, 0.0
    return abs_res, abs_res / denom


def _report(identity, lhs, rhs, tol_abs, tol_rel, notes="", force_fail=False):
    abs_res, rel_res = _residuals(lhs, rhs)
    passed = (abs_res <= tol_abs or rel_res <= tol_rel) and not force_fail
    return IdentityReport(
        identity=identity,
        lhs=lhs,
        rhs=rhs,
        abs_residual=abs_res,
        rel_residual=rel_res,
        passed=passed,
        tol_abs=tol_abs,
        tol_rel=tol_rel,
        notes=notes,
    )


def _boundary_g1(g: TestFunction) -> float:
    if g.boundary_value is None or not math.isfinite(g.boundary_value):
        raise DomainError(f"{g.name} has no finite limit at 1")
    return float(g.boundary_value)


# -- Taylor-type identities -----------------------------------------------------


def _taylor_sides(x_model, g, n, spec):
    """(lhs, rhs) of the order-n expansion, with the support shift applied."""
    if n < 1:
        raise DomainError("expansion order must be >= 1")
    g.derivative(n)  # raises InsufficientDerivatives early
    g1 = _boundary_g1(g)
    q = x_model.quantile_density
    big_q = x_model.quantile
    q0 = float(x_model.support.lower)
    if not math.isfinite(x_model.mean):
        raise DomainError(f"{x_model.name} needs a finite mean")

    lhs = integral_value(
        lambda u: (g1 - float(g.eval(u))) * float(q(u)),
        0.0,
        1.0,
        spec,
        what="identity lhs",
    )
    rhs = 0.0
    for k in range(1, n):
        gk = g.derivative(k)
        rhs += (1.0 / math.factorial(k)) * integral_value(
            lambda u, gk=gk, k=k: float(gk(u)) * (1.0 - u) ** k * float(q(u)),
            0.0,
            1.0,
            spec,
            what=f"expansion term {k}",
        )
    gn = g.derivative(n)
    rhs += (1.0 / math.factorial(n - 1)) * integral_value(
        lambda u: float(gn(u)) * (1.0 - u) ** (n - 1) * (float(big_q(u)) - q0),
        0.0,
        1.0,
        spec,
        what="remainder term",
    )
    return lhs, rhs, q0


def verify_taylor_n(
    x_model: QuantileModel,
    g: TestFunction,
    n: int,
    tol_abs: float = DEFAULT_TOL_ABS,
    tol_rel: float = DEFAULT_TOL_REL,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> IdentityReport:
    """Order-n probabilistic Taylor identity for X through its Lorenz lift."""
    lhs, rhs, q0 = _taylor_sides(x_model, g, n, spec)
    notes = f"n={n}"
    if q0 > 0:
        notes += f"; support shift Q(0+)={q0:g} applied"
    return _report(f"taylor{n}[{x_model.name};{g.name}]", lhs, rhs, tol_abs, tol_rel, notes)


def verify_taylor1(
    x_model: QuantileModel,
    g: TestFunction,
    tol_abs: float = DEFAULT_TOL_ABS,
    tol_rel: float = DEFAULT_TOL_REL,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> IdentityReport:
    """First-order identity E[(g(1)-g(U)) q(U)] = E[g'(L)] E[X]."""
    return verify_taylor_n(x_model, g, 1, tol_abs, tol_rel, spec)


def verify_corollary_power(
    x_model: QuantileModel,
    alpha: float,
    n: int = 1,
    tol_abs: float = DEFAULT_TOL_ABS,
    tol_rel: float = DEFAULT_TOL_REL,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> IdentityReport:
    """Power instance g(u) = u**alpha of the order-n expansion.

    For alpha = 1 the left side must equal the (shifted) mean directly; for
    alpha = 2 the two first-moment forms of the identity are re-checked
    against the lift moments.  Failures of those side checks fail the report
    even when the main residual is small.
    """
    g = power_function(alpha)
    lhs, rhs, q0 = _taylor_sides(x_model, g, n, spec)
    notes = [f"alpha={alpha:g}", f"n={n}"]
    if q0 > 0:
        notes.append(f"support shift Q(0+)={q0:g} applied")
    big_q = x_model.quantile
    extra_fail = False

    def shifted(u):
        return float(big_q(u)) - q0

    if alpha == 1.0:
        target = x_model.mean - q0
        ok = abs(lhs - target) <= max(tol_abs, tol_rel * abs(target))
        notes.append(f"mean identity lhs vs E[X]-Q0: {lhs!r} vs {target!r}")
        extra_fail |= not ok
    if alpha == 2.0:
        first = 2.0 * integral_value(
            lambda u: u * shifted(u), 0.0, 1.0, spec, what="lift first moment"
        )
        second_lhs = integral_value(
            lambda u: (1.0 - u) ** 2 * float(x_model.quantile_density(u)),
            0.0,
            1.0,
            spec,
            what="squared-gap expectation",
        )
        second_rhs = 2.0 * integral_value(
            lambda u: (1.0 - u) * shifted(u), 0.0, 1.0, spec, what="complement moment"
        )
        ok1 = abs(lhs - first) <= max(tol_abs, tol_rel * abs(first))
        ok2 = abs(second_lhs - second_rhs) <= max(tol_abs, tol_rel * abs(second_rhs))
        notes.append(f"moment forms: {lhs!r}~{first!r}, {second_lhs!r}~{second_rhs!r}")
        extra_fail |= not (ok1 and ok2)
    return _report(
        f"corollary[{x_model.name};a={alpha:g};n={n}]",
        lhs,
        rhs,
        tol_abs,
        tol_rel,
        "; ".join(notes),
        force_fail=extra_fail,
    )


# -- mean-value identity ----------------------------------------------------------


def _mvt_sides(x_model, y_model, g, spec):
    g1 = _boundary_g1(g)
    g0 = float(g.value_at_zero)
    spread = spread_lift(x_model, y_model, spec)
    qdx, qdy = x_model.quantile_density, y_model.quantile_density
    lhs = integral_value(
        lambda u: (g1 - float(g.eval(u))) * (float(qdy(u)) - float(qdx(u))),
        0.0,
        1.0,
        spec,
        what="mean-value lhs",
    )
    d_mean = y_model.mean - x_model.mean
    d1 = g.derivative(1)
    rhs_main = d_mean * integral_value(
        lambda u: float(d1(u)) * float(spread.density(u)),
        0.0,
        1.0,
        spec,
        what="mean-value rhs",
    )
    shift = float(y_model.support.lower) - float(x_model.support.lower)
    rhs = rhs_main - (g1 - g0) * shift
    return lhs, rhs, shift, spread


def verify_mvt(
    x_model: QuantileModel,
    y_model: QuantileModel,
    g: TestFunction,
    tol_abs: float = DEFAULT_TOL_ABS,
    tol_rel: float = DEFAULT_TOL_REL,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> IdentityReport:
    """Mean-value identity for a dominated pair through the spread lift.

    E[(g(1)-g(U)) (q_Y - q_X)(U)] = E[g'(Z)] (E[Y]-E[X]), corrected by the
    support-shift boundary term when either support starts above zero.
    """
    lhs, rhs, shift, _ = _mvt_sides(x_model, y_model, g, spec)
    notes = f"boundary shift {shift:g}" if shift != 0.0 else ""
    return _report(
        f"mvt[{x_model.name},{y_model.name};{g.name}]", lhs, rhs, tol_abs, tol_rel, notes
    )


# -- proportional-quantile identity ----------------------------------------------


def verify_proportional(
    phi: TestFunction,
    g: TestFunction,
    tol_abs: float = DEFAULT_TOL_ABS,
    tol_rel: float = DEFAULT_TOL_REL,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> IdentityReport:
    """Identity E[(g(1)-g(U)) phi'(U)] = eta E[g'(Z)] for Z ~ phi/eta.

    ``phi`` must be increasing with a finite integral eta.  Shapes with
    phi(0+) > 0 (the Pareto-I shape) are accepted; the right side then
    carries the boundary term -(g(1)-g(0)) phi(0+), which vanishes in the
    phi(0)=0 case the identity is usually quoted for.
    """
    us = chebyshev_nodes(256)
    d_phi = phi.derivative(1)
    slopes = np.asarray(d_phi(us), dtype=float)
    if np.any(slopes < -1e-12):
        bad = int(np.argmin(slopes))
        raise NonMonotonePhi(
            f"{phi.name}: phi' = {slopes[bad]:.3g} < 0 at u={us[bad]:.6g}"
        )
    eta = integral_value(phi.eval, 0.0, 1.0, spec, what="eta")
    if not math.isfinite(eta) or eta <= 0:
        raise DomainError(f"{phi.name}: eta = {eta!r} unusable")
    g1 = _boundary_g1(g)
    g0 = float(g.value_at_zero)
    phi0 = float(phi.value_at_zero)
    lhs = integral_value(
        lambda u: (g1 - float(g.eval(u))) * float(d_phi(u)),
        0.0,
        1.0,
        spec,
        what="proportional lhs",
    )
    d1 = g.derivative(1)
    rhs = (
        integral_value(
            lambda u: float(d1(u)) * float(phi.eval(u)),
            0.0,
            1.0,
            spec,
            what="proportional rhs",
        )
        - (g1 - g0) * phi0
    )
    notes = f"eta={eta:.12g}"
    if phi0 != 0.0:
        notes += f"; boundary term phi(0+)={phi0:g}"
    return _report(
        f"proportional[{phi.name};{g.name}]", lhs, rhs, tol_abs, tol_rel, notes
    )


# -- applications: derived pairs with printed densities ---------------------------


@dataclass(frozen=True)
class NbuPair:
    """Residual at Q(p) against X itself; needs the new-better-than-used gate.

    ``local=True`` replaces the global aging check by the fixed-level
    hypothesis (residual dominated at this p only), which is all the
    identity actually consumes.
    """

    p: float
    local: bool = False


@dataclass(frozen=True)
class IfrPair:
    r: float
    p: float


@dataclass(frozen=True)
class Risk1Pair:
    p: float


@dataclass(frozen=True)
class Risk2Pair:
    r: float
    p: float


@dataclass(frozen=True)
class AvarPair:
    v: float
    w: float


@dataclass(frozen=True)
class HatPair:
    v: float
    w: float


ApplicationPair = Union[NbuPair, IfrPair, Risk1Pair, Risk2Pair, AvarPair, HatPair]


def _require_increasing_levels(a, b, what):
    if not (0.0 < a < b < 1.0):
        raise DomainError(f"{what} needs 0 < {a} < {b} < 1")


def _strictly_decreasing_gate(fn, levels, what):
    vals = [fn(float(p)) for p in levels]
    for left, right, lp, rp in zip(vals, vals[1:], levels, levels[1:]):
        if right >= left - _STRICT_SLACK:
            raise HypothesisFailed(
                Witness(float(rp), f"{what} strictly decreasing", float(right - left))
            )


def _fail_from_verdict(verdict, what):
    if verdict.status is not Status.HOLDS_ON_GRID:
        raise HypothesisFailed(
            verdict.witness or Witness(math.nan, what, math.nan),
            f"{what} does not hold on grid",
        )


def _st_gate(a_model, b_model, what):
    v = check_order(a_model, b_model, "st", grid_size=512, tol=1e-9)
    _fail_from_verdict(v, what)


def _warp(p):
    return lambda u: 1.0 - (1.0 - np.asarray(u)) * (1.0 - p)


def residual_gain_density(x_model, p, spec=DEFAULT_QUADRATURE) -> Callable:
    """Printed density of the spread of (residual at Q(p), X)."""
    q = x_model.quantile
    qp = float(q(p))
    scale = x_model.mean - cvar(x_model, p, spec)
    w = _warp(p)
    return lambda u: (np.asarray(q(u)) + qp - np.asarray(q(w(u)))) / scale


def residual_pair_density(x_model, r, p, spec=DEFAULT_QUADRATURE) -> Callable:
    """Printed density of the spread of residuals at Q(p) and Q(r), r < p."""
    q = x_model.quantile
    qr, qp = float(q(r)), float(q(p))
    scale = cvar(x_model, r, spec) - cvar(x_model, p, spec)
    wr, wp = _warp(r), _warp(p)
    return lambda u: (
        np.asarray(q(wr(u))) - qr - np.asarray(q(wp(u))) + qp
    ) / scale


def proportional_gain_density(x_model, p, spec=DEFAULT_QUADRATURE) -> Callable:
    """Printed density of the spread of (proportional residual at p, X)."""
    q = x_model.quantile
    qp = float(q(p))
    scale = x_model.mean * qp - cvar(x_model, p, spec)
    w = _warp(p)
    return lambda u: ((1.0 + np.asarray(q(u))) * qp - np.asarray(q(w(u)))) / scale


def proportional_pair_density(x_model, r, p, spec=DEFAULT_QUADRATURE) -> Callable:
    """Printed density of the spread of proportional residuals at p and r."""
    q = x_model.quantile
    qr, qp = float(q(r)), float(q(p))
    scale = qp * cvar(x_model, r, spec) - qr * cvar(x_model, p, spec)
    wr, wp = _warp(r), _warp(p)
    return lambda u: (
        qp * np.asarray(q(wr(u))) - qr * np.asarray(q(wp(u)))
    ) / scale


def star_pair_density(x_model, v, w, spec=DEFAULT_QUADRATURE) -> Callable:
    """Printed density of the spread of the quantile-ratio (star) models."""
    q, big_f = x_model.quantile, x_model.cdf
    qv, qw = float(q(v)), float(q(w))
    scale = avar(x_model, v, spec) / qv - avar(x_model, w, spec) / qw
    return lambda u: (
        np.asarray(big_f(qw * np.asarray(u))) / w
        - np.asarray(big_f(qv * np.asarray(u))) / v
    ) / scale


def hat_pair_density(x_model, v, w, spec=DEFAULT_QUADRATURE) -> Callable:
    """Printed density of the spread of the hat models at v < w."""
    q, big_f = x_model.quantile, x_model.cdf
    qv, qw = float(q(v)), float(q(w))
    scale = w * (1.0 - avar(x_model, w, spec) / qw) - v * (
        1.0 - avar(x_model, v, spec) / qv
    )
    return lambda u: (
        np.asarray(big_f(qw * np.asarray(u))) - np.asarray(big_f(qv * np.asarray(u)))
    ) / scale


def rayleigh_proportional_pair_density(r, p) -> Callable:
    """Rate-free closed form of the Rayleigh proportional-residual spread."""
    _require_increasing_levels(r, p, "(r, p)")
    lr_, lp_ = math.log1p(-r), math.log1p(-p)  # both negative
    den = math.sqrt(math.pi) * (
        (1.0 - r) * float(erfc(math.sqrt(-lp_))) * math.sqrt(-lr_)
        - (1.0 - p) * float(erfc(math.sqrt(-lr_))) * math.sqrt(-lp_)
    )

    def density(u):
        u = np.asarray(u, dtype=float)
        lru = np.log((1.0 - r) * (1.0 - u))
        lpu = np.log((1.0 - p) * (1.0 - u))
        num = 2.0 * (1.0 - p) * (1.0 - r) * (
            np.sqrt(lr_ * lpu) - np.sqrt(lp_ * lru)
        )
        return num / den

    return density


def frechet_star_pair_density(v, w) -> Callable:
    """Closed form of the unit-shape heavy-tail star-model spread.

    Valid for the shape with cdf exp(-1/x); uses the logarithmic integral.
    """
    _require_increasing_levels(v, w, "(v, w)")
    den = log_integral(v) * math.log(v) / v - log_integral(w) * math.log(w) / w

    def density(u):
        u = np.asarray(u, dtype=float)
        return (w ** (1.0 / u - 1.0) - v ** (1.0 / u - 1.0)) / den

    return density


def exponential_hat_pair_density(v, w) -> Callable:
    """Rate-free closed form of the exponential hat-model spread."""
    _require_increasing_levels(v, w, "(v, w)")
    den = w / math.log1p(-w) - v / math.log1p(-v)

    def density(u):
        u = np.asarray(u, dtype=float)
        return ((1.0 - v) ** u - (1.0 - w) ** u) / den

    return density


_GATE_LEVELS = np.linspace(0.02, 0.98, 33)


def _build_application(x_model, pair, spec):
    """Gate the hypothesis, then return (smaller, larger, printed_density, tag)."""
    if isinstance(pair, NbuPair):
        resid = derive(x_model, ResidualAtQuantile(pair.p), spec)
        if pair.local:
            _st_gate(resid, x_model, f"residual at p={pair.p:g} dominated by X")
        else:
            _fail_from_verdict(
                check_nbu(x_model, grid_size=128, tol=1e-9), "new-better-than-used"
            )
        if not x_model.mean - cvar(x_model, pair.p, spec) > 0:
            raise HypothesisFailed(
                Witness(pair.p, "mean excess below the mean", 0.0)
            )
        return (
            resid,
            x_model,
            residual_gain_density(x_model, pair.p, spec),
            f"app-nbu(p={pair.p:g})",
        )
    if isinstance(pair, IfrPair):
        _require_increasing_levels(pair.r, pair.p, "(r, p)")
        _fail_from_verdict(
            check_ifr(x_model, grid_size=48, tol=1e-9), "increasing failure rate"
        )
        _strictly_decreasing_gate(
            lambda t: cvar(x_model, t, spec), _GATE_LEVELS, "mean excess"
        )
        small = derive(x_model, ResidualAtQuantile(pair.p), spec)
        large = derive(x_model, ResidualAtQuantile(pair.r), spec)
        return (
            small,
            large,
            residual_pair_density(x_model, pair.r, pair.p, spec),
            f"app-ifr(r={pair.r:g},p={pair.p:g})",
        )
    if isinstance(pair, Risk1Pair):
        prop = derive(x_model, ProportionalResidual(pair.p), spec)
        _st_gate(prop, x_model, f"proportional residual at p={pair.p:g} dominated")
        if not x_model.mean * float(x_model.quantile(pair.p)) - cvar(
            x_model, pair.p, spec
        ) > 0:
            raise HypothesisFailed(Witness(pair.p, "scaled mean gap positive", 0.0))
        return (
            prop,
            x_model,
            proportional_gain_density(x_model, pair.p, spec),
            f"app-risk1(p={pair.p:g})",
        )
    if isinstance(pair, Risk2Pair):
        _require_increasing_levels(pair.r, pair.p, "(r, p)")
        _strictly_decreasing_gate(
            lambda t: cvar(x_model, t, spec) / float(x_model.quantile(t)),
            _GATE_LEVELS,
            "mean excess over quantile",
        )
        small = derive(x_model, ProportionalResidual(pair.p), spec)
        large = derive(x_model, ProportionalResidual(pair.r), spec)
        _st_gate(small, large, "proportional residuals ordered")
        return (
            small,
            large,
            proportional_pair_density(x_model, pair.r, pair.p, spec),
            f"app-risk2(r={pair.r:g},p={pair.p:g})",
        )
    if isinstance(pair, AvarPair):
        _require_increasing_levels(pair.v, pair.w, "(v, w)")
        _fail_from_verdict(
            check_xtau_decreasing(x_model, grid_size=512, tol=1e-9),
            "x * reversed-hazard decreasing",
        )
        _strictly_decreasing_gate(
            lambda t: avar(x_model, t, spec) / float(x_model.quantile(t)),
            _GATE_LEVELS,
            "lower-tail mean over quantile",
        )
        small = derive(x_model, StarModel(pair.v), spec)
        large = derive(x_model, StarModel(pair.w), spec)
        return (
            small,
            large,
            star_pair_density(x_model, pair.v, pair.w, spec),
            f"app-avar(v={pair.v:g},w={pair.w:g})",
        )
    if isinstance(pair, HatPair):
        _require_increasing_levels(pair.v, pair.w, "(v, w)")
        small = derive(x_model, HatModel(pair.v), spec)
        large = derive(x_model, HatModel(pair.w), spec)
        if not small.mean < large.mean:
            raise HypothesisFailed(
                Witness(pair.w, "hat means increasing", small.mean - large.mean)
            )
        return (
            small,
            large,
            hat_pair_density(x_model, pair.v, pair.w, spec),
            f"app-hat(v={pair.v:g},w={pair.w:g})",
        )
    raise InvalidParameter(f"unknown application pair {pair!r}")


def verify_application(
    x_model: QuantileModel,
    pair: ApplicationPair,
    g: TestFunction,
    tol_abs: float = DEFAULT_TOL_ABS,
    tol_rel: float = DEFAULT_TOL_REL,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    density_points: int = 64,
    density_tol: float = 1e-6,
) -> IdentityReport:
    """Mean-value identity on a derived pair, plus the printed-density check.

    The pair's hypothesis is verified on a grid first (aging class, strict
    monotonicity of the relevant risk ratio, or plain dominance), raising
    :class:`HypothesisFailed` with a witness if it breaks.  After the
    identity residual is computed, the numeric spread density is compared
    with the printed closed form at ``density_points`` interior points; a
    mismatch fails the report regardless of the identity residual.
    """
    small, large, printed, tag = _build_application(x_model, pair, spec)
    lhs, rhs, shift, spread = _mvt_sides(small, large, g, spec)
    us = chebyshev_nodes(density_points)
    numeric = np.asarray(spread.density(us), dtype=float)
    closed = np.asarray(printed(us), dtype=float)
    scale = np.maximum(np.abs(closed), 1.0)
    dev = float(np.max(np.abs(numeric - closed) / scale))
    notes = f"printed-density max rel dev {dev:.3g} at {density_points} points"
    if shift != 0.0:
        notes += f"; boundary shift {shift:g}"
    return _report(
        f"{tag}[{x_model.name};{g.name}]",
        lhs,
        rhs,
        tol_abs,
        tol_rel,
        notes,
        force_fail=dev > density_tol,
    )


# -- Monte Carlo cross-checks -----------------------------------------------------


@dataclass(frozen=True)
class TaylorCase:
    x_model: QuantileModel
    g: TestFunction


@dataclass(frozen=True)
class MvtCase:
    x_model: QuantileModel
    y_model: QuantileModel
    g: TestFunction


@dataclass(frozen=True)
class ProportionalCase:
    phi: TestFunction
    g: TestFunction


VerifierCase = Union[TaylorCase, MvtCase, ProportionalCase]


def _case_pieces(case, spec):
    """(quad_lhs, quad_rhs, weight, unit_law, scale, offset, tag) for MC."""
    if isinstance(case, TaylorCase):
        x = case.x_model
        lhs, rhs, q0 = _taylor_sides(x, case.g, 1, spec)
        scale = x.mean - q0
        law = _build_unit_variable(
            lambda u: (np.asarray(x.quantile(u)) - q0) / scale,
            f"lift({x.name})",
            spec,
        )
        qd = x.quantile_density
        return lhs, rhs, lambda u: np.asarray(qd(u)), law, scale, 0.0, (
            f"mc-taylor1[{x.name};{case.g.name}]"
        )
    if isinstance(case, MvtCase):
        x, y = case.x_model, case.y_model
        lhs, rhs, shift, spread = _mvt_sides(x, y, case.g, spec)
        qdx, qdy = x.quantile_density, y.quantile_density
        g1 = _boundary_g1(case.g)
        offset = -(g1 - float(case.g.value_at_zero)) * shift
        return (
            lhs,
            rhs,
            lambda u: np.asarray(qdy(u)) - np.asarray(qdx(u)),
            spread,
            y.mean - x.mean,
            offset,
            f"mc-mvt[{x.name},{y.name};{case.g.name}]",
        )
    if isinstance(case, ProportionalCase):
        phi, g = case.phi, case.g
        eta = integral_value(phi.eval, 0.0, 1.0, spec, what="eta")
        law = _build_unit_variable(
            lambda u: np.asarray(phi.eval(u)) / eta, f"shape({phi.name})", spec
        )
        rep = verify_proportional(phi, g, spec=spec)
        d_phi = phi.derivative(1)
        offset = -(
            _boundary_g1(g) - float(g.value_at_zero)
        ) * float(phi.value_at_zero)
        return (
            rep.lhs,
            rep.rhs,
            lambda u: np.asarray(d_phi(u)),
            law,
            eta,
            offset,
            f"mc-proportional[{phi.name};{g.name}]",
        )
    raise InvalidParameter(f"unknown Monte Carlo case {case!r}")


def monte_carlo_crosscheck(
    case: VerifierCase,
    n: int,
    seed: int,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    se_factor: float = 4.0,
) -> IdentityReport:
    """Re-estimate both identity sides by Monte Carlo and compare to quadrature.

    The left side averages (g(1)-g(U)) w(U) over uniform draws; the right
    side averages g'(Z) over inverse-transform draws of the unit law, scaled
    and offset as the identity dictates.  The report passes when each side's
    quadrature value lies within ``se_factor`` standard errors of its Monte
    Carlo estimate (plus a machine-precision floor: a degenerate constant
    integrand has zero standard error, which would otherwise demand exact
    float equality); lhs/rhs in the report are the Monte Carlo values.
    """
    if int(n) != n or n <= 0:
        raise InvalidSampleSize(f"need a positive sample size, got {n}")
    n = int(n)
    quad_lhs, quad_rhs, weight, law, scale, offset, tag = _case_pieces(case, spec)
    g = case.g
    g1 = _boundary_g1(g)
    rng = np.random.default_rng(seed)
    us = rng.random(n)
    lhs_draws = (g1 - np.asarray(g.eval(us), dtype=float)) * np.asarray(
        weight(us), dtype=float
    )
    mc_lhs = float(np.mean(lhs_draws))
    se_lhs = float(np.std(lhs_draws, ddof=1) / math.sqrt(n))
    zs = sample(law, n, seed + 1)
    d1 = g.derivative(1)
    rhs_draws = np.asarray(d1(zs), dtype=float) * scale
    mc_rhs = float(np.mean(rhs_draws)) + offset
    se_rhs = float(np.std(rhs_draws, ddof=1) / math.sqrt(n))
    floor_lhs = 1e-12 * (1.0 + abs(quad_lhs))
    floor_rhs = 1e-12 * (1.0 + abs(quad_rhs))
    ok_lhs = abs(mc_lhs - quad_lhs) <= se_factor * se_lhs + floor_lhs
    ok_rhs = abs(mc_rhs - quad_rhs) <= se_factor * se_rhs + floor_rhs
    abs_res, rel_res = _residuals(mc_lhs, mc_rhs)
    return IdentityReport(
        identity=tag,
        lhs=mc_lhs,
        rhs=mc_rhs,
        abs_residual=abs_res,
        rel_residual=rel_res,
        passed=bool(ok_lhs and ok_rhs),
        tol_abs=se_factor * se_lhs,
        tol_rel=se_factor * se_rhs,
        notes=(
            f"n={n} seed={seed}; quad lhs={quad_lhs:.10g} rhs={quad_rhs:.10g}; "
            f"se lhs={se_lhs:.3g} rhs={se_rhs:.3g}"
        ),
    )
