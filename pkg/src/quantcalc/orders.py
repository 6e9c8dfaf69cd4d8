"""Grid-based checkers for stochastic orders and aging classes.

Every verdict here is finite-resolution evidence, not proof: a monotonicity
or dominance statement is probed on a deterministic grid (Chebyshev-spaced in
u, log-spaced in x for unbounded supports) with a small additive slack, and
the result says so explicitly ("holds on grid").  Decreasing/increasing are
non-strict throughout; a failure always carries a witness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .distributions import QuantileModel
from .errors import DomainError, InfiniteMean, MissingDensity
from .numerics import chebyshev_boundaries, chebyshev_nodes, cumulative_integral
from .unitlaw import UnitVariable, lorenz_lift, spread_lift

__all__ = [
    "OrderRelation",
    "Status",
    "Witness",
    "Verdict",
    "check_order",
    "check_unit_order",
    "check_nbu",
    "check_ifr",
    "check_xtau_decreasing",
    "implication_suite",
    "ImplicationSuiteReport",
]

DEFAULT_GRID = 512
DEFAULT_TOL = 1e-9
_RATIO_GUARD = 1e-12


class OrderRelation(str, Enum):
    ST = "st"
    HR = "hr"
    RH = "rh"
    LR = "lr"
    STAR = "star"
    PS = "ps"
    RPS = "rps"


class Status(str, Enum):
    HOLDS_ON_GRID = "holds-on-grid"
    FAILS = "fails"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Witness:
    location: float
    quantity: str
    magnitude: float

    def __str__(self):
        return f"{self.quantity} violated at {self.location:.6g} by {self.magnitude:.3g}"


@dataclass(frozen=True)
class Verdict:
    status: Status
    witness: Optional[Witness]
    grid_size: int
    tolerance: float
    note: str = ""

    @property
    def holds(self) -> bool:
        return self.status is Status.HOLDS_ON_GRID


def _verdict_nonincreasing(values, locations, grid_size, tol, quantity) -> Verdict:
    """Non-strict decreasing check over consecutive valid points."""
    values = np.asarray(values, dtype=float)
    locations = np.asarray(locations, dtype=float)
    ok = np.isfinite(values)
    values, locations = values[ok], locations[ok]
    if values.size < 2:
        return Verdict(
            Status.INCONCLUSIVE, None, grid_size, tol,
            note=f"fewer than two valid points for {quantity}",
        )
    rises = np.diff(values)
    worst = int(np.argmax(rises))
    if rises[worst] > tol:
        return Verdict(
            Status.FAILS,
            Witness(float(locations[worst + 1]), quantity, float(rises[worst])),
            grid_size,
            tol,
        )
    return Verdict(Status.HOLDS_ON_GRID, None, grid_size, tol)


def _x_grid(models, grid_size) -> np.ndarray:
    """Shared evaluation grid over the support union, interior only."""
    lo = min(float(m.quantile(1e-4)) for m in models)
    hi = max(float(m.quantile(1.0 - 1e-4)) for m in models)
    if not lo < hi:
        raise DomainError("degenerate support union for x-grid")
    unbounded = any(math.isinf(m.support.upper) for m in models)
    if unbounded and lo > 0:
        return np.geomspace(lo, hi, grid_size)
    return np.linspace(lo, hi, grid_size)


def _quantile_cumulatives(model, boundaries):
    if not math.isfinite(model.mean):
        raise InfiniteMean(f"{model.name}: partial-integral orders need a finite mean")
    return cumulative_integral(model.quantile, boundaries)


def check_order(
    x_model: QuantileModel,
    y_model: QuantileModel,
    relation: OrderRelation | str,
    grid_size: int = DEFAULT_GRID,
    tol: float = DEFAULT_TOL,
) -> Verdict:
    """Check X <= Y in the given stochastic order on a deterministic grid.

    st      Q_X(u) <= Q_Y(u) everywhere on the u-grid.
    hr/rh   survival / cdf ratio decreasing on the x-grid.
    lr      density ratio decreasing on the x-grid (needs both pdfs).
    star    quantile ratio Q_X/Q_Y decreasing on the u-grid.
    ps/rps  ratio of upper / lower partial quantile integrals decreasing.

    Ratios are only evaluated where their denominators clear a small guard;
    if fewer than two grid points survive, the verdict is inconclusive.
    """
    relation = OrderRelation(relation)
    if grid_size < 2:
        raise DomainError("grid_size must be at least 2")

    if relation is OrderRelation.ST:
        us = chebyshev_nodes(grid_size)
        gap = np.asarray(x_model.quantile(us)) - np.asarray(y_model.quantile(us))
        worst = int(np.argmax(gap))
        if gap[worst] > tol:
            return Verdict(
                Status.FAILS,
                Witness(float(us[worst]), "Q_X <= Q_Y", float(gap[worst])),
                grid_size,
                tol,
            )
        return Verdict(Status.HOLDS_ON_GRID, None, grid_size, tol)

    if relation is OrderRelation.STAR:
        us = chebyshev_nodes(grid_size)
        qx = np.asarray(x_model.quantile(us), dtype=float)
        qy = np.asarray(y_model.quantile(us), dtype=float)
        mask = qy > _RATIO_GUARD
        return _verdict_nonincreasing(
            qx[mask] / qy[mask], us[mask], grid_size, tol, "Q_X/Q_Y decreasing"
        )

    if relation in (OrderRelation.PS, OrderRelation.RPS):
        bounds = chebyshev_boundaries(grid_size)
        cx = _quantile_cumulatives(x_model, bounds)
        cy = _quantile_cumulatives(y_model, bounds)
        if relation is OrderRelation.RPS:
            num, den, locs = cx[1:], cy[1:], bounds[1:]
            quantity = "lower partial-integral ratio decreasing"
        else:
            num = cx[-1] - cx[:-1]
            den = cy[-1] - cy[:-1]
            locs = bounds[:-1]
            quantity = "upper partial-integral ratio decreasing"
        mask = den > max(_RATIO_GUARD, 1e-12 * float(cy[-1]))
        return _verdict_nonincreasing(
            num[mask] / den[mask], locs[mask], grid_size, tol, quantity
        )

    # x-space ratio orders
    xs = _x_grid((x_model, y_model), grid_size)
    if relation is OrderRelation.LR:
        if x_model.pdf is None or y_model.pdf is None:
            raise MissingDensity("likelihood-ratio order needs both densities")
        fx = np.asarray(x_model.pdf(xs), dtype=float)
        fy = np.asarray(y_model.pdf(xs), dtype=float)
        mask = fy > _RATIO_GUARD
        return _verdict_nonincreasing(
            fx[mask] / fy[mask], xs[mask], grid_size, tol, "f_X/f_Y decreasing"
        )
    if relation is OrderRelation.HR:
        sx = 1.0 - np.asarray(x_model.cdf(xs), dtype=float)
        sy = 1.0 - np.asarray(y_model.cdf(xs), dtype=float)
        mask = sy > _RATIO_GUARD
        return _verdict_nonincreasing(
            sx[mask] / sy[mask], xs[mask], grid_size, tol, "survival ratio decreasing"
        )
    if relation is OrderRelation.RH:
        fx = np.asarray(x_model.cdf(xs), dtype=float)
        fy = np.asarray(y_model.cdf(xs), dtype=float)
        mask = fy > _RATIO_GUARD
        return _verdict_nonincreasing(
            fx[mask] / fy[mask], xs[mask], grid_size, tol, "cdf ratio decreasing"
        )
    raise DomainError(f"unhandled relation {relation}")


def check_unit_order(
    u_var: UnitVariable,
    v_var: UnitVariable,
    relation: OrderRelation | str,
    grid_size: int = DEFAULT_GRID,
    tol: float = DEFAULT_TOL,
) -> Verdict:
    """Order check between two unit-interval laws (st, hr, rh, lr only)."""
    relation = OrderRelation(relation)
    us = chebyshev_nodes(grid_size)
    if relation is OrderRelation.ST:
        # U <= V in st means F_U >= F_V pointwise
        gap = np.asarray(v_var.cdf(us)) - np.asarray(u_var.cdf(us))
        worst = int(np.argmax(gap))
        if gap[worst] > tol:
            return Verdict(
                Status.FAILS,
                Witness(float(us[worst]), "F_U >= F_V", float(gap[worst])),
                grid_size,
                tol,
            )
        return Verdict(Status.HOLDS_ON_GRID, None, grid_size, tol)
    if relation is OrderRelation.LR:
        du = np.asarray(u_var.density(us), dtype=float)
        dv = np.asarray(v_var.density(us), dtype=float)
        mask = dv > _RATIO_GUARD
        return _verdict_nonincreasing(
            du[mask] / dv[mask], us[mask], grid_size, tol, "unit density ratio"
        )
    if relation is OrderRelation.HR:
        su = 1.0 - np.asarray(u_var.cdf(us), dtype=float)
        sv = 1.0 - np.asarray(v_var.cdf(us), dtype=float)
        mask = sv > _RATIO_GUARD
        return _verdict_nonincreasing(
            su[mask] / sv[mask], us[mask], grid_size, tol, "unit survival ratio"
        )
    if relation is OrderRelation.RH:
        fu = np.asarray(u_var.cdf(us), dtype=float)
        fv = np.asarray(v_var.cdf(us), dtype=float)
        mask = fv > _RATIO_GUARD
        return _verdict_nonincreasing(
            fu[mask] / fv[mask], us[mask], grid_size, tol, "unit cdf ratio"
        )
    raise DomainError(f"{relation} is not defined for unit variables here")


def check_nbu(
    x_model: QuantileModel,
    grid_size: int = DEFAULT_GRID,
    tol: float = DEFAULT_TOL,
) -> Verdict:
    """New-better-than-used in quantile form.

    Requires survival(Q(p) + Q(r)) <= (1-p)(1-r) over a 2-D (p, r) grid.
    """
    ps = chebyshev_nodes(grid_size)
    qs = np.asarray(x_model.quantile(ps), dtype=float)
    surv = 1.0 - np.asarray(x_model.cdf(np.add.outer(qs, qs)), dtype=float)
    bound = np.multiply.outer(1.0 - ps, 1.0 - ps)
    slack = surv - bound
    worst = np.unravel_index(int(np.argmax(slack)), slack.shape)
    if slack[worst] > tol:
        return Verdict(
            Status.FAILS,
            Witness(
                float(ps[worst[0]]),
                f"survival(Q(p)+Q(r)) <= (1-p)(1-r) at r={float(ps[worst[1]]):.6g}",
                float(slack[worst]),
            ),
            grid_size,
            tol,
        )
    return Verdict(Status.HOLDS_ON_GRID, None, grid_size, tol)


def check_ifr(
    x_model: QuantileModel,
    grid_size: int = DEFAULT_GRID,
    tol: float = DEFAULT_TOL,
) -> Verdict:
    """Increasing failure rate in quantile form.

    Aging makes residual lives stochastically smaller, so for r < p the
    survival ratio obeys surv(Q(s)+Q(p)) (1-r) <= surv(Q(s)+Q(r)) (1-p); the
    product form avoids dividing by vanishing tails.  (The exponential sits
    on the equality boundary; an increasing-hazard oracle fixes the
    orientation.)  Scans s-slices of the 3-D grid, stopping at the first
    violation.
    """
    ps = chebyshev_nodes(grid_size)
    qs = np.asarray(x_model.quantile(ps), dtype=float)
    one_minus = 1.0 - ps
    r_lt_p = np.tril(np.ones((grid_size, grid_size), dtype=bool), k=-1)
    for i in range(grid_size):
        row = 1.0 - np.asarray(x_model.cdf(qs[i] + qs), dtype=float)
        lhs = np.multiply.outer(row, one_minus)       # [p, r] -> surv(p)*(1-r)
        rhs = np.multiply.outer(one_minus, row)       # [p, r] -> (1-p)*surv(r)
        slack = np.where(r_lt_p, lhs - rhs, -np.inf)
        worst = np.unravel_index(int(np.argmax(slack)), slack.shape)
        if slack[worst] > tol:
            return Verdict(
                Status.FAILS,
                Witness(
                    float(ps[i]),
                    "log-concavity of survival in quantile form at "
                    f"(p,r)=({float(ps[worst[0]]):.6g},{float(ps[worst[1]]):.6g})",
                    float(slack[worst]),
                ),
                grid_size,
                tol,
            )
    return Verdict(Status.HOLDS_ON_GRID, None, grid_size, tol)


def check_xtau_decreasing(
    x_model: QuantileModel,
    grid_size: int = DEFAULT_GRID,
    tol: float = DEFAULT_TOL,
) -> Verdict:
    """Is x * tau(x) nonincreasing, tau the reversed hazard rate f/F?"""
    if x_model.pdf is None:
        raise MissingDensity(f"{x_model.name} carries no density")
    xs = _x_grid((x_model,), grid_size)
    big_f = np.asarray(x_model.cdf(xs), dtype=float)
    little_f = np.asarray(x_model.pdf(xs), dtype=float)
    mask = big_f > _RATIO_GUARD
    vals = xs[mask] * little_f[mask] / big_f[mask]
    return _verdict_nonincreasing(
        vals, xs[mask], grid_size, tol, "x * reversed-hazard decreasing"
    )


_CONSEQUENT = {
    OrderRelation.STAR: OrderRelation.LR,
    OrderRelation.PS: OrderRelation.HR,
    OrderRelation.RPS: OrderRelation.RH,
}


@dataclass
class ImplicationSuiteReport:
    """Outcome of the order-implication net on one dominated pair.

    For each antecedent order between X and Y that holds on the grid, both
    consequent orders (each lift against the spread law) must hold too; any
    antecedent-holds/consequent-fails pair lands in ``violations`` and points
    at an implementation bug, not at the mathematics.
    """

    pair: str
    antecedents: dict = field(default_factory=dict)
    consequents: dict = field(default_factory=dict)
    st_equivalence: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def st_consistent(self) -> bool:
        statuses = {v.status for v in self.st_equivalence.values()}
        return len(statuses) <= 1

    @property
    def clean(self) -> bool:
        return not self.violations and self.st_consistent


def implication_suite(
    x_model: QuantileModel,
    y_model: QuantileModel,
    grid_size: int = 256,
    tol: float = DEFAULT_TOL,
) -> ImplicationSuiteReport:
    """Run the antecedent/consequent net for a class-D dominated pair.

    star implies lr against the spread law, ps implies hr, rps implies rh;
    and the three st comparisons among the two lifts and the spread law are
    equivalent (all hold or all fail together).
    """
    lift_x = lorenz_lift(x_model)
    lift_y = lorenz_lift(y_model)
    spread = spread_lift(x_model, y_model)
    report = ImplicationSuiteReport(pair=f"({x_model.name}, {y_model.name})")

    for antecedent, consequent in _CONSEQUENT.items():
        a_verdict = check_order(x_model, y_model, antecedent, grid_size, tol)
        report.antecedents[antecedent.value] = a_verdict
        c_x = check_unit_order(lift_x, spread, consequent, grid_size, tol)
        c_y = check_unit_order(lift_y, spread, consequent, grid_size, tol)
        report.consequents[antecedent.value] = (c_x, c_y)
        if a_verdict.holds:
            for tag, c_verdict in (("liftX", c_x), ("liftY", c_y)):
                if c_verdict.status is Status.FAILS:
                    report.violations.append(
                        f"{antecedent.value} holds but {consequent.value} fails "
                        f"for {tag} vs spread: {c_verdict.witness}"
                    )

    report.st_equivalence = {
        "liftX<=liftY": check_unit_order(lift_x, lift_y, OrderRelation.ST, grid_size, tol),
        "liftX<=spread": check_unit_order(lift_x, spread, OrderRelation.ST, grid_size, tol),
        "liftY<=spread": check_unit_order(lift_y, spread, OrderRelation.ST, grid_size, tol),
    }
    if not report.st_consistent:
        report.violations.append(
            "st equivalence broken: "
            + ", ".join(f"{k}={v.status.value}" for k, v in report.st_equivalence.items())
        )
    return report
