"""Command-line front end: densities, figures, verifications, orders, risk.

Exit codes are a stable contract: 0 success / check passed, 1 verification or
assertion failure (including hypothesis gates), 2 usage or parameter errors.
CSV output uses 12 significant digits, '.' decimals, LF line endings, and is
byte-identical across runs for identical flags.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile

import numpy as np

from .distributions import FamilySpec, make_model, tabulated_from_csv
from .errors import (
    DomainError,
    EqualMeans,
    HypothesisFailed,
    InfiniteMean,
    InvalidBracket,
    InvalidParameter,
    InvalidSampleSize,
    MissingDensity,
    NonConvergence,
    NonFiniteEvaluation,
    NonMonotonePhi,
    NotStochasticallyOrdered,
    QZero,
    QuantCalcError,
)
from .identities import (
    AvarPair,
    HatPair,
    IfrPair,
    MvtCase,
    NbuPair,
    ProportionalCase,
    Risk1Pair,
    Risk2Pair,
    TaylorCase,
    constant,
    exp_function,
    exponential_hat_pair_density,
    frechet_star_pair_density,
    log1p_function,
    monte_carlo_crosscheck,
    polynomial,
    power_function,
    rayleigh_proportional_pair_density,
    tail_power_phi,
    verify_application,
    verify_corollary_power,
    verify_mvt,
    verify_proportional,
    verify_taylor1,
    verify_taylor_n,
)
from .numerics import integral_value
from .orders import (
    Status,
    check_ifr,
    check_nbu,
    check_order,
    check_xtau_decreasing,
)
from .risk import ProportionalResidual, StarModel, HatModel, derive, risk_curve
from .unitlaw import lorenz_lift, spread_lift

_USAGE_ERRORS = (
    InvalidParameter,
    DomainError,
    InvalidSampleSize,
    MissingDensity,
    InfiniteMean,
    QZero,
    InvalidBracket,
    ValueError,
    OSError,
)
_CHECK_ERRORS = (
    HypothesisFailed,
    NotStochasticallyOrdered,
    EqualMeans,
    NonConvergence,
    NonMonotonePhi,
    NonFiniteEvaluation,
)


def _parse_model(spec: str):
    """Mini-grammar 'family:param1,param2', e.g. exp:1, lomax:2,1, block."""
    name, _, rest = spec.partition(":")
    name = name.strip().lower()
    if name == "tabulated":
        if not rest:
            raise InvalidParameter("tabulated needs a CSV path: tabulated:PATH")
        return tabulated_from_csv(rest)
    params = tuple(float(tok) for tok in rest.split(",") if tok.strip()) if rest else ()
    return make_model(FamilySpec(name, params))


def _parse_g(spec: str):
    """Test-function grammar: pow:a, poly:c0,c1,..., exp, log1p, const[:c], tailpow:b."""
    name, _, rest = spec.partition(":")
    name = name.strip().lower()
    params = tuple(float(tok) for tok in rest.split(",") if tok.strip()) if rest else ()
    if name == "pow":
        if len(params) != 1:
            raise InvalidParameter("pow takes one exponent, e.g. pow:2")
        return power_function(params[0])
    if name == "poly":
        if not params:
            raise InvalidParameter("poly takes coefficients, e.g. poly:0,1,2")
        return polynomial(params)
    if name == "exp":
        return exp_function()
    if name == "log1p":
        return log1p_function()
    if name == "const":
        return constant(params[0] if params else 1.0)
    if name == "tailpow":
        if len(params) != 1:
            raise InvalidParameter("tailpow takes one shape, e.g. tailpow:2")
        return tail_power_phi(params[0])
    raise InvalidParameter(f"unknown test function {spec!r}")


def _interior_grid(n: int) -> np.ndarray:
    if n < 1:
        raise InvalidParameter("grid must contain at least one point")
    return np.linspace(0.0, 1.0, n + 2)[1:-1]


def _write_text(path: str, text: str):
    """Atomic write: temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _curve_csv(us, values) -> str:
    lines = ["u,density"]
    lines.extend(f"{u:.12g},{v:.12g}" for u, v in zip(us, values))
    return "\n".join(lines) + "\n"


def _emit(path, text, to_stdout_ok=True):
    if path:
        _write_text(path, text)
    elif to_stdout_ok:
        sys.stdout.write(text)


def _save_svg(path, curves, title, xlabel="u", ylabel="density"):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.5, 4.2))
    for label, us, vals in curves:
        ax.plot(us, vals, label=label, linewidth=1.4)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


# -- density ---------------------------------------------------------------------


def _cmd_density(args) -> int:
    us = _interior_grid(args.grid)
    construction = args.construction
    if args.lift:
        construction = "lift"
    if construction in (None, "lift"):
        if not args.family:
            raise InvalidParameter("density needs --family (with --lift) or --construction")
        model = _parse_model(args.family)
        density = lorenz_lift(model).density
        label = f"lift({model.name})"
    elif construction in ("spread", "psi"):
        if not (args.x and args.y):
            raise InvalidParameter("spread construction needs --x and --y")
        spread = spread_lift(_parse_model(args.x), _parse_model(args.y))
        density = spread.density
        label = spread.provenance
    else:
        raise InvalidParameter(f"unknown construction {construction!r}")
    vals = np.asarray(density(us), dtype=float)
    csv_text = _curve_csv(us, vals)
    if args.format in ("csv", "both"):
        _emit(args.out, csv_text)
    if args.format in ("svg", "both"):
        if not args.out:
            raise InvalidParameter("svg output needs --out")
        base, _ = os.path.splitext(args.out)
        _save_svg(base + ".svg", [(label, us, vals)], label)
    return 0


# -- figures ---------------------------------------------------------------------


def _figure_curves(fig_id):
    """Closed-form curve set, caption ordering probe, and a numeric cross-check."""
    if fig_id == "1":
        params = [(0.1, 0.3), (0.4, 0.6), (0.7, 0.9)]
        curves = [
            (f"r={r:g},p={p:g}", rayleigh_proportional_pair_density(r, p))
            for r, p in params
        ]
        ordering = ("decreasing", 0.02)

        def numeric(r, p):
            parent = make_model(FamilySpec("rayleigh", (1.0,)))
            return spread_lift(
                derive(parent, ProportionalResidual(p)),
                derive(parent, ProportionalResidual(r)),
            ).density

        crosscheck = [(numeric(r, p), d) for (r, p), (_, d) in zip(params, curves)]
        return curves, ordering, crosscheck
    if fig_id in ("2a", "2b"):
        if fig_id == "2a":
            params = [(v, 0.9) for v in (0.1, 0.3, 0.5, 0.7)]
            ordering = ("increasing", 0.02)
        else:
            params = [(0.1, w) for w in (0.3, 0.5, 0.7, 0.9)]
            ordering = ("decreasing", 0.98)
        curves = [
            (f"v={v:g},w={w:g}", frechet_star_pair_density(v, w)) for v, w in params
        ]

        def numeric(v, w):
            parent = make_model(FamilySpec("frechet", (1.0, 1.0)))
            return spread_lift(
                derive(parent, StarModel(v)), derive(parent, StarModel(w))
            ).density

        crosscheck = [(numeric(v, w), d) for (v, w), (_, d) in zip(params, curves)]
        return curves, ordering, crosscheck
    if fig_id == "3":
        params = [(0.1, 0.2), (0.3, 0.4), (0.5, 0.6), (0.7, 0.8)]
        curves = [
            (f"v={v:g},w={w:g}", exponential_hat_pair_density(v, w)) for v, w in params
        ]
        ordering = ("increasing", 0.02)

        def numeric(v, w):
            parent = make_model(FamilySpec("exp", (1.0,)))
            return spread_lift(
                derive(parent, HatModel(v)), derive(parent, HatModel(w))
            ).density

        crosscheck = [(numeric(v, w), d) for (v, w), (_, d) in zip(params, curves)]
        return curves, ordering, crosscheck
    raise InvalidParameter(f"unknown figure id {fig_id!r}; choose 1, 2a, 2b, 3")


def _cmd_figure(args) -> int:
    curves, (direction, probe), crosscheck = _figure_curves(args.id)
    us = _interior_grid(args.grid)
    os.makedirs(args.out_dir, exist_ok=True)
    failures = []
    svg_curves = []
    probe_values = []
    for (label, density) in curves:
        vals = np.asarray(density(us), dtype=float)
        norm = integral_value(density, 0.0, 1.0, what=f"figure {args.id} {label}")
        if abs(norm - 1.0) > 1e-5:
            failures.append(f"{label}: normalization {norm!r} off by {norm - 1.0:.3g}")
        probe_values.append(float(density(probe)))
        slug = label.replace("=", "").replace(",", "_")
        path = os.path.join(args.out_dir, f"fig{args.id}_{slug}.csv")
        if args.format in ("csv", "both"):
            _write_text(path, _curve_csv(us, vals))
        svg_curves.append((label, us, vals))
        print(f"figure {args.id} {label}: normalization {norm:.9f}")
    steps = np.diff(probe_values)
    ordered = np.all(steps < 0) if direction == "decreasing" else np.all(steps > 0)
    if not ordered:
        failures.append(
            f"caption ordering ({direction} at u={probe}) violated: {probe_values}"
        )
    probe_us = np.linspace(0.15, 0.85, 8)
    for (numeric, closed), (label, _) in zip(crosscheck, curves):
        nv = np.asarray(numeric(probe_us), dtype=float)
        cv = np.asarray(closed(probe_us), dtype=float)
        dev = float(np.max(np.abs(nv - cv) / np.maximum(np.abs(cv), 1.0)))
        if dev > 1e-6:
            failures.append(f"{label}: numeric spread deviates from closed form by {dev:.3g}")
    if args.format in ("svg", "both"):
        _save_svg(
            os.path.join(args.out_dir, f"fig{args.id}.svg"),
            svg_curves,
            f"figure {args.id}",
        )
    if failures:
        for line in failures:
            print(f"FAIL: {line}", file=sys.stderr)
        return 1
    print(f"figure {args.id}: ordering at u={probe} {direction}: ok")
    return 0


# -- verify ----------------------------------------------------------------------


def _need(args, name):
    val = getattr(args, name, None)
    if val is None:
        raise InvalidParameter(f"verify {args.identity} needs --{name}")
    return val


def _mc_case(args, g):
    """Monte Carlo case descriptor for --mc, where a sampling route exists."""
    ident = args.identity
    if ident in ("taylor1", "corollary"):
        gg = power_function(float(_need(args, "alpha"))) if ident == "corollary" else g
        return TaylorCase(_parse_model(_need(args, "family")), gg)
    if ident == "mvt":
        return MvtCase(_parse_model(_need(args, "x")), _parse_model(_need(args, "y")), g)
    if ident == "proportional":
        return ProportionalCase(_parse_g(_need(args, "phi")), g)
    raise InvalidParameter(f"--mc has no sampling route for {ident!r}")


def _cmd_verify(args) -> int:
    g = _parse_g(args.g)
    ident = args.identity
    kwargs = dict(tol_abs=args.tol_abs, tol_rel=args.tol_rel)
    if ident == "taylor1":
        report = verify_taylor1(_parse_model(_need(args, "family")), g, **kwargs)
    elif ident == "taylorn":
        report = verify_taylor_n(
            _parse_model(_need(args, "family")), g, int(_need(args, "n")), **kwargs
        )
    elif ident == "corollary":
        report = verify_corollary_power(
            _parse_model(_need(args, "family")),
            float(_need(args, "alpha")),
            int(args.n or 1),
            **kwargs,
        )
    elif ident == "mvt":
        report = verify_mvt(
            _parse_model(_need(args, "x")), _parse_model(_need(args, "y")), g, **kwargs
        )
    elif ident == "proportional":
        report = verify_proportional(_parse_g(_need(args, "phi")), g, **kwargs)
    else:
        model = _parse_model(_need(args, "family"))
        if ident == "app-nbu":
            pair = NbuPair(float(_need(args, "p")), local=bool(args.local))
        elif ident == "app-ifr":
            pair = IfrPair(float(_need(args, "r")), float(_need(args, "p")))
        elif ident == "app-risk1":
            pair = Risk1Pair(float(_need(args, "p")))
        elif ident == "app-risk2":
            pair = Risk2Pair(float(_need(args, "r")), float(_need(args, "p")))
        elif ident == "app-avar":
            pair = AvarPair(float(_need(args, "v")), float(_need(args, "w")))
        elif ident == "app-hat":
            pair = HatPair(float(_need(args, "v")), float(_need(args, "w")))
        else:
            raise InvalidParameter(f"unknown identity {ident!r}")
        report = verify_application(model, pair, g, **kwargs)
    print(report.csv_row())
    ok = report.passed
    if args.mc:
        mc_report = monte_carlo_crosscheck(_mc_case(args, g), args.mc, seed=args.seed)
        print(mc_report.csv_row())
        ok = ok and mc_report.passed
    return 0 if ok else 1


# -- order -----------------------------------------------------------------------


def _verdict_row(relation, verdict) -> str:
    w = verdict.witness
    return ",".join(
        [
            relation,
            verdict.status.value,
            f"{w.location:.12g}" if w else "",
            w.quantity if w else "",
            f"{w.magnitude:.12g}" if w else "",
            str(verdict.grid_size),
            f"{verdict.tolerance:.12g}",
        ]
    )


def _cmd_order(args) -> int:
    x_model = _parse_model(_need(args, "x"))
    rel = args.relation
    if rel in ("nbu", "ifr", "xtau"):
        checker = {
            "nbu": check_nbu,
            "ifr": check_ifr,
            "xtau": check_xtau_decreasing,
        }[rel]
        verdict = checker(x_model, grid_size=args.grid, tol=args.tol)
    else:
        y_model = _parse_model(_need(args, "y"))
        verdict = check_order(x_model, y_model, rel, grid_size=args.grid, tol=args.tol)
    print(_verdict_row(rel, verdict))
    return 0 if verdict.status is Status.HOLDS_ON_GRID else 1


# -- risk ------------------------------------------------------------------------


def _cmd_risk(args) -> int:
    model = _parse_model(_need(args, "family"))
    level = args.p if args.p is not None else args.v
    if level is not None:
        curve = risk_curve(model, args.measure, [float(level)])
    else:
        levels = _interior_grid(args.grid)
        curve = risk_curve(model, args.measure, levels)
    _emit(args.out, curve.to_csv())
    return 0


# -- parser ----------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quantcalc",
        description="Quantile-calculus toolkit: unit-interval constructions, "
        "identity verifiers, stochastic orders, and risk measures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_density = sub.add_parser("density", help="emit a unit-law density as CSV/SVG")
    p_density.add_argument("--family", help="model spec, e.g. exp:1 or lomax:2,1")
    p_density.add_argument("--lift", action="store_true", help="Lorenz lift of --family")
    p_density.add_argument(
        "--construction", choices=["lift", "spread", "psi"], help="unit-law construction"
    )
    p_density.add_argument("--x", help="smaller model for the spread construction")
    p_density.add_argument("--y", help="larger model for the spread construction")
    p_density.add_argument("--grid", type=int, default=513)
    p_density.add_argument("--out")
    p_density.add_argument("--format", choices=["csv", "svg", "both"], default="csv")

    p_fig = sub.add_parser("figure", help="regenerate a catalog figure")
    p_fig.add_argument("--id", required=True, choices=["1", "2a", "2b", "3"])
    p_fig.add_argument("--out-dir", required=True)
    p_fig.add_argument("--grid", type=int, default=513)
    p_fig.add_argument("--format", choices=["csv", "svg", "both"], default="both")

    p_verify = sub.add_parser("verify", help="run one identity verifier")
    p_verify.add_argument(
        "identity",
        type=str.lower,
        choices=[
            "taylor1",
            "taylorn",
            "corollary",
            "mvt",
            "proportional",
            "app-nbu",
            "app-ifr",
            "app-risk1",
            "app-risk2",
            "app-avar",
            "app-hat",
        ],
    )
    p_verify.add_argument("--family")
    p_verify.add_argument("--x")
    p_verify.add_argument("--y")
    p_verify.add_argument("--g", default="pow:2", help="test function, e.g. pow:2")
    p_verify.add_argument("--phi", help="shape function for 'proportional'")
    p_verify.add_argument("--alpha", type=float)
    p_verify.add_argument("--n", type=int)
    p_verify.add_argument("--p", type=float)
    p_verify.add_argument("--r", type=float)
    p_verify.add_argument("--v", type=float)
    p_verify.add_argument("--w", type=float)
    p_verify.add_argument("--local", action="store_true", help="fixed-level gate for app-nbu")
    p_verify.add_argument("--tol-abs", type=float, default=1e-6)
    p_verify.add_argument("--tol-rel", type=float, default=1e-6)
    p_verify.add_argument(
        "--mc", type=int, help="also cross-check by Monte Carlo with this sample size"
    )
    p_verify.add_argument("--seed", type=int, default=0, help="Monte Carlo seed")

    p_order = sub.add_parser("order", help="stochastic order / aging-class verdicts")
    p_order.add_argument(
        "relation",
        choices=["st", "hr", "rh", "lr", "star", "ps", "rps", "nbu", "ifr", "xtau"],
    )
    p_order.add_argument("--x")
    p_order.add_argument("--y")
    p_order.add_argument("--grid", type=int, default=512)
    p_order.add_argument("--tol", type=float, default=1e-9)

    p_risk = sub.add_parser("risk", help="risk measures as CSV")
    p_risk.add_argument("measure", choices=["var", "cvar", "avar", "rspread", "pcvar"])
    p_risk.add_argument("--family")
    p_risk.add_argument("--p", type=float)
    p_risk.add_argument("--v", type=float)
    p_risk.add_argument("--grid", type=int, default=99)
    p_risk.add_argument("--out")

    return parser


_DISPATCH = {
    "density": _cmd_density,
    "figure": _cmd_figure,
    "verify": _cmd_verify,
    "order": _cmd_order,
    "risk": _cmd_risk,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return _DISPATCH[args.command](args)
    except _CHECK_ERRORS as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except QuantCalcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run():  # console-script entry point
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
