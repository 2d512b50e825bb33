"""Command-line interface: ``extweak {simulate,sweep,optimal,montecarlo,compare-experiment}``.

Exit codes: 0 success, 2 usage error, 3 singular point (undefined weak
value, vanishing post-selection, no optimum), 4 I/O error, 5 residual gate
failure.  A flat ``key = value`` file given with ``--config`` supplies
defaults for any flag (keys are flag names without the leading dashes);
flags on the command line win.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys
from pathlib import Path

from . import montecarlo, theory
from .optics import (
    Interpretation,
    InterferometerConfig,
    PolarizationPrep,
    PostSelectionError,
    run_pipeline,
)
from .weakvalues import Port, UndefinedWeakValueError, coupling_weak_value

SCHEMA_VERSION = 1
RESIDUAL_GATE = 1e-12

EXIT_OK, EXIT_USAGE, EXIT_SINGULAR, EXIT_IO, EXIT_GATE = 0, 2, 3, 4, 5

SWEEP_FIELDS = [
    "phi", "theta", "zeta", "diff_closed", "diff_pipeline", "variance", "fluctuation",
    "p_postselect", "s_corresponding", "gaussian_q", "gaussian_p", "istkh_diff", "abs_residual",
]
SIMULATE_FIELDS = [
    "phi", "theta", "interpretation", "visibility", "c_h", "c_v",
    "zeta", "diff_closed", "diff_pipeline", "p_b1", "p_b2", "variance", "fluctuation",
    "p_postselect", "w1_re", "w1_im", "w2_re", "w2_im", "overlap_re", "overlap_im",
]
OPTIMAL_FIELDS = ["weak_value", "theta_star", "s_star", "zeta", "diff", "fluctuation"]
MONTECARLO_FIELDS = [
    "phi", "theta", "n_photons", "seed", "defined", "n_postselected", "n_b1", "n_b2",
    "estimate", "stderr", "true_diff", "fluctuation", "predicted_stderr", "p_postselect",
]
COMPARE_FIELDS = [
    "theta", "measured_diff", "measured_error", "ideal_diff", "visibility", "adjusted_diff",
    "residual", "ideal_fluctuation",
]
NOISE_CAVEAT = (
    "measured errors include shot noise, imperfect visibility and other noise sources; "
    "only the ideal quantum fluctuation is modelled"
)


class UsageError(Exception):
    pass


class GateError(Exception):
    pass


# --------------------------------------------------------------------- rows


def _grid(start: float, stop: float, step: float) -> list[float]:
    if not step > 0:
        raise UsageError("step must be > 0")
    if stop < start:
        raise UsageError(f"empty range: stop {stop} < start {start}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + k * step for k in range(n)]


def simulate_report(phi: float, theta: float, interpretation=Interpretation.SIGMA_X,
                    visibility: float = 1.0) -> dict:
    interpretation = Interpretation(interpretation)
    cfg = InterferometerConfig.from_angles(phi, theta, interpretation, visibility=visibility)
    out = run_pipeline(cfg)
    tp = theory.theory_point(phi, theta, interpretation)
    w1 = coupling_weak_value(phi, interpretation, Port.F1)
    w2 = coupling_weak_value(phi, interpretation, Port.F2)
    diff_closed = visibility * theory.pipeline_signed_diff(theta, w1.value, interpretation)
    variance = max(1.0 - diff_closed**2, 0.0)
    return {
        "phi": phi, "theta": theta, "interpretation": interpretation.value,
        "visibility": visibility, "c_h": cfg.prep.c_h, "c_v": cfg.prep.c_v,
        "zeta": tp.zeta, "diff_closed": diff_closed, "diff_pipeline": out.diff,
        "p_b1": out.p_b1, "p_b2": out.p_b2, "variance": variance,
        "fluctuation": math.sqrt(variance), "p_postselect": out.p_postselect,
        "w1_re": w1.value.real, "w1_im": w1.value.imag,
        "w2_re": w2.value.real, "w2_im": w2.value.imag,
        "overlap_re": w1.overlap.real, "overlap_im": w1.overlap.imag,
    }


def sweep_row(phi: float, theta: float, interpretation=Interpretation.SIGMA_X,
              visibility: float = 1.0) -> dict:
    interpretation = Interpretation(interpretation)
    cfg = InterferometerConfig.from_angles(phi, theta, interpretation, visibility=visibility)
    out = run_pipeline(cfg)
    w1 = coupling_weak_value(phi, interpretation, Port.F1).value
    z = theory.zeta(theta, theory.effective_real_weak_value(w1, interpretation))
    diff_closed = visibility * theory.pipeline_signed_diff(theta, w1, interpretation)
    variance = max(1.0 - diff_closed**2, 0.0)
    s = theory.strength_correspondence(theta)
    gp = theory.GaussianPointerParams(s, w1)
    return {
        "phi": phi,
        "theta": theta,
        "zeta": z,
        "diff_closed": diff_closed,
        "diff_pipeline": out.diff,
        "variance": variance,
        "fluctuation": math.sqrt(variance),
        "p_postselect": out.p_postselect,
        "s_corresponding": s,
        "gaussian_q": theory.gaussian_pointer_q(gp),
        "gaussian_p": theory.gaussian_pointer_p(gp),
        "istkh_diff": theory.istkh_form(theta, cfg.prep.c_v / cfg.prep.c_h),
        "abs_residual": abs(diff_closed - out.diff),
    }


SINGULAR_ERRORS = (PostSelectionError, UndefinedWeakValueError, theory.SingularPointError,
                   ZeroDivisionError)


def sweep_rows(phis, thetas, interpretation=Interpretation.SIGMA_X, visibility=1.0,
               gate: float = RESIDUAL_GATE) -> tuple[list[dict], list[tuple[float, float]]]:
    """Rows ordered phi-outer, theta-inner; singular grid points are skipped and returned."""
    for th in thetas:
        if not (0.0 <= th < 22.5):
            raise UsageError("theta must lie in [0, 22.5) degrees for a sweep")
    rows, skipped = [], []
    for phi in phis:
        for th in thetas:
            try:
                row = sweep_row(phi, th, interpretation, visibility)
            except SINGULAR_ERRORS:
                skipped.append((phi, th))
                continue
            if not row["abs_residual"] <= gate:
                raise GateError(f"residual {row['abs_residual']:.3e} at phi={phi}, theta={th}")
            rows.append(row)
    return rows, skipped


def optimal_report(w: float) -> dict:
    th = theory.optimal_theta(w)
    s = theory.strength_correspondence(th) if th < 22.5 else None
    z = theory.zeta(th, w) if th < 45.0 else math.copysign(1.0, w)
    return {
        "weak_value": w, "theta_star": th, "s_star": s, "zeta": z,
        "diff": theory.diff_from_zeta(z), "fluctuation": theory.fluctuation_from_zeta(z),
    }


def montecarlo_report(phi, theta, n_photons, seed, interpretation=Interpretation.SIGMA_X,
                      visibility=1.0, workers=1) -> dict:
    cfg = InterferometerConfig.from_angles(phi, theta, interpretation, visibility=visibility)
    res = montecarlo.simulate_counts(montecarlo.ShotConfig(n_photons, seed, cfg), workers)
    p_ps, _ = montecarlo.port_probabilities(cfg)
    try:
        true = run_pipeline(cfg)
        true_diff, fl = true.diff, true.fluctuation
    except PostSelectionError:
        true_diff = fl = None
    pred = fl / math.sqrt(res.n_postselected) if (fl is not None and res.n_postselected) else None
    return {
        "phi": phi, "theta": theta, "n_photons": n_photons, "seed": seed,
        "defined": res.defined, "n_postselected": res.n_postselected,
        "n_b1": res.n_b1, "n_b2": res.n_b2, "estimate": res.estimate, "stderr": res.stderr,
        "true_diff": true_diff, "fluctuation": fl, "predicted_stderr": pred,
        "p_postselect": p_ps,
    }


def compare_experiment(rows, w: float, fit_on=None, visibility=None) -> tuple[list[dict], dict]:
    """Fit (or fix) the visibility and compare the model against measured rows.

    ``rows`` are ``(theta, measured_diff, measured_error_or_None)``.
    """
    if len(rows) < 1:
        raise UsageError("compare-experiment needs at least one data row")
    ideal = [theory.istkh_form(th, w) for th, _, _ in rows]
    if visibility is None:
        idx = list(range(len(rows))) if not fit_on else list(fit_on)
        for i in idx:
            if not 0 <= i < len(rows):
                raise UsageError(f"fit row index {i} out of range")
        visibility = theory.fit_visibility([ideal[i] for i in idx], [rows[i][1] for i in idx])
        fitted = True
    else:
        fitted = False
        idx = []
    out = []
    for (th, meas, err), d in zip(rows, ideal):
        adj = visibility * d
        out.append({
            "theta": th, "measured_diff": meas, "measured_error": err, "ideal_diff": d,
            "visibility": visibility, "adjusted_diff": adj, "residual": meas - adj,
            "ideal_fluctuation": theory.fluctuation(th, w),
        })
    summary = {"visibility": visibility, "fitted": fitted, "fit_rows": idx, "caveat": NOISE_CAVEAT}
    errs = [(r["measured_error"], r) for r in out if r["measured_error"] is not None]
    if len(errs) >= 2:
        lo = min(errs, key=lambda e: e[0])[1]
        hi = max(errs, key=lambda e: e[0])[1]
        summary["measured_error_ratio"] = hi["measured_error"] / lo["measured_error"]
        if lo["ideal_fluctuation"] > 0:
            summary["theory_fluctuation_ratio"] = hi["ideal_fluctuation"] / lo["ideal_fluctuation"]
        summary["ratio_rows"] = [hi["theta"], lo["theta"]]
    return out, summary


# ----------------------------------------------------------------- emission


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        if not math.isfinite(x):
            raise GateError(f"non-finite value {x!r} in output")
        return format(x + 0.0, ".17g")  # + 0.0 folds -0.0 into 0.0
    return str(x)


def render_csv(fields, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for r in rows:
        w.writerow([_fmt(r[f]) for f in fields])
    return buf.getvalue()


def render_json(command: str, params: dict, rows, extra: dict | None = None) -> str:
    for r in rows:
        for v in r.values():
            if isinstance(v, float) and not math.isfinite(v):
                raise GateError(f"non-finite value {v!r} in output")
    doc = {"schema_version": SCHEMA_VERSION, "command": command, "params": params, "rows": rows}
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2) + "\n"


def emit(args, fields, rows, extra: dict | None = None) -> None:
    params = {k: (v.value if isinstance(v, Interpretation) else v)
              for k, v in sorted(vars(args).items()) if k not in ("func", "config", "output")}
    if args.format == "json":
        text = render_json(args.command, params, rows, extra)
    else:
        text = render_csv(fields, rows)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------- commands


def cmd_simulate(args) -> int:
    rep = simulate_report(args.phi, args.theta, args.interpretation, args.visibility)
    emit(args, SIMULATE_FIELDS, [rep])
    return EXIT_OK


def cmd_sweep(args) -> int:
    phi_stop = args.phi_start if args.phi_stop is None else args.phi_stop
    phis = _grid(args.phi_start, phi_stop, args.phi_step)
    thetas = _grid(args.theta_start, args.theta_stop, args.theta_step)
    rows, skipped = sweep_rows(phis, thetas, args.interpretation, args.visibility)
    for phi, th in skipped:
        print(f"skipped singular point phi={phi} theta={th}", file=sys.stderr)
    emit(args, SWEEP_FIELDS, rows)
    return EXIT_OK


def cmd_optimal(args) -> int:
    if (args.weak_value is None) == (args.phi is None):
        raise UsageError("give exactly one of --weak-value or --phi")
    if args.weak_value is not None:
        w = args.weak_value
    else:
        prep = PolarizationPrep(args.phi)
        if prep.c_h == 0.0:
            raise UndefinedWeakValueError("C_H = 0")
        w = prep.c_v / prep.c_h
    emit(args, OPTIMAL_FIELDS, [optimal_report(w)])
    return EXIT_OK


def cmd_montecarlo(args) -> int:
    if args.n_photons < 1:
        raise UsageError("--n-photons must be >= 1")
    rep = montecarlo_report(args.phi, args.theta, args.n_photons, args.seed,
                            args.interpretation, args.visibility, args.workers)
    if not rep["defined"]:
        print("undefined estimate: no photon survived post-selection", file=sys.stderr)
    emit(args, MONTECARLO_FIELDS, [rep])
    return EXIT_OK


def _parse_row(text: str) -> tuple[float, float, float | None]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) not in (2, 3):
        raise UsageError(f"data row {text!r} must be THETA,DIFF[,ERROR]")
    try:
        vals = [float(p) for p in parts if p != ""]
    except ValueError as e:
        raise UsageError(str(e)) from None
    return vals[0], vals[1], (vals[2] if len(vals) == 3 else None)


def _read_rows(path: str) -> list[tuple[float, float, float | None]]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            err = rec.get("error", "")
            out.append((float(rec["theta"]), float(rec["diff"]), float(err) if err else None))
    return out


def cmd_compare(args) -> int:
    rows = [_parse_row(r) for r in (args.row or [])]
    if args.data:
        rows += _read_rows(args.data)
    if (args.weak_value is None) == (args.phi is None):
        raise UsageError("give exactly one of --weak-value or --phi")
    if args.weak_value is not None:
        w = args.weak_value
    else:
        prep = PolarizationPrep(args.phi)
        if prep.c_h == 0.0:
            raise UndefinedWeakValueError("C_H = 0")
        w = prep.c_v / prep.c_h
    out, summary = compare_experiment(rows, w, args.fit_rows, args.visibility)
    print(f"note: {NOISE_CAVEAT}", file=sys.stderr)
    if "theory_fluctuation_ratio" in summary:
        print(f"fluctuation ratio: theory {summary['theory_fluctuation_ratio']:.4g} vs "
              f"measured error ratio {summary['measured_error_ratio']:.4g}", file=sys.stderr)
    emit(args, COMPARE_FIELDS, out, {"summary": summary})
    return EXIT_OK


# ------------------------------------------------------------------- parser


def _interp(text: str) -> Interpretation:
    try:
        return Interpretation(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected sigma-x or sigma-y") from None


def _common(p: argparse.ArgumentParser, seed=False, interp=True) -> None:
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--output", default=None, help="write here instead of stdout")
    p.add_argument("--config", default=None, help="flat key = value file of flag defaults")
    if interp:
        p.add_argument("--interpretation", type=_interp, default=Interpretation.SIGMA_X,
                       help="sigma-x (real weak value) or sigma-y (imaginary weak value)")
        p.add_argument("--visibility", type=float, default=1.0)
    if seed:
        p.add_argument("--seed", type=int, default=42)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="extweak", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="one (phi, theta) point, all observables")
    p.add_argument("--phi", type=float, required=True, help="polarization angle, degrees")
    p.add_argument("--theta", type=float, required=True, help="HWP fast-axis angle, degrees")
    _common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="grid over phi and theta")
    p.add_argument("--phi", dest="phi_start", type=float, help="single phi (same as --phi-start)")
    p.add_argument("--phi-start", dest="phi_start", type=float)
    p.add_argument("--phi-stop", type=float, default=None)
    p.add_argument("--phi-step", type=float, default=1.0)
    p.add_argument("--theta-start", type=float, default=0.0)
    p.add_argument("--theta-stop", type=float, required=False)
    p.add_argument("--theta-step", type=float, default=0.5)
    _common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimal", help="strength where the fluctuation vanishes")
    p.add_argument("--weak-value", type=float, default=None)
    p.add_argument("--phi", type=float, default=None)
    _common(p, interp=False)
    p.set_defaults(func=cmd_optimal)

    p = sub.add_parser("montecarlo", help="photon-counting emulation")
    p.add_argument("--phi", type=float, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--n-photons", type=int, default=1_000_000)
    p.add_argument("--workers", type=int, default=1)
    _common(p, seed=True)
    p.set_defaults(func=cmd_montecarlo)

    p = sub.add_parser("compare-experiment", help="fit visibility against measured data")
    p.add_argument("--row", action="append", help="THETA,DIFF[,ERROR]; repeatable")
    p.add_argument("--data", default=None, help="CSV with columns theta,diff[,error]")
    p.add_argument("--weak-value", type=float, default=None)
    p.add_argument("--phi", type=float, default=None)
    p.add_argument("--fit-rows", type=int, nargs="+", default=None,
                   help="0-based row indices used for the fit (default: all)")
    p.add_argument("--visibility", type=float, default=None, help="fix v instead of fitting")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--output", default=None)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_compare)
    return ap


def load_config(path: str) -> dict[str, str]:
    cp = configparser.ConfigParser(interpolation=None)
    cp.read_string("[run]\n" + Path(path).read_text(encoding="utf-8"))
    return {k.replace("-", "_"): v for k, v in cp["run"].items()}


def _apply_config(ap: argparse.ArgumentParser, argv: list[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    values = load_config(known.config)
    subs = next(a for a in ap._actions if isinstance(a, argparse._SubParsersAction))
    for sp in subs.choices.values():
        by_name = {}
        for a in sp._actions:
            by_name[a.dest] = a
            for opt in a.option_strings:
                by_name[opt.lstrip("-").replace("-", "_")] = a
        for k, v in values.items():
            act = by_name.get(k)
            if act is None or k in ("config", "help"):
                continue
            act.required = False
            sp.set_defaults(**{act.dest: act.type(v) if act.type else v})


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        _apply_config(ap, argv)
    except (OSError, configparser.Error, ValueError) as e:
        print(f"error: cannot read config: {e}", file=sys.stderr)
        return EXIT_IO if isinstance(e, OSError) else EXIT_USAGE
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.command == "sweep" and (args.phi_start is None or args.theta_stop is None):
        print("error: sweep needs --phi/--phi-start and --theta-stop", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except theory.NoOptimumError as e:
        print(f"no optimum: {e}", file=sys.stderr)
        return EXIT_SINGULAR
    except SINGULAR_ERRORS as e:
        print(f"singular point: {e}", file=sys.stderr)
        return EXIT_SINGULAR
    except GateError as e:
        print(f"gate failure: {e}", file=sys.stderr)
        return EXIT_GATE
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
