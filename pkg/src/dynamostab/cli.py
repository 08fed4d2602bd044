"""Command-line interface.

Subcommands: equilibria, lyapunov, meansquare, simulate, scan.  Every
subcommand accepts ``--config FILE`` with flat ``key=value`` lines
(``#`` starts a comment); command-line flags override file values, which
override built-in defaults.  Unknown config keys are an error rather than
a silent typo.  Output is CSV (default) or JSON; floating-point values
are rendered with 17 significant digits in CSV, and JSON carries the
shortest decimal that round-trips to the same double.  Files are written
UTF-8 with LF line endings.

Exit codes: 0 success, 2 usage or validation error, 3 numerical
non-convergence.
"""

import argparse
import json
import math
import sys

from . import __version__
from .errors import NonConvergenceError
from .lyapunov import METHODS, lyapunov
from .meansquare import ms_report
from .model import FieldState, ModelParams, find_equilibria, linearize
from .regions import BOUNDARY_KINDS, ScanSpec, scan, trace_boundary
from .sde import RngSpec, SimConfig, mc_lyapunov, mc_second_moment

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NONCONVERGENCE = 3

_PARAM_KEYS = {
    "g": float, "delta": float, "eps": float, "sigma1": float,
    "k_alpha": float, "k_beta": float,
}
_COMMON_KEYS = {
    **_PARAM_KEYS,
    "out": str, "format": str, "workers": int, "seed": int,
}
_CONFIG_KEYS = {
    "equilibria": dict(_COMMON_KEYS),
    "lyapunov": {**_COMMON_KEYS, "method": str},
    "meansquare": dict(_COMMON_KEYS),
    "simulate": {
        **_COMMON_KEYS,
        "estimator": str, "dt": float, "t_final": float, "paths": int,
        "renorm_every": int, "x0_r": float, "x0_phi": float, "stream": int,
    },
    "scan": {
        **_COMMON_KEYS,
        "method": str, "boundary_out": str,
        "eps_min": float, "eps_max": float, "eps_n": int,
        "sigma1_min": float, "sigma1_max": float, "sigma1_n": int,
    },
}

_DEFAULTS = {
    "g": 0.99, "delta": 0.01, "eps": 0.1, "sigma1": 0.0,
    "k_alpha": 1.0, "k_beta": 1.0,
    "out": None, "format": "csv", "workers": 1, "seed": 12345,
    "method": "hypergeometric",
    "estimator": "lyapunov", "dt": 1e-3, "t_final": 2000.0, "paths": 32,
    "renorm_every": 1000, "x0_r": 1.0, "x0_phi": 0.0, "stream": 0,
    "boundary_out": None,
    "eps_min": 0.005, "eps_max": 0.25, "eps_n": 256,
    "sigma1_min": 0.0, "sigma1_max": 0.05, "sigma1_n": 256,
}


class UsageError(ValueError):
    pass


def fmt(x) -> str:
    """17-significant-digit rendering for CSV floats; passthrough otherwise."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.17g}"
    if x is None:
        return ""
    return str(x)


def _csv(header: list[str], rows: list[list]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _emit(text: str, out_path: str | None):
    if out_path is None:
        sys.stdout.write(text)
    else:
        try:
            with open(out_path, "wb") as fh:
                fh.write(text.encode("utf-8"))
        except OSError as exc:
            raise UsageError(f"cannot write output file {out_path!r}: {exc}") from exc


def load_config(path: str, command: str) -> dict:
    """Parse a flat key=value config file against the command's key set."""
    allowed = _CONFIG_KEYS[command]
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path!r}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in allowed:
            raise UsageError(
                f"{path}:{lineno}: unknown key {key!r} for command {command!r} "
                f"(allowed: {', '.join(sorted(allowed))})"
            )
        try:
            values[key] = allowed[key](value)
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: bad value for {key!r}: {value!r}") from exc
    return values


def _effective(args: argparse.Namespace) -> dict:
    """defaults < config file < explicit command-line flags."""
    cfg = {k: _DEFAULTS[k] for k in _CONFIG_KEYS[args.command]}
    if args.config is not None:
        cfg.update(load_config(args.config, args.command))
    for key in _CONFIG_KEYS[args.command]:
        cli_val = getattr(args, key, None)
        if cli_val is not None:
            cfg[key] = cli_val
    return cfg


def _params(cfg: dict) -> ModelParams:
    try:
        return ModelParams(g=cfg["g"], delta=cfg["delta"], eps=cfg["eps"],
                           sigma1=cfg["sigma1"], k_alpha=cfg["k_alpha"],
                           k_beta=cfg["k_beta"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _params_json(p: ModelParams) -> dict:
    return {"g": p.g, "delta": p.delta, "eps": p.eps, "sigma1": p.sigma1,
            "k_alpha": p.k_alpha, "k_beta": p.k_beta}


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_equilibria(cfg: dict) -> int:
    params = _params(cfg)
    eqs = find_equilibria(params)
    if cfg["format"] == "json":
        payload = {
            "params": _params_json(params),
            "equilibria": [
                {"b_r": e.state.b_r, "b_phi": e.state.b_phi, "residual": e.residual}
                for e in eqs
            ],
        }
        _emit(json.dumps(payload, indent=2) + "\n", cfg["out"])
    else:
        rows = [[e.state.b_r, e.state.b_phi, e.residual] for e in eqs]
        _emit(_csv(["b_r", "b_phi", "residual"], rows), cfg["out"])
    return EXIT_OK


def cmd_lyapunov(cfg: dict) -> int:
    params = _params(cfg)
    method = cfg["method"]
    if method not in METHODS + ("all",):
        raise UsageError(f"unknown method {method!r}, expected one of "
                         f"{METHODS + ('all',)}")
    if method == "all":
        results = [lyapunov(params, m) for m in METHODS]
        values = [r.value for r in results]
        spread = max(abs(a - b) for a in values for b in values)
        if cfg["format"] == "json":
            payload = {
                "params": _params_json(params),
                "results": [
                    {"method": r.method, "lambda": r.value,
                     "error_estimate": r.error_estimate, "metadata": r.metadata}
                    for r in results
                ],
                "max_pairwise_discrepancy": spread,
            }
            _emit(json.dumps(payload, indent=2) + "\n", cfg["out"])
        else:
            rows = [[r.method, r.value, r.error_estimate] for r in results]
            rows.append(["max_pairwise_discrepancy", spread, None])
            _emit(_csv(["method", "lambda", "error_estimate"], rows), cfg["out"])
        return EXIT_OK
    result = lyapunov(params, method)
    if cfg["format"] == "json":
        payload = {
            "params": _params_json(params),
            "method": result.method, "lambda": result.value,
            "error_estimate": result.error_estimate, "metadata": result.metadata,
        }
        _emit(json.dumps(payload, indent=2) + "\n", cfg["out"])
    else:
        _emit(_csv(["method", "lambda", "error_estimate"],
                   [[result.method, result.value, result.error_estimate]]),
              cfg["out"])
    return EXIT_OK


def cmd_meansquare(cfg: dict) -> int:
    params = _params(cfg)
    report = ms_report(params)
    if cfg["format"] == "json":
        payload = {
            "params": _params_json(params),
            "abscissa": report.abscissa,
            "ms_stable": report.ms_stable,
            "criticality": report.criticality,
            "threshold_sigma": report.threshold_sigma,
            "ryashko_trace": None if math.isnan(report.ryashko_trace)
            else report.ryashko_trace,
        }
        _emit(json.dumps(payload, indent=2) + "\n", cfg["out"])
    else:
        _emit(_csv(
            ["abscissa", "ms_stable", "criticality", "threshold_sigma",
             "ryashko_trace"],
            [[report.abscissa, report.ms_stable, report.criticality,
              report.threshold_sigma, report.ryashko_trace]]),
            cfg["out"])
    return EXIT_OK


def cmd_simulate(cfg: dict) -> int:
    params = _params(cfg)
    estimator = cfg["estimator"]
    if estimator not in ("lyapunov", "second-moment"):
        raise UsageError(f"unknown estimator {estimator!r}, expected "
                         "'lyapunov' or 'second-moment'")
    try:
        sim = SimConfig(dt=cfg["dt"], t_final=cfg["t_final"],
                        n_paths=cfg["paths"], renorm_every=cfg["renorm_every"],
                        x0=FieldState(cfg["x0_r"], cfg["x0_phi"]))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if estimator == "lyapunov" and cfg["x0_r"] == 0.0 and cfg["x0_phi"] == 0.0:
        raise UsageError("x0 must be nonzero for the Lyapunov estimator")
    rng = RngSpec(seed=cfg["seed"], stream=cfg["stream"])
    sys_lin = linearize(params)
    if estimator == "lyapunov":
        est = mc_lyapunov(sys_lin, sim, rng, workers=cfg["workers"])
        try:
            reference = lyapunov(params, "hypergeometric").value
        except NonConvergenceError:
            reference = lyapunov(params, "quadrature").value
    else:
        est = mc_second_moment(sys_lin, sim, rng, workers=cfg["workers"])
        reference = ms_report(params).abscissa
    agree = abs(est.value - reference) <= 3.0 * est.std_error
    verdict = "AGREE" if agree else "DISAGREE"
    if cfg["format"] == "json":
        payload = {
            "params": _params_json(params),
            "estimator": estimator,
            "value": est.value,
            "std_error": est.std_error,
            "n_samples": est.n_samples,
            "reference": reference,
            "verdict": verdict,
        }
        _emit(json.dumps(payload, indent=2) + "\n", cfg["out"])
    else:
        _emit(_csv(
            ["estimator", "value", "std_error", "n_samples", "reference",
             "verdict"],
            [[estimator, est.value, est.std_error, est.n_samples, reference,
              verdict]]),
            cfg["out"])
    return EXIT_OK


_SCAN_HEADER = ["eps", "sigma1", "lambda", "lambda_sign", "ms_abscissa",
                "ms_stable", "criticality", "dep_f"]


def cmd_scan(cfg: dict) -> int:
    _params(cfg)  # validate the shared parameters early
    try:
        spec = ScanSpec(
            eps_range=(cfg["eps_min"], cfg["eps_max"], cfg["eps_n"]),
            sigma1_range=(cfg["sigma1_min"], cfg["sigma1_max"], cfg["sigma1_n"]),
            g=cfg["g"], delta=cfg["delta"],
            k_alpha=cfg["k_alpha"], k_beta=cfg["k_beta"],
            method=cfg["method"],
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    records = scan(spec, workers=cfg["workers"])
    if cfg["format"] == "json":
        payload = {"records": []}
        for r in records:
            entry = {
                "eps": r.eps, "sigma1": r.sigma1, "lambda": r.lam,
                "lambda_sign": r.lambda_sign, "ms_abscissa": r.ms_abscissa,
                "ms_stable": r.ms_stable, "criticality": r.criticality,
                "dep_f": r.dep_f,
            }
            if r.error is not None:
                entry["error"] = r.error
            payload["records"].append(entry)
        _emit(json.dumps(payload, indent=2) + "\n", cfg["out"])
    else:
        rows = [[r.eps, r.sigma1, r.lam, r.lambda_sign, r.ms_abscissa,
                 r.ms_stable, r.criticality, r.dep_f] for r in records]
        _emit(_csv(_SCAN_HEADER, rows), cfg["out"])
    if cfg["boundary_out"] is not None:
        rows = []
        for kind in BOUNDARY_KINDS:
            for eps, sigma1 in trace_boundary(spec, kind):
                rows.append([eps, sigma1, kind])
        if cfg["format"] == "json":
            payload = {"boundaries": [
                {"eps": e, "sigma1": s, "boundary_kind": k} for e, s, k in rows
            ]}
            _emit(json.dumps(payload, indent=2) + "\n", cfg["boundary_out"])
        else:
            _emit(_csv(["eps", "sigma1", "boundary_kind"], rows),
                  cfg["boundary_out"])
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser and entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--g", type=float, help="shear parameter (> 0)")
    common.add_argument("--delta", type=float, help="driving parameter (>= 0)")
    common.add_argument("--eps", type=float, help="diffusivity parameter (>= 0)")
    common.add_argument("--sigma1", type=float, help="noise intensity (>= 0)")
    common.add_argument("--k-alpha", dest="k_alpha", type=float,
                        help="alpha quenching constant (> 0)")
    common.add_argument("--k-beta", dest="k_beta", type=float,
                        help="beta quenching constant (> 0)")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"),
                        help="output format (default: csv)")
    common.add_argument("--config", help="flat key=value config file")
    common.add_argument("--workers", type=int, help="worker processes")
    common.add_argument("--seed", type=int, help="random seed")

    parser = argparse.ArgumentParser(
        prog="dynamostab",
        description="Stochastic stability analysis of a reduced "
                    "alpha-omega dynamo model",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("equilibria", parents=[common],
                   help="steady states of the noise-free flow")

    p_lyap = sub.add_parser("lyapunov", parents=[common],
                            help="top Lyapunov exponent of the linearization")
    p_lyap.add_argument("--method", choices=METHODS + ("all",),
                        help="evaluator (default: hypergeometric)")

    sub.add_parser("meansquare", parents=[common],
                   help="exponential mean-square stability report")

    p_sim = sub.add_parser("simulate", parents=[common],
                           help="Monte Carlo growth-rate estimates")
    p_sim.add_argument("--estimator", choices=("lyapunov", "second-moment"),
                       help="quantity to estimate (default: lyapunov)")
    p_sim.add_argument("--dt", type=float, help="step size (default: 1e-3)")
    p_sim.add_argument("--t-final", dest="t_final", type=float,
                       help="time horizon (default: 2000)")
    p_sim.add_argument("--paths", type=int, help="number of paths (default: 32)")
    p_sim.add_argument("--renorm-every", dest="renorm_every", type=int,
                       help="steps between renormalizations (default: 1000)")
    p_sim.add_argument("--x0-r", dest="x0_r", type=float,
                       help="initial radial component (default: 1)")
    p_sim.add_argument("--x0-phi", dest="x0_phi", type=float,
                       help="initial azimuthal component (default: 0)")
    p_sim.add_argument("--stream", type=int, help="substream offset (default: 0)")

    p_scan = sub.add_parser("scan", parents=[common],
                            help="classify a grid in the (eps, sigma1) plane")
    p_scan.add_argument("--method", choices=METHODS,
                        help="Lyapunov evaluator (default: hypergeometric)")
    p_scan.add_argument("--eps-min", dest="eps_min", type=float)
    p_scan.add_argument("--eps-max", dest="eps_max", type=float)
    p_scan.add_argument("--eps-n", dest="eps_n", type=int)
    p_scan.add_argument("--sigma1-min", dest="sigma1_min", type=float)
    p_scan.add_argument("--sigma1-max", dest="sigma1_max", type=float)
    p_scan.add_argument("--sigma1-n", dest="sigma1_n", type=int)
    p_scan.add_argument("--boundary-out", dest="boundary_out",
                        help="also trace sign-change boundaries to this file")
    return parser


_HANDLERS = {
    "equilibria": cmd_equilibria,
    "lyapunov": cmd_lyapunov,
    "meansquare": cmd_meansquare,
    "simulate": cmd_simulate,
    "scan": cmd_scan,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _effective(args)
        return _HANDLERS[args.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
