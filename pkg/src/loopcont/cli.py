"""Batch driver: ``loopcont <command> [--config FILE] [--seed N] [--out DIR]``.

Configuration is a JSON object; unknown keys anywhere are rejected.

    {
      "command": "demo-monodromy",        # optional, must match the subcommand
      "seed": 0,                          # unsigned integer
      "tolerances": {"manifold": 1e-10, "real_locus": 1e-9, "cut": 1e-8,
                     "spec": 1e-9, "overlap": 1e-6, "zero": 1e-8,
                     "lift": 1e-10, "cont": 0.5},
      "grids": {"n_t": 256, "n_loop": 32, "m_deg": 32, "n_grid": 128,
                "n_phi": 8, "n_r": 32},
      "output": {"dir": "loopcont-out", "summary": "summary.json",
                 "trace": "trace.csv", "log": "run.log"},
      "options": {...}                    # per command, see OPTIONS
    }

Exit status: 0 success, 2 a checked property failed, 3 numerical failure,
4 configuration error.  Summaries are sorted-key JSON without timestamps;
timings go to the log file.
"""
import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import ConfigError, LoopContError, NumericalFailure

SCHEMA_VERSION = 1
COMMANDS = ("demo-monodromy", "continue", "harmonic", "push-disc", "verify")

GRID_BOUNDS = {
    "n_t": (2, 4096, 256),
    "n_loop": (1, 256, 32),
    "m_deg": (0, 256, 32),
    "n_grid": (8, 65536, 128),
    "n_phi": (4, 256, 8),
    "n_r": (8, 256, 32),
}

OPTIONS = {
    "demo-monodromy": {"profile": "linear", "push_scale": 0.5, "tilt": 0.0, "warp": 0.0},
    "continue": {"curve": None, "push_scale": 0.1},
    "harmonic": {"operation": "certificate", "arcs": [[0.0, 3.141592653589793]], "delta": 0.3,
                 "eps": 0.5, "max_degree": 256},
    "push-disc": {"problem": None},
    "verify": {},
}

OUTPUT_DEFAULTS = {"dir": "loopcont-out", "summary": "summary.json", "trace": "trace.csv",
                   "log": "run.log"}


class RunConfig:
    """Validated run configuration."""

    def __init__(self, command, seed=0, tolerances=None, grids=None, output=None, options=None):
        if command not in COMMANDS:
            raise ConfigError("unknown command", command=command)
        self.command = command
        if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
            raise ConfigError("seed must be an unsigned integer", seed=seed)
        self.seed = seed
        tolerances = dict(tolerances or {})
        _reject_unknown("tolerances", tolerances, Tolerances.field_names())
        for k, v in tolerances.items():
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not v > 0:
                raise ConfigError("tolerances must be positive numbers", key=k, value=v)
        self.tol = DEFAULT.updated(**{k: float(v) for k, v in tolerances.items()})
        grids = dict(grids or {})
        _reject_unknown("grids", grids, GRID_BOUNDS)
        self.grids = {}
        for k, (lo, hi, default) in GRID_BOUNDS.items():
            v = grids.get(k, default)
            if isinstance(v, bool) or not isinstance(v, int) or not lo <= v <= hi:
                raise ConfigError("grid size out of bounds", key=k, value=v, bounds=[lo, hi])
            self.grids[k] = v
        output = dict(output or {})
        _reject_unknown("output", output, OUTPUT_DEFAULTS)
        self.output = {**OUTPUT_DEFAULTS, **output}
        options = dict(options or {})
        _reject_unknown("options", options, OPTIONS[command])
        self.options = {**OPTIONS[command], **options}

    @classmethod
    def from_dict(cls, data, command=None):
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a JSON object")
        _reject_unknown("configuration", data, ("command", "seed", "tolerances", "grids",
                                                 "output", "options"))
        cfg_cmd = data.get("command")
        if command and cfg_cmd and cfg_cmd != command:
            raise ConfigError("configuration is for a different command", config=cfg_cmd,
                              requested=command)
        return cls(command or cfg_cmd, data.get("seed", 0), data.get("tolerances"),
                   data.get("grids"), data.get("output"), data.get("options"))

    def to_dict(self):
        return {"command": self.command, "seed": self.seed, "tolerances": self.tol.as_dict(),
                "grids": dict(self.grids), "output": dict(self.output),
                "options": dict(self.options)}


def _reject_unknown(where, given, allowed):
    unknown = sorted(set(given) - set(allowed))
    if unknown:
        raise ConfigError("unknown %s keys: %s" % (where, ", ".join(unknown)), keys=unknown)


def jsonable(x):
    """Recursively convert numpy scalars/arrays and complex numbers for json."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": float(x.real), "im": float(x.imag)}
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        x = float(x)
    if isinstance(x, float) and not np.isfinite(x):
        return repr(x)
    return x


def dumps(summary):
    return json.dumps(jsonable(summary), sort_keys=True, indent=2) + "\n"


# -- commands ------------------------------------------------------------------

def _cmd_demo(cfg, out):
    from .monodromy import demo_curve, monodromy_increment, period_K

    g, o = cfg.grids, cfg.options
    curve = demo_curve(g["n_t"], o["profile"], g["n_loop"], o["tilt"], o["warp"])
    res = monodromy_increment(curve, seed=cfg.seed, push_scale=o["push_scale"], n_phi=g["n_phi"],
                              m_deg=g["m_deg"], f_kwargs={"n_r": g["n_r"]}, tol=cfg.tol)
    chain = res.chain
    out["trace"] = chain.to_csv({"kappa_margin": res.lift.boundary_kappa})
    period = period_K()
    inc = res.increment
    err = min(abs(inc - period), abs(inc + period))
    result = {"increment": inc, "sign": res.sign, "period_reference": period,
              "increment_error": err, "lift": res.lift.report(),
              "chain": {k: v for k, v in chain.report.items() if k != "lift"}}
    checks = {"increment_within_1e-3": err <= 1e-3,
              "overlap_within_tolerance": chain.max_residual <= cfg.tol.overlap}
    return result, checks


def _cmd_continue(cfg, out):
    from .continuation import build_regular_lift, slide
    from .loops import LoopCurve
    from .monodromy import f_eval

    path = cfg.options["curve"]
    if not path:
        raise ConfigError("continue needs options.curve (a loop curve JSON file)")
    try:
        curve = LoopCurve.from_record(json.loads(Path(path).read_text()), cfg.tol)
    except (OSError, ValueError, KeyError, TypeError, AttributeError) as exc:
        raise ConfigError("cannot read loop curve", path=str(path), reason=str(exc))
    g = cfg.grids
    lift = build_regular_lift(curve, push_scale=cfg.options["push_scale"], seed=cfg.seed,
                              m_deg=g["m_deg"], tol=cfg.tol)
    chain = slide(lambda x: f_eval(x, n_r=g["n_r"], tol=cfg.tol).value, curve, lift,
                  n_phi=g["n_phi"], tol=cfg.tol)
    out["trace"] = chain.to_csv({"kappa_margin": lift.boundary_kappa})
    result = {"increment": chain.increment(), "closed": curve.is_closed(cfg.tol),
              "records": chain.to_records(), "lift": lift.report(),
              "chain": {k: v for k, v in chain.report.items() if k != "lift"}}
    checks = {"overlap_within_tolerance": chain.max_residual <= cfg.tol.overlap}
    return result, checks


def _cmd_harmonic(cfg, out):
    from .harmonic import (BoundaryArcSet, arc_measure, certificate_build, certificate_verify,
                           lemma53_kernel)

    o = cfg.options
    op = o["operation"]
    if op not in ("arc_measure", "certificate", "lemma53"):
        raise ConfigError("unknown harmonic operation", operation=op)
    if op == "lemma53":
        delta, theta, report = lemma53_kernel(float(o["eps"]), max_degree=int(o["max_degree"]))
        return {"delta": delta, "report": report,
                "coefficients": theta.monomial_coeffs()}, {"lemma53_passed": report["passed"]}
    try:
        arcs = BoundaryArcSet([tuple(map(float, a)) for a in o["arcs"]])
    except (TypeError, ValueError) as exc:
        raise ConfigError("arcs must be a list of [start, end] angle pairs", reason=str(exc))
    if op == "arc_measure":
        return {"measure": arc_measure(arcs), "arcs": arcs.to_record()}, {}
    cert = certificate_build(arcs, float(o["delta"]))
    rep = certificate_verify(cert, arcs)
    return {"certificate": cert.to_record(), "verify": rep}, {"certificate_verified": rep["passed"]}


def _cmd_push(cfg, out):
    from .deformation import PushProblem, push_disc

    path = cfg.options["problem"]
    if not path:
        raise ConfigError("push-disc needs options.problem (a push problem JSON file)")
    try:
        problem = PushProblem.from_record(json.loads(Path(path).read_text()))
    except (OSError, ValueError, KeyError, TypeError, AttributeError) as exc:
        raise ConfigError("cannot read push problem", path=str(path), reason=str(exc))
    res = push_disc(problem, cfg.tol)
    rep = res.report
    checks = {k: rep[k] for k in ("check_i_ok", "check_ii_ok", "check_iii_ok", "check_iv_ok",
                                  "support_ok")}
    return {"report": rep}, checks


def _cmd_verify(cfg, out):
    from .suite import run_suite

    results = run_suite(cfg.seed, cfg.tol)
    checks = {name: r["passed"] for name, r in results.items()}
    return {"properties": results}, checks


HANDLERS = {"demo-monodromy": _cmd_demo, "continue": _cmd_continue, "harmonic": _cmd_harmonic,
            "push-disc": _cmd_push, "verify": _cmd_verify}


def run(cfg):
    """Execute a validated configuration; returns (exit status, summary dict)."""
    outdir = Path(cfg.output["dir"])
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError("output directory not writable", dir=str(outdir), reason=str(exc))
    summary = {"schema_version": SCHEMA_VERSION, "command": cfg.command, "seed": cfg.seed,
               "config": cfg.to_dict()}
    artifacts = {}
    start = time.perf_counter()
    try:
        result, checks = HANDLERS[cfg.command](cfg, artifacts)
        summary["result"] = result
        summary["checks"] = checks
        ok = all(bool(v) for v in checks.values())
        summary["status"] = "ok" if ok else "verification_failure"
        status = 0 if ok else 2
    except ConfigError:
        raise
    except NumericalFailure as exc:
        summary["status"] = "numerical_failure"
        summary["error"] = {"type": type(exc).__name__, "message": str(exc), "details": exc.details}
        status = 3
    elapsed = time.perf_counter() - start
    (outdir / cfg.output["summary"]).write_text(dumps(summary))
    if "trace" in artifacts:
        (outdir / cfg.output["trace"]).write_text(artifacts["trace"])
    with open(outdir / cfg.output["log"], "a") as log:
        log.write("%s %s seed=%d status=%d elapsed=%.3fs\n"
                  % (time.strftime("%Y-%m-%dT%H:%M:%S"), cfg.command, cfg.seed, status, elapsed))
    return status, summary


def main(argv=None):
    parser = argparse.ArgumentParser(prog="loopcont", description=__doc__.split("\n")[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON configuration file")
    parser.add_argument("--seed", type=int, help="override the configured seed")
    parser.add_argument("--out", help="override the output directory")
    args = parser.parse_args(argv)
    try:
        data = {}
        if args.config:
            try:
                data = json.loads(Path(args.config).read_text())
            except (OSError, ValueError) as exc:
                raise ConfigError("cannot read configuration", path=args.config, reason=str(exc))
        if isinstance(data, dict):
            data = dict(data)
            if args.seed is not None:
                data["seed"] = args.seed
            if args.out is not None:
                data["output"] = {**data.get("output", {}), "dir": args.out}
        cfg = RunConfig.from_dict(data, args.command)
        status, summary = run(cfg)
    except ConfigError as exc:
        err = {"schema_version": SCHEMA_VERSION, "status": "config_error",
               "error": {"message": str(exc), "details": exc.details}}
        sys.stderr.write(dumps(err))
        return 4
    except LoopContError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 3
    sys.stdout.write(dumps({"status": summary["status"], "checks": summary.get("checks", {}),
                            "error": summary.get("error")}))
    return status


if __name__ == "__main__":
    sys.exit(main())
