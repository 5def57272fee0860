"""Command-line front end.

Subcommands: ``gen``, ``analyze``, ``flow``, ``verify``, ``fit``.  A flat JSON
config file (``--config``) may hold any flag under its long name with
dashes replaced by underscores; flags given on the command line win.

Exit codes: 0 success, 2 invalid input or config, 3 a check failed,
4 rotation number is not one, 5 the flow became too stiff to step.
"""
import argparse
import json
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import curvegen, io
from .curve import frame_fields, resample_arclength
from .errors import (
    DerivativeCapExceeded,
    InsufficientData,
    IsoflowError,
    NonFinite,
    RotationNumberMismatch,
    SpecInvalid,
    StiffnessFailure,
    UnderResolved,
)
from .flow import FlowConfig, FlowKind, fit_series, simulate
from .functionals import diagnose, theorem2_scale
from .limitshape import convergence_report
from .spectral import analyze as spectral_analyze
from .spectral import derivative_cap, identity_residuals

EXIT_OK, EXIT_INPUT, EXIT_CHECK, EXIT_ROTATION, EXIT_STIFF = 0, 2, 3, 4, 5

# inequality slack: additive on the dimensionless functionals plus relative
TOL_ABS = 1e-10
TOL_REL = 1e-8
IDENTITY_TOL = 1e-8

VARIANTS = ("circle", "ellipse", "polar-cosine", "fourier-perturbed")


@dataclass
class RunConfig:
    n: int = 256
    ell_max: int = 3
    dt_safety: float = 0.2
    t_end: float = 10.0
    record_interval: int = 10
    stop_tol: float = 1e-10
    flow: str = "jiang-pan"
    seed: int = 0
    input: str = None
    out: str = None
    variant: str = None
    radius: float = 1.0
    center: tuple = (0.0, 0.0)
    phase: float = 0.0
    a: float = 2.0
    b: float = 1.0
    base_radius: float = 1.0
    eps: float = 0.5
    mode: int = 3
    max_mode: int = 8
    amplitude_decay: float = 0.3
    corpus: str = "standard"
    count: int = 1000
    workers: int = 0

    def validate(self):
        for name in ("n", "dt_safety", "t_end", "record_interval", "stop_tol"):
            if not getattr(self, name) > 0:
                raise SpecInvalid(f"{name} must be positive")
        if self.n < 16 or self.n % 2:
            raise SpecInvalid("n must be even and >= 16")
        if self.ell_max < 0:
            raise SpecInvalid("ell_max must be non-negative")
        cap = derivative_cap(self.n)
        if self.ell_max > cap:
            raise SpecInvalid(f"ell_max={self.ell_max} exceeds log2(n) - 3 = {cap}")
        try:
            FlowKind.parse(self.flow)
        except ValueError as exc:
            raise SpecInvalid(str(exc)) from None

    def flow_config(self):
        return FlowConfig(c_stab=self.dt_safety, t_end=self.t_end,
                          record_interval=self.record_interval,
                          stop_tol=self.stop_tol, ell_max=self.ell_max)

    def curve_spec(self):
        v = self.variant
        if self.input and not v:
            return curvegen.CurveSpec(curvegen.FromFile(self.input), self.n)
        if v == "circle":
            var = curvegen.Circle(self.radius, tuple(self.center), self.phase)
        elif v == "ellipse":
            var = curvegen.Ellipse(self.a, self.b, tuple(self.center))
        elif v == "polar-cosine":
            var = curvegen.PolarCosine(self.base_radius, self.eps, self.mode)
        elif v == "fourier-perturbed":
            var = curvegen.FourierPerturbedCircle(self.radius, self.seed, self.max_mode,
                                                  self.amplitude_decay)
        elif v is None:
            raise SpecInvalid("give --variant or --input")
        else:
            raise SpecInvalid(f"unknown variant {v!r}; expected one of {', '.join(VARIANTS)}")
        return curvegen.CurveSpec(var, self.n)


def spec_to_dict(spec):
    return {"variant": type(spec.variant).__name__, **asdict(spec.variant), "n": spec.n}


def spec_from_dict(d):
    d = dict(d)
    name = d.pop("variant", None)
    n = d.pop("n", 256)
    table = {cls.__name__: cls for cls in (curvegen.Circle, curvegen.Ellipse,
                                           curvegen.PolarCosine,
                                           curvegen.FourierPerturbedCircle,
                                           curvegen.FromFile)}
    if name not in table:
        raise SpecInvalid(f"unknown variant {name!r}")
    if "center" in d:
        d["center"] = tuple(d["center"])
    try:
        return curvegen.CurveSpec(table[name](**d), n)
    except TypeError as exc:
        raise SpecInvalid(str(exc)) from None


# --------------------------------------------------------------------------
# argument handling
# --------------------------------------------------------------------------

def _common(p):
    p.add_argument("--n", type=int)
    p.add_argument("--ell-max", type=int)
    p.add_argument("--dt-safety", type=float)
    p.add_argument("--t-end", type=float)
    p.add_argument("--record-interval", type=int)
    p.add_argument("--stop-tol", type=float)
    p.add_argument("--flow", choices=[k.value for k in FlowKind])
    p.add_argument("--seed", type=int)
    p.add_argument("--config", metavar="PATH")
    p.add_argument("--out", metavar="PATH")


def _curve_source(p):
    p.add_argument("--variant", choices=VARIANTS)
    p.add_argument("--input", metavar="PATH")
    p.add_argument("--radius", type=float)
    p.add_argument("--center", type=float, nargs=2, metavar=("X", "Y"))
    p.add_argument("--phase", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--base-radius", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--mode", type=int)
    p.add_argument("--max-mode", type=int)
    p.add_argument("--amplitude-decay", type=float)


def build_parser():
    parser = argparse.ArgumentParser(prog="isoflow", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a generated curve as JSON")
    _common(p)
    _curve_source(p)

    p = sub.add_parser("analyze", help="functionals, inequality margins and identities")
    _common(p)
    p.add_argument("input", metavar="CURVE")

    p = sub.add_parser("flow", help="run a flow and write trace, sidecar and report")
    _common(p)
    _curve_source(p)

    p = sub.add_parser("verify", help="check a corpus of curves")
    _common(p)
    p.add_argument("--corpus", choices=("standard", "perturbed"))
    p.add_argument("--count", type=int)
    p.add_argument("--workers", type=int)

    p = sub.add_parser("fit", help="exponential decay fit of a trace column")
    p.add_argument("trace", metavar="TRACE_CSV")
    p.add_argument("--column", default="I_m1",
                   help="trace column, or 'deficit' for L^2 - 4 pi A")
    p.add_argument("--window", type=float, nargs=2, metavar=("T0", "T1"))
    p.add_argument("--out", metavar="PATH")
    return parser


def load_config(args):
    """Defaults, overridden by the config file, overridden by flags."""
    values = {}
    if getattr(args, "config", None):
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, ValueError) as exc:
            raise SpecInvalid(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(loaded, dict):
            raise SpecInvalid("config file must hold a JSON object")
        values.update(loaded)
    for key, val in vars(args).items():
        if key in ("command", "config") or val is None:
            continue
        values[key] = val
    known = {f.name for f in fields(RunConfig)}
    extra = sorted(set(values) - known - {"specs"})
    if extra:
        raise SpecInvalid(f"unknown config keys: {', '.join(extra)}")
    cfg = RunConfig(**{k: v for k, v in values.items() if k in known})
    cfg.validate()
    return cfg, values.get("specs")


def _emit(doc, path=None):
    text = json.dumps(doc, indent=2, sort_keys=True, allow_nan=False)
    if path:
        Path(path).write_text(text + "\n")
    else:
        print(text)


def _fail(code, message):
    print(f"isoflow: {message}", file=sys.stderr)
    return code


# --------------------------------------------------------------------------
# per-curve checks shared by analyze and verify
# --------------------------------------------------------------------------

def _finite_or_none(x):
    return x if x is None or math.isfinite(x) else None


def evaluate_curve(raw, n, ell_max):
    """Diagnostics, identity residuals and the list of failed checks."""
    c = resample_arclength(raw, n)
    frame = frame_fields(c)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", UnderResolved)
        sc = spectral_analyze(c)
    diag = diagnose(c, ell_max, frame)
    ident = identity_residuals(c, frame, sc)
    i0 = diag.i_ell[0]
    failed = []
    if diag.deficit < -TOL_ABS:
        failed.append("isoperimetric deficit is negative")
    if diag.thm1_margin < -(TOL_ABS + TOL_REL * i0):
        failed.append("theorem1: I_m1 > I_0 / (8 pi^2)")
    if diag.thm2_G < -TOL_ABS * max(1.0, theorem2_scale(c, frame)):
        failed.append("theorem2: G is negative")
    if diag.thm2_margin < -(TOL_ABS + TOL_REL * i0):
        failed.append("theorem2: I_0 > sqrt(I_m1 G)")
    if ell_max >= 1 and i0 > diag.i_ell[1] / (4 * np.pi ** 2) * (1 + TOL_REL) + TOL_ABS:
        failed.append("wirtinger: I_0 > I_1 / (4 pi^2)")
    for key, val in ident.items():
        vals = val.items() if isinstance(val, dict) else [("", val)]
        for sub, v in vals:
            if not v < IDENTITY_TOL:
                failed.append(f"identity {key}{'[' + sub + ']' if sub else ''} = {v:.3e}")
    report = {
        "diagnostics": diag.to_dict(),
        "identities": ident,
        "resolved": sc.resolved,
        "reoriented": c.reoriented,
        "failed": failed,
    }
    if caught:
        report["warnings"] = [str(w.message) for w in caught]
    return report


def _verify_one(item):
    index, spec, n, ell_max = item
    try:
        raw = curvegen.generate(spec)
        rep = evaluate_curve(raw, n, ell_max)
    except (IsoflowError, ValueError) as exc:
        return {"index": index, "spec": spec_to_dict(spec), "error": f"{type(exc).__name__}: {exc}"}
    rep["index"] = index
    rep["spec"] = spec_to_dict(spec)
    return rep


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_gen(cfg):
    spec = cfg.curve_spec()
    samples = curvegen.generate(spec)
    text = io.curve_to_json(samples.points)
    if cfg.out:
        Path(cfg.out).write_text(text + "\n")
    else:
        print(text)
    return EXIT_OK


def cmd_analyze(cfg):
    raw = io.read_curve(cfg.input)
    report = evaluate_curve(raw, cfg.n, cfg.ell_max)
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        io.write_json(out / "diagnostics.json", report["diagnostics"])
        io.write_json(out / "identities.json", report["identities"])
    _emit(report)
    if report["failed"]:
        return _fail(EXIT_CHECK, "failed checks: " + "; ".join(report["failed"]))
    return EXIT_OK


def _config_record(cfg):
    doc = asdict(cfg)
    for key in ("corpus", "count", "workers"):
        doc.pop(key)
    doc["center"] = list(doc["center"])
    return doc


def cmd_flow(cfg):
    spec = cfg.curve_spec()
    raw = curvegen.generate(spec)
    out = Path(cfg.out or "isoflow-out")
    out.mkdir(parents=True, exist_ok=True)
    kind = FlowKind.parse(cfg.flow)
    code = EXIT_OK
    try:
        trace = simulate(raw, kind, cfg.flow_config(), n=cfg.n)
    except StiffnessFailure as exc:
        trace, code, message = exc.trace, EXIT_STIFF, str(exc)
    except RotationNumberMismatch as exc:
        trace = getattr(exc, "trace", None)
        code, message = EXIT_ROTATION, str(exc)
        if trace is None:
            return _fail(code, message)
    io.write_trace(out / "trace.csv", trace)
    extra = {}
    if code == EXIT_OK:
        report = convergence_report(trace)
        if trace.stop_reason != "converged":
            report["flags"].append(f"run ended at t_end with I_m1 = {trace.column('I_m1')[-1]!r}")
        io.write_json(out / "report.json", report)
    else:
        extra["error"] = message
    io.write_json(out / "trace.json", io.sidecar(_config_record(cfg), trace, extra))
    if code != EXIT_OK:
        return _fail(code, f"{message} (partial trace in {out})")
    return EXIT_OK


def _corpus(cfg, specs):
    if specs is not None:
        return [spec_from_dict(s) for s in specs]
    if cfg.corpus == "standard":
        return curvegen.standard_corpus(cfg.n)
    return curvegen.perturbed_corpus(cfg.count, cfg.n, start_seed=cfg.seed)


def run_verify(specs, n, ell_max, workers=0):
    """Evaluate every spec; results come back in corpus order."""
    items = [(i, s, n, ell_max) for i, s in enumerate(specs)]
    if workers == 1 or len(items) < 64:
        results = [_verify_one(it) for it in items]
    else:
        workers = workers or min(4, os.cpu_count() or 1)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_verify_one, items, chunksize=32))
    return summarize(results)


def summarize(results):
    mins = {"deficit": math.inf, "thm1_margin": math.inf, "thm2_G": math.inf,
            "thm2_margin": math.inf}
    max_res = {}
    sup3 = {}
    violations = []
    for r in results:
        if "error" in r:
            violations.append({"index": r["index"], "spec": r["spec"], "failed": [r["error"]]})
            continue
        d = r["diagnostics"]
        for key in mins:
            mins[key] = min(mins[key], d[key])
        for key, val in r["identities"].items():
            if isinstance(val, dict):
                val = max(val.values())
            max_res[key] = max(max_res.get(key, 0.0), val)
        for pair, ratio in d["thm3_ratios"].items():
            if ratio is not None:
                sup3[pair] = max(sup3.get(pair, 0.0), ratio)
        if r["failed"]:
            violations.append({"index": r["index"], "spec": r["spec"], "failed": r["failed"]})
    return {
        "count": len(results),
        "min_margins": {k: _finite_or_none(v) for k, v in mins.items()},
        "max_residuals": max_res,
        "thm3_sup": sup3,
        "nonconvex": sum(1 for r in results if "error" not in r
                         and r["diagnostics"]["kappa_min"] < 0),
        "violations": violations,
    }


def cmd_verify(cfg, specs):
    corpus = _corpus(cfg, specs)
    if not corpus:
        return _fail(EXIT_INPUT, "empty corpus")
    summary = run_verify(corpus, cfg.n, cfg.ell_max, cfg.workers)
    _emit(summary, cfg.out)
    if summary["violations"]:
        return _fail(EXIT_CHECK, f"{len(summary['violations'])} curves failed checks")
    return EXIT_OK


def cmd_fit(args):
    columns, rows = io.read_trace_csv(args.trace)
    if rows.size == 0:
        return _fail(EXIT_INPUT, "trace has no rows")
    col = {name: rows[:, i] for i, name in enumerate(columns)}
    if args.column == "deficit":
        series = col["L"] ** 2 - 4 * np.pi * col["A"]
    elif args.column in col:
        series = col[args.column]
    else:
        return _fail(EXIT_INPUT, f"unknown column {args.column!r}")
    fit = fit_series(col["t"], series, tuple(args.window) if args.window else None)
    doc = {"column": args.column, "lambda": fit.rate, "c0": fit.c0,
           "window": list(fit.window), "rms_residual": fit.rms_residual,
           "samples": fit.samples}
    _emit(doc, args.out)
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "fit":
            return cmd_fit(args)
        cfg, specs = load_config(args)
        if args.command == "gen":
            return cmd_gen(cfg)
        if args.command == "analyze":
            return cmd_analyze(cfg)
        if args.command == "flow":
            return cmd_flow(cfg)
        return cmd_verify(cfg, specs)
    except RotationNumberMismatch as exc:
        return _fail(EXIT_ROTATION, str(exc))
    except StiffnessFailure as exc:
        return _fail(EXIT_STIFF, str(exc))
    except (SpecInvalid, io.MalformedInput, NonFinite, DerivativeCapExceeded,
            InsufficientData, ValueError) as exc:
        return _fail(EXIT_INPUT, str(exc))
    except IsoflowError as exc:
        return _fail(EXIT_CHECK, str(exc))


if __name__ == "__main__":
    sys.exit(main())
