"""Config-driven command line front end.

Subcommands: ``analyze``, ``transform``, ``solve``, ``hopfield`` (modes
``check``/``solve``).  Every command reads a JSON config file, applies
flag overrides (flags win), calls the corresponding library operation
and writes deterministic reports into the output directory.  There is no
CLI-only computation: outputs are byte-for-byte the serialized library
results.

Exit codes: 0 ok, 2 parse/config error, 3 overflow guard, 4 divergence,
5 infeasible certificate.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import apgen, dynamics, hopfield, logmap, serialize
from .errors import (
    DivergenceError,
    InfeasibleCertificateError,
    OverflowGuardError,
    SchemaError,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_OVERFLOW = 3
EXIT_DIVERGENCE = 4
EXIT_INFEASIBLE = 5


def _read_doc(path):
    if not os.path.exists(path):
        raise SchemaError(f"input file not found: {path}", field=path)
    with open(path, "r", encoding="utf-8") as fh:
        return serialize.loads(fh.read())


def _write(outdir, name, text):
    os.makedirs(outdir, exist_ok=True)
    path = os.path.join(outdir, name)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def _parse_window(text):
    try:
        lo, hi = text.split("..")
        return (int(lo), int(hi))
    except ValueError as exc:
        raise SchemaError(
            f"window must look like A..B, got {text!r}", field="window"
        ) from exc


def _resolve(config_path, name):
    if os.path.isabs(name):
        return name
    return os.path.join(os.path.dirname(os.path.abspath(config_path)), name)


class _Run:
    """Config dict plus flag overrides, with field-naming errors."""

    def __init__(self, args):
        self.args = args
        self.config_path = args.config
        if args.config:
            doc = _read_doc(args.config)
            if not isinstance(doc, dict):
                raise SchemaError("config must be an object", field="<config>")
            self.doc = doc
        else:
            self.doc = {}

    def get(self, field, default=None):
        return self.doc.get(field, default)

    def require(self, field):
        if field not in self.doc:
            raise SchemaError(f"missing config field {field}", field=field)
        return self.doc[field]

    def path(self, field):
        return _resolve(self.config_path, str(self.require(field)))

    def q(self, default=None):
        if self.args.q is not None:
            return float(self.args.q)
        v = self.get("q", default)
        return None if v is None else float(v)

    def window(self, default):
        if self.args.window is not None:
            return _parse_window(self.args.window)
        v = self.get("window")
        if v is None:
            return default
        if not (isinstance(v, list) and len(v) == 2):
            raise SchemaError("window must be [lo, hi]", field="window")
        return (int(v[0]), int(v[1]))

    def tol(self, default):
        if self.args.tol is not None:
            return float(self.args.tol)
        return float(self.get("tol", default))

    def seed(self):
        if self.args.seed is not None:
            return int(self.args.seed)
        return int(self.get("seed", 0))


def _parse_signal_or_generator(doc):
    if isinstance(doc, dict) and "components" in doc:
        return serialize.parse_generator(doc)
    return serialize.parse_log_signal(doc)


def cmd_analyze(run: _Run) -> int:
    doc = _read_doc(run.path("input"))
    signal = _parse_signal_or_generator(doc)
    epsilons = [float(e) for e in run.get("epsilons", list(apgen.DEFAULT_EPSILONS))]
    mode = str(run.get("mode", "unweighted"))
    tau = run.get("tau_range")
    tau_range = (int(tau[0]), int(tau[1])) if tau else apgen.DEFAULT_TAU_RANGE
    window = run.window(apgen.DEFAULT_WINDOW)
    try:
        result = apgen.ap_classify(
            signal, epsilons, tau_range=tau_range, window=window,
            q=run.q(), mode=mode,
        )
    except ValueError as exc:
        raise SchemaError(str(exc), field="epsilons") from exc
    outdir = run.args.out
    _write(outdir, "analysis.json", serialize.dumps(serialize.classification_doc(result)))
    for k, rep in enumerate(result.reports):
        _write(outdir, f"translation_{k}.csv", serialize.translation_report_csv(rep))
    print(f"analyze: verdict {result.verdict}")
    return EXIT_OK


def cmd_transform(run: _Run) -> int:
    direction = str(run.require("direction"))
    doc = _read_doc(run.path("input"))
    outdir = run.args.out
    if direction == "lift":
        grid = serialize.parse_grid_function(doc)
        sig = logmap.lift(grid)
        name = str(run.get("output", "lifted.json"))
        _write(outdir, name, serialize.dumps(serialize.log_signal_doc(sig)))
    elif direction == "lower":
        sig = serialize.parse_log_signal(doc)
        q = run.q()
        if q is None:
            raise SchemaError("lower needs the base q", field="q")
        grid = logmap.lower(sig, q)
        name = str(run.get("output", "lowered.json"))
        _write(outdir, name, serialize.dumps(serialize.grid_function_doc(grid)))
    else:
        raise SchemaError(
            f"direction must be lift or lower, got {direction!r}", field="direction"
        )
    print(f"transform: wrote {name}")
    return EXIT_OK


def _build_system(run: _Run):
    sys_doc = run.require("system")
    kind = _get_str(sys_doc, "kind")
    m = len(serialize._get(sys_doc, "A", list, "system"))
    A = np.array(sys_doc["A"], dtype=float)
    if A.shape != (m, m):
        raise SchemaError("system.A must be square", field="system.A")
    B = None
    delays = ()
    if "B" in sys_doc and sys_doc["B"] is not None:
        B = np.array(sys_doc["B"], dtype=float)
        if B.shape != (m, m):
            raise SchemaError("system.B must be square", field="system.B")
        delay_doc = serialize._get(sys_doc, "delay", dict, "system")
        delays = (serialize._parse_delay(delay_doc, "system.delay"),)
    gens = None
    if "input" in sys_doc and sys_doc["input"] is not None:
        gens = [serialize.parse_generator(g) for g in sys_doc["input"]]
        if len(gens) != m:
            raise SchemaError("system.input must have m generators",
                              field="system.input")

    def u(n):
        if gens is None:
            return np.zeros(m)
        return np.array([g.at(n)[0] for g in gens])

    if kind == "linear":
        def rhs(n, x, delayed):
            acc = A @ x + u(n)
            if B is not None:
                acc = acc + B @ delayed[0]
            return acc
    elif kind == "quantum_linear":
        q = run.q()
        if q is None:
            raise SchemaError("quantum_linear needs the base q", field="q")

        import math

        def f(t, x, delayed):
            n = int(round(math.log(t, q)))
            acc = A @ x + u(n)
            if B is not None:
                acc = acc + B @ delayed[0]
            return acc

        rhs = logmap.transform_rhs(f, q)
    else:
        raise SchemaError(
            f"system.kind must be linear or quantum_linear, got {kind!r}",
            field="system.kind",
        )
    return dynamics.DynamicSystem(dim=m, rhs=rhs, delays=delays)


def _get_str(doc, field):
    return str(serialize._get(doc, field, str, "system"))


def cmd_solve(run: _Run) -> int:
    system = _build_system(run)
    hist_field = run.require("history")
    if isinstance(hist_field, str):
        hist_doc = _read_doc(_resolve(run.config_path, hist_field))
    else:
        hist_doc = hist_field
    history = serialize.parse_log_signal(hist_doc)
    n_end = int(run.require("n_end"))
    traj = dynamics.solve_forward(system, history, n_end)
    resid = dynamics.trajectory_residual(system, traj)
    outdir = run.args.out
    name = str(run.get("output", "trajectory.csv"))
    _write(outdir, name, serialize.trajectory_csv(traj, q=run.q()))
    report = {
        "n_start": traj.n_min,
        "n_end": traj.n_max,
        "dim": traj.dim,
        "residual_self_check": resid,
    }
    _write(outdir, "solve_report.json", serialize.dumps(report))
    print(f"solve: wrote {name}, residual self-check {resid:.3e}")
    return EXIT_OK


def cmd_hopfield(run: _Run, mode: str) -> int:
    spec = serialize.parse_hopfield_spec(_read_doc(run.path("spec")))
    problems = spec.validate_activations(seed=run.seed())
    if problems:
        raise SchemaError(
            f"activation spot checks failed: {problems}", field="activations"
        )
    r0 = float(run.get("r0", 1.0))
    window = run.window((-100, 100))
    outdir = run.args.out

    interval = hopfield.feasible_r0_interval(spec, window)
    cert = hopfield.certificate(spec, r0, window, seed=run.seed())
    cert_doc = serialize.certificate_doc(cert)
    cert_doc["feasible_r0_interval"] = (
        None if interval is None else [interval[0], interval[1]]
    )
    _write(outdir, "certificate.json", serialize.dumps(cert_doc))

    if mode == "check":
        print(f"hopfield check: feasible={cert.feasible} rho={cert.rho:.6g}")
        return EXIT_OK

    tol = run.tol(1e-9)
    tail_tol = float(run.get("tail_tol", hopfield.DEFAULT_TAIL_TOL))
    max_iter = int(run.get("max_iter", 200))
    try:
        sol, log = hopfield.picard_solve(
            spec, r0, tol, max_iter, window, tail_tol=tail_tol
        )
    except InfeasibleCertificateError:
        # certificate.json already on disk: attached per contract
        raise
    resid = hopfield.residual(sol, spec, window)
    epsilons = [float(e) for e in run.get("epsilons", list(apgen.DEFAULT_EPSILONS))]
    tau = run.get("tau_range")
    tau_range = (int(tau[0]), int(tau[1])) if tau else apgen.DEFAULT_TAU_RANGE
    # shifted windows must stay inside the computed solution samples
    ap_window = (sol.n_min - min(tau_range[0], 0), sol.n_max - max(tau_range[1], 0))
    if ap_window[0] > ap_window[1]:
        raise SchemaError(
            "window too small for the requested tau_range", field="tau_range"
        )
    analysis = apgen.ap_classify(sol, epsilons, tau_range=tau_range,
                                 window=ap_window, q=spec.q)

    _write(outdir, "solution_log.csv", serialize.trajectory_csv(sol))
    _write(outdir, "solution_quantum.csv",
           serialize.trajectory_csv(sol, q=spec.q))
    log_doc = serialize.convergence_log_doc(log)
    log_doc["residual"] = resid
    _write(outdir, "convergence.json", serialize.dumps(log_doc))
    _write(outdir, "analysis.json",
           serialize.dumps(serialize.classification_doc(analysis)))
    print(
        f"hopfield solve: iterations {log.iterations}, residual {resid:.3e}, "
        f"ap verdict {analysis.verdict}"
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qzap",
        description="quantum-lattice signal analysis and solvers",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("analyze", "transform", "solve"):
        p = sub.add_parser(name)
        _common_flags(p)
    p = sub.add_parser("hopfield")
    p.add_argument("mode", choices=("check", "solve"))
    _common_flags(p)
    return parser


def _common_flags(p):
    p.add_argument("--config", required=True, help="JSON config file")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--q", type=float, default=None, help="base q override")
    p.add_argument("--window", default=None, help="window override, A..B")
    p.add_argument("--seed", type=int, default=None, help="seed override")
    p.add_argument("--tol", type=float, default=None, help="tolerance override")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        run = _Run(args)
        if args.command == "analyze":
            return cmd_analyze(run)
        if args.command == "transform":
            return cmd_transform(run)
        if args.command == "solve":
            return cmd_solve(run)
        if args.command == "hopfield":
            return cmd_hopfield(run, args.mode)
        parser.error(f"unknown command {args.command}")
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OverflowGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except InfeasibleCertificateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
