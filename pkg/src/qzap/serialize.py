"""Structured-text (JSON) and CSV forms of the package's data types.

Documents are emitted by a small deterministic writer: keys keep their
insertion order and every float is printed with 17 significant digits,
which round-trips float64 exactly.  Integer indices stay integers, so
index round-trips are exact decimals.  Parsing uses the stdlib JSON
reader plus explicit validation that names the offending field.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .apgen import ApGenerator, ApClassification, TranslationReport
from .dynamics import IntDelay
from .errors import SchemaError
from .hopfield import Activation, ContractionCertificate, ConvergenceLog, HopfieldSpec
from .lattice import GridFunction, QLattice
from .logmap import LogSignal


def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x}")
    return format(float(x), ".17g")


def emit(obj, indent: int = 0) -> str:
    """Deterministic JSON text; floats carry 17 significant digits."""
    pad = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        inner = ",\n".join(
            f'{pad}  {json.dumps(str(k))}: {emit(v, indent + 1)}'
            for k, v in obj.items()
        )
        return "{\n" + inner + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        if not items:
            return "[]"
        flat = all(
            isinstance(v, (int, float, bool, str, np.integer, np.floating))
            or v is None
            for v in items
        )
        if flat:
            return "[" + ", ".join(emit(v, indent) for v in items) + "]"
        inner = ",\n".join(f"{pad}  {emit(v, indent + 1)}" for v in items)
        return "[\n" + inner + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return emit(obj) + "\n"


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid document: {exc}", field="<document>") from exc


def _get(doc, field, kinds, context=""):
    name = f"{context}.{field}" if context else field
    if not isinstance(doc, dict) or field not in doc:
        raise SchemaError(f"missing field {name}", field=name)
    value = doc[field]
    if kinds is not None and not isinstance(value, kinds):
        raise SchemaError(
            f"field {name} has wrong type {type(value).__name__}", field=name
        )
    return value


def _num(doc, field, context=""):
    v = _get(doc, field, (int, float), context)
    if isinstance(v, bool):
        raise SchemaError(f"field {field} has wrong type bool", field=field)
    return float(v)


def _int(doc, field, context=""):
    v = _get(doc, field, int, context)
    if isinstance(v, bool):
        raise SchemaError(f"field {field} has wrong type bool", field=field)
    return int(v)


# ---------------------------------------------------------------------------
# signals


def grid_function_doc(f: GridFunction) -> dict:
    if not isinstance(f.lattice, QLattice):
        raise ValueError("only QLattice grid functions have a serial form")
    return {
        "q": f.lattice.q,
        "n_min": f.lattice.n_min,
        "n_max": f.lattice.n_max,
        "dim": f.dim,
        "rows": [
            {"n": n, "value": list(f.values[k])}
            for k, n in enumerate(f.lattice.indices())
        ],
        "zero_value": None if f.zero_value is None else list(f.zero_value),
    }


def log_signal_doc(s: LogSignal) -> dict:
    return {
        "n_min": s.n_min,
        "n_max": s.n_max,
        "dim": s.dim,
        "rows": [
            {"n": s.n_min + k, "value": list(s.values[k])} for k in range(s.size)
        ],
        "zero_value": None if s.ninf_value is None else list(s.ninf_value),
    }


def _parse_rows(doc, n_min, n_max, dim):
    rows = _get(doc, "rows", list)
    if len(rows) != n_max - n_min + 1:
        raise SchemaError(
            f"rows must cover [{n_min}, {n_max}] densely, got {len(rows)} rows",
            field="rows",
        )
    values = np.empty((len(rows), dim))
    for k, row in enumerate(rows):
        n = _int(row, "n", context=f"rows[{k}]")
        if n != n_min + k:
            raise SchemaError(
                f"rows[{k}].n = {n}, expected {n_min + k} (rows must be "
                "sorted and dense)",
                field=f"rows[{k}].n",
            )
        val = _get(row, "value", list, context=f"rows[{k}]")
        if len(val) != dim:
            raise SchemaError(
                f"rows[{k}].value must have {dim} entries", field=f"rows[{k}].value"
            )
        values[k] = [float(v) for v in val]
    return values


def parse_grid_function(doc) -> GridFunction:
    q = _num(doc, "q")
    n_min, n_max, dim = _int(doc, "n_min"), _int(doc, "n_max"), _int(doc, "dim")
    values = _parse_rows(doc, n_min, n_max, dim)
    zero = doc.get("zero_value")
    lat = QLattice(q, n_min, n_max, includes_zero=zero is not None)
    return GridFunction(lat, values, zero_value=zero)


def parse_log_signal(doc) -> LogSignal:
    if "q" in doc and doc["q"] is not None:
        raise SchemaError(
            "document carries a base q: it is a quantum-scale grid function, "
            "not a log signal",
            field="q",
        )
    n_min, n_max, dim = _int(doc, "n_min"), _int(doc, "n_max"), _int(doc, "dim")
    values = _parse_rows(doc, n_min, n_max, dim)
    return LogSignal(n_min, n_max, values, ninf_value=doc.get("zero_value"))


# ---------------------------------------------------------------------------
# generators


def generator_doc(g: ApGenerator) -> dict:
    """Canonical form: the shift is folded into phases, the scale into
    amplitudes (exact on freshly built generators where both are trivial)."""
    comps = []
    for offset, terms in g.components:
        comps.append({
            "offset": g.scale * offset,
            "terms": [
                {"amp": g.scale * a, "freq": f, "phase": p + f * g.shift}
                for a, f, p in terms
            ],
        })
    doc = {"dim": g.dim, "components": comps}
    if g.zero_limit is not None:
        doc["zero_limit"] = list(g.zero_limit)
    return doc


def parse_generator(doc) -> ApGenerator:
    dim = _int(doc, "dim")
    comps_doc = _get(doc, "components", list)
    if len(comps_doc) != dim:
        raise SchemaError(
            f"components must have {dim} entries", field="components"
        )
    comps = []
    for k, cd in enumerate(comps_doc):
        offset = _num(cd, "offset", context=f"components[{k}]")
        terms_doc = _get(cd, "terms", list, context=f"components[{k}]")
        terms = tuple(
            (
                _num(td, "amp", context=f"components[{k}].terms[{t}]"),
                _num(td, "freq", context=f"components[{k}].terms[{t}]"),
                _num(td, "phase", context=f"components[{k}].terms[{t}]"),
            )
            for t, td in enumerate(terms_doc)
        )
        comps.append((offset, terms))
    return ApGenerator(components=tuple(comps), zero_limit=doc.get("zero_limit"))


# ---------------------------------------------------------------------------
# hopfield spec


def _activation_doc(a: Activation) -> dict:
    doc = {
        "kind": "custom-table" if a.kind == "custom_table" else a.kind,
        "lip_f": a.lip_f,
        "lip_g": a.lip_g,
        "N": a.bound_g,
        "f0": a.f0,
        "g0": a.g0,
    }
    if a.kind == "custom_table":
        xs, fv, gv = a.table
        doc["xs"] = list(xs)
        doc["f_values"] = list(fv)
        doc["g_values"] = list(gv)
    return doc


def _parse_activation(doc, ctx) -> Activation:
    kind = _get(doc, "kind", str, context=ctx)
    common = dict(
        lip_f=_num(doc, "lip_f", context=ctx),
        lip_g=_num(doc, "lip_g", context=ctx),
        bound_g=_num(doc, "N", context=ctx),
        f0=_num(doc, "f0", context=ctx),
        g0=_num(doc, "g0", context=ctx),
    )
    if kind == "tanh":
        return Activation("tanh", **common)
    if kind == "custom-table":
        xs = _get(doc, "xs", list, context=ctx)
        fv = _get(doc, "f_values", list, context=ctx)
        gv = _get(doc, "g_values", list, context=ctx)
        return Activation(
            "custom_table",
            table=(tuple(map(float, xs)), tuple(map(float, fv)),
                   tuple(map(float, gv))),
            **common,
        )
    raise SchemaError(f"{ctx}.kind must be tanh or custom-table", field=f"{ctx}.kind")


def _delay_doc(d: IntDelay) -> dict:
    if d.kind == "const":
        return {"kind": "const", "value": d.values[0]}
    return {"kind": "cycle", "values": list(d.values)}


def _parse_delay(doc, ctx) -> IntDelay:
    kind = _get(doc, "kind", str, context=ctx)
    if kind == "const":
        return IntDelay.const(_int(doc, "value", context=ctx))
    if kind == "cycle":
        vals = _get(doc, "values", list, context=ctx)
        return IntDelay.cycle(int(v) for v in vals)
    raise SchemaError(f"{ctx}.kind must be const or cycle", field=f"{ctx}.kind")


def _map_nested(node, depth, fn, ctx):
    if depth == 0:
        return fn(node, ctx)
    if not isinstance(node, (list, tuple)):
        raise SchemaError(f"{ctx} must be a list", field=ctx)
    return tuple(
        _map_nested(sub, depth - 1, fn, f"{ctx}[{k}]") for k, sub in enumerate(node)
    )


def hopfield_spec_doc(spec: HopfieldSpec) -> dict:
    def gens(node, depth):
        if depth == 0:
            return generator_doc(node)
        return [gens(sub, depth - 1) for sub in node]

    return {
        "m": spec.m,
        "q": spec.q,
        "c_hat": gens(spec.c_hat, 1),
        "a_hat": gens(spec.a_hat, 2),
        "b_hat": gens(spec.b_hat, 3),
        "I_hat": gens(spec.I_hat, 1),
        "activations": [_activation_doc(a) for a in spec.activations],
        "delays": {
            "gamma": _map_nested(spec.gamma, 2, lambda d, _: _delay_doc(d), "gamma"),
            "omega": _map_nested(spec.omega, 3, lambda d, _: _delay_doc(d), "omega"),
            "v": _map_nested(spec.v_delays, 3, lambda d, _: _delay_doc(d), "v"),
        },
    }


def parse_hopfield_spec(doc) -> HopfieldSpec:
    m = _int(doc, "m")
    q = _num(doc, "q")
    parse_gen = lambda node, ctx: parse_generator(node)
    c_hat = _map_nested(_get(doc, "c_hat", list), 1, parse_gen, "c_hat")
    a_hat = _map_nested(_get(doc, "a_hat", list), 2, parse_gen, "a_hat")
    b_hat = _map_nested(_get(doc, "b_hat", list), 3, parse_gen, "b_hat")
    I_hat = _map_nested(_get(doc, "I_hat", list), 1, parse_gen, "I_hat")
    acts_doc = _get(doc, "activations", list)
    acts = tuple(
        _parse_activation(a, f"activations[{k}]") for k, a in enumerate(acts_doc)
    )
    delays = _get(doc, "delays", dict)
    gamma = _map_nested(_get(delays, "gamma", list, "delays"), 2, _parse_delay,
                        "delays.gamma")
    omega = _map_nested(_get(delays, "omega", list, "delays"), 3, _parse_delay,
                        "delays.omega")
    v = _map_nested(_get(delays, "v", list, "delays"), 3, _parse_delay, "delays.v")
    try:
        return HopfieldSpec(
            m=m, q=q, c_hat=c_hat, a_hat=a_hat, b_hat=b_hat, I_hat=I_hat,
            activations=acts, gamma=gamma, omega=omega, v_delays=v,
        )
    except ValueError as exc:
        raise SchemaError(str(exc), field="<hopfield_spec>") from exc


# ---------------------------------------------------------------------------
# reports


def translation_report_doc(r: TranslationReport) -> dict:
    return {
        "epsilon": r.epsilon,
        "mode": r.mode,
        "tau_range": [r.tau_min, r.tau_max],
        "window": [r.window_min, r.window_max],
        "members": list(r.members),
        "inclusion_length": None if math.isinf(r.inclusion_length)
        else int(r.inclusion_length),
        "sup_diffs": [float(v) for v in r.sup_diffs],
    }


def translation_report_csv(r: TranslationReport) -> str:
    members = set(r.members)
    lines = ["tau,sup_diff,member_flag"]
    for k in range(r.tau_max - r.tau_min + 1):
        tau = r.tau_min + k
        lines.append(
            f"{tau},{format_float(float(r.sup_diffs[k]))},{1 if tau in members else 0}"
        )
    return "\n".join(lines) + "\n"


def classification_doc(c: ApClassification) -> dict:
    return {
        "verdict": c.verdict,
        "note": c.note,
        "relatively_dense": list(c.relatively_dense),
        "reports": [translation_report_doc(r) for r in c.reports],
    }


def certificate_doc(cert: ContractionCertificate) -> dict:
    return {
        "r0": cert.r0,
        "window": list(cert.window),
        "c_minus": list(cert.c_minus),
        "c_plus": list(cert.c_plus),
        "c_window_min": list(cert.c_window_min),
        "a_plus": [list(row) for row in cert.a_plus],
        "b_plus": [[list(col) for col in row] for row in cert.b_plus],
        "I_plus": list(cert.I_plus),
        "eta": list(cert.eta),
        "eta_bar": list(cert.eta_bar),
        "L": cert.L,
        "rho": cert.rho,
        "h4_ball": cert.h4_ball,
        "h4_contraction": cert.h4_contraction,
        "feasible": cert.feasible,
    }


def convergence_log_doc(log: ConvergenceLog) -> dict:
    return {
        "deltas": [float(d) for d in log.deltas],
        "iterations": log.iterations,
        "converged": log.converged,
        "rho": log.rho,
        "tails": list(log.tails),
        "max_delay": log.max_delay,
        "tol": log.tol,
        "tail_tol": log.tail_tol,
        "residual_constant": log.residual_constant,
        "residual_bound": log.residual_bound,
    }


def gronwall_report_doc(report) -> dict:
    return {
        "window": [report.n_min, report.n_max],
        "verdict": report.verdict,
        "hypothesis_violations": list(report.hypothesis_violations),
        "margins": [None if math.isnan(m) else float(m)
                    for m in report.margins],
        "bound": [float(b) for b in report.bound],
    }


def lyapunov_report_doc(report) -> dict:
    return {
        "verdict": report.verdict,
        "checked": report.checked,
        "window": None if report.window is None else list(report.window),
        "violations": [
            {"condition": cond, "where": _jsonable(where), "margin": float(margin)}
            for cond, where, margin in report.violations
        ],
    }


def stability_report_doc(report) -> dict:
    return {
        "verdict": report.verdict,
        "burn_in": report.burn_in,
        "window": None if report.window is None else list(report.window),
        "rates": [None if math.isnan(r) else float(r) for r in report.rates],
        "distances": [[float(d) for d in trace] for trace in report.distances],
    }


def split_report_doc(report) -> dict:
    return {
        "verdict": report.verdict,
        "decay_tol": report.decay_tol,
        "trailing_sups": [float(s) for s in report.trailing_sups],
        "residual_sup": report.residual_sup,
    }


def _jsonable(value):
    if isinstance(value, (tuple, list)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    return value


def trajectory_csv(sig: LogSignal, q: float | None = None) -> str:
    """CSV with columns n, t = q**n (when q is given), x_1..x_m."""
    from .lattice import qpow

    cols = ["n"]
    if q is not None:
        cols.append("t")
    cols.extend(f"x_{i + 1}" for i in range(sig.dim))
    lines = [",".join(cols)]
    for k in range(sig.size):
        n = sig.n_min + k
        row = [str(n)]
        if q is not None:
            row.append(format_float(qpow(q, n)))
        row.extend(format_float(float(v)) for v in sig.values[k])
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
