"""Report serialization: JSON, CSV and plain-text tables.

JSON keys come out in a fixed order and floats carry 17 significant
digits, so identical inputs give byte-identical documents. CSV is the same
content flattened to ``path,value`` lines (``rows.0.probability``, ...).
Complex numbers are ``[re, im]`` pairs and matrices are row-major lists.
"""
from __future__ import annotations

import csv
import io
import json
import math
from typing import Any

import numpy as np

from .analysis import DensityMatrix
from .experiments import BellTerm, ExperimentReport, MonteCarloReport, NoSignalingReport, SweepRow


def _c(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _matrix(m) -> list:
    if isinstance(m, DensityMatrix):
        m = m.matrix
    return [[_c(z) for z in row] for row in np.asarray(m)]


def _value(v):
    if isinstance(v, DensityMatrix):
        return _matrix(v)
    if isinstance(v, (tuple, list)):
        return [float(x) for x in v]
    if v is None:
        return None
    return float(v)


def experiment_dict(report: ExperimentReport) -> dict:
    rows = []
    for r in report.rows:
        row = {
            "outcome": r.outcome,
            "probability": r.probability,
            "heralded_state": r.heralded_label,
            "schmidt": None if r.schmidt is None else list(r.schmidt),
            "entropy_bits": r.entropy_bits,
            "concurrence": r.concurrence,
            "correlators": None
            if r.correlators is None
            else {k: r.correlators[k] for k in ("zz", "xx", "yy")},
        }
        if r.reports:
            row["reports"] = {rv.metric: _value(rv.value) for rv in r.reports}
        rows.append(row)
    s = report.summary
    summary = None
    if s is not None:
        summary = {
            "rho14_avg": _matrix(s.rho_avg),
            "frobenius_to_premeasurement": s.frobenius_to_premeasurement,
            "mixed_concurrence": s.mixed_concurrence,
        }
    return {"experiment": report.experiment, "rows": rows, "summary": summary}


def decomposition_dict(terms: list[BellTerm]) -> dict:
    return {
        "terms": [
            {"bell_23": t.kind_23.label, "bell_14": t.kind_14.label, "coefficient": _c(t.coefficient)}
            for t in terms
        ]
    }


def no_signaling_dict(report: NoSignalingReport, sweep: list[SweepRow] | None = None) -> dict:
    out = {
        "rho14_before": _matrix(report.before),
        "rho14_exp1": _matrix(report.after_1),
        "rho14_exp2": _matrix(report.after_2),
        "distances": dict(report.distances),
        "to_maximally_mixed": dict(report.to_maximally_mixed),
        "mixed_concurrence": dict(report.mixed_concurrence),
    }
    if sweep is not None:
        out["sweep"] = [{"index": r.index, "distance": r.distance_to_before} for r in sweep]
    return out


def monte_carlo_dict(report: MonteCarloReport) -> dict:
    return {
        "source": report.source,
        "seed": report.seed,
        "trials": report.trials,
        "rows": [
            {
                "outcome": r.outcome,
                "count": r.count,
                "frequency": r.frequency,
                "probability": r.probability,
                "sigma_multiple": r.sigma_multiple,
            }
            for r in report.rows
        ],
        "max_abs_deviation": report.max_abs_deviation,
        "max_sigma_multiple": report.max_sigma_multiple,
    }


def to_dict(obj, sweep=None) -> dict:
    if isinstance(obj, ExperimentReport):
        return experiment_dict(obj)
    if isinstance(obj, MonteCarloReport):
        return monte_carlo_dict(obj)
    if isinstance(obj, NoSignalingReport):
        return no_signaling_dict(obj, sweep)
    if isinstance(obj, list) and all(isinstance(t, BellTerm) for t in obj):
        return decomposition_dict(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


# -- JSON -------------------------------------------------------------------


def format_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    return text


def _scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(float(v))
    return json.dumps(str(v), ensure_ascii=False)


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_scalar(v) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    return _scalar(obj)


def to_json(obj, sweep=None) -> str:
    return dumps(to_dict(obj, sweep)) + "\n"


# -- CSV --------------------------------------------------------------------


def flatten(obj, prefix: str = "") -> list[tuple[str, Any]]:
    """Depth-first ``(path, scalar)`` pairs; list indices become path parts."""
    if isinstance(obj, dict):
        items = obj.items()
    elif isinstance(obj, (list, tuple)):
        items = enumerate(obj)
    else:
        return [(prefix, obj)]
    out = []
    for k, v in items:
        out.extend(flatten(v, f"{prefix}.{k}" if prefix else str(k)))
    return out


def to_csv(obj, sweep=None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["path", "value"])
    for path, value in flatten(to_dict(obj, sweep)):
        text = _scalar(value)
        if isinstance(value, str):
            text = value
        writer.writerow([path, text])
    return buf.getvalue()


def _parse_cell(text: str):
    if text == "null":
        return None
    try:
        return float(text)
    except ValueError:
        return text


def read_csv(text: str) -> list[tuple[str, Any]]:
    rows = list(csv.reader(io.StringIO(text)))
    return [(path, _parse_cell(value)) for path, value in rows[1:]]


def read_json(text: str) -> list[tuple[str, Any]]:
    return [(p, float(v) if isinstance(v, (int, float)) and not isinstance(v, bool) else v)
            for p, v in flatten(json.loads(text))]


# -- tables -----------------------------------------------------------------


def _cell(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return "(" + ", ".join(_cell(x) for x in v) + ")"
    return str(v)


def _grid(header: list[str], rows: list[list]) -> str:
    cells = [header] + [[_cell(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _matrix_text(m) -> str:
    m = np.asarray(m.matrix if isinstance(m, DensityMatrix) else m)
    lines = []
    for row in m:
        parts = []
        for z in row:
            z = complex(z)
            parts.append(repr(z.real) if z.imag == 0 else f"{z.real!r}{z.imag:+}j")
        lines.append("  [" + ", ".join(parts) + "]")
    return "\n".join(lines)


def experiment_table(report: ExperimentReport) -> str:
    header = ["outcome", "probability", "heralded", "schmidt", "entropy_bits", "concurrence", "zz", "xx", "yy"]
    metrics: list[str] = []
    for r in report.rows:
        for rv in r.reports:
            if rv.metric not in metrics:
                metrics.append(rv.metric)
    rows = []
    for r in report.rows:
        corr = r.correlators or {}
        values = {rv.metric: rv.value for rv in r.reports}
        extra = []
        for m in metrics:
            v = values.get(m)
            extra.append(f"{len(v.labels)}-qubit matrix" if isinstance(v, DensityMatrix) else _value(v))
        rows.append([
            r.outcome or "(none)", r.probability, r.heralded_label, r.schmidt, r.entropy_bits,
            r.concurrence, corr.get("zz"), corr.get("xx"), corr.get("yy"), *extra,
        ])
    title = f"experiment {report.experiment}"
    if report.remote:
        title += ": heralded state of particles " + ",".join(map(str, report.remote))
    out = [title, _grid(header + metrics, rows)]
    if report.summary is not None:
        s = report.summary
        out.append("outcome-averaged reduced state:")
        out.append(_matrix_text(s.rho_avg))
        out.append(f"frobenius distance to pre-measurement state: {s.frobenius_to_premeasurement!r}")
        out.append(f"mixed concurrence: {_cell(s.mixed_concurrence)}")
    return "\n".join(out) + "\n"


def to_table(obj, sweep=None) -> str:
    if isinstance(obj, ExperimentReport):
        return experiment_table(obj)
    if isinstance(obj, MonteCarloReport):
        rows = [[r.outcome or "(none)", r.count, r.frequency, r.probability, r.sigma_multiple] for r in obj.rows]
        head = f"monte carlo: source {obj.source}, seed {obj.seed}, trials {obj.trials}"
        tail = f"max |frequency - probability| = {obj.max_abs_deviation!r} ({_cell(obj.max_sigma_multiple)} sigma)"
        return "\n".join([head, _grid(["outcome", "count", "frequency", "probability", "sigma"], rows), tail]) + "\n"
    if isinstance(obj, NoSignalingReport):
        out = []
        for name, m in (("before", obj.before), ("after experiment 1", obj.after_1), ("after experiment 2", obj.after_2)):
            out.append(f"rho_14 {name}:")
            out.append(_matrix_text(m))
        out.append(_grid(["pair", "frobenius distance"], [[k, v] for k, v in obj.distances.items()]))
        out.append(_grid(["state", "distance to I/4", "mixed concurrence"],
                         [[k, v, obj.mixed_concurrence[k]] for k, v in obj.to_maximally_mixed.items()]))
        if sweep is not None:
            out.append(_grid(["random basis", "distance to before"], [[r.index, r.distance_to_before] for r in sweep]))
        return "\n".join(out) + "\n"
    rows = [[t.kind_23.label, t.kind_14.label, _c(t.coefficient)] for t in obj]
    return "\n".join(["initial state in the Bell basis of (2,3) x (1,4):",
                      _grid(["bell_23", "bell_14", "coefficient [re, im]"], rows)]) + "\n"


WRITERS = {"json": to_json, "csv": to_csv, "table": to_table}
