"""Semantic checks on a parsed program. Errors are collected, not raised."""
from __future__ import annotations

import math

from .nodes import Axis, Measure, Prepare, ProtocolProgram, Report
from .parser import ParseError

MAX_PARTICLES = 12
AXIS_NORM_RANGE = (1e-6, 1e6)


def axis_norm_ok(axis: Axis) -> bool:
    if axis.vector is None:
        return True
    norm = math.sqrt(sum(c * c for c in axis.vector))
    return math.isfinite(norm) and AXIS_NORM_RANGE[0] <= norm <= AXIS_NORM_RANGE[1]


def validate(program: ProtocolProgram) -> list[ParseError]:
    """Return every semantic error in ``program``; an empty list means valid."""
    errors: list[ParseError] = []
    declared: set[int] = set()

    def err(stmt, message, token=""):
        errors.append(ParseError(stmt.pos.line, stmt.pos.column, message, token))

    def check_labels(stmt, labels):
        ok = True
        for label in labels:
            if label not in declared:
                err(stmt, f"undeclared particle {label}", str(label))
                ok = False
        return ok

    def check_axis(stmt, axis):
        if not axis_norm_ok(axis):
            err(stmt, f"axis {axis} cannot be normalized (norm outside [1e-06, 1e+06])", str(axis))

    for stmt in program.statements:
        if isinstance(stmt, Prepare):
            if len(set(stmt.labels)) != len(stmt.labels):
                err(stmt, f"repeated particle in prepare {stmt.labels}")
            for label in dict.fromkeys(stmt.labels):
                if label in declared:
                    err(stmt, f"particle {label} prepared twice", str(label))
            if stmt.source == "ket" and len(stmt.bits) != len(stmt.labels):
                err(stmt, f"ket has {len(stmt.bits)} bits but {len(stmt.labels)} particles")
            declared.update(stmt.labels)
            if len(declared) > MAX_PARTICLES:
                err(stmt, f"more than {MAX_PARTICLES} particles prepared")
        elif isinstance(stmt, Measure):
            check_labels(stmt, stmt.targets)
            if len(set(stmt.targets)) != len(stmt.targets):
                err(stmt, f"measurement targets {stmt.targets} are not distinct")
            if stmt.basis == "bell" and len(stmt.targets) != 2:
                err(stmt, f"arity error: bell measurement needs 2 particles, got {len(stmt.targets)}")
            if stmt.axis is not None:
                check_axis(stmt, stmt.axis)
        elif isinstance(stmt, Report):
            _check_report(stmt, err, check_labels, check_axis)
    return errors


def _check_report(stmt: Report, err, check_labels, check_axis) -> None:
    a = stmt.args
    if stmt.metric == "rdm":
        check_labels(stmt, a[0])
        if len(set(a[0])) != len(a[0]):
            err(stmt, "rdm particles are not distinct")
    elif stmt.metric in ("schmidt", "entropy"):
        check_labels(stmt, a[0] + a[1])
        if len(set(a[0] + a[1])) != len(a[0]) + len(a[1]):
            err(stmt, f"{stmt.metric} sides must be disjoint sets of distinct particles")
    elif stmt.metric == "concurrence":
        check_labels(stmt, a)
        if a[0] == a[1]:
            err(stmt, "concurrence needs two different particles")
    elif stmt.metric == "correlator":
        check_labels(stmt, (a[0], a[2]))
        if a[0] == a[2]:
            err(stmt, "correlator needs two different particles")
        check_axis(stmt, a[1])
        check_axis(stmt, a[3])
