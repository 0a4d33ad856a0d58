"""Execute protocol programs against the measurement and analysis modules.

Exhaustive mode keeps every outcome branch as an unnormalized vector and
normalizes once at the end; this keeps a script bit-for-bit identical to
the equivalent canned run. Sampled mode follows a single branch, drawing one
uniform per measurement from the ``(seed, trial)`` stream.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .. import analysis, qmath
from ..experiments import DEFAULT_SEED, ExperimentReport, build_report, tabulate
from ..measurement import (
    PROB_TOL,
    MeasurementBasis,
    SpinDirection,
    _cumulative,
    bell_basis,
    choose_index,
    next_uniform,
    product_basis,
    project_branches,
    rng_stream,
    spin_basis,
)
from ..states import StateVector, basis_ket, bell_state, singlet
from .nodes import Axis, Measure, Prepare, ProtocolProgram, Report
from .parser import ParseError
from .validate import validate


class InterpretError(ValueError):
    def __init__(self, stmt, message: str):
        self.line = stmt.pos.line
        self.column = stmt.pos.column
        super().__init__(f"line {self.line}, column {self.column}: {message}")


@dataclass(frozen=True)
class ReportValue:
    metric: str
    value: Any


def direction(axis: Axis) -> SpinDirection:
    if axis.name is not None:
        return SpinDirection.axis(axis.name)
    return SpinDirection.normalized(*axis.vector)


def prepared_state(stmt: Prepare) -> StateVector:
    if stmt.source == "singlet":
        return singlet(stmt.labels)
    if stmt.source == "bell":
        return bell_state(stmt.bell, stmt.labels)
    return basis_ket(stmt.bits, stmt.labels)


def measurement_basis(stmt: Measure) -> MeasurementBasis:
    if stmt.basis == "bell":
        return bell_basis(stmt.targets)
    d = direction(stmt.axis)
    return product_basis(*(spin_basis(d, t) for t in stmt.targets))


def _check(program: ProtocolProgram) -> None:
    errors = validate(program)
    if errors:
        raise errors[0]


def _normalized(amps: np.ndarray, labels) -> StateVector:
    return StateVector.from_unnormalized(amps, labels)


def evaluate_report(stmt: Report, state: StateVector, probability: float) -> ReportValue:
    a = stmt.args
    spec = stmt.spec()
    if stmt.metric == "probs":
        return ReportValue(spec, probability)
    if stmt.metric == "rdm":
        return ReportValue(spec, analysis.reduced_density(state, a[0]))
    if stmt.metric in ("schmidt", "entropy"):
        left, right = a
        sub = state
        if set(left) | set(right) != set(state.labels):
            # diagnostics of a subsystem only make sense when it is pure
            sub = analysis.pure_part(analysis.reduced_density(state, left + right))
        if sub is None:
            return ReportValue(spec, None)
        sd = analysis.schmidt(sub, (left, right))
        if stmt.metric == "schmidt":
            return ReportValue(spec, tuple(float(c) for c in sd.coefficients))
        return ReportValue(spec, analysis.entanglement_entropy(sd))
    if stmt.metric == "concurrence":
        return ReportValue(spec, analysis.mixed_concurrence(analysis.reduced_density(state, a)))
    p, ax_p, q, ax_q = a
    return ReportValue(spec, analysis.correlator(state, (p, direction(ax_p)), (q, direction(ax_q))))


@dataclass
class _Branch:
    tag: str
    amps: np.ndarray
    labels: tuple[int, ...]
    reports: list


def _measure_step(amps, labels, basis: MeasurementBasis):
    """All outcomes of ``basis`` as ``(tag, probability, projected vector)``."""
    out = []
    for tag, v in zip(basis.tags, project_branches(amps, labels, basis)):
        out.append((tag, float(np.vdot(v, v).real), v))
    return out


def _run(program: ProtocolProgram, sampled: bool, seed: int, trial: int):
    rng = rng_stream(seed, trial)
    branches = [_Branch("", np.ones(1, dtype=complex), (), [])]
    initial = StateVector(np.ones(1, dtype=complex), ())
    measured: list[int] = []
    for stmt in program.statements:
        try:
            if isinstance(stmt, Prepare):
                factor = prepared_state(stmt)
                initial = initial.kron(factor)
                for b in branches:
                    b.amps = qmath.tensor_product_vec(b.amps, factor.amplitudes)
                    b.labels = b.labels + factor.labels
            elif isinstance(stmt, Measure):
                basis = measurement_basis(stmt)
                measured.extend(t for t in stmt.targets if t not in measured)
                grown = []
                for b in branches:
                    outcomes = _measure_step(b.amps, b.labels, basis)
                    if sampled:
                        total = sum(p for _, p, _ in outcomes)
                        probs = [p / total for _, p, _ in outcomes]
                        u, rng = next_uniform(rng)
                        k = choose_index(_cumulative(probs), probs, u)
                        outcomes = [outcomes[k]]
                    for tag, p, v in outcomes:
                        if p >= PROB_TOL:
                            grown.append(_Branch(b.tag + tag, v, b.labels, list(b.reports)))
                branches = grown
            else:
                for b in branches:
                    p = float(np.vdot(b.amps, b.amps).real)
                    b.reports.append(evaluate_report(stmt, _normalized(b.amps, b.labels), p))
        except (ValueError, ArithmeticError) as exc:
            if isinstance(exc, (InterpretError, ParseError)):
                raise
            raise InterpretError(stmt, str(exc)) from exc
    return branches, initial, measured


def interpret(
    program: ProtocolProgram,
    mode: str = "exhaustive",
    seed: int = DEFAULT_SEED,
    trial: int = 0,
) -> ExperimentReport:
    """Run ``program`` and return an experiment-shaped report.

    Rows are outcome branches; the heralded columns describe the particles
    that were never measured. In ``"sampled"`` mode there is one row, whose
    probability is the analytic probability of the branch that was drawn.
    """
    if mode not in ("exhaustive", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    _check(program)
    branches, initial, measured = _run(program, mode == "sampled", seed, trial)
    if not initial.labels:
        return ExperimentReport(program.name, (), (), None)
    remote = [label for label in initial.labels if label not in measured]
    outcomes = []
    for b in branches:
        p = float(np.vdot(b.amps, b.amps).real)
        post = StateVector(b.amps / math.sqrt(p), b.labels).sorted()
        outcomes.append((b.tag, p, post, b.reports))
    return build_report(program.name, initial.sorted(), outcomes, remote, with_summary=mode == "exhaustive")


class _Sampler:
    """Single-branch walker with memoized measurement nodes, for Monte Carlo."""

    def __init__(self, program: ProtocolProgram):
        self.program = program
        self.bases = {
            i: measurement_basis(s) for i, s in enumerate(program.statements) if isinstance(s, Measure)
        }
        self.nodes: dict = {}

    def _node(self, index: int, path: tuple, amps, labels):
        key = (index, path)
        node = self.nodes.get(key)
        if node is None:
            outcomes = _measure_step(amps, labels, self.bases[index])
            total = sum(p for _, p, _ in outcomes)
            probs = [p / total for _, p, _ in outcomes]
            node = (outcomes, probs, _cumulative(probs))
            self.nodes[key] = node
        return node

    def trial(self, seed: int, trial: int) -> str:
        rng = rng_stream(seed, trial)
        amps, labels = np.ones(1, dtype=complex), ()
        path: tuple = ()
        tag = ""
        for i, stmt in enumerate(self.program.statements):
            if isinstance(stmt, Prepare):
                key = (i, path)
                if key not in self.nodes:
                    factor = prepared_state(stmt)
                    self.nodes[key] = (qmath.tensor_product_vec(amps, factor.amplitudes), labels + factor.labels)
                amps, labels = self.nodes[key]
            elif isinstance(stmt, Measure):
                outcomes, probs, cdf = self._node(i, path, amps, labels)
                u, rng = next_uniform(rng)
                k = choose_index(cdf, probs, u)
                t, _, amps = outcomes[k]
                tag += t
                path += (k,)
        return tag


def monte_carlo(program: ProtocolProgram, trials: int, seed: int = DEFAULT_SEED):
    _check(program)
    analytic = [(row.outcome, row.probability) for row in interpret(program).rows]
    sampler = _Sampler(program)
    counts: dict[str, int] = {}
    for t in range(trials):
        tag = sampler.trial(seed, t)
        counts[tag] = counts.get(tag, 0) + 1
    return tabulate(program.name, seed, trials, analytic, counts)
