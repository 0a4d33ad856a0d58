"""Canned runs of the two measurement experiments on the two-singlet state.

Experiment 1 measures the z spin of particles 2 and 3 separately;
experiment 2 measures them jointly in the Bell basis. In both cases the
interesting object is the state left on the never-measured particles
1 and 4.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Sequence

import numpy as np

from . import analysis
from .analysis import DensityMatrix
from .measurement import (
    BELL_ORDER,
    MINUS,
    PLUS,
    MeasurementBasis,
    OutcomeRecord,
    bell_basis,
    measure,
    product_basis,
    rng_stream,
    sample,
    spin_basis,
)
from .states import (
    BellKind,
    StateVector,
    basis_ket,
    bell_state,
    eq1_state,
    phase_distance,
    subscript,
)

DEFAULT_SEED = 0x5EED
REMOTE = (1, 4)
MEASURED = (2, 3)
MATCH_TOL = 1e-10
IDENTIFY_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class OutcomeRow:
    outcome: str
    probability: float
    heralded: StateVector | None
    heralded_label: str | None
    schmidt: tuple[float, ...] | None
    entropy_bits: float | None
    concurrence: float | None
    correlators: dict[str, float] | None
    reports: tuple = ()


@dataclass(frozen=True, eq=False)
class Summary:
    rho_avg: DensityMatrix
    rho_before: DensityMatrix
    frobenius_to_premeasurement: float
    mixed_concurrence: float | None


@dataclass(frozen=True, eq=False)
class ExperimentReport:
    experiment: Any
    remote: tuple[int, ...]
    rows: tuple[OutcomeRow, ...]
    summary: Summary | None

    @property
    def probabilities(self) -> list[float]:
        return [row.probability for row in self.rows]


def _ket_label(bits: Sequence[str], labels: Sequence[int]) -> str:
    return "|" + "".join(bits) + "⟩" + subscript(labels)


def _named_states(labels: Sequence[int]) -> list[tuple[str, StateVector]]:
    """Product kets and Bell states of a pair, used to name heralded states."""
    if len(labels) != 2:
        return []
    named = []
    for b1 in (PLUS, MINUS):
        for b2 in (PLUS, MINUS):
            named.append((_ket_label((b1, b2), labels), basis_ket((b1, b2), labels)))
    for kind in BELL_ORDER:
        named.append((kind.label + subscript(labels), bell_state(kind, labels)))
    return named


def identify(state: StateVector, tol: float = IDENTIFY_TOL) -> str:
    for name, candidate in _named_states(state.labels):
        if phase_distance(state, candidate) < tol:
            return name
    return "unidentified"


def build_report(
    experiment, initial: StateVector, outcomes, remote: Sequence[int], with_summary: bool = True
) -> ExperimentReport:
    """Assemble a report from ``(tag, probability, post_state, reports)`` branches.

    Heralded diagnostics are filled in only when exactly two particles are
    left unmeasured and their post-measurement state is pure. The summary
    averages over the branches, so it needs the complete set of them.
    """
    remote = tuple(sorted(remote))
    rows = []
    for tag, probability, post, reports in outcomes:
        heralded = label = coeffs = entropy = conc = corr = None
        if post is not None and remote:
            heralded = analysis.heralded_state(post, remote)
            if heralded is not None:
                heralded = heralded.canonical()
                label = identify(heralded) if len(remote) == 2 else None
            else:
                label = "mixed"
        if heralded is not None and len(remote) == 2:
            p, q = remote
            sd = analysis.schmidt(heralded, ((p,), (q,)))
            coeffs = tuple(float(c) for c in sd.coefficients)
            entropy = analysis.entanglement_entropy(sd)
            conc = analysis.pure_concurrence(heralded)
            corr = {
                axis + axis: analysis.correlator(heralded, (p, axis), (q, axis))
                for axis in ("z", "x", "y")
            }
        rows.append(OutcomeRow(tag, probability, heralded, label, coeffs, entropy, conc, corr, tuple(reports)))

    summary = None
    live = [(p, post) for _, p, post, _ in outcomes if post is not None]
    if with_summary and remote and live:
        avg = sum(p * analysis.reduced_density(post, remote).matrix for p, post in live)
        rho_avg = DensityMatrix(avg, remote)
        before = analysis.reduced_density(initial, remote)
        summary = Summary(
            rho_avg,
            before,
            rho_avg.distance(before),
            analysis.mixed_concurrence(rho_avg) if len(remote) == 2 else None,
        )
    return ExperimentReport(experiment, remote, tuple(rows), summary)


def _records_report(experiment, records: Sequence[OutcomeRecord]) -> ExperimentReport:
    branches = [(r.label, r.probability, r.post_state, ()) for r in records]
    return build_report(experiment, eq1_state(), branches, REMOTE)


def experiment_1_basis() -> MeasurementBasis:
    return product_basis(spin_basis("z", 2), spin_basis("z", 3))


def experiment_2_basis() -> MeasurementBasis:
    return bell_basis(MEASURED)


def experiment_records(experiment: int) -> list[OutcomeRecord]:
    if experiment == 1:
        return measure(eq1_state(), experiment_1_basis())
    if experiment == 2:
        return measure(eq1_state(), experiment_2_basis())
    raise ValueError(f"unknown experiment {experiment!r}; expected 1 or 2")


def run_experiment_1() -> ExperimentReport:
    return _records_report(1, experiment_records(1))


def run_experiment_2() -> ExperimentReport:
    return _records_report(2, experiment_records(2))


def run_experiment(experiment: int) -> ExperimentReport:
    return _records_report(experiment, experiment_records(experiment))


@dataclass(frozen=True)
class BellTerm:
    kind_23: BellKind
    kind_14: BellKind
    coefficient: complex


def bell_decompose_eq1(tol: float = 1e-12) -> list[BellTerm]:
    """Expand the initial state over ``|bell_j>_23 (x) |bell_k>_14``."""
    psi = eq1_state()
    terms = []
    for j in BELL_ORDER:
        for k in BELL_ORDER:
            component = bell_state(j, (2, 3)).kron(bell_state(k, (1, 4)))
            c = component.inner(psi)
            if abs(c) > tol:
                terms.append(BellTerm(j, k, c))
    return terms


# (+2 +3) -> |--> on 1,4 and so on: both remote spins opposite their partners
_PAIRING_1 = {
    PLUS + "₂" + PLUS + "₃": (MINUS, MINUS),
    PLUS + "₂" + MINUS + "₃": (MINUS, PLUS),
    MINUS + "₂" + PLUS + "₃": (PLUS, MINUS),
    MINUS + "₂" + MINUS + "₃": (PLUS, PLUS),
}


def expected_heralds(experiment: int) -> dict[str, tuple[str, StateVector]]:
    """Outcome tag on 2,3 -> (name, expected state on 1,4)."""
    if experiment == 1:
        return {
            tag: (_ket_label(bits, REMOTE), basis_ket(bits, REMOTE))
            for tag, bits in _PAIRING_1.items()
        }
    if experiment == 2:
        return {
            kind.label + subscript(MEASURED): (kind.label + subscript(REMOTE), bell_state(kind, REMOTE))
            for kind in BELL_ORDER
        }
    raise ValueError(f"unknown experiment {experiment!r}")


@dataclass(frozen=True)
class WitnessRow:
    outcome: str
    expected: str
    distance: float
    matches: bool


def correspondence_check(report: ExperimentReport, tol: float = MATCH_TOL) -> tuple[bool, list[WitnessRow]]:
    """Check the outcome -> heralded-state map against the expected pairing.

    Passes only if every expected outcome appears exactly once and each
    heralded state matches its partner up to a global phase.
    """
    expected = expected_heralds(report.experiment)
    witness = []
    seen = set()
    ok = True
    for row in report.rows:
        if row.outcome not in expected or row.outcome in seen:
            witness.append(WitnessRow(row.outcome, "?", math.inf, False))
            ok = False
            continue
        seen.add(row.outcome)
        name, target = expected[row.outcome]
        distance = math.inf if row.heralded is None else phase_distance(row.heralded, target)
        matches = distance < tol
        ok = ok and matches
        witness.append(WitnessRow(row.outcome, name, distance, matches))
    if seen != set(expected):
        ok = False
    targets = [state for _, state in expected.values()]
    for i in range(len(targets)):
        for j in range(i + 1, len(targets)):
            if phase_distance(targets[i], targets[j]) < tol:
                ok = False
    return ok, witness


def swap_rows(report: ExperimentReport, i: int, j: int) -> ExperimentReport:
    """Copy of ``report`` with the heralded states of rows i and j exchanged."""
    rows = list(report.rows)
    a, b = rows[i], rows[j]
    rows[i] = replace(a, heralded=b.heralded, heralded_label=b.heralded_label)
    rows[j] = replace(b, heralded=a.heralded, heralded_label=a.heralded_label)
    return replace(report, rows=tuple(rows))


# -- no-signaling -----------------------------------------------------------

QUARTER_IDENTITY = np.eye(4, dtype=complex) / 4


@dataclass(frozen=True, eq=False)
class NoSignalingReport:
    before: DensityMatrix
    after_1: DensityMatrix
    after_2: DensityMatrix
    distances: dict[str, float]
    to_maximally_mixed: dict[str, float]
    mixed_concurrence: dict[str, float]


def no_signaling_report() -> NoSignalingReport:
    before = analysis.reduced_density(eq1_state(), REMOTE)
    after_1 = analysis.mixed_from_records(experiment_records(1), REMOTE)
    after_2 = analysis.mixed_from_records(experiment_records(2), REMOTE)
    mats = {"before": before, "exp1": after_1, "exp2": after_2}
    return NoSignalingReport(
        before,
        after_1,
        after_2,
        {
            "before_exp1": before.distance(after_1),
            "before_exp2": before.distance(after_2),
            "exp1_exp2": after_1.distance(after_2),
        },
        {k: float(np.sqrt(np.sum(np.abs(m.matrix - QUARTER_IDENTITY) ** 2))) for k, m in mats.items()},
        {k: analysis.mixed_concurrence(m) for k, m in mats.items()},
    )


def random_basis(targets: Sequence[int], rng: np.random.Generator) -> MeasurementBasis:
    """Haar-style random basis: Gaussian complex matrix, columns orthonormalized by MGS."""
    dim = 2 ** len(targets)
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q = np.zeros_like(a)
    for j in range(dim):
        w = a[:, j].copy()
        for i in range(j):
            w -= np.vdot(q[:, i], w) * q[:, i]
        q[:, j] = w / np.linalg.norm(w)
    return MeasurementBasis(tuple(targets), q.T, tuple(f"b{k}" for k in range(dim)))


@dataclass(frozen=True)
class SweepRow:
    index: int
    distance_to_before: float


def no_signaling_sweep(count: int, seed: int = DEFAULT_SEED) -> list[SweepRow]:
    """Averaged 1,4 state after ``count`` random joint measurements on 2,3."""
    rng = np.random.default_rng(seed)
    psi = eq1_state()
    before = analysis.reduced_density(psi, REMOTE)
    rows = []
    for i in range(count):
        records = measure(psi, random_basis(MEASURED, rng))
        rows.append(SweepRow(i, analysis.mixed_from_records(records, REMOTE).distance(before)))
    return rows


# -- Monte Carlo ------------------------------------------------------------


@dataclass(frozen=True)
class MonteCarloRow:
    outcome: str
    count: int
    frequency: float
    probability: float
    sigma_multiple: float | None


@dataclass(frozen=True)
class MonteCarloReport:
    source: Any
    seed: int
    trials: int
    rows: tuple[MonteCarloRow, ...] = field(default=())
    max_abs_deviation: float = 0.0
    max_sigma_multiple: float | None = 0.0


def _sigma_multiple(freq: float, p: float, trials: int) -> float | None:
    sigma = math.sqrt(p * (1.0 - p) / trials)
    dev = abs(freq - p)
    if sigma == 0.0:
        return 0.0 if dev == 0.0 else None
    return dev / sigma


def tabulate(source, seed: int, trials: int, analytic: Sequence[tuple[str, float]], counts: dict[str, int]) -> MonteCarloReport:
    rows = []
    for tag, p in analytic:
        n = counts.get(tag, 0)
        freq = n / trials
        rows.append(MonteCarloRow(tag, n, freq, p, _sigma_multiple(freq, p, trials)))
    multiples = [r.sigma_multiple for r in rows]
    return MonteCarloReport(
        source,
        seed,
        trials,
        tuple(rows),
        max((abs(r.frequency - r.probability) for r in rows), default=0.0),
        None if None in multiples else max(multiples, default=0.0),
    )


def monte_carlo(source, trials: int, seed: int = DEFAULT_SEED) -> MonteCarloReport:
    """Sample ``trials`` single-shot runs; trial ``t`` uses stream ``(seed, t)``.

    ``source`` is an experiment number (1 or 2) or a parsed protocol program.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if not isinstance(source, int):
        from .protocol import interpreter

        return interpreter.monte_carlo(source, trials, seed)
    records = experiment_records(source)
    counts: dict[str, int] = {}
    for t in range(trials):
        record, _ = sample(records, rng_stream(seed, t))
        counts[record.label] = counts.get(record.label, 0) + 1
    return tabulate(source, seed, trials, [(r.label, r.probability) for r in records], counts)
