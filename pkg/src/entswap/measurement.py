"""Projective measurements: Born probabilities, collapse and sampling."""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import qmath
from .states import BellKind, StateVector, bell_state, subscript

PROB_TOL = 1e-12
UNIT_TOL = 1e-10
ORTHO_TOL = 1e-10
SIMPLEX_TOL = 1e-8

PLUS = "+"
MINUS = "−"


class MeasurementError(ValueError):
    pass


@dataclass(frozen=True)
class SpinDirection:
    x: float
    y: float
    z: float

    def __post_init__(self):
        norm = math.sqrt(self.x ** 2 + self.y ** 2 + self.z ** 2)
        if not math.isfinite(norm) or abs(norm - 1.0) > UNIT_TOL:
            raise MeasurementError(f"spin direction ({self.x}, {self.y}, {self.z}) is not a unit vector")

    @classmethod
    def normalized(cls, x: float, y: float, z: float) -> SpinDirection:
        norm = math.sqrt(x * x + y * y + z * z)
        if norm == 0.0 or not math.isfinite(norm):
            raise MeasurementError("cannot normalize a zero or non-finite direction")
        return cls(x / norm, y / norm, z / norm)

    @classmethod
    def axis(cls, name: str) -> SpinDirection:
        try:
            return _AXES[name.lower()]
        except KeyError:
            raise MeasurementError(f"unknown axis {name!r}") from None

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @property
    def name(self) -> str:
        for key, value in _AXES.items():
            if value == self:
                return key
        return f"({self.x!r},{self.y!r},{self.z!r})"


_AXES = {
    "x": SpinDirection(1.0, 0.0, 0.0),
    "y": SpinDirection(0.0, 1.0, 0.0),
    "z": SpinDirection(0.0, 0.0, 1.0),
}


def _coerce_direction(direction) -> SpinDirection:
    if isinstance(direction, SpinDirection):
        return direction
    if isinstance(direction, str):
        return SpinDirection.axis(direction)
    return SpinDirection(*(float(c) for c in direction))


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    """Complete orthonormal basis on the ``targets`` qubits.

    ``vectors`` holds one basis vector per row, in the bit convention of
    ``targets``. ``tags`` are the outcome names as they appear in reports,
    i.e. the label qualified by the measured particles.
    """

    targets: tuple[int, ...]
    vectors: np.ndarray
    labels: tuple[str, ...]
    tags: tuple[str, ...] = field(default=())

    def __post_init__(self):
        targets = tuple(int(t) for t in self.targets)
        if not targets or len(set(targets)) != len(targets):
            raise MeasurementError(f"targets must be distinct and non-empty, got {targets}")
        dim = 2 ** len(targets)
        vectors = qmath.as_matrix(self.vectors).copy()
        if vectors.shape != (dim, dim):
            raise MeasurementError(f"{len(targets)} targets need {dim} basis vectors of dim {dim}")
        gram = vectors.conj() @ vectors.T
        if float(np.max(np.abs(gram - np.eye(dim)))) > ORTHO_TOL:
            raise MeasurementError("basis vectors are not orthonormal")
        labels = tuple(self.labels)
        if len(labels) != dim or len(set(labels)) != dim:
            raise MeasurementError("need one distinct label per basis vector")
        tags = tuple(self.tags) or tuple(label + subscript(targets) for label in labels)
        if len(tags) != dim:
            raise MeasurementError("need one tag per basis vector")
        vectors.setflags(write=False)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "tags", tags)

    def __len__(self) -> int:
        return len(self.labels)


@dataclass(frozen=True, eq=False)
class OutcomeRecord:
    label: str
    probability: float
    post_state: StateVector | None
    index: int = 0


def spin_basis(direction, target: int = 1) -> MeasurementBasis:
    """Eigenbasis of the spin component along ``direction``: up ("+") then down ("−")."""
    d = _coerce_direction(direction)
    theta = math.atan2(math.hypot(d.x, d.y), d.z)
    phi = math.atan2(d.y, d.x)
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    up = [c, np.exp(1j * phi) * s]
    down = [-np.exp(-1j * phi) * s, c]
    return MeasurementBasis((target,), np.array([up, down], dtype=complex), (PLUS, MINUS))


BELL_ORDER = (BellKind.PSI_PLUS, BellKind.PSI_MINUS, BellKind.PHI_PLUS, BellKind.PHI_MINUS)


def bell_basis(pair_labels: Sequence[int] = (2, 3)) -> MeasurementBasis:
    pair = tuple(pair_labels)
    if len(pair) != 2 or pair[0] == pair[1]:
        raise MeasurementError(f"Bell measurement needs two distinct particles, got {pair}")
    vectors = np.array([bell_state(kind, pair).amplitudes for kind in BELL_ORDER])
    return MeasurementBasis(pair, vectors, tuple(kind.label for kind in BELL_ORDER))


def product_basis(*bases: MeasurementBasis) -> MeasurementBasis:
    """Joint basis of independent measurements; outcome ``k`` enumerates in row-major order."""
    if not bases:
        raise MeasurementError("product_basis needs at least one basis")
    targets: tuple[int, ...] = ()
    vectors = np.ones((1, 1), dtype=complex)
    labels: list[str] = [""]
    tags: list[str] = [""]
    for b in bases:
        targets += b.targets
        vectors = np.einsum("ia,jb->ijab", vectors, b.vectors).reshape(
            vectors.shape[0] * len(b), vectors.shape[1] * b.vectors.shape[1]
        )
        labels = [left + right for left in labels for right in b.labels]
        tags = [left + right for left in tags for right in b.tags]
    return MeasurementBasis(targets, vectors, tuple(labels), tuple(tags))


def _as_basis(basis) -> MeasurementBasis:
    if isinstance(basis, MeasurementBasis):
        return basis
    return product_basis(*basis)


def project_branches(amplitudes: np.ndarray, labels: Sequence[int], basis: MeasurementBasis) -> list[np.ndarray]:
    """Unnormalized projections ``(|b_k><b_k| (x) 1) psi`` for every basis vector."""
    labels = tuple(labels)
    missing = [t for t in basis.targets if t not in labels]
    if missing:
        raise MeasurementError(f"unknown target particle(s) {missing}; state has {labels}")
    n = len(labels)
    k = len(basis.targets)
    front = [labels.index(t) for t in basis.targets]
    rest = [i for i in range(n) if i not in front]
    perm = front + rest
    inverse = np.argsort(perm)
    psi = np.transpose(np.asarray(amplitudes).reshape((2,) * n), perm).reshape(2 ** k, -1)
    components = basis.vectors.conj() @ psi
    out = []
    for vec, comp in zip(basis.vectors, components):
        full = np.outer(vec, comp).reshape((2,) * n)
        out.append(np.transpose(full, inverse).reshape(-1))
    return out


def measure(state: StateVector, basis) -> list[OutcomeRecord]:
    """Born-rule outcome records, in basis order.

    ``basis`` is a :class:`MeasurementBasis` or a sequence of them; a
    sequence is measured as one joint product basis.
    """
    if not isinstance(state, StateVector):
        raise MeasurementError("measure expects a StateVector")
    basis = _as_basis(basis)
    records = []
    for i, branch in enumerate(project_branches(state.amplitudes, state.labels, basis)):
        p = float(np.vdot(branch, branch).real)
        post = StateVector(branch / math.sqrt(p), state.labels) if p >= PROB_TOL else None
        records.append(OutcomeRecord(basis.tags[i], p, post, i))
    return records


# -- random numbers ---------------------------------------------------------
#
# SplitMix64 (Steele, Lea & Flood 2014). A stream is keyed by (seed, trial):
# its state is mix64(mix64(seed) ^ trial * GOLDEN), so trials are independent
# of execution order. Uniforms use the top 53 bits of each output.

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def rng_stream(seed: int, trial: int = 0) -> int:
    return _mix64(_mix64(seed & _MASK) ^ ((trial * _GOLDEN) & _MASK))


def next_u64(state: int) -> tuple[int, int]:
    state = (state + _GOLDEN) & _MASK
    return _mix64(state), state


def next_uniform(state: int) -> tuple[float, int]:
    value, state = next_u64(state)
    return (value >> 11) * (1.0 / (1 << 53)), state


def _cumulative(probabilities: Sequence[float]) -> list[float]:
    if not probabilities:
        raise MeasurementError("empty outcome distribution")
    if any(not math.isfinite(p) or p < 0.0 for p in probabilities):
        raise MeasurementError("probabilities must be finite and non-negative")
    total = math.fsum(probabilities)
    if abs(total - 1.0) > SIMPLEX_TOL:
        raise MeasurementError(f"probabilities sum to {total!r}, not 1")
    cdf, acc = [], 0.0
    for p in probabilities:
        acc += p
        cdf.append(acc)
    return cdf


def choose_index(cdf: Sequence[float], probabilities: Sequence[float], u: float) -> int:
    k = bisect.bisect_right(cdf, u)
    if k >= len(cdf):
        # u beyond the rounded total: fall back to the last possible outcome
        k = max(i for i, p in enumerate(probabilities) if p > 0.0)
    return k


def sample(records: Sequence[OutcomeRecord], rng_state: int) -> tuple[OutcomeRecord, int]:
    """Pick one record by inverse CDF on a single uniform draw."""
    probabilities = [r.probability for r in records]
    cdf = _cumulative(probabilities)
    u, rng_state = next_uniform(rng_state)
    return records[choose_index(cdf, probabilities, u)], rng_state
