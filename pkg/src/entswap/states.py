"""Named qubit states and a phase-insensitive comparison.

Index convention used throughout the package: the particle listed first
in ``labels`` is the most significant bit, ``|+>`` (spin up along z) is
bit 0 and ``|->`` is bit 1. States built by the constructors here always
list their particles in ascending label order.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import qmath

NORM_TOL = 1e-10
_PHASE_FLOOR = 1e-12

SQRT1_2 = 1.0 / math.sqrt(2.0)

_SUBSCRIPTS = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")


def subscript(labels: Iterable[int]) -> str:
    return "".join(str(label) for label in labels).translate(_SUBSCRIPTS)


class StateError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state of ``len(labels)`` qubits."""

    amplitudes: np.ndarray
    labels: tuple[int, ...]

    def __post_init__(self):
        amps = qmath.as_vector(self.amplitudes).copy()
        labels = tuple(int(label) for label in self.labels)
        if len(set(labels)) != len(labels):
            raise StateError(f"duplicate particle labels {labels}")
        if amps.shape[0] != 2 ** len(labels):
            raise StateError(
                f"{len(labels)} qubits need {2 ** len(labels)} amplitudes, got {amps.shape[0]}"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_TOL:
            raise StateError(f"state is not normalized (norm {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_unnormalized(cls, amplitudes, labels: Sequence[int]) -> StateVector:
        amps = qmath.as_vector(amplitudes)
        norm = float(np.linalg.norm(amps))
        if norm == 0.0:
            raise StateError("cannot normalize the zero vector")
        return cls(amps / norm, tuple(labels))

    @property
    def num_qubits(self) -> int:
        return len(self.labels)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def tensor(self) -> np.ndarray:
        """Amplitudes as an ``(2,)*n`` array, axis ``i`` being ``labels[i]``."""
        return self.amplitudes.reshape((2,) * self.num_qubits)

    def amplitude(self, bits: str | Sequence[int]) -> complex:
        return complex(self.amplitudes[_bits_to_index(bits)])

    def permuted(self, labels: Sequence[int]) -> StateVector:
        """Same physical state with its qubits listed in ``labels`` order."""
        labels = tuple(labels)
        if sorted(labels) != sorted(self.labels):
            raise StateError(f"{labels} is not a permutation of {self.labels}")
        axes = [self.labels.index(label) for label in labels]
        amps = np.transpose(self.tensor(), axes).reshape(-1)
        return StateVector(amps, labels)

    def sorted(self) -> StateVector:
        return self.permuted(sorted(self.labels))

    def kron(self, other: StateVector) -> StateVector:
        overlap = set(self.labels) & set(other.labels)
        if overlap:
            raise StateError(f"particles {sorted(overlap)} appear in both factors")
        return StateVector(
            qmath.tensor_product_vec(self.amplitudes, other.amplitudes),
            self.labels + other.labels,
        )

    def inner(self, other: StateVector) -> complex:
        """``<self|other>`` after aligning ``other`` to this label order."""
        if other.labels != self.labels:
            other = other.permuted(self.labels)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def density(self) -> np.ndarray:
        return qmath.outer(self.amplitudes)

    def canonical(self) -> StateVector:
        return StateVector(canonical_phase(self.amplitudes), self.labels)

    def __repr__(self) -> str:
        return f"StateVector(labels={self.labels}, amplitudes={np.round(self.amplitudes, 6)!r})"


def _bits_to_index(bits: str | Sequence[int]) -> int:
    index = 0
    for b in bits:
        if b in ("+", 0):
            bit = 0
        elif b in ("-", "−", 1):
            bit = 1
        else:
            raise StateError(f"bad bit {b!r}; use '+'/'-' or 0/1")
        index = 2 * index + bit
    return index


class BellKind(enum.Enum):
    PSI_PLUS = "Ψ+"
    PSI_MINUS = "Ψ−"
    PHI_PLUS = "Φ+"
    PHI_MINUS = "Φ−"

    @property
    def label(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: str) -> BellKind:
        key = text.strip().lower().replace("−", "-")
        aliases = {
            "psi+": cls.PSI_PLUS, "ψ+": cls.PSI_PLUS,
            "psi-": cls.PSI_MINUS, "ψ-": cls.PSI_MINUS,
            "phi+": cls.PHI_PLUS, "φ+": cls.PHI_PLUS,
            "phi-": cls.PHI_MINUS, "φ-": cls.PHI_MINUS,
        }
        try:
            return aliases[key]
        except KeyError:
            raise StateError(f"unknown Bell state {text!r}") from None


# amplitudes on |++>, |+->, |-+>, |-->
_BELL_AMPLITUDES = {
    BellKind.PSI_PLUS: (0.0, SQRT1_2, SQRT1_2, 0.0),
    BellKind.PSI_MINUS: (0.0, SQRT1_2, -SQRT1_2, 0.0),
    BellKind.PHI_PLUS: (SQRT1_2, 0.0, 0.0, SQRT1_2),
    BellKind.PHI_MINUS: (SQRT1_2, 0.0, 0.0, -SQRT1_2),
}


def _pair(pair_labels: Sequence[int]) -> tuple[int, int]:
    pair = tuple(int(label) for label in pair_labels)
    if len(pair) != 2:
        raise StateError(f"expected two particle labels, got {pair}")
    if pair[0] == pair[1]:
        raise StateError(f"pair labels must be distinct, got {pair}")
    return pair


def basis_ket(bits: str | Sequence, labels: Sequence[int] | None = None) -> StateVector:
    """Computational ket, e.g. ``basis_ket("+-")`` is ``|+>|->`` on particles 1, 2."""
    bits = list(bits)
    if not bits:
        raise StateError("basis_ket needs at least one bit")
    if labels is None:
        labels = range(1, len(bits) + 1)
    labels = tuple(labels)
    if len(labels) != len(bits):
        raise StateError(f"{len(bits)} bits but {len(labels)} labels")
    amps = np.zeros(2 ** len(bits), dtype=complex)
    amps[_bits_to_index(bits)] = 1.0
    return StateVector(amps, labels)


def bell_state(kind: BellKind, pair_labels: Sequence[int] = (1, 2)) -> StateVector:
    pair = _pair(pair_labels)
    return StateVector(np.array(_BELL_AMPLITUDES[kind], dtype=complex), pair)


def singlet(pair_labels: Sequence[int] = (1, 2)) -> StateVector:
    return bell_state(BellKind.PSI_MINUS, pair_labels)


def eq1_state() -> StateVector:
    """Two independent singlets, on particles (1, 2) and (3, 4)."""
    return singlet((1, 2)).kron(singlet((3, 4)))


def canonical_phase(amplitudes) -> np.ndarray:
    """Rotate the global phase so the first non-negligible amplitude is real and positive."""
    amps = qmath.as_vector(amplitudes)
    nonzero = np.flatnonzero(np.abs(amps) > _PHASE_FLOOR)
    if nonzero.size == 0:
        return amps.copy()
    first = amps[nonzero[0]]
    return amps * (abs(first) / first)


def phase_distance(a: StateVector, b: StateVector) -> float:
    """``min_c ||a - c b||`` over unit complex ``c``.

    Equal to ``sqrt(2 - 2|<a|b>|)``, but evaluated as the norm of the
    residual at the optimal phase; the closed form cancels badly and cannot
    resolve distances below about 1e-8.
    """
    if b.labels != a.labels:
        b = b.permuted(a.labels)
    overlap = complex(np.vdot(b.amplitudes, a.amplitudes))
    c = overlap / abs(overlap) if overlap != 0 else 1.0
    return float(np.linalg.norm(a.amplitudes - c * b.amplitudes))


def equal_up_to_global_phase(a: StateVector, b: StateVector, tol: float = 1e-10) -> bool:
    if a.num_qubits != b.num_qubits:
        raise StateError("states have different qubit counts")
    if sorted(a.labels) != sorted(b.labels):
        return False
    if b.labels != a.labels:
        b = b.permuted(a.labels)
    diff = canonical_phase(a.amplitudes) - canonical_phase(b.amplitudes)
    return float(np.linalg.norm(diff)) <= tol
