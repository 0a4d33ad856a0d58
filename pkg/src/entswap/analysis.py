"""Entanglement and correlation diagnostics."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import qmath
from .measurement import OutcomeRecord, SpinDirection, _coerce_direction
from .states import StateVector

DM_TOL = 1e-10
ZERO_COEFF = 1e-12

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_YY = np.kron(PAULI_Y, PAULI_Y)


class AnalysisError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray
    labels: tuple[int, ...]

    def __post_init__(self):
        m = qmath.as_matrix(self.matrix).copy()
        labels = tuple(int(label) for label in self.labels)
        dim = 2 ** len(labels)
        if m.shape != (dim, dim):
            raise AnalysisError(f"{len(labels)} qubits need a {dim}x{dim} matrix, got {m.shape}")
        if not qmath.is_hermitian(m, DM_TOL):
            raise AnalysisError("density matrix is not Hermitian")
        trace = complex(np.trace(m))
        if abs(trace - 1.0) > DM_TOL:
            raise AnalysisError(f"density matrix trace is {trace!r}")
        if qmath.eigh(m)[0][-1] < -DM_TOL:
            raise AnalysisError("density matrix has a negative eigenvalue")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "labels", labels)

    @property
    def num_qubits(self) -> int:
        return len(self.labels)

    @classmethod
    def from_state(cls, state: StateVector) -> DensityMatrix:
        return cls(state.density(), state.labels)

    def eigenvalues(self) -> np.ndarray:
        return qmath.eigh(self.matrix)[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def distance(self, other: DensityMatrix) -> float:
        return qmath.frobenius_distance(self.matrix, other.matrix)


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    coefficients: np.ndarray
    left_vectors: np.ndarray  # columns, in subset-A bit order
    right_vectors: np.ndarray  # columns, in subset-B bit order
    bipartition: tuple[tuple[int, ...], tuple[int, ...]]

    @property
    def rank(self) -> int:
        return int(np.sum(self.coefficients > ZERO_COEFF))


def _check_subset(labels: Sequence[int], subset: Sequence[int], what: str) -> tuple[int, ...]:
    subset = tuple(int(s) for s in subset)
    if not subset:
        raise AnalysisError(f"{what} must be non-empty")
    if len(set(subset)) != len(subset):
        raise AnalysisError(f"{what} has repeated labels {subset}")
    unknown = [s for s in subset if s not in labels]
    if unknown:
        raise AnalysisError(f"unknown particle label(s) {unknown} in {what}")
    return subset


def _split(state: StateVector, a: Sequence[int], b: Sequence[int]) -> np.ndarray:
    """Amplitudes reshaped to a ``2^|a| x 2^|b|`` matrix, rows from ``a`` bits."""
    axes = [state.labels.index(x) for x in a] + [state.labels.index(x) for x in b]
    return np.transpose(state.tensor(), axes).reshape(2 ** len(a), 2 ** len(b))


def reduced_density(state: StateVector, keep: Sequence[int]) -> DensityMatrix:
    """Partial trace of ``|psi><psi|`` onto ``keep`` (qubits sorted by label)."""
    keep = tuple(sorted(_check_subset(state.labels, keep, "keep")))
    rest = [label for label in state.labels if label not in keep]
    m = _split(state, keep, rest)
    rho = m @ m.conj().T
    return DensityMatrix(0.5 * (rho + rho.conj().T), keep)


def reduced_density_matrix(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    keep = tuple(sorted(_check_subset(rho.labels, keep, "keep")))
    n = rho.num_qubits
    rest = [label for label in rho.labels if label not in keep]
    axes = [rho.labels.index(x) for x in keep] + [rho.labels.index(x) for x in rest]
    t = rho.matrix.reshape((2,) * (2 * n))
    t = np.transpose(t, axes + [n + a for a in axes])
    dk, dr = 2 ** len(keep), 2 ** len(rest)
    t = t.reshape(dk, dr, dk, dr)
    return DensityMatrix(np.einsum("arbr->ab", t), keep)


def mixed_from_records(records: Sequence[OutcomeRecord], keep: Sequence[int]) -> DensityMatrix:
    """Outcome-averaged reduced state ``sum_k p_k rho_k`` on ``keep``."""
    if not records:
        raise AnalysisError("no outcome records to average")
    total = None
    labels = None
    for r in records:
        if r.post_state is None:
            continue
        rho = reduced_density(r.post_state, keep)
        labels = rho.labels
        total = r.probability * rho.matrix if total is None else total + r.probability * rho.matrix
    if total is None:
        raise AnalysisError("records carry no post-measurement states")
    return DensityMatrix(total, labels)


def schmidt(state: StateVector, bipartition) -> SchmidtDecomposition:
    """Schmidt decomposition across ``bipartition = (A, B)``."""
    a, b = bipartition
    a = _check_subset(state.labels, a, "subset A")
    b = _check_subset(state.labels, b, "subset B")
    if set(a) & set(b) or set(a) | set(b) != set(state.labels):
        raise AnalysisError(f"{a}|{b} is not a bipartition of particles {state.labels}")
    u, s, vh = qmath.svd(_split(state, a, b))
    return SchmidtDecomposition(s, u, vh.conj().T, (a, b))


def entanglement_entropy(sd: SchmidtDecomposition) -> float:
    """Entropy in bits of the squared Schmidt coefficients."""
    total = 0.0
    for c in sd.coefficients:
        if c > ZERO_COEFF:
            w = c * c
            total -= w * math.log2(w)
    return max(float(total), 0.0)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    total = 0.0
    for w in rho.eigenvalues():
        if w > ZERO_COEFF ** 2:
            total -= w * math.log2(w)
    return max(float(total), 0.0)


def is_product(state: StateVector, bipartition, tol: float = 1e-9) -> bool:
    coeffs = schmidt(state, bipartition).coefficients
    return len(coeffs) < 2 or coeffs[1] <= tol


def pure_concurrence(state: StateVector) -> float:
    if state.num_qubits != 2:
        raise AnalysisError(f"concurrence needs a two-qubit state, got {state.num_qubits} qubits")
    a, b, c, d = state.amplitudes
    return float(min(1.0, 2.0 * abs(a * d - b * c)))


def mixed_concurrence(rho: DensityMatrix) -> float:
    """Wootters concurrence of a two-qubit density matrix.

    With ``rho = A A†`` from the eigendecomposition, the square roots of the
    spectrum of ``rho (Y⊗Y) rho* (Y⊗Y)`` are the singular values of the
    symmetric matrix ``Aᵀ (Y⊗Y) A``. Going through singular values keeps the
    error linear in rounding noise, where square roots of a near-zero
    spectrum would amplify it.
    """
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(rho, (1, 2))
    if rho.num_qubits != 2:
        raise AnalysisError(f"concurrence needs a two-qubit state, got {rho.num_qubits} qubits")
    w, v = qmath.eigh(rho.matrix)
    a = v * np.sqrt(np.clip(w, 0.0, None))
    lam = qmath.svd_singular_values(a.T @ _YY @ a)
    return float(min(1.0, max(0.0, lam[0] - lam[1] - lam[2] - lam[3])))


def spin_operator(direction) -> np.ndarray:
    d = _coerce_direction(direction)
    return d.x * PAULI_X + d.y * PAULI_Y + d.z * PAULI_Z


def _apply_local(psi: np.ndarray, op: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(op, psi, axes=([1], [axis])), 0, axis)


def correlator(source, first, second) -> float:
    """Expectation of ``(a·σ)_p ⊗ (b·σ)_q`` for ``first=(p, a)``, ``second=(q, b)``.

    ``source`` is a :class:`StateVector` or a :class:`DensityMatrix`.
    """
    (p, a), (q, b) = first, second
    if p == q:
        raise AnalysisError("correlator needs two different particles")
    labels = source.labels
    for label in (p, q):
        if label not in labels:
            raise AnalysisError(f"unknown particle label {label}")
    op_a, op_b = spin_operator(a), spin_operator(b)
    ip, iq = labels.index(p), labels.index(q)
    if isinstance(source, StateVector):
        psi = source.tensor()
        phi = _apply_local(_apply_local(psi, op_b, iq), op_a, ip)
        return float(np.vdot(psi, phi).real)
    n = source.num_qubits
    ops = [np.eye(2, dtype=complex)] * n
    ops[ip], ops[iq] = op_a, op_b
    full = ops[0]
    for o in ops[1:]:
        full = np.kron(full, o)
    return float(np.trace(source.matrix @ full).real)


def heralded_state(state: StateVector, keep: Sequence[int], tol: float = 1e-9) -> StateVector | None:
    """Pure state of ``keep`` if ``state`` factorizes across keep|rest, else None."""
    keep = _check_subset(state.labels, keep, "keep")
    rest = tuple(label for label in state.labels if label not in keep)
    if not rest:
        return state.permuted(keep)
    sd = schmidt(state, (keep, rest))
    if len(sd.coefficients) > 1 and sd.coefficients[1] > tol:
        return None
    return StateVector.from_unnormalized(sd.left_vectors[:, 0], keep)


def pure_part(rho: DensityMatrix, tol: float = 1e-9) -> StateVector | None:
    """The state vector of a (numerically) pure density matrix, or None if mixed."""
    w, v = qmath.eigh(rho.matrix)
    if w[0] < 1.0 - tol:
        return None
    return StateVector.from_unnormalized(v[:, 0], rho.labels)
