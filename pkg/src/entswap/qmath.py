"""Small dense complex linear algebra.

Vectors and matrices are plain ``numpy`` arrays of ``complex128``. The
decompositions (``svd``, ``eigh``) are cyclic Jacobi iterations written
here rather than delegated to LAPACK: the matrices in this package never
exceed 16 x 16, and a self-contained routine keeps the ordering and tie
behaviour fully deterministic.
"""
from __future__ import annotations

import math

import numpy as np

HERMITIAN_TOL = 1e-10
EIG_TOL = 1e-10

_MAX_SWEEPS = 100
_EPS = np.finfo(float).eps


class LinAlgError(ValueError):
    """Raised on malformed input to a qmath routine."""


def as_vector(v) -> np.ndarray:
    arr = np.asarray(v, dtype=complex)
    if arr.ndim != 1:
        raise LinAlgError(f"expected a 1-d vector, got shape {arr.shape}")
    if arr.size == 0:
        raise LinAlgError("empty vector")
    if not np.all(np.isfinite(arr)):
        raise LinAlgError("vector has non-finite entries")
    return arr


def as_matrix(m) -> np.ndarray:
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise LinAlgError(f"expected a 2-d matrix, got shape {arr.shape}")
    if arr.size == 0:
        raise LinAlgError("empty matrix")
    if not np.all(np.isfinite(arr)):
        raise LinAlgError("matrix has non-finite entries")
    return arr


def tensor_product_vec(a, b) -> np.ndarray:
    """Kronecker product; entry ``i*len(b) + j`` is ``a[i]*b[j]``."""
    a = as_vector(a)
    b = as_vector(b)
    return (a[:, None] * b[None, :]).reshape(-1)


def tensor_product_mat(a, b) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    return np.kron(a, b)


def dagger(m) -> np.ndarray:
    return as_matrix(m).conj().T


def apply(m, v) -> np.ndarray:
    m = as_matrix(m)
    v = as_vector(v)
    if m.shape[1] != v.shape[0]:
        raise LinAlgError(f"cannot apply {m.shape} matrix to vector of dim {v.shape[0]}")
    return m @ v


def outer(a, b=None) -> np.ndarray:
    """``|a><b|``; with one argument the projector ``|a><a|``."""
    a = as_vector(a)
    b = a if b is None else as_vector(b)
    return a[:, None] * b.conj()[None, :]


def projector(v) -> np.ndarray:
    v = as_vector(v)
    return outer(v / np.linalg.norm(v))


def frobenius_distance(a, b) -> float:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise LinAlgError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.sqrt(np.sum(np.abs(a - b) ** 2)))


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    m = as_matrix(m)
    return m.shape[0] == m.shape[1] and float(np.max(np.abs(m - m.conj().T))) <= tol


def _rotation(app: float, aqq: float, apq: complex) -> np.ndarray:
    """2x2 unitary G with ``G^H [[app, apq], [conj(apq), aqq]] G`` diagonal.

    The off-diagonal phase is absorbed into the second column so the
    remaining step is the classical real Jacobi rotation.
    """
    mag = abs(apq)
    phase = apq / mag
    theta = (aqq - app) / (2.0 * mag)
    if theta == 0.0:
        t = 1.0
    else:
        t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    pc = phase.conjugate()
    return np.array([[c, s], [-s * pc, c * pc]], dtype=complex)


def _descending(values: np.ndarray) -> np.ndarray:
    # stable: ties keep their prior order
    return np.argsort(-values, kind="stable")


def eigh(m, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues real and sorted
    descending, and eigenvectors as the columns of a unitary matrix.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise LinAlgError(f"eigh needs a square matrix, got {a.shape}")
    if not is_hermitian(a, tol):
        raise LinAlgError("eigh input is not Hermitian within tolerance")
    n = a.shape[0]
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)
    scale = max(float(np.sqrt(np.sum(np.abs(a) ** 2))), 1e-300)
    for _ in range(_MAX_SWEEPS):
        off = float(np.sqrt(np.sum(np.abs(a - np.diag(np.diag(a))) ** 2)))
        if off <= _EPS * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300 or abs(apq) <= _EPS * 1e-3 * scale:
                    continue
                g = _rotation(a[p, p].real, a[q, q].real, apq)
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ g
    values = np.diag(a).real.copy()
    order = _descending(values)
    return values[order], v[:, order]


def _complete_columns(u: np.ndarray, keep: np.ndarray) -> np.ndarray:
    """Replace the columns not in ``keep`` by an orthonormal completion."""
    m, k = u.shape
    basis = [u[:, j] for j in range(k) if keep[j]]
    out = u.copy()
    candidates = iter(np.eye(m, dtype=complex))
    for j in range(k):
        if keep[j]:
            continue
        for e in candidates:
            w = e.copy()
            # two passes of modified Gram-Schmidt
            for _ in range(2):
                for b in basis:
                    w = w - np.vdot(b, w) * b
            nw = np.linalg.norm(w)
            if nw > 1e-8:
                w = w / nw
                basis.append(w)
                out[:, j] = w
                break
    return out


def svd(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD ``m = U diag(s) Vh`` by one-sided (Hestenes) Jacobi.

    ``s`` has ``min(rows, cols)`` entries, sorted descending. Columns of
    ``U`` belonging to zero singular values are an arbitrary orthonormal
    completion.
    """
    a = as_matrix(m)
    rows, cols = a.shape
    if rows < cols:
        u, s, vh = svd(a.conj().T)
        return vh.conj().T, s, u.conj().T

    u = a.copy()
    v = np.eye(cols, dtype=complex)
    for _ in range(_MAX_SWEEPS):
        rotated = False
        for i in range(cols - 1):
            for j in range(i + 1, cols):
                alpha = float(np.vdot(u[:, i], u[:, i]).real)
                beta = float(np.vdot(u[:, j], u[:, j]).real)
                gamma = complex(np.vdot(u[:, i], u[:, j]))
                if abs(gamma) <= _EPS * math.sqrt(alpha * beta) or abs(gamma) <= 1e-300:
                    continue
                rotated = True
                g = _rotation(alpha, beta, gamma)
                idx = [i, j]
                u[:, idx] = u[:, idx] @ g
                v[:, idx] = v[:, idx] @ g
        if not rotated:
            break

    s = np.sqrt(np.sum(np.abs(u) ** 2, axis=0))
    order = _descending(s)
    s = s[order]
    u = u[:, order]
    v = v[:, order]
    tiny = max(float(s[0]) if s.size else 0.0, 1.0) * 1e-13
    keep = s > tiny
    u[:, keep] = u[:, keep] / s[keep]
    if not np.all(keep):
        u = _complete_columns(u, keep)
    return u, s, v.conj().T


def svd_singular_values(m) -> np.ndarray:
    return svd(m)[1]
