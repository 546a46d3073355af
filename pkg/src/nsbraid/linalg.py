"""Small dense complex linear algebra (dimensions 2, 4 and 6).

Matrices are plain ``numpy`` complex128 arrays. Elementwise work (products,
transposes) is delegated to numpy; determinants, inverses and Hermitian
eigenvalues are computed here so the numerics stay fixed and inspectable.
"""

from __future__ import annotations

import math

import numpy as np

SUPPORTED_DIMS = (2, 4, 6)

JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100


class DimensionError(ValueError):
    pass


class ConvergenceError(ArithmeticError):
    pass


def as_matrix(a) -> np.ndarray:
    """Coerce to a validated square complex matrix of a supported size."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] not in SUPPORTED_DIMS:
        raise DimensionError(f"unsupported dimension {m.shape[0]}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def identity(dim: int) -> np.ndarray:
    if dim not in SUPPORTED_DIMS:
        raise DimensionError(f"unsupported dimension {dim}")
    return np.eye(dim, dtype=np.complex128)


def _same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")


def mat_mul(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    _same_dim(a, b)
    return a @ b


def adjoint(a) -> np.ndarray:
    return as_matrix(a).conj().T


def trace(a) -> complex:
    return complex(np.trace(as_matrix(a)))


def _lu(a: np.ndarray):
    """In-place LU with partial pivoting. Returns (lu, perm, sign)."""
    lu = a.copy()
    n = lu.shape[0]
    perm = list(range(n))
    sign = 1.0
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[k], perm[p] = perm[p], perm[k]
            sign = -sign
        pivot = lu[k, k]
        if pivot == 0:
            continue
        lu[k + 1:, k] /= pivot
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return lu, perm, sign


def determinant(a) -> complex:
    """Determinant via LU decomposition with partial pivoting."""
    lu, _, sign = _lu(as_matrix(a))
    return complex(sign * np.prod(np.diag(lu)))


def inverse(a) -> np.ndarray:
    """Exact inverse by LU solve against the identity columns."""
    a = as_matrix(a)
    lu, perm, _ = _lu(a)
    n = a.shape[0]
    if np.min(np.abs(np.diag(lu))) == 0:
        raise ZeroDivisionError("singular matrix")
    out = np.zeros((n, n), dtype=np.complex128)
    for col in range(n):
        rhs = np.zeros(n, dtype=np.complex128)
        rhs[perm.index(col)] = 1.0
        y = np.zeros(n, dtype=np.complex128)
        for i in range(n):
            y[i] = rhs[i] - lu[i, :i] @ y[:i]
        x = np.zeros(n, dtype=np.complex128)
        for i in range(n - 1, -1, -1):
            x[i] = (y[i] - lu[i, i + 1:] @ x[i + 1:]) / lu[i, i]
        out[:, col] = x
    return out


def kron(a, b) -> np.ndarray:
    """Kronecker product; entry [(i*db+k), (j*db+l)] = a[i,j] * b[k,l]."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    dim = a.shape[0] * b.shape[0]
    if dim not in (4, 6):
        raise DimensionError(f"unsupported kron result dimension {dim}")
    da, db = a.shape[0], b.shape[0]
    out = np.zeros((dim, dim), dtype=np.complex128)
    for i in range(da):
        for j in range(da):
            out[i * db:(i + 1) * db, j * db:(j + 1) * db] = a[i, j] * b
    return out


def direct_sum(a, b) -> np.ndarray:
    """Block-diagonal matrix [[a, 0], [0, b]]."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    da, db = a.shape[0], b.shape[0]
    if da + db not in (4, 6):
        raise DimensionError(f"unsupported direct-sum dimension {da + db}")
    out = np.zeros((da + db, da + db), dtype=np.complex128)
    out[:da, :da] = a
    out[da:, da:] = b
    return out


def _off_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def hermitian_eigenvalues(h) -> list[float]:
    """Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.

    Returned in descending order. Raises ConvergenceError if the off-diagonal
    Frobenius norm is still above ``JACOBI_TOL`` (relative to the matrix norm)
    after ``JACOBI_MAX_SWEEPS`` sweeps.
    """
    a = as_matrix(h).copy()
    a = 0.5 * (a + a.conj().T)
    n = a.shape[0]
    scale = max(np.linalg.norm(a), 1.0)
    for _ in range(JACOBI_MAX_SWEEPS):
        off = _off_norm(a)
        if off <= JACOBI_TOL * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                app, aqq = a[p, p].real, a[q, q].real
                # Unit phase reduces the block to a real symmetric one; then a
                # standard real Jacobi rotation zeroes it.
                phase = apq / mag
                tau = (aqq - app) / (2.0 * mag)
                if abs(tau) > 1e150:
                    t = 0.5 / tau
                else:
                    t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                rot = np.eye(n, dtype=np.complex128)
                rot[p, p] = c
                rot[p, q] = s
                rot[q, p] = -s * np.conj(phase)
                rot[q, q] = c * np.conj(phase)
                a = rot.conj().T @ a @ rot
                a[p, q] = a[q, p] = 0.0
    else:
        off = _off_norm(a)
        if off > JACOBI_TOL * scale:
            raise ConvergenceError("Jacobi eigensolver did not converge")
    return sorted((float(x.real) for x in np.diag(a)), reverse=True)


def singular_values(a) -> list[float]:
    """Singular values, descending, from the eigenvalues of a^dagger a."""
    a = as_matrix(a)
    evals = hermitian_eigenvalues(a.conj().T @ a)
    return sorted((math.sqrt(max(ev, 0.0)) for ev in evals), reverse=True)


def frobenius_distance(a, b) -> float:
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    _same_dim(a, b)
    return float(np.linalg.norm(a - b))


def unitarity_defect(a) -> float:
    """Frobenius norm of a^dagger a - I."""
    a = as_matrix(a)
    return float(np.linalg.norm(a.conj().T @ a - np.eye(a.shape[0])))
