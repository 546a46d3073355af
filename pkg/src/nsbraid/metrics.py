"""Gate-distance functionals for one- and two-qubit braid words."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg

SQ2 = 1 / math.sqrt(2)

BELL_Q = SQ2 * np.array(
    [
        [1, 0, 0, 1j],
        [0, 1j, 1, 0],
        [0, 1j, -1, 0],
        [1, 0, 0, -1j],
    ],
    dtype=np.complex128,
)
BELL_Q.setflags(write=False)

H_GATE = SQ2 * np.array([[1, 1], [1, -1]], dtype=np.complex128)
T_GATE = np.diag([1, np.exp(1j * math.pi / 4)]).astype(np.complex128)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
)
CZ = np.diag([1, 1, 1, -1]).astype(np.complex128)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128
)
for _m in (H_GATE, T_GATE, CNOT, CZ, SWAP):
    _m.setflags(write=False)

TARGETS = {"H": H_GATE, "T": T_GATE, "CNOT": CNOT}

CNOT_INVARIANTS = (0.0, 0.0, 1.0)
DET_GUARD = 1e-12
G3_IMAG_TOL = 1e-9


class InvariantsUndefined(ArithmeticError):
    pass


@dataclass(frozen=True)
class LocalInvariants:
    g1: float
    g2: float
    g3: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.g1, self.g2, self.g3)


def phase_distance(u0, u) -> float:
    """Global-phase-invariant distance sqrt(1 - |Tr(u0 u^dagger)| / 2) for 2x2 gates."""
    u0 = linalg.as_matrix(u0)
    u = linalg.as_matrix(u)
    if u0.shape != (2, 2) or u.shape != (2, 2):
        raise linalg.DimensionError("phase_distance is defined for 2x2 matrices only")
    overlap = abs(np.trace(u0 @ u.conj().T)) / 2
    return math.sqrt(max(0.0, 1.0 - overlap))


def bell_conjugate(u) -> np.ndarray:
    u = linalg.as_matrix(u)
    if u.shape != (4, 4):
        raise linalg.DimensionError("bell_conjugate expects a 4x4 matrix")
    return BELL_Q.conj().T @ u @ BELL_Q


def makhlin_invariants(u, check_unitary_g3: bool | None = None) -> LocalInvariants:
    """(g1, g2, g3) from m = U_B^T U_B in the Bell basis.

    The imaginary part of g3 is only asserted small when the input is unitary
    (or when ``check_unitary_g3`` forces it); leaky blocks report the real part.
    """
    u = linalg.as_matrix(u)
    det = linalg.determinant(u)
    if abs(det) <= DET_GUARD:
        raise InvariantsUndefined(f"invariants undefined: |det| = {abs(det):.3e}")
    ub = bell_conjugate(u)
    m = ub.T @ ub
    tr = np.trace(m)
    tr2 = tr * tr
    g12 = tr2 / (16 * det)
    g3 = (tr2 - np.trace(m @ m)) / (4 * det)
    if check_unitary_g3 is None:
        check_unitary_g3 = linalg.unitarity_defect(u) < 1e-9
    if check_unitary_g3 and abs(g3.imag) >= G3_IMAG_TOL:
        raise InvariantsUndefined(f"g3 has imaginary part {g3.imag:.3e} for unitary input")
    return LocalInvariants(float(g12.real), float(g12.imag), float(g3.real))


def cnot_class_distance(a) -> float:
    """Sum of squared invariant differences from the [CNOT] class (0, 0, 1)."""
    g = makhlin_invariants(a).as_tuple()
    return sum((x - y) ** 2 for x, y in zip(g, CNOT_INVARIANTS))


def unitarity_measure(a) -> float:
    """Nuclear norm of a^dagger a - I (zero iff ``a`` is unitary)."""
    a = linalg.as_matrix(a)
    if a.shape != (4, 4):
        raise linalg.DimensionError("unitarity_measure expects a 4x4 matrix")
    return float(sum(linalg.singular_values(a.conj().T @ a - np.eye(4))))


def computational_block(b) -> tuple[np.ndarray, np.ndarray]:
    """Split a 6x6 braid matrix into its computational 4x4 and leakage 2x2 blocks."""
    b = linalg.as_matrix(b)
    if b.shape != (6, 6):
        raise linalg.DimensionError("computational_block expects a 6x6 matrix")
    return b[:4, :4].copy(), b[4:, 4:].copy()


# Batched forms used by the enumerators. Same formulas over a stack of
# matrices; eigvalsh stands in for the Jacobi solver (x = a^dagger a - I is
# Hermitian, so its singular values are |eigenvalues|).


def phase_distance_batch(mats: np.ndarray, target: np.ndarray) -> np.ndarray:
    overlap = np.abs(np.einsum("...ij,ji->...", mats, target.conj().T)) / 2
    return np.sqrt(np.maximum(0.0, 1.0 - overlap))


def cnot_scores_batch(blocks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(d_cnot, d_u) for a stack of 4x4 computational blocks.

    Near-singular blocks get d_cnot = inf.
    """
    det = np.linalg.det(blocks)
    ub = np.einsum("ij,...jk,kl->...il", BELL_Q.conj().T, blocks, BELL_Q)
    m = np.einsum("...ji,...jk->...ik", ub, ub)
    tr = np.einsum("...ii->...", m)
    tr2 = tr * tr
    trm2 = np.einsum("...ij,...ji->...", m, m)
    ok = np.abs(det) > DET_GUARD
    safe = np.where(ok, det, 1.0)
    g12 = tr2 / (16 * safe)
    g3 = ((tr2 - trm2) / (4 * safe)).real
    d_cnot = g12.real ** 2 + g12.imag ** 2 + (g3 - 1.0) ** 2
    d_cnot = np.where(ok, d_cnot, np.inf)
    x = np.einsum("...ji,...jk->...ik", blocks.conj(), blocks) - np.eye(4)
    d_u = np.abs(np.linalg.eigvalsh(x)).sum(axis=-1)
    return d_cnot, d_u
