"""Solovay-Kitaev recursion with a Monte Carlo level-0 approximator."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import linalg
from .anyon_model import GeneratorSet
from .metrics import phase_distance
from .search import (
    OneQubitDistance,
    SearchConfig,
    evaluate,
    mc_search,
    substream_seed,
    word_inverse,
)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)

MAX_COMMUTATOR_ANGLE = math.pi / 2
BISECTION_TOL = 1e-14

# An approximator maps an SU(2) target to (word, matrix of that word).
Approximator = Callable[[np.ndarray], tuple[str, np.ndarray]]


class CommutatorAngleOverflow(ValueError):
    pass


@dataclass(frozen=True)
class AxisAngle:
    axis: tuple[float, float, float]
    angle: float


@dataclass(frozen=True)
class LevelRecord:
    level: int
    matrix: np.ndarray
    word: str
    distance: float

    @property
    def word_length(self) -> int:
        return len(self.word)


@dataclass(frozen=True)
class SkaTrace:
    levels: tuple[LevelRecord, ...]

    @property
    def final(self) -> LevelRecord:
        return self.levels[-1]

    @property
    def distances(self) -> list[float]:
        return [rec.distance for rec in self.levels]


def project_su2(u) -> np.ndarray:
    """Rescale a 2x2 matrix to determinant one (principal square root)."""
    u = linalg.as_matrix(u)
    det = linalg.determinant(u)
    if abs(det) <= 1e-12:
        raise ZeroDivisionError("near-singular matrix cannot be projected to SU(2)")
    return u / cmath.sqrt(det)


def from_axis_angle(axis, angle: float) -> np.ndarray:
    """cos(angle/2) I - i sin(angle/2) (n . sigma)."""
    nx, ny, nz = axis
    return math.cos(angle / 2) * np.eye(2, dtype=np.complex128) - 1j * math.sin(angle / 2) * (
        nx * PAULI_X + ny * PAULI_Y + nz * PAULI_Z
    )


def axis_angle(u) -> AxisAngle:
    """Axis and angle of an SU(2) element, folded to angle in [0, pi].

    ``u`` and ``-u`` are the same rotation; the sign is chosen so that
    cos(angle/2) >= 0. The identity gets the z axis.
    """
    u = linalg.as_matrix(u)
    if abs(linalg.determinant(u) - 1) > 1e-10:
        raise ValueError("axis_angle expects a determinant-one matrix")
    a, b = u[0, 0], u[0, 1]
    if a.real < 0:
        a, b = -a, -b
    c = min(1.0, a.real)
    vec = np.array([-b.imag, -b.real, -a.imag])
    s = float(np.linalg.norm(vec))
    angle = 2 * math.atan2(s, c)
    if s < 1e-15:
        return AxisAngle((0.0, 0.0, 1.0), 0.0)
    n = vec / s
    return AxisAngle((float(n[0]), float(n[1]), float(n[2])), angle)


def _commutator(v, w):
    return v @ w @ v.conj().T @ w.conj().T


def _balanced_phi(theta: float) -> float:
    """Solve sin(theta/2) = 2 sin^2(phi/2) sqrt(1 - sin^4(phi/2)) for phi."""
    target = math.sin(theta / 2)

    def f(phi):
        s2 = math.sin(phi / 2) ** 2
        return 2 * s2 * math.sqrt(1 - s2 * s2)

    lo, hi = 0.0, math.pi / 2
    while hi - lo > BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        if f(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _aligning_rotation(src, dst) -> np.ndarray:
    """SU(2) element whose conjugation action turns unit vector src into dst."""
    src = np.asarray(src, dtype=float)
    dst = np.asarray(dst, dtype=float)
    cross = np.cross(src, dst)
    dot = float(np.clip(src @ dst, -1.0, 1.0))
    norm = float(np.linalg.norm(cross))
    if norm < 1e-15:
        if dot > 0:
            return np.eye(2, dtype=np.complex128)
        # Antiparallel: any axis perpendicular to src works.
        trial = np.array([1.0, 0.0, 0.0]) if abs(src[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        perp = np.cross(src, trial)
        perp /= np.linalg.norm(perp)
        return from_axis_angle(perp, math.pi)
    return from_axis_angle(cross / norm, math.atan2(norm, dot))


def gc_decompose(delta) -> tuple[np.ndarray, np.ndarray]:
    """Balanced group commutator: v w v^dag w^dag = delta (up to sign).

    ``v`` and ``w`` are rotations by the same angle phi about orthogonal
    axes, conjugated so that their commutator's axis matches delta's.
    """
    delta = linalg.as_matrix(delta)
    aa = axis_angle(delta)
    if aa.angle >= MAX_COMMUTATOR_ANGLE:
        raise CommutatorAngleOverflow(f"commutator angle overflow: {aa.angle:.4f} rad")
    if aa.angle == 0.0:
        eye = np.eye(2, dtype=np.complex128)
        return eye, eye.copy()
    phi = _balanced_phi(aa.angle)
    v0 = from_axis_angle((1.0, 0.0, 0.0), phi)
    w0 = from_axis_angle((0.0, 1.0, 0.0), phi)
    comm = axis_angle(_commutator(v0, w0))
    s = _aligning_rotation(comm.axis, aa.axis)
    sd = s.conj().T
    return s @ v0 @ sd, s @ w0 @ sd


def _canonical_su2(u) -> np.ndarray:
    u = project_su2(u)
    tr = u[0, 0] + u[1, 1]
    return -u if tr.real < 0 or (tr.real == 0 and u[0, 0].imag < 0) else u


def solovay_kitaev(target, n: int, base: Approximator) -> SkaTrace:
    """Level-n Solovay-Kitaev approximation of a one-qubit target.

    Level 0 is ``base(target)``. Level k corrects level k-1 with the
    commutator of level-(k-1) approximations of the factors of
    target * U_{k-1}^dag, giving U_k = V W V^dag W^dag U_{k-1}. With the
    first-letter-first word convention the word is
    ``u + inv(w) + inv(v) + w + v``, five times the previous length.
    """
    if n < 0:
        raise ValueError("level must be non-negative")
    target = linalg.as_matrix(target)
    goal = _canonical_su2(target)

    def recurse(u_su2, level):
        if level == 0:
            return base(u_su2)
        word, mat = recurse(u_su2, level - 1)
        return _refine(u_su2, word, mat, level)

    def _refine(u_su2, word, mat, level):
        delta = _canonical_su2(u_su2 @ project_su2(mat).conj().T)
        v, w = gc_decompose(delta)
        v_word, v_mat = recurse(v, level - 1)
        w_word, w_mat = recurse(w, level - 1)
        new_word = word + word_inverse(w_word) + word_inverse(v_word) + w_word + v_word
        new_mat = _commutator(v_mat, w_mat) @ mat
        return new_word, new_mat

    records = []
    word, mat = base(goal)
    records.append(LevelRecord(0, mat, word, phase_distance(mat, target)))
    for level in range(1, n + 1):
        word, mat = _refine(goal, word, mat, level)
        records.append(LevelRecord(level, mat, word, phase_distance(mat, target)))
    return SkaTrace(tuple(records))


def _memo_key(u) -> tuple:
    """Entries rounded to 1e-12 with the +-1 ambiguity removed.

    The sign is fixed by making the first non-zero rounded component
    positive, so u and -u (and tiny perturbations) share one key.
    """
    v = np.round(np.concatenate([u.real.ravel(), u.imag.ravel()]), 12)
    nz = np.flatnonzero(v)
    if nz.size and v[nz[0]] < 0:
        v = -v
    return tuple(v + 0.0)


def mc_base(g: GeneratorSet, base_cfg: SearchConfig, restarts: int = 1) -> Approximator:
    """Memoized Monte Carlo approximator for ``solovay_kitaev``.

    Invocation i (in call order) runs ``restarts`` searches on seed
    substreams ``i * restarts + j`` of ``base_cfg.seed`` and keeps the best.
    Targets equal to 1e-12 per entry share one cached answer.
    """
    cache: dict[tuple, tuple[str, np.ndarray]] = {}
    counter = [0]

    def approximate(u):
        u = project_su2(u)
        key = _memo_key(u)
        if key in cache:
            return cache[key]
        i = counter[0]
        counter[0] += 1
        best = None
        for j in range(restarts):
            cfg = SearchConfig(
                base_cfg.length,
                OneQubitDistance(u),
                base_cfg.tolerance,
                base_cfg.max_sweeps,
                substream_seed(base_cfg.seed, i * restarts + j),
            )
            res = mc_search(g, cfg)
            if best is None or res.best_score < best.best_score:
                best = res
        word = best.best_word.letters
        cache[key] = (word, evaluate(word, g))
        return cache[key]

    return approximate


def mc_enhanced_ska(target, n: int, g: GeneratorSet, base_cfg: SearchConfig, restarts: int = 1) -> SkaTrace:
    """Solovay-Kitaev with Monte Carlo search as the level-0 approximator."""
    if g.arity != 1:
        raise ValueError("mc_enhanced_ska needs the one-qubit generator set")
    return solovay_kitaev(target, n, mc_base(g, base_cfg, restarts))
