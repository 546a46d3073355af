"""Non-semisimple Ising anyon data and elementary braiding matrices (EBMs).

One qubit is encoded in a neglecton ``alpha`` followed by two Ising anyons,
with basis ``|0> = |alpha+1>``, ``|1> = |alpha-1>`` (intermediate fusion
channel). Two qubits use four Ising anyons and the six-state basis
``(|00>, |01>, |10>, |11>, |NC1>, |NC2>)``.

Phases are written as powers of the eighth root of unity ``q = exp(i pi/4)``
and evaluated as ``q**x = exp(i pi x / 4)`` for real ``x``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from . import linalg

Q = cmath.exp(1j * math.pi / 4)

ONE_QUBIT_LETTERS = "ABCD"
TWO_QUBIT_LETTERS = "ABCDEFGH"
TWO_QUBIT_BASIS = ("00", "01", "10", "11", "NC1", "NC2")

# Exponents k in R = q**k. Resolved by ``resolve_r_symbols`` against the
# J4 identity and the word-G reference values; they coincide with the eigenvalues
# of the one-qubit b2 matrix.
R_I_EXPONENT = 5 / 2
R_PSI_EXPONENT = 1 / 2

UNITARITY_TOL = 1e-8
J4_TOL = 1e-9


class ModelError(ArithmeticError):
    """Raised when the anyon data fails an internal consistency check."""


def qpow(x: float) -> complex:
    """``q**x`` on the principal branch, i.e. ``exp(i pi x / 4)``."""
    return cmath.exp(1j * math.pi * x / 4)


def _cot(x: float) -> float:
    return math.cos(x) / math.sin(x)


@dataclass(frozen=True)
class AnyonParams:
    alpha: float
    q: complex = field(default=Q, init=False)

    def __post_init__(self):
        if not (isinstance(self.alpha, (int, float)) and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be a finite real, got {self.alpha!r}")
        if not 2.0 < self.alpha < 3.0:
            raise ValueError(f"alpha must lie strictly inside (2, 3), got {self.alpha}")
        object.__setattr__(self, "alpha", float(self.alpha))

    @classmethod
    def from_grid(cls, k: int) -> "AnyonParams":
        """alpha = 2 + k/1000, built from the integer index to avoid drift."""
        return cls(2.0 + k / 1000.0)


def alpha_grid(start: int = 1, stop: int = 999) -> list[float]:
    """The alpha sweep grid 2 + k/1000 for k in [start, stop]."""
    return [2.0 + k / 1000.0 for k in range(start, stop + 1)]


# ---------------------------------------------------------------- fusion rules


@dataclass(frozen=True, order=True)
class Neglecton:
    """Member ``alpha + shift`` of the neglecton family."""

    shift: int = 0

    def __str__(self):
        if self.shift == 0:
            return "alpha"
        return f"alpha{self.shift:+d}"


I, SIGMA, PSI, P2, S32 = "I", "sigma", "psi", "P2", "S3/2"
SIMPLE_LABELS = (I, SIGMA, PSI, P2, S32)

_FUSION = {
    (SIGMA, SIGMA): [I, PSI],
    (SIGMA, PSI): [SIGMA, S32],
    (SIGMA, S32): [P2],
    (PSI, PSI): [I, P2],
}


class FusionError(KeyError):
    pass


def fuse(a, b) -> list:
    """Fusion outcomes of two labels, in the order listed by the fusion table.

    Only channels that appear in the model's fusion table are known; anything
    else raises FusionError("unknown fusion channel").
    """
    if b == I:
        return [a]
    if a == I:
        return [b]
    if isinstance(b, Neglecton) and not isinstance(a, Neglecton):
        a, b = b, a
    if isinstance(a, Neglecton):
        if b == SIGMA:
            return [Neglecton(a.shift + 1), Neglecton(a.shift - 1)]
        if b == PSI:
            return [Neglecton(a.shift + 2), Neglecton(a.shift), Neglecton(a.shift - 2)]
        raise FusionError(f"unknown fusion channel: {a} x {b}")
    if (a, b) in _FUSION:
        return list(_FUSION[(a, b)])
    if (b, a) in _FUSION:
        return list(_FUSION[(b, a)])
    raise FusionError(f"unknown fusion channel: {a} x {b}")


# ------------------------------------------------------------ one-qubit EBMs


@dataclass(frozen=True)
class EbmCoefficients:
    b_alpha_plus_1: float
    b_alpha_minus_1: float


def ebm_coefficients(p: AnyonParams) -> EbmCoefficients:
    a = p.alpha
    return EbmCoefficients(
        b_alpha_plus_1=math.sqrt(2) / (-1 + _cot(math.pi * (a + 1) / 4)),
        b_alpha_minus_1=math.sqrt(2) / (-1 + _cot(math.pi * a / 4)),
    )


@dataclass(frozen=True)
class GeneratorSet:
    """Letter-indexed EBM alphabet; matrices are read-only arrays."""

    alpha: float
    arity: int
    letters: Mapping[str, np.ndarray]
    inverse_of: Mapping[str, str]

    @property
    def alphabet(self) -> str:
        return "".join(self.letters)

    @property
    def dim(self) -> int:
        return 2 if self.arity == 1 else 6

    def __getitem__(self, letter: str) -> np.ndarray:
        return self.letters[letter]


def _freeze(mats: dict[str, np.ndarray]) -> Mapping[str, np.ndarray]:
    out = {}
    for k, m in mats.items():
        m = np.array(m, dtype=np.complex128)
        m.setflags(write=False)
        out[k] = m
    return MappingProxyType(out)


def _checked_inverse(m: np.ndarray) -> np.ndarray:
    if linalg.unitarity_defect(m) < UNITARITY_TOL:
        return linalg.adjoint(m)
    return linalg.inverse(m)


def b1_squared(p: AnyonParams) -> np.ndarray:
    a = p.alpha
    return np.diag([qpow(3 + a), qpow(3 - a)]).astype(np.complex128)


def b2(p: AnyonParams) -> np.ndarray:
    a = p.alpha
    c = ebm_coefficients(p)
    # Ratio of square roots of two negative reals: real and positive under the
    # principal branch.
    ratio = cmath.sqrt(c.b_alpha_plus_1) / cmath.sqrt(c.b_alpha_minus_1)
    assert abs(ratio.imag) < 1e-12 and ratio.real > 0
    off = ratio / Q
    q2 = Q * Q
    m = qpow(0.5) * np.array(
        [
            [(1 + q2) / (1 - qpow(2 * a)), off],
            [off, (1 + q2) / (1 - qpow(-2 * a))],
        ],
        dtype=np.complex128,
    )
    return m


def one_qubit_generators(p: AnyonParams) -> GeneratorSet:
    """Alphabet A=(b1)^2, B=b2, C=A^-1, D=B^-1."""
    a_mat = b1_squared(p)
    b_mat = b2(p)
    defect = linalg.unitarity_defect(b_mat)
    if defect > UNITARITY_TOL:
        raise ModelError(f"model construction failure: b2 unitarity defect {defect:.3e}")
    mats = {
        "A": a_mat,
        "B": b_mat,
        "C": _checked_inverse(a_mat),
        "D": _checked_inverse(b_mat),
    }
    inv = {"A": "C", "B": "D", "C": "A", "D": "B"}
    return GeneratorSet(p.alpha, 1, _freeze(mats), MappingProxyType(inv))


# ------------------------------------------------------ F, R and bubbles


def bubble_table(p: AnyonParams) -> dict[tuple, float]:
    """Bubble-pop coefficients keyed by ``(d, a, b)`` for ``B_d^{ab}``.

    Neglecton labels are keyed by their integer shift from alpha.
    """
    return _bubble_values(p.alpha)


def _bubble_values(a: float) -> dict[tuple, float]:
    t = math.tan(math.pi * a / 4)
    ct = _cot(math.pi * a / 4)
    n = Neglecton
    return {
        (n(0), n(0), I): 1.0,
        (n(1), n(0), SIGMA): 1.0,
        (n(2), n(0), PSI): 1.0,
        (PSI, SIGMA, SIGMA): 1.0,
        (S32, PSI, SIGMA): 1.0,
        (S32, SIGMA, PSI): 1.0,
        (I, SIGMA, SIGMA): -math.sqrt(2),
        (SIGMA, PSI, SIGMA): -1 / math.sqrt(2),
        (SIGMA, SIGMA, PSI): -math.sqrt(2),
        (n(-1), n(0), SIGMA): math.sqrt(2) / (-1 + ct),
        (n(0), n(2), PSI): 2 * ct,
        (n(0), n(0), PSI): math.sqrt(2) * math.cos(math.pi * a / 2) / (1 - math.sin(math.pi * a / 2)),
        (n(1), n(0), S32): math.sqrt(2) / (1 - t),
        (n(-1), n(0), S32): (2 + 2 * t) / (-1 + ct),
    }


def _bubble(a: float, d, x, y) -> float:
    """B_d^{xy} with neglecton labels given relative to ``alpha = a``.

    The neglecton closed forms are written for the family member ``alpha``;
    for ``alpha + k`` they hold with alpha replaced, so the lookup re-bases
    every label on ``x``.
    """
    if not isinstance(x, Neglecton):
        return _bubble_values(a)[(d, x, y)]

    def rebase(lab):
        return Neglecton(lab.shift - x.shift) if isinstance(lab, Neglecton) else lab

    return _bubble_values(a + x.shift)[(rebase(d), Neglecton(0), rebase(y))]


def raw_f_matrix(a: float, sign: int) -> np.ndarray:
    """Unnormalized F^{x sigma sigma}_x for x = alpha + sign.

    Rows are the sigma-sigma channel (I, psi); columns the intermediate
    neglecton (x+1, x-1).
    """
    x = a + sign
    z = qpow(2 * x)
    pref = 1 / (math.sqrt(2) * (z - 1))
    return pref * np.array(
        [
            [Q * (z + Q * Q), -(z - 1)],
            [z - Q * Q, Q * (z - 1)],
        ],
        dtype=np.complex128,
    )


def normalized_f_matrix(a: float, sign: int) -> np.ndarray:
    """F^{x sigma sigma}_x rescaled by the bubble-pop square-root ratio."""
    raw = raw_f_matrix(a, sign)
    xn = Neglecton(sign)
    channels = (I, PSI)
    mids = (Neglecton(sign + 1), Neglecton(sign - 1))
    out = np.empty((2, 2), dtype=np.complex128)
    for i, nlab in enumerate(channels):
        for j, mlab in enumerate(mids):
            num = cmath.sqrt(_bubble(a, xn, xn, nlab)) * cmath.sqrt(_bubble(a, nlab, SIGMA, SIGMA))
            den = cmath.sqrt(_bubble(a, xn, mlab, SIGMA)) * cmath.sqrt(_bubble(a, mlab, xn, SIGMA))
            if abs(den) < 1e-300:
                raise ModelError(f"degenerate alpha {a}: vanishing bubble denominator")
            out[i, j] = num / den * raw[i, j]
    return out


@dataclass(frozen=True)
class ModelData:
    r_i: complex
    r_psi: complex
    f_plus: np.ndarray
    f_minus: np.ndarray
    bubble: Mapping[tuple, float]


def model_data(p: AnyonParams, r_exponents=(R_I_EXPONENT, R_PSI_EXPONENT)) -> ModelData:
    f_plus = normalized_f_matrix(p.alpha, +1)
    f_minus = normalized_f_matrix(p.alpha, -1)
    for f in (f_plus, f_minus):
        if abs(linalg.determinant(f)) < 1e-12:
            raise ModelError(f"degenerate alpha {p.alpha}: singular F-matrix")
    f_plus.setflags(write=False)
    f_minus.setflags(write=False)
    return ModelData(
        r_i=qpow(r_exponents[0]),
        r_psi=qpow(r_exponents[1]),
        f_plus=f_plus,
        f_minus=f_minus,
        bubble=MappingProxyType(bubble_table(p)),
    )


# ------------------------------------------------------------ two-qubit EBMs


def b3_five(p: AnyonParams, r_exponents=(R_I_EXPONENT, R_PSI_EXPONENT)) -> np.ndarray:
    """The mixing generator b3 on the six-state two-qubit basis.

    |01> and |10> only admit the psi channel and pick up R_psi. The pairs
    (|NC1>, |00>) and (|11>, |NC2>) are mixed by F^-1 diag(R_I, R_psi) F,
    with F columns ordered by intermediate neglecton (x+1, x-1).
    """
    data = model_data(p, r_exponents)
    r = np.diag([data.r_i, data.r_psi])
    out = np.zeros((6, 6), dtype=np.complex128)
    for f, idx in ((data.f_plus, (4, 0)), (data.f_minus, (3, 5))):
        block = linalg.inverse(f) @ r @ f
        for i in range(2):
            for j in range(2):
                out[idx[i], idx[j]] = block[i, j]
    out[1, 1] = data.r_psi
    out[2, 2] = data.r_psi
    return out


def two_qubit_generators(p: AnyonParams, r_exponents=(R_I_EXPONENT, R_PSI_EXPONENT), check_j4: bool = True) -> GeneratorSet:
    """Alphabet A=(b1)^2, B=b2, C=A^-1, D=B^-1, E=b3, F=b4, G=E^-1, H=F^-1."""
    i2 = np.eye(2, dtype=np.complex128)
    a1 = b1_squared(p)
    b21 = b2(p)
    half = qpow(0.5) * i2
    a_mat = linalg.direct_sum(linalg.kron(a1, i2), a1)
    b_mat = linalg.direct_sum(linalg.kron(b21, i2), half)
    f_mat = linalg.direct_sum(linalg.kron(i2, b21), half)
    e_mat = b3_five(p, r_exponents)
    mats = {
        "A": a_mat,
        "B": b_mat,
        "C": _checked_inverse(a_mat),
        "D": _checked_inverse(b_mat),
        "E": e_mat,
        "F": f_mat,
        "G": linalg.inverse(e_mat),
        "H": _checked_inverse(f_mat),
    }
    if check_j4:
        defect = _j4_defect(p, a_mat, b_mat, e_mat)
        if defect > J4_TOL:
            raise ModelError(f"R-symbol convention failure: J4 defect {defect:.3e}")
    inv = {"A": "C", "B": "D", "C": "A", "D": "B", "E": "G", "F": "H", "G": "E", "H": "F"}
    return GeneratorSet(p.alpha, 2, _freeze(mats), MappingProxyType(inv))


def j4_target(p: AnyonParams) -> np.ndarray:
    a = p.alpha
    return linalg.direct_sum(
        linalg.kron(np.eye(2), b1_squared(p)),
        np.diag([qpow(1 - a), qpow(1 + a)]),
    )


def _j4_defect(p, a_mat, b_mat, e_mat) -> float:
    prod = e_mat @ b_mat @ a_mat @ b_mat @ e_mat
    return linalg.frobenius_distance(prod, j4_target(p))


def j4_defect(p: AnyonParams, r_exponents=(R_I_EXPONENT, R_PSI_EXPONENT)) -> float:
    """Distance between b3 b2 (b1)^2 b2 b3 and I2 x (b1)^2 + diag(q^(1-a), q^(1+a))."""
    g = two_qubit_generators(p, r_exponents, check_j4=False)
    return _j4_defect(p, g["A"], g["B"], g["E"])


# ----------------------------------------------------- R-symbol resolution

# (r_I, r_psi) exponent pairs tried by ``resolve_r_symbols``. The literal
# printed pair (2/5, 1/5), the usual Ising half-integer exponents, and the
# digit-transposed reading (5/2, 1/2).
R_CANDIDATES = (
    [(2 / 5, 1 / 5)]
    + [(x, y) for x in (0.5, -0.5, 1.5, -1.5) for y in (0.5, -0.5, 1.5, -1.5) if x != y]
    + [(5 / 2, 1 / 2)]
)

WORD_G_REFERENCE = (
    (2.031, 6.184e-13, 0.09758),
    (2.047, 1.730e-11, 0.14833),
    (2.063, 1.808e-10, 0.19955),
)


def resolve_r_symbols(candidates=R_CANDIDATES, grid_step: int = 37) -> list[tuple[float, float]]:
    """Exponent pairs passing the J4 identity on a grid and the reference values for word G.

    Returns every accepted pair in candidate order; the module constants are
    the first survivor.
    """
    from .metrics import cnot_class_distance, computational_block, unitarity_measure

    accepted = []
    for pair in candidates:
        ok = True
        for k in range(1, 1000, grid_step):
            if j4_defect(AnyonParams.from_grid(k), pair) >= J4_TOL:
                ok = False
                break
        if ok:
            for a, dc, du in WORD_G_REFERENCE:
                g = two_qubit_generators(AnyonParams(a), pair, check_j4=False)
                block, _ = computational_block(g["G"])
                if abs(cnot_class_distance(block) - dc) >= 1e-9 or abs(unitarity_measure(block) - du) >= 1e-4:
                    ok = False
                    break
        if ok:
            accepted.append(pair)
    return accepted
