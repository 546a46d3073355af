import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nsbraid import metrics
from nsbraid.linalg import DimensionError
from conftest import random_complex, random_unitary


def local(rng):
    return np.kron(random_unitary(rng, 2), random_unitary(rng, 2))


def test_phase_distance_basic():
    # sqrt(1 - overlap) turns a 1-ulp overlap error into ~1.5e-8.
    assert metrics.phase_distance(metrics.H_GATE, metrics.H_GATE) < 1e-7
    assert metrics.phase_distance(np.exp(0.7j) * metrics.T_GATE, metrics.T_GATE) < 1e-7
    # Orthogonal under the trace inner product: |Tr| = 0.
    x = np.array([[0, 1], [1, 0]])
    assert math.isclose(metrics.phase_distance(np.eye(2), x), 1.0)
    with pytest.raises(DimensionError):
        metrics.phase_distance(np.eye(4), np.eye(4))


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_phase_distance_symmetric_and_bounded(seed):
    rng = np.random.default_rng(seed)
    u, v = random_unitary(rng, 2), random_unitary(rng, 2)
    d = metrics.phase_distance(u, v)
    assert 0.0 <= d <= 1.0
    assert abs(d - metrics.phase_distance(v, u)) < 1e-12


def test_bell_q_is_unitary():
    q = metrics.BELL_Q
    assert np.abs(q.conj().T @ q - np.eye(4)).max() < 1e-15


@pytest.mark.parametrize(
    "gate,expected",
    [(metrics.CNOT, (0, 0, 1)), (np.eye(4), (1, 0, 3)), (metrics.SWAP, (-1, 0, -3)), (metrics.CZ, (0, 0, 1))],
)
def test_makhlin_reference_gates(gate, expected):
    g = metrics.makhlin_invariants(gate).as_tuple()
    assert np.allclose(g, expected, atol=1e-12)


def test_makhlin_direct_formula_for_swap():
    # Independent oracle: swap_B^T swap_B has trace and squared trace known by hand.
    ub = metrics.BELL_Q.conj().T @ metrics.SWAP @ metrics.BELL_Q
    m = ub.T @ ub
    det = np.linalg.det(metrics.SWAP)
    g1 = (np.trace(m) ** 2 / (16 * det)).real
    g3 = ((np.trace(m) ** 2 - np.trace(m @ m)) / (4 * det)).real
    assert math.isclose(g1, -1, abs_tol=1e-12) and math.isclose(g3, -3, abs_tol=1e-12)


def test_makhlin_local_invariance(rng):
    base = random_unitary(rng, 4)
    ref = np.array(metrics.makhlin_invariants(base).as_tuple())
    for _ in range(50):
        u = local(rng) @ base @ local(rng)
        assert np.abs(np.array(metrics.makhlin_invariants(u).as_tuple()) - ref).max() < 1e-9


def test_makhlin_singular_raises():
    with pytest.raises(metrics.InvariantsUndefined):
        metrics.makhlin_invariants(np.zeros((4, 4)))


def test_cnot_class_distance():
    assert metrics.cnot_class_distance(metrics.CNOT) < 1e-24
    assert math.isclose(metrics.cnot_class_distance(np.eye(4)), 1 + 4, abs_tol=1e-12)


def test_unitarity_measure_is_nuclear_norm(rng):
    a = random_complex(rng, 4) * 0.2 + np.eye(4)
    x = a.conj().T @ a - np.eye(4)
    assert math.isclose(metrics.unitarity_measure(a), np.linalg.norm(x, "nuc"), rel_tol=1e-10)
    assert metrics.unitarity_measure(random_unitary(rng, 4)) < 1e-12


def test_computational_block_split():
    b = np.arange(36, dtype=complex).reshape(6, 6)
    a, m = metrics.computational_block(b)
    assert np.array_equal(a, b[:4, :4]) and np.array_equal(m, b[4:, 4:])
    with pytest.raises(DimensionError):
        metrics.computational_block(np.eye(4))


def test_batch_forms_agree_with_scalar(rng):
    mats = np.stack([random_unitary(rng, 2) for _ in range(10)])
    batch = metrics.phase_distance_batch(mats, metrics.H_GATE)
    assert np.allclose(batch, [metrics.phase_distance(m, metrics.H_GATE) for m in mats], atol=1e-12)

    blocks = np.stack([random_unitary(rng, 4) * 0.9 + 0.05 * random_complex(rng, 4) for _ in range(10)])
    dc, du = metrics.cnot_scores_batch(blocks)
    for b, c, u in zip(blocks, dc, du):
        assert math.isclose(c, metrics.cnot_class_distance(b), rel_tol=1e-9, abs_tol=1e-12)
        assert math.isclose(u, metrics.unitarity_measure(b), rel_tol=1e-9)
