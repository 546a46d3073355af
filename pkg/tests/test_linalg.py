import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nsbraid import linalg
from conftest import random_complex, random_unitary

DIMS = (2, 4, 6)


def seeded(seed, n):
    return random_complex(np.random.default_rng(seed), n)


@pytest.mark.parametrize("n", DIMS)
def test_determinant_matches_numpy(rng, n):
    for _ in range(20):
        a = random_complex(rng, n)
        assert abs(linalg.determinant(a) - np.linalg.det(a)) < 1e-10 * max(1, abs(np.linalg.det(a)))


@pytest.mark.parametrize("n", DIMS)
def test_inverse_is_two_sided(rng, n):
    a = random_complex(rng, n)
    inv = linalg.inverse(a)
    assert np.abs(a @ inv - np.eye(n)).max() < 1e-10
    assert np.abs(inv @ a - np.eye(n)).max() < 1e-10


def test_inverse_of_singular_raises():
    a = np.zeros((2, 2), dtype=complex)
    a[0, 0] = 1
    with pytest.raises(ZeroDivisionError):
        linalg.inverse(a)


def test_trace_is_cyclic(rng):
    a, b = random_complex(rng, 4), random_complex(rng, 4)
    assert abs(linalg.trace(a @ b) - linalg.trace(b @ a)) < 1e-12


def test_kron_and_direct_sum_match_numpy(rng):
    a, b = random_complex(rng, 2), random_complex(rng, 2)
    assert np.allclose(linalg.kron(a, b), np.kron(a, b), atol=0)
    ds = linalg.direct_sum(np.kron(a, b), b)
    assert ds.shape == (6, 6)
    assert np.array_equal(ds[:4, :4], np.kron(a, b))
    assert np.array_equal(ds[4:, 4:], b)
    assert not ds[:4, 4:].any() and not ds[4:, :4].any()


@pytest.mark.parametrize("n", DIMS)
def test_hermitian_eigenvalues_match_eigvalsh(rng, n):
    a = random_complex(rng, n)
    h = a + a.conj().T
    ours = linalg.hermitian_eigenvalues(h)
    ref = sorted(np.linalg.eigvalsh(h), reverse=True)
    assert np.allclose(ours, ref, atol=1e-10)


@pytest.mark.parametrize("n", DIMS)
def test_singular_values_match_svd(rng, n):
    a = random_complex(rng, n)
    assert np.allclose(linalg.singular_values(a), np.linalg.svd(a, compute_uv=False), atol=1e-10)


def test_unitarity_defect_of_unitary_is_small(rng):
    u = random_unitary(rng, 4)
    assert linalg.unitarity_defect(u) < 1e-12
    assert linalg.unitarity_defect(2 * u) > 1


def test_dimension_errors():
    with pytest.raises(linalg.DimensionError):
        linalg.as_matrix(np.eye(3))
    with pytest.raises(linalg.DimensionError):
        linalg.as_matrix(np.ones((2, 4)))
    with pytest.raises(linalg.DimensionError):
        linalg.mat_mul(np.eye(2), np.eye(4))
    with pytest.raises(ValueError):
        linalg.as_matrix([[np.nan, 0], [0, 1]])


def test_jacobi_sweep_limit(monkeypatch, rng):
    a = random_complex(rng, 6)
    monkeypatch.setattr(linalg, "JACOBI_MAX_SWEEPS", 1)
    with pytest.raises(linalg.ConvergenceError):
        linalg.hermitian_eigenvalues(a + a.conj().T)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.sampled_from(DIMS))
def test_det_multiplicative(seed, n):
    rng = np.random.default_rng(seed)
    a, b = random_complex(rng, n), random_complex(rng, n)
    lhs = linalg.determinant(a @ b)
    rhs = linalg.determinant(a) * linalg.determinant(b)
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(rhs))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.sampled_from(DIMS))
def test_eigenvalue_sum_is_trace(seed, n):
    a = seeded(seed, n)
    h = a + a.conj().T
    assert abs(sum(linalg.hermitian_eigenvalues(h)) - np.trace(h).real) < 1e-9
