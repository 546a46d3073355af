import sys

import numpy as np
import pytest

from nsbraid.anyon_model import AnyonParams, one_qubit_generators, two_qubit_generators


@pytest.fixture(scope="session")
def g1_2063():
    return one_qubit_generators(AnyonParams(2.063))


@pytest.fixture(scope="session")
def g2_2031():
    return two_qubit_generators(AnyonParams(2.031))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_complex(rng, n):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


def random_unitary(rng, n):
    q, r = np.linalg.qr(random_complex(rng, n))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        ok, detail = mod.RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")
