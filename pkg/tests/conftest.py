"""Shared test helpers: reproducible random states and bases."""
from __future__ import annotations

import numpy as np
import pytest

from nolabel.algebra import (BOSON, FERMION, Basis, Ket, Statistics,
                             TwoParticleState)

SEED = 20260818

# Verdict lines appended by the acceptance module; printed after the run so
# they survive pytest's output capture.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(SEED)


def plain_basis(dim: int) -> Basis:
    return Basis.parse([f"b{k}" for k in range(dim)])


def random_ket(rng: np.random.Generator, basis: Basis) -> Ket:
    amps = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    return Ket(basis, amps).normalized()


def random_orthonormal_pair(rng: np.random.Generator,
                            basis: Basis) -> tuple[Ket, Ket]:
    d = basis.dim
    m = rng.normal(size=(d, 2)) + 1j * rng.normal(size=(d, 2))
    q, _ = np.linalg.qr(m)
    return Ket(basis, q[:, 0]), Ket(basis, q[:, 1])


def random_state(rng: np.random.Generator, basis: Basis,
                 statistics: Statistics) -> TwoParticleState:
    d = basis.dim
    sign = statistics.exchange_sign
    while True:
        m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        c = (m + sign * m.T) / 2.0
        state = TwoParticleState(statistics, basis, c)
        if not state.is_zero():
            return state.normalized()


BOTH_STATISTICS = (BOSON, FERMION)
