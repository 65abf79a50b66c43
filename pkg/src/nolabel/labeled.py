"""Brute-force verifier in the labeled tensor-product representation.

Everything here deliberately avoids the coefficient-matrix algebra: states
are explicit vectors in the d*d product space with exchange symmetry imposed
by construction, and reduced densities come from textbook partial traces.
Agreement between this module and the main pipeline is the project's
correctness oracle.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import Basis, Ket, Statistics, TwoParticleState, _frozen_array
from .errors import NoSupportError, PauliViolationError
from .trace import SubspaceArg, _resolve_subspace

ZERO_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class LabeledState:
    """Unit vector in the product space, exchange-symmetric within 1e-12."""

    statistics: Statistics
    basis: Basis
    vector: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        d = self.basis.dim
        vec = np.array(self.vector, dtype=np.complex128)
        if vec.shape != (d * d,):
            raise ValueError(f"vector must have length {d * d}")
        norm = float(np.linalg.norm(vec))
        if abs(norm - 1.0) > 1e-9:
            raise ValueError("labeled state must be normalized")
        swapped = vec.reshape(d, d).T.reshape(d * d)
        sign = self.statistics.exchange_sign
        if float(np.linalg.norm(vec - sign * swapped)) > 1e-9:
            raise ValueError("labeled state violates exchange symmetry")
        object.__setattr__(self, "vector", _frozen_array(vec))


def symmetrize(phi: Ket, psi: Ket, statistics: Statistics) -> LabeledState:
    """(phi x psi + sign * psi x phi), normalized."""
    if phi.basis != psi.basis:
        raise ValueError("kets use different bases")
    sign = statistics.exchange_sign
    vec = (np.kron(phi.amplitudes, psi.amplitudes)
           + sign * np.kron(psi.amplitudes, phi.amplitudes))
    norm = float(np.linalg.norm(vec))
    if norm < ZERO_TOL:
        raise PauliViolationError(
            "antisymmetrization of identical kets gives the zero vector")
    return LabeledState(statistics, phi.basis, vec / norm)


def from_state(state: TwoParticleState) -> LabeledState:
    """Map a coefficient-matrix state to its labeled product-space vector.

    Wedge products map to symmetrized products and the map is linear, so the
    flattened coefficient matrix, normalized, is the labeled vector.
    """
    state_n = state.normalized()
    vec = state_n.coeffs.reshape(-1)
    return LabeledState(state.statistics, state.basis,
                        vec / float(np.linalg.norm(vec)))


def reduce_global(labeled: LabeledState) -> np.ndarray:
    """Trace out one tensor factor; exchange symmetry makes the choice moot."""
    d = labeled.basis.dim
    m = labeled.vector.reshape(d, d)
    rho = m @ m.conj().T
    return rho / float(np.trace(rho).real)


def reduce_local(labeled: LabeledState, subspace: SubspaceArg) -> np.ndarray:
    """Project one factor onto the sub-basis, sum, and normalize."""
    d = labeled.basis.dim
    indices = _resolve_subspace(labeled.basis, subspace)
    m = labeled.vector.reshape(d, d)
    rho = np.zeros((d, d), dtype=np.complex128)
    for j in indices:
        row = m[j, :]
        rho += np.outer(row, row.conj())
    tr = float(np.trace(rho).real)
    if tr < ZERO_TOL:
        raise NoSupportError("labeled state has no support on the subspace")
    return rho / tr


def spectrum(matrix: np.ndarray) -> np.ndarray:
    """Descending real eigenvalues of a Hermitian matrix."""
    return np.linalg.eigvalsh(matrix)[::-1]
