"""Schmidt decomposition of identical-particle pair states.

Given a state and a reduced density matrix from any of the trace flavors,
the decomposition pairs each eigenket carrying a nonzero eigenvalue with a
partner ket obtained by projecting the eigenket onto the state. The terms
``sqrt(lambda_i) * wedge(ket_i, partner_i)`` are summed, a single complex
prefactor is fitted by least squares, and the reconstruction fidelity
against the input state certifies the result.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import Basis, BasisLabel, Ket, Statistics, TwoParticleState
from .algebra import inner2, project1, wedge
from .errors import DecompositionError, ZeroEigenvalueError
from .trace import FIXED, ReducedDensity

# Eigenvalues at or below this are treated as exact zeros.
ZERO_TOL = 1e-10
# Eigenvalues closer than this are ordered as one degenerate cluster.
DEGENERACY_TOL = 1e-9
# Reconstruction must reach 1 - FIDELITY_TOL to be accepted.
FIDELITY_TOL = 1e-8


def von_neumann_entropy(values) -> float:
    """Entropy in bits, -sum(x * log2(x)) over the positive entries."""
    total = 0.0
    for x in values:
        if x > 0.0:
            total -= x * math.log2(x)
    return total


def eigendecompose(rho: ReducedDensity, *, zero_tol: float = ZERO_TOL,
                   ) -> tuple[tuple[float, Ket], ...]:
    """Full eigensystem of a reduced density matrix, deterministically ordered.

    Eigenvalues descend; values within DEGENERACY_TOL form a cluster ordered
    by each eigenket's dominant basis label; values below ``zero_tol`` are
    clamped to zero. Each eigenket's largest-magnitude amplitude is rotated
    to the positive real axis.
    """
    matrix = (rho.matrix + rho.matrix.conj().T) / 2.0
    values, vectors = np.linalg.eigh(matrix)
    pairs: list[tuple[float, np.ndarray]] = []
    for k in range(len(values)):
        lam = float(values[k])
        if lam < zero_tol:
            lam = 0.0
        vec = vectors[:, k].copy()
        top = int(np.argmax(np.abs(vec)))
        phase = vec[top] / abs(vec[top])
        vec = vec / phase
        pairs.append((lam, vec))
    pairs.sort(key=lambda p: -p[0])

    ordered: list[tuple[float, np.ndarray]] = []
    start = 0
    while start < len(pairs):
        stop = start + 1
        while (stop < len(pairs)
               and pairs[start][0] - pairs[stop][0] <= DEGENERACY_TOL):
            stop += 1
        cluster = pairs[start:stop]
        cluster.sort(key=lambda p: _label_key(rho.basis, p[1]))
        ordered.extend(cluster)
        start = stop
    return tuple((lam, Ket(rho.basis, vec)) for lam, vec in ordered)


def _label_key(basis: Basis, vec: np.ndarray):
    top = int(np.argmax(np.abs(vec)))
    rounded = np.round(vec, 9)
    return (basis.labels[top].parts,
            tuple(rounded.real), tuple(rounded.imag))


def schmidt_partner(state: TwoParticleState, eigenket: Ket, eigenvalue: float,
                    *, zero_tol: float = ZERO_TOL) -> Ket:
    """Unit-norm partner of a reduced-density eigenket within the state.

    The partner is the one-particle projection of the eigenket onto the
    normalized state, divided by its own norm (for a global trace that norm
    is sqrt(2 * eigenvalue)). It is itself an eigenket with the same
    eigenvalue.
    """
    if eigenvalue <= zero_tol:
        raise ZeroEigenvalueError(
            "no partner exists for a vanishing eigenvalue")
    projected = project1(eigenket, state.normalized())
    norm = projected.norm()
    if norm <= math.sqrt(2.0 * zero_tol):
        raise ZeroEigenvalueError(
            "projection vanished; eigenket carries no weight in the state")
    return projected * (1.0 / norm)


@dataclass(frozen=True, eq=False)
class SchmidtTerm:
    """One decomposition term: eigenvalue and the paired orthonormal kets."""

    eigenvalue: float
    ket: Ket
    partner: Ket

    @property
    def coefficient(self) -> float:
        return math.sqrt(self.eigenvalue)


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """Certified decomposition of a pair state into paired eigenket terms."""

    statistics: Statistics
    basis: Basis
    terms: tuple[SchmidtTerm, ...]
    prefactor: complex
    reconstruction_fidelity: float

    @property
    def schmidt_number(self) -> int:
        return len(self.terms)

    @property
    def entropy_bits(self) -> float:
        return von_neumann_entropy(t.eigenvalue for t in self.terms)

    def reconstruct(self) -> TwoParticleState:
        """The state rebuilt as prefactor * sum of weighted wedge terms."""
        total = _term_sum(self.statistics, self.basis, self.terms)
        return total * self.prefactor


def _term_sum(statistics: Statistics, basis: Basis,
              terms: tuple[SchmidtTerm, ...]) -> TwoParticleState:
    total = TwoParticleState(statistics, basis,
                             np.zeros((basis.dim, basis.dim)))
    for term in terms:
        total = total + term.coefficient * wedge(term.ket, term.partner,
                                                 statistics)
    return total


def _lift_eigenket(eigenket: Ket, rho: ReducedDensity,
                   full_basis: Basis) -> Ket:
    """Reattach the fixed observable value to a compressed-basis eigenket."""
    amps = np.zeros(full_basis.dim, dtype=np.complex128)
    for token_label, amp in zip(eigenket.basis.labels, eigenket.amplitudes):
        if abs(amp) == 0.0:
            continue
        parts = ((rho.fixed_value, token_label.parts[0])
                 if rho.observable == 0
                 else (token_label.parts[0], rho.fixed_value))
        try:
            amps[full_basis.index(BasisLabel(parts))] = amp
        except ValueError:
            raise DecompositionError(
                f"eigenket weight on {':'.join(parts)} has no basis state "
                "to lift onto") from None
    return Ket(full_basis, amps)


def schmidt_decompose(state: TwoParticleState,
                      rho: ReducedDensity | None = None, *,
                      zero_tol: float = ZERO_TOL,
                      fidelity_tol: float = FIDELITY_TOL,
                      ) -> SchmidtDecomposition:
    """Decompose a pair state along a reduced density matrix's eigenbasis.

    With no matrix given, the global trace is used. Eigenkets from a
    fixed-observable trace live on the compressed basis and are lifted back
    by reattaching the fixed value. Raises DecompositionError when the
    weighted terms cannot reproduce the state (for example when the trace
    discarded part of its support).
    """
    if rho is None:
        from .trace import reduce_global
        rho = reduce_global(state)
    state_n = state.normalized()

    terms: list[SchmidtTerm] = []
    for lam, eigenket in eigendecompose(rho, zero_tol=zero_tol):
        if lam <= zero_tol:
            continue
        ket = eigenket
        if rho.trace_kind == FIXED and eigenket.basis != state.basis:
            ket = _lift_eigenket(eigenket, rho, state.basis)
        partner = schmidt_partner(state_n, ket, lam, zero_tol=zero_tol)
        terms.append(SchmidtTerm(lam, ket, partner))

    if not terms:
        raise DecompositionError("no nonzero eigenvalues to decompose along")
    total = _term_sum(state.statistics, state.basis, tuple(terms))
    tt = inner2(total, total).real
    if tt < zero_tol:
        raise DecompositionError("weighted term sum vanished")
    ts = inner2(total, state_n)
    fidelity = abs(ts) ** 2 / (tt * inner2(state_n, state_n).real)
    if fidelity < 1.0 - fidelity_tol:
        raise DecompositionError(
            f"reconstruction fidelity {fidelity:.12f} below threshold; "
            "the chosen trace does not retain the full state")
    prefactor = ts / tt
    return SchmidtDecomposition(state.statistics, state.basis, tuple(terms),
                                complex(prefactor), float(fidelity))
