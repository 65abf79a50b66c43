"""Single-particle reduced density matrices for identical-particle pairs.

Three trace flavors are provided:

* global: sum one-particle projections over the full basis;
* local: sum only over a sub-basis (e.g. every label at one site), keeping
  the full basis for the result since its support lies in the complement;
* fixed-observable: hold one observable at a fixed value, sum over the other
  observable's values, and compress the result onto that other observable.

Each trace normalizes the input state, divides out the resulting raw trace
(recorded on the result) and returns a unit-trace Hermitian matrix.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .algebra import (Basis, BasisLabel, TwoParticleState, as_label,
                      project1_partial, _frozen_array)
from .errors import NoSupportError, UnsupportedBasisError

# A raw trace below this has no support worth normalizing.
SUPPORT_TOL = 1e-12

GLOBAL = "global"
LOCAL = "local"
FIXED = "fixed"

SubspaceArg = Iterable["BasisLabel | str"] | Callable[[BasisLabel], bool]


@dataclass(frozen=True, eq=False)
class ReducedDensity:
    """Unit-trace Hermitian single-particle density matrix plus trace metadata."""

    basis: Basis
    matrix: np.ndarray = field(repr=False)
    trace_kind: str
    raw_trace: float
    subspace: tuple[BasisLabel, ...] | None = None
    observable: int | None = None
    fixed_value: str | None = None
    residual_support: bool = False

    def __post_init__(self) -> None:
        d = self.basis.dim
        m = np.array(self.matrix, dtype=np.complex128)
        if m.shape != (d, d):
            raise ValueError(f"density matrix must be {d}x{d}")
        scale = max(1.0, float(np.abs(m).max()))
        if np.abs(m - m.conj().T).max() > 1e-9 * scale:
            raise ValueError("density matrix is not Hermitian")
        m = (m + m.conj().T) / 2.0
        if abs(np.trace(m).real - 1.0) > 1e-9:
            raise ValueError("density matrix must have unit trace")
        if float(np.linalg.eigvalsh(m).min()) < -1e-9:
            raise ValueError("density matrix must be positive semidefinite")
        object.__setattr__(self, "matrix", _frozen_array(m))


def _projected_outer_sum(state: TwoParticleState,
                         indices: tuple[int, ...]) -> np.ndarray:
    """Half the sum of outer products of one-particle projections <j|state>."""
    rows = 2.0 * state.coeffs[list(indices), :]
    return 0.5 * rows.T @ rows.conj()


def reduce_global(state: TwoParticleState) -> ReducedDensity:
    """Partial trace over the complete single-particle basis."""
    state_n = state.normalized()
    raw = _projected_outer_sum(state_n, tuple(range(state.basis.dim)))
    raw_trace = float(np.trace(raw).real)
    return ReducedDensity(state.basis, raw / raw_trace, GLOBAL, raw_trace)


def _resolve_subspace(basis: Basis, subspace: SubspaceArg) -> tuple[int, ...]:
    if callable(subspace):
        picked = tuple(k for k, lab in enumerate(basis.labels) if subspace(lab))
    else:
        wanted = list(subspace)
        if not wanted:
            raise ValueError("subspace selection is empty")
        picked_set: set[int] = set()
        for item in wanted:
            if isinstance(item, BasisLabel) or ":" in str(item):
                picked_set.add(basis.index(as_label(item)))
            else:
                # A bare token selects every label carrying it as any part.
                token = str(item)
                hits = [k for k, lab in enumerate(basis.labels)
                        if token in lab.parts]
                if not hits:
                    raise ValueError(f"token {token!r} matches no basis label")
                picked_set.update(hits)
        picked = tuple(sorted(picked_set))
    if not picked:
        raise ValueError("subspace selection is empty")
    return picked


def reduce_local(state: TwoParticleState,
                 subspace: SubspaceArg) -> ReducedDensity:
    """Partial trace restricted to a sub-basis.

    The result keeps the full basis: projecting onto one region leaves the
    other particle's amplitude, which may live entirely in the complement.
    """
    indices = _resolve_subspace(state.basis, subspace)
    state_n = state.normalized()
    raw = _projected_outer_sum(state_n, indices)
    raw_trace = float(np.trace(raw).real)
    if raw_trace < SUPPORT_TOL:
        raise NoSupportError("state has no support on the selected subspace")
    labels = tuple(state.basis.labels[k] for k in indices)
    return ReducedDensity(state.basis, raw / raw_trace, LOCAL, raw_trace,
                          subspace=labels)


def _block_flags(state: TwoParticleState,
                 block: tuple[int, ...]) -> tuple[bool, bool, bool]:
    """Whether amplitude sits with both, one, or no particle in the block."""
    inside = np.zeros(state.basis.dim, dtype=bool)
    inside[list(block)] = True
    c = np.abs(state.coeffs)
    both = float(c[np.ix_(inside, inside)].sum())
    outside = float(c[np.ix_(~inside, ~inside)].sum())
    cross = float(c.sum() - both - outside)
    return both > SUPPORT_TOL, cross > SUPPORT_TOL, outside > SUPPORT_TOL


def reduce_fixed_observable(state: TwoParticleState, value: str,
                            observable: int = 0) -> ReducedDensity:
    """Partial trace holding one observable fixed at ``value``.

    Projects out every value b of the complementary observable together with
    the fixed value, sums the outer products, and compresses the resulting
    operator onto the complementary observable's basis.

    The ``residual_support`` flag marks inputs whose amplitude is not confined
    to a single pattern (both particles at the fixed value, or exactly one);
    such traces discard part of the state and cannot be reassembled into it.
    """
    basis = state.basis
    if basis.arity != 2:
        raise UnsupportedBasisError(
            "fixed-observable trace needs two-observable labels like site:spin")
    if observable not in (0, 1):
        raise ValueError("observable index must be 0 or 1")
    if value not in basis.observable_values(observable):
        raise ValueError(f"{value!r} is not a value of observable {observable}")
    other = 1 - observable
    state_n = state.normalized()

    comp = np.zeros((basis.dim, basis.dim), dtype=np.complex128)
    for token in basis.observable_values(other):
        ket = project1_partial(token, state_n, observable=other).fix_rest(value)
        comp += 0.5 * np.outer(ket.amplitudes, ket.amplitudes.conj())

    raw_trace = float(np.trace(comp).real)
    if raw_trace < SUPPORT_TOL:
        raise NoSupportError(
            f"state has no support at {value!r} of observable {observable}")

    tokens = basis.observable_values(other)
    reduced_basis = Basis(tuple(BasisLabel((t,)) for t in tokens))
    m = np.zeros((len(tokens), len(tokens)), dtype=np.complex128)
    for bi, b in enumerate(tokens):
        for bj, bp in enumerate(tokens):
            for a in basis.observable_values(observable):
                try:
                    ki = basis.index(BasisLabel(_compose(a, b, observable)))
                    kj = basis.index(BasisLabel(_compose(a, bp, observable)))
                except ValueError:
                    continue
                m[bi, bj] += comp[ki, kj]

    block = basis.indices_where(observable, value)
    both, cross, outside = _block_flags(state_n, block)
    residual = not ((both and not cross and not outside)
                    or (cross and not both and not outside))
    return ReducedDensity(reduced_basis, m / raw_trace, FIXED, raw_trace,
                          observable=observable, fixed_value=value,
                          residual_support=residual)


def _compose(fixed_token: str, other_token: str,
             observable: int) -> tuple[str, str]:
    return ((fixed_token, other_token) if observable == 0
            else (other_token, fixed_token))
