"""Core algebra for pairs of identical particles without particle labels.

A pure two-particle state is held as a coefficient matrix ``c`` over an
orthonormal single-particle basis, with the exchange symmetry
``c[j, i] == sign * c[i, j]`` built in (sign +1 for bosons, -1 for fermions).
The symmetric scalar product of two such states is
``2 * sum(conj(x) * y)``, and projecting a single-particle bra onto a state
lowers it to a one-particle ket with amplitudes ``2 * (conj(bra) @ c)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateStateError, UnsupportedBasisError

# Entries smaller than this are zeroed when a coefficient matrix is built.
PRUNE_TOL = 1e-12
# Largest tolerated violation of exchange symmetry in caller-supplied matrices.
SYMMETRY_TOL = 1e-8


@dataclass(frozen=True)
class Statistics:
    """Particle species: fixes the sign picked up under particle exchange."""

    name: str
    exchange_sign: int

    def __post_init__(self) -> None:
        if self.exchange_sign not in (+1, -1):
            raise ValueError("exchange sign must be +1 or -1")

    @classmethod
    def from_name(cls, name: str) -> "Statistics":
        try:
            return {"boson": BOSON, "fermion": FERMION}[name]
        except KeyError:
            raise ValueError(f"unknown statistics {name!r}") from None

    def __str__(self) -> str:
        return self.name


BOSON = Statistics("boson", +1)
FERMION = Statistics("fermion", -1)


@dataclass(frozen=True, order=True)
class BasisLabel:
    """A basis-state name, possibly composite like site:spin ("L:up")."""

    parts: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.parts or any(not p for p in self.parts):
            raise ValueError("basis label needs at least one nonempty part")

    @classmethod
    def parse(cls, text: str) -> "BasisLabel":
        return cls(tuple(text.split(":")))

    @property
    def arity(self) -> int:
        return len(self.parts)

    def __str__(self) -> str:
        return ":".join(self.parts)


def as_label(value: "BasisLabel | str") -> BasisLabel:
    return value if isinstance(value, BasisLabel) else BasisLabel.parse(value)


@dataclass(frozen=True)
class Basis:
    """Ordered orthonormal single-particle basis with uniform label arity."""

    labels: tuple[BasisLabel, ...]

    def __post_init__(self) -> None:
        if not self.labels:
            raise ValueError("basis must not be empty")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("basis labels must be distinct")
        if len({lab.arity for lab in self.labels}) != 1:
            raise ValueError("basis labels must share one arity")

    @classmethod
    def parse(cls, names: "str | list[str] | tuple[str, ...]") -> "Basis":
        if isinstance(names, str):
            names = [n.strip() for n in names.split(",")]
        return cls(tuple(BasisLabel.parse(n) for n in names))

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def arity(self) -> int:
        return self.labels[0].arity

    def index(self, label: "BasisLabel | str") -> int:
        try:
            return self.labels.index(as_label(label))
        except ValueError:
            raise ValueError(f"label {label!s} not in basis") from None

    def observable_values(self, observable: int) -> tuple[str, ...]:
        """Distinct tokens of one observable, in first-appearance order."""
        seen: dict[str, None] = {}
        for lab in self.labels:
            seen.setdefault(lab.parts[observable], None)
        return tuple(seen)

    def indices_where(self, observable: int, value: str) -> tuple[int, ...]:
        return tuple(k for k, lab in enumerate(self.labels)
                     if lab.parts[observable] == value)

    def __iter__(self):
        return iter(self.labels)

    def __len__(self) -> int:
        return len(self.labels)


def _frozen_array(values, shape_check=None) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128)
    if shape_check is not None and arr.shape != shape_check:
        raise ValueError(f"expected shape {shape_check}, got {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Ket:
    """Single-particle state: complex amplitudes over a Basis."""

    basis: Basis
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "amplitudes",
                           _frozen_array(self.amplitudes, (self.basis.dim,)))

    @classmethod
    def basis_state(cls, basis: Basis, label: "BasisLabel | str") -> "Ket":
        amps = np.zeros(basis.dim)
        amps[basis.index(label)] = 1.0
        return cls(basis, amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "Ket":
        n = self.norm()
        if n < PRUNE_TOL:
            raise DegenerateStateError("cannot normalize a zero ket")
        return Ket(self.basis, self.amplitudes / n)

    def inner(self, other: "Ket") -> complex:
        """Scalar product <self|other> (conjugates self)."""
        _check_same_basis(self.basis, other.basis)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def __add__(self, other: "Ket") -> "Ket":
        _check_same_basis(self.basis, other.basis)
        return Ket(self.basis, self.amplitudes + other.amplitudes)

    def __sub__(self, other: "Ket") -> "Ket":
        _check_same_basis(self.basis, other.basis)
        return Ket(self.basis, self.amplitudes - other.amplitudes)

    def __mul__(self, scalar: complex) -> "Ket":
        return Ket(self.basis, self.amplitudes * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "Ket":
        return Ket(self.basis, -self.amplitudes)

    def dominant_label(self) -> BasisLabel:
        """Label of the largest-magnitude amplitude (first on ties)."""
        return self.basis.labels[int(np.argmax(np.abs(self.amplitudes)))]


@dataclass(frozen=True, eq=False)
class TwoParticleState:
    """Pure state of two identical particles as a coefficient matrix.

    The matrix is symmetrized to ``(c + sign * c.T) / 2`` on construction and
    entries below PRUNE_TOL are zeroed; a caller-supplied matrix that badly
    violates exchange symmetry is rejected rather than silently projected.
    """

    statistics: Statistics
    basis: Basis
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        d = self.basis.dim
        raw = np.array(self.coeffs, dtype=np.complex128)
        if raw.shape != (d, d):
            raise ValueError(f"coefficient matrix must be {d}x{d}")
        sign = self.statistics.exchange_sign
        scale = max(1.0, float(np.abs(raw).max()))
        if np.abs(raw - sign * raw.T).max() > SYMMETRY_TOL * scale:
            raise ValueError("coefficient matrix violates exchange symmetry")
        sym = (raw + sign * raw.T) / 2.0
        sym[np.abs(sym) < PRUNE_TOL] = 0.0
        object.__setattr__(self, "coeffs", _frozen_array(sym))

    def norm2(self) -> float:
        """Squared norm under the symmetric scalar product."""
        return float(2.0 * np.sum(np.abs(self.coeffs) ** 2))

    def norm(self) -> float:
        return float(np.sqrt(self.norm2()))

    def is_zero(self, tol: float = PRUNE_TOL) -> bool:
        return bool(np.abs(self.coeffs).max() < tol) if self.coeffs.size else True

    def normalized(self) -> "TwoParticleState":
        n = self.norm()
        if n < PRUNE_TOL:
            raise DegenerateStateError(
                "state vanishes after symmetry reduction; cannot normalize")
        return TwoParticleState(self.statistics, self.basis, self.coeffs / n)

    def __add__(self, other: "TwoParticleState") -> "TwoParticleState":
        _check_compatible(self, other)
        return TwoParticleState(self.statistics, self.basis,
                                self.coeffs + other.coeffs)

    def __sub__(self, other: "TwoParticleState") -> "TwoParticleState":
        _check_compatible(self, other)
        return TwoParticleState(self.statistics, self.basis,
                                self.coeffs - other.coeffs)

    def __mul__(self, scalar: complex) -> "TwoParticleState":
        return TwoParticleState(self.statistics, self.basis,
                                self.coeffs * scalar)

    __rmul__ = __mul__


def _check_same_basis(a: Basis, b: Basis) -> None:
    if a != b:
        raise ValueError("operands use different bases")


def _check_compatible(a: TwoParticleState, b: TwoParticleState) -> None:
    _check_same_basis(a.basis, b.basis)
    if a.statistics != b.statistics:
        raise ValueError("operands have different statistics")


def wedge(phi: Ket, psi: Ket, statistics: Statistics) -> TwoParticleState:
    """Symmetric external product of two single-particle kets.

    Bilinear in both arguments; swapping them multiplies the state by the
    exchange sign. For fermions with phi == psi the result is the zero state.
    """
    _check_same_basis(phi.basis, psi.basis)
    a, b = phi.amplitudes, psi.amplitudes
    sign = statistics.exchange_sign
    c = (np.outer(a, b) + sign * np.outer(b, a)) / 2.0
    return TwoParticleState(statistics, phi.basis, c)


def inner2(bra: TwoParticleState, ket: TwoParticleState) -> complex:
    """Symmetric scalar product <bra|ket> of two-particle states.

    On wedge products it expands to
    <a|c><b|d> + sign * <a|d><b|c>.
    """
    _check_compatible(bra, ket)
    return complex(2.0 * np.vdot(bra.coeffs, ket.coeffs))


def project1(bra: Ket, state: TwoParticleState) -> Ket:
    """One-particle projection: apply a single-particle bra to a pair state.

    Returns the residual single-particle ket; for a wedge product this is
    <bra|phi> psi + sign * <bra|psi> phi.
    """
    _check_same_basis(bra.basis, state.basis)
    amps = 2.0 * (np.conj(bra.amplitudes) @ state.coeffs)
    return Ket(state.basis, amps)


@dataclass(frozen=True, eq=False)
class MixedProjection:
    """Result of projecting one observable's value out of a pair state.

    ``matrix[r, j]`` is the total weight pairing the leftover single-observable
    ket ``rest_labels[r]`` with the full-basis ket ``j``; each pairing appears
    once with its whole weight, regardless of slot order.
    """

    basis: Basis
    observable: int
    token: str
    rest_labels: tuple[BasisLabel, ...]
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "matrix",
            _frozen_array(self.matrix, (len(self.rest_labels), self.basis.dim)))

    def fix_rest(self, value: str) -> Ket:
        """Contract the leftover slot with one value of the other observable.

        The result equals projecting the full composite bra (value, token)
        onto the original state.
        """
        row = self.rest_labels.index(BasisLabel((value,)))
        return Ket(self.basis, self.matrix[row].copy())

    def terms(self) -> list[tuple[BasisLabel, BasisLabel, complex]]:
        """Nonzero (rest label, full label, amplitude) triples, row-major."""
        out = []
        for r, rest in enumerate(self.rest_labels):
            for j, full in enumerate(self.basis.labels):
                amp = self.matrix[r, j]
                if abs(amp) > PRUNE_TOL:
                    out.append((rest, full, complex(amp)))
        return out


def project1_partial(token: str, state: TwoParticleState,
                     observable: int = 1) -> MixedProjection:
    """Project one observable's bra value out of a pair state.

    The basis must be composite with exactly two observables per label. The
    returned object still has one full particle and one leftover
    single-observable slot; contracting the leftover slot with a value of the
    complementary observable recovers an ordinary one-particle projection.
    """
    basis = state.basis
    if basis.arity != 2:
        raise UnsupportedBasisError(
            "observable projection needs two-observable labels like site:spin")
    if observable not in (0, 1):
        raise ValueError("observable index must be 0 or 1")
    if token not in basis.observable_values(observable):
        raise ValueError(
            f"{token!r} is not a value of observable {observable}")
    other = 1 - observable
    rest_tokens = basis.observable_values(other)
    rest_labels = tuple(BasisLabel((t,)) for t in rest_tokens)
    row = {t: r for r, t in enumerate(rest_tokens)}
    matrix = np.zeros((len(rest_tokens), basis.dim), dtype=np.complex128)
    for i, lab in enumerate(basis.labels):
        if lab.parts[observable] == token:
            matrix[row[lab.parts[other]], :] += 2.0 * state.coeffs[i, :]
    return MixedProjection(basis, observable, token, rest_labels, matrix)
