"""Schmidt decompositions for pairs of identical particles.

States of two bosons or fermions are built from single-particle kets with a
symmetric external product, reduced by global, local, or fixed-observable
partial traces, and decomposed into certified Schmidt form. A labeled
tensor-product oracle cross-checks every spectrum, a small bra-ket DSL feeds
the pipeline, and the results are served over a REST API or the ``nolabel``
command line.
"""
from .algebra import (BOSON, FERMION, Basis, BasisLabel, Ket, MixedProjection,
                      Statistics, TwoParticleState, inner2, project1,
                      project1_partial, wedge)
from .errors import (DecompositionError, DegenerateStateError, NoLabelError,
                     NoSupportError, OracleMismatchError, ParseError,
                     PauliViolationError, PhysicsError, UnsupportedBasisError,
                     VerificationError, ZeroEigenvalueError)
from .schmidt import (SchmidtDecomposition, SchmidtTerm, eigendecompose,
                      schmidt_decompose, schmidt_partner, von_neumann_entropy)
from .trace import (ReducedDensity, reduce_fixed_observable, reduce_global,
                    reduce_local)

__version__ = "0.1.0"

__all__ = [
    "BOSON", "FERMION", "Basis", "BasisLabel", "Ket", "MixedProjection",
    "Statistics", "TwoParticleState", "inner2", "project1",
    "project1_partial", "wedge",
    "ReducedDensity", "reduce_fixed_observable", "reduce_global",
    "reduce_local",
    "SchmidtDecomposition", "SchmidtTerm", "eigendecompose",
    "schmidt_decompose", "schmidt_partner", "von_neumann_entropy",
    "NoLabelError", "ParseError", "PhysicsError", "PauliViolationError",
    "DegenerateStateError", "NoSupportError", "UnsupportedBasisError",
    "ZeroEigenvalueError", "VerificationError", "DecompositionError",
    "OracleMismatchError",
    "__version__",
]
