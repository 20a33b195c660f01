"""Numerical laboratory for non-uniformly expanding torus maps: exact
Jacobians and hypothesis verification for a deformed linear model, orbit and
Lyapunov machinery, hyperbolic-time detection, Markov-partition coding, and
thermodynamic formalism on the induced subshifts of finite type.
"""

from . import coding, config, hyperbolic, orbits, sft, torus
from .errors import (
    BoundaryHit,
    DepthMismatch,
    EmptyCylinder,
    GridTooCoarse,
    InverseBranchLost,
    NoConvergence,
    NotIrreducible,
    NuedynError,
    SingularJacobian,
    Unsupported,
)

__version__ = "0.1.0"
