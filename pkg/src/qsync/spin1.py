"""Two-site spin-1 extension: the limit-cycle state, the interaction
commutator that breaks the qubit no-go result, and steady states under two
dissipation schemes.

Scheme ``j_ladder`` uses the angular-momentum ladder operators J+/J- as
jumps; ``side_to_center`` pumps both side levels m = +1 and m = -1
incoherently into m = 0 (the scheme whose dark state is the limit cycle).
"""

from dataclasses import dataclass

import numpy as np

from .liouville import Liouvillian, SteadyStateResult, steady_state
from .operators import embed, kron, spin1_op

__all__ = [
    "Spin1Spec",
    "DISSIPATION_SCHEMES",
    "spin1_limit_cycle",
    "spin1_commutator",
    "spin1_liouvillian",
    "spin1_steady_state",
    "spin1_pair_correlation",
]

DISSIPATION_SCHEMES = ("j_ladder", "side_to_center")

_LOCAL_DIMS = [3, 3]


@dataclass(frozen=True)
class Spin1Spec:
    omegas: tuple = (0.0, 0.0)
    gamma_gain: tuple = (1.0, 1.0)
    gamma_damp: tuple = (1.0, 1.0)
    ux: float = 0.0
    uy: float = 0.0
    uz: float = 0.0

    def __post_init__(self):
        for name in ("omegas", "gamma_gain", "gamma_damp"):
            value = tuple(float(v) for v in getattr(self, name))
            if len(value) != 2:
                raise ValueError(f"{name} must have exactly two entries")
            object.__setattr__(self, name, value)
        if any(g < 0 for g in self.gamma_gain) or any(d < 0 for d in self.gamma_damp):
            raise ValueError("rates must be nonnegative")


def spin1_limit_cycle() -> np.ndarray:
    """The phase-symmetric single-spin target state |1,0><1,0|."""
    return np.diag([0.0, 1.0, 0.0]).astype(complex)


def spin1_commutator(ux: float, uy: float, uz: float = 0.0) -> np.ndarray:
    """Commutator of the doubled limit-cycle state with the XYZ coupling.

    Conventions: the x/y coupling matrices are the ladder-normalized ones
    (sqrt(2) times the su(2) spin matrices, i.e. 0/1 matrix elements) and
    the commutator is taken in (state, coupling) order.  The nonzero
    entries then sit in the central row/column and read exactly
    +-(uy - ux) and +-(ux + uy); the su(2)-normalized commutator
    [U, rho] equals -1/2 of the returned matrix.  The z coupling never
    contributes: the doubled limit cycle commutes with Jz x Jz.
    """
    scale = np.sqrt(2.0)
    kx = scale * spin1_op("x")
    ky = scale * spin1_op("y")
    kz = scale * spin1_op("z")
    coupling = ux * np.kron(kx, kx) + uy * np.kron(ky, ky) + uz * np.kron(kz, kz)
    rho2 = kron(spin1_limit_cycle(), spin1_limit_cycle())
    return rho2 @ coupling - coupling @ rho2


def _side_to_center_jumps():
    """|1,0><1,1| (decay of the upper level) and |1,0><1,-1| (pump of the lower)."""
    from_upper = np.zeros((3, 3), dtype=complex)
    from_upper[1, 0] = 1.0
    from_lower = np.zeros((3, 3), dtype=complex)
    from_lower[1, 2] = 1.0
    return from_upper, from_lower


def spin1_liouvillian(spec: Spin1Spec, dissipation_scheme: str) -> Liouvillian:
    if dissipation_scheme not in DISSIPATION_SCHEMES:
        raise ValueError(f"dissipation_scheme must be one of {DISSIPATION_SCHEMES}")
    H = np.zeros((9, 9), dtype=complex)
    for j, w in enumerate(spec.omegas):
        if w != 0.0:
            H += (w / 2.0) * embed(spin1_op("z"), j, _LOCAL_DIMS)
    for axis, u in (("x", spec.ux), ("y", spec.uy), ("z", spec.uz)):
        if u != 0.0:
            H += u * kron(spin1_op(axis), spin1_op(axis))

    jumps = []
    if dissipation_scheme == "j_ladder":
        for j in range(2):
            jumps.append((spec.gamma_gain[j], embed(spin1_op("plus"), j, _LOCAL_DIMS)))
            jumps.append((spec.gamma_damp[j], embed(spin1_op("minus"), j, _LOCAL_DIMS)))
    else:
        from_upper, from_lower = _side_to_center_jumps()
        for j in range(2):
            jumps.append((spec.gamma_damp[j], embed(from_upper, j, _LOCAL_DIMS)))
            jumps.append((spec.gamma_gain[j], embed(from_lower, j, _LOCAL_DIMS)))
    return Liouvillian(H, jumps, _LOCAL_DIMS, spec=spec)


def spin1_steady_state(
    spec: Spin1Spec, dissipation_scheme: str, method: str = "auto", tol: float = 1e-8
) -> SteadyStateResult:
    liouv = spin1_liouvillian(spec, dissipation_scheme)
    return steady_state(liouv, method=method, tol=tol)


def spin1_pair_correlation(rho: np.ndarray) -> complex:
    """Connected <J1+ J2-> of a two-site spin-1 state."""
    jp = embed(spin1_op("plus"), 0, _LOCAL_DIMS)
    jm = embed(spin1_op("minus"), 1, _LOCAL_DIMS)
    rho = np.asarray(rho, dtype=complex)
    joint = complex(np.trace(rho @ jp @ jm))
    return joint - complex(np.trace(rho @ jp)) * complex(np.trace(rho @ jm))
