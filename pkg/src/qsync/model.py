"""System specification: qubit rates, pairwise couplings, reference states.

A ``SystemSpec`` is the declarative description of the register that every
other module consumes.  Rates and couplings are dimensionless; time is
measured in inverse-rate units.
"""

from dataclasses import dataclass, field

import numpy as np

from .operators import embed, kron, pauli, validate_density_matrix

__all__ = [
    "QubitParams",
    "InteractionTerm",
    "SystemSpec",
    "StateInit",
    "PRNG_NAME",
    "magnetization",
    "rates_for_magnetization",
    "build_hamiltonian",
    "product_steady_state",
    "single_qubit_steady_state",
    "ghz_state",
    "random_pure_state",
    "initial_state",
    "xxz_spec",
]

PRNG_NAME = "numpy-pcg64"

TOPOLOGY_TAGS = ("all_to_all", "one_to_all", "custom")
INIT_KINDS = ("ghz", "random_pure", "product_steady", "explicit")


@dataclass(frozen=True)
class QubitParams:
    omega: float = 0.0
    gamma_gain: float = 0.0
    gamma_damp: float = 0.0

    def __post_init__(self):
        if self.gamma_gain < 0 or self.gamma_damp < 0:
            raise ValueError("rates must be nonnegative")
        if self.gamma_gain + self.gamma_damp <= 0:
            raise ValueError("every qubit must be dissipative: gamma_gain + gamma_damp > 0")

    @property
    def gamma_total(self) -> float:
        return self.gamma_gain + self.gamma_damp

    @property
    def m_z(self) -> float:
        return magnetization(self.gamma_gain, self.gamma_damp)


@dataclass(frozen=True)
class InteractionTerm:
    j: int
    k: int
    ux: float = 0.0
    uy: float = 0.0
    uz: float = 0.0

    def __post_init__(self):
        if self.j >= self.k:
            raise ValueError(f"interaction pair must have j < k, got ({self.j}, {self.k})")
        if self.j < 0:
            raise ValueError("site indices must be nonnegative")


@dataclass(frozen=True)
class SystemSpec:
    qubits: tuple
    interactions: tuple = ()
    topology_tag: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        object.__setattr__(self, "interactions", tuple(self.interactions))
        if not self.qubits:
            raise ValueError("spec needs at least one qubit")
        if self.topology_tag not in TOPOLOGY_TAGS:
            raise ValueError(f"topology_tag must be one of {TOPOLOGY_TAGS}")
        n = len(self.qubits)
        seen = set()
        for term in self.interactions:
            if term.k >= n:
                raise ValueError(f"interaction ({term.j}, {term.k}) references site >= {n}")
            if (term.j, term.k) in seen:
                raise ValueError(f"duplicate interaction pair ({term.j}, {term.k})")
            seen.add((term.j, term.k))

    @property
    def n_qubits(self) -> int:
        return len(self.qubits)

    @property
    def dim(self) -> int:
        return 2 ** len(self.qubits)

    @property
    def local_dims(self) -> list:
        return [2] * len(self.qubits)

    def magnetizations(self) -> np.ndarray:
        return np.array([q.m_z for q in self.qubits])

    def coupling(self, j: int, k: int) -> InteractionTerm:
        """The interaction term for pair (j, k), zero couplings if absent."""
        if j > k:
            j, k = k, j
        for term in self.interactions:
            if (term.j, term.k) == (j, k):
                return term
        return InteractionTerm(j, k)

    def without_interactions(self) -> "SystemSpec":
        return SystemSpec(self.qubits, (), "custom")


@dataclass(frozen=True)
class StateInit:
    kind: str = "product_steady"
    seed: int = 0
    explicit_matrix: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in INIT_KINDS:
            raise ValueError(f"init kind must be one of {INIT_KINDS}")
        if (self.explicit_matrix is not None) != (self.kind == "explicit"):
            raise ValueError("explicit_matrix must be given iff kind == 'explicit'")


def magnetization(gamma_gain: float, gamma_damp: float) -> float:
    """Single-qubit steady-state <sigma_z> fixed by the gain/damping ratio.

    m = 1 - 2/(gain/damp + 1); the pure-gain limit damp = 0 returns +1.
    """
    if gamma_gain < 0 or gamma_damp < 0:
        raise ValueError("rates must be nonnegative")
    if gamma_gain + gamma_damp <= 0:
        raise ValueError("at least one rate must be positive")
    if gamma_damp == 0:
        return 1.0
    return 1.0 - 2.0 / (gamma_gain / gamma_damp + 1.0)


def rates_for_magnetization(m: float) -> tuple:
    """(gamma_gain, gamma_damp) realizing magnetization m.

    Uses the convention of the two-qubit phase diagrams: for m >= 0 fix
    gamma_gain = 1, for m < 0 fix gamma_damp = 1.
    """
    if not -1.0 <= m <= 1.0:
        raise ValueError("magnetization must lie in [-1, 1]")
    if m >= 0:
        return 1.0, (1.0 - m) / (1.0 + m)
    return (1.0 + m) / (1.0 - m), 1.0


def build_hamiltonian(spec: SystemSpec) -> np.ndarray:
    """H = sum_j omega_j sigma_z^j / 2 + sum_{j<k} sum_a U^a_{jk} sigma_a^j sigma_a^k."""
    n = spec.n_qubits
    dims = spec.local_dims
    H = np.zeros((spec.dim, spec.dim), dtype=complex)
    for j, q in enumerate(spec.qubits):
        if q.omega != 0.0:
            H += (q.omega / 2.0) * embed(pauli("z"), j, dims)
    for term in spec.interactions:
        for axis, u in (("x", term.ux), ("y", term.uy), ("z", term.uz)):
            if u != 0.0:
                H += u * embed(pauli(axis), term.j, dims) @ embed(pauli(axis), term.k, dims)
    return H


def single_qubit_steady_state(q: QubitParams) -> np.ndarray:
    m = q.m_z
    return np.diag([(1 + m) / 2, (1 - m) / 2]).astype(complex)


def product_steady_state(spec: SystemSpec) -> np.ndarray:
    """Tensor product of the single-qubit steady states (the interaction-free fixed point)."""
    return kron(*[single_qubit_steady_state(q) for q in spec.qubits])


def ghz_state(n_qubits: int) -> np.ndarray:
    """Density matrix of (|up...up> + |down...down>)/sqrt(2)."""
    d = 2 ** n_qubits
    psi = np.zeros(d, dtype=complex)
    psi[0] = psi[-1] = 1 / np.sqrt(2)
    return np.outer(psi, psi.conj())


def random_pure_state(n_qubits: int, seed: int) -> np.ndarray:
    """Seeded random pure state: normalized complex-standard-normal vector."""
    rng = np.random.Generator(np.random.PCG64(seed))
    d = 2 ** n_qubits
    psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    psi /= np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def initial_state(init: StateInit, spec: SystemSpec) -> np.ndarray:
    if init.kind == "ghz":
        return ghz_state(spec.n_qubits)
    if init.kind == "random_pure":
        return random_pure_state(spec.n_qubits, init.seed)
    if init.kind == "product_steady":
        return product_steady_state(spec)
    return validate_density_matrix(init.explicit_matrix, "explicit initial state")


def xxz_spec(
    omegas,
    gamma_gains,
    gamma_damps,
    u_xy: float,
    u_z: float,
    topology: str = "all_to_all",
    u_y: float | None = None,
    hub: int = 0,
) -> SystemSpec:
    """Spec builder for the common uniformly-coupled networks.

    ``topology`` selects which pairs are coupled: every pair (``all_to_all``)
    or only pairs containing ``hub`` (``one_to_all``).  ``u_y`` defaults to
    ``u_xy`` (the XXZ case); passing it explicitly gives an XYZ coupling.
    """
    qubits = tuple(
        QubitParams(float(w), float(g), float(d))
        for w, g, d in zip(omegas, gamma_gains, gamma_damps, strict=True)
    )
    n = len(qubits)
    uy = u_xy if u_y is None else u_y
    if topology == "all_to_all":
        pairs = [(j, k) for j in range(n) for k in range(j + 1, n)]
    elif topology == "one_to_all":
        pairs = [(min(hub, k), max(hub, k)) for k in range(n) if k != hub]
    else:
        raise ValueError("topology must be 'all_to_all' or 'one_to_all'")
    terms = tuple(InteractionTerm(j, k, float(u_xy), float(uy), float(u_z)) for j, k in sorted(pairs))
    return SystemSpec(qubits, terms, topology)
