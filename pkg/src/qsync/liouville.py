"""Lindblad generator: application, explicit superoperator, integration,
steady-state solvers, operator-algebra uniqueness certificate and the
closed-form stationarity residual of the interaction-free product state.

Generator convention (rates enter with an overall 1/2):

    L[rho] = -i [H, rho]
             + (1/2) sum_j ( gain_j  D[sigma+_j] + damp_j D[sigma-_j] ) rho,
    D[A] rho = A rho A^+ - {A^+ A, rho} / 2.

Vectorization is column-stacking, vec(A X B) = (B^T kron A) vec(X).
"""

from dataclasses import dataclass, field

import numpy as np

from .kernels import (
    STATUS_MAX_STEPS,
    STATUS_RESIDUAL,
    STATUS_TRACE_DRIFT,
    STATUS_UNDERFLOW,
    DenseLindblad,
    FastQubitLindblad,
    have_fast_backend,
    reference_evolve,
)
from .model import SystemSpec, product_steady_state, single_qubit_steady_state, build_hamiltonian
from .operators import embed, kron, pauli

__all__ = [
    "Liouvillian",
    "EvolutionTrace",
    "SteadyStateResult",
    "NogoResidual",
    "IntegrationError",
    "SteadyStateError",
    "apply_liouvillian",
    "build_superoperator",
    "evolve",
    "steady_state",
    "algebra_closure_dim",
    "operator_algebra_dim",
    "nogo_residual",
]

ZERO_EIG_RTOL = 1e-9      # |lambda| < rtol * max|lambda| counts as kernel
NULLSPACE_MAX_DIM = 64    # default method switches to long_time above this
SUPEROP_DIM_CAP = 128     # refuse to materialize superoperators beyond cap^2
DEFAULT_RTOL = 1e-8
DEFAULT_ATOL = 1e-10


class IntegrationError(RuntimeError):
    """Time integration failed (stiffness, trace drift or step budget)."""


class SteadyStateError(RuntimeError):
    """Steady-state solve failed or produced a non-normalizable kernel."""


class Liouvillian:
    """Lindblad generator over a register with arbitrary local dimensions.

    ``jump_ops`` is a list of (rate, operator) pairs with operators already
    embedded in the full register.  Qubit registers built via
    :meth:`from_spec` use the compiled kernel when available.
    """

    def __init__(self, hamiltonian, jump_ops, local_dims, spec=None):
        self.hamiltonian = np.ascontiguousarray(hamiltonian, dtype=complex)
        self.local_dims = list(local_dims)
        self.dim = int(np.prod(self.local_dims))
        if self.hamiltonian.shape != (self.dim, self.dim):
            raise ValueError("Hamiltonian dimension does not match local_dims")
        self.spec = spec
        self._dense = DenseLindblad(self.hamiltonian, jump_ops)
        self._fast = None
        self._superoperator = None

    @classmethod
    def from_spec(cls, spec: SystemSpec) -> "Liouvillian":
        H = build_hamiltonian(spec)
        n = spec.n_qubits
        dims = spec.local_dims
        jumps = []
        for j, q in enumerate(spec.qubits):
            jumps.append((q.gamma_gain, embed(pauli("plus"), j, dims)))
            jumps.append((q.gamma_damp, embed(pauli("minus"), j, dims)))
        liouv = cls(H, jumps, dims, spec=spec)
        if have_fast_backend():
            gains = [q.gamma_gain for q in spec.qubits]
            damps = [q.gamma_damp for q in spec.qubits]
            liouv._fast = FastQubitLindblad(H, gains, damps)
        return liouv

    @property
    def representation(self) -> str:
        return "explicit_superoperator" if self._superoperator is not None else "matrix_free"

    @property
    def superoperator(self):
        return self._superoperator

    def apply(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (self.dim, self.dim):
            raise ValueError(f"state shape {rho.shape} does not match dimension {self.dim}")
        if self._fast is not None:
            return self._fast.apply(np.ascontiguousarray(rho))
        return self._dense.apply(rho)

    def residual_norm(self, rho) -> float:
        return float(np.linalg.norm(self.apply(rho)))

    def build_superoperator(self) -> np.ndarray:
        if self._superoperator is not None:
            return self._superoperator
        d = self.dim
        if d > SUPEROP_DIM_CAP:
            raise ValueError(
                f"explicit superoperator needs dimension {d}^2 = {d * d}; cap is {SUPEROP_DIM_CAP}^2"
            )
        eye = np.eye(d, dtype=complex)
        H = self.hamiltonian
        M = -1j * (np.kron(eye, H) - np.kron(H.T, eye))
        dense = self._dense
        for rate, L, Ld, LdL in zip(dense.rates, dense.Ls, dense.Lds, dense.LdLs):
            if rate == 0.0:
                continue
            M += (0.5 * rate) * (
                np.kron(Ld.T, L) - 0.5 * (np.kron(eye, LdL) + np.kron(LdL.T, eye))
            )
        self._superoperator = M
        return M


@dataclass
class EvolutionTrace:
    times: np.ndarray
    states: list | None
    observables: dict
    final_state: np.ndarray
    final_time: float
    stats: dict = field(default_factory=dict)


@dataclass
class SteadyStateResult:
    rho_ss: np.ndarray
    residual_norm: float
    method: str
    degeneracy_flag: bool
    kernel_dim: int = 1


class NogoResidual(tuple):
    """(residual_norm, mjk_terms, ujk_terms) with the residual matrix attached."""

    def __new__(cls, residual_norm, mjk_terms, ujk_terms, matrix):
        self = super().__new__(cls, (residual_norm, mjk_terms, ujk_terms))
        self.residual_norm = residual_norm
        self.mjk_terms = mjk_terms
        self.ujk_terms = ujk_terms
        self.matrix = matrix
        return self


def apply_liouvillian(liouv: Liouvillian, rho: np.ndarray) -> np.ndarray:
    return liouv.apply(rho)


def build_superoperator(liouv: Liouvillian) -> np.ndarray:
    return liouv.build_superoperator()


def _repair(sample):
    """Hermitize and renormalize one raw integrator sample."""
    herm = (sample + sample.conj().T) / 2
    return herm / np.trace(herm).real


def evolve(
    liouv: Liouvillian,
    rho0: np.ndarray,
    t_end: float,
    sample_times,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    stop_residual: float = 0.0,
    retain_states: bool = True,
    compute_eigs: bool = True,
) -> EvolutionTrace:
    """Integrate d(rho)/dt = L[rho], sampling at ``sample_times``.

    Samples are re-Hermitized and trace-renormalized before storage; the
    pre-repair trace error and the post-repair minimum eigenvalue are logged
    per sample.  ``stop_residual > 0`` ends the run early once
    ||L[rho]||_F drops below it (remaining samples hold the final state).
    """
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (liouv.dim, liouv.dim):
        raise ValueError("initial state dimension mismatch")
    sample_times = np.asarray(sample_times, dtype=float)
    if sample_times.size and (np.any(np.diff(sample_times) < 0)):
        raise ValueError("sample_times must be ascending")
    if sample_times.size and (sample_times[0] < 0 or sample_times[-1] > t_end + 1e-12):
        raise ValueError("sample_times must lie within [0, t_end]")

    if liouv._fast is not None:
        outcome = liouv._fast.evolve(
            rho0, t_end, sample_times, rtol=rtol, atol=atol, stop_residual=stop_residual
        )
    else:
        outcome = reference_evolve(
            liouv._dense, rho0, t_end, sample_times, rtol=rtol, atol=atol, stop_residual=stop_residual
        )

    if outcome.status == STATUS_UNDERFLOW:
        raise IntegrationError("step size underflow (problem too stiff for RK45)")
    if outcome.status == STATUS_TRACE_DRIFT:
        raise IntegrationError("trace drift exceeded 1e-6 before repair; integrator failure")
    if outcome.status == STATUS_MAX_STEPS:
        raise IntegrationError("step budget exhausted before reaching t_end")

    trace_errors = np.array([abs(np.trace(s) - 1.0) for s in outcome.samples])
    final_trace_err = abs(np.trace(outcome.final_state) - 1.0)
    if (trace_errors.size and trace_errors.max() > 1e-6) or final_trace_err > 1e-6:
        raise IntegrationError("trace drift exceeded 1e-6 before repair; integrator failure")

    states = [_repair(s) for s in outcome.samples]
    final_state = _repair(outcome.final_state)
    min_eigs = (
        np.array([np.linalg.eigvalsh(s).min() for s in states])
        if compute_eigs
        else np.full(len(states), np.nan)
    )
    observables = {
        "trace_error": trace_errors,
        "min_eigenvalue": min_eigs,
    }
    stats = {
        "status": outcome.status,
        "converged_early": outcome.status == STATUS_RESIDUAL,
        "nfev": outcome.nfev,
        "nsteps": outcome.nsteps,
        "final_residual_norm": liouv.residual_norm(final_state),
    }
    return EvolutionTrace(
        times=sample_times,
        states=states if retain_states else None,
        observables=observables,
        final_state=final_state,
        final_time=outcome.final_time,
        stats=stats,
    )


def steady_state(
    liouv: Liouvillian,
    method: str = "auto",
    tol: float = 1e-8,
    t_max: float = 1e5,
) -> SteadyStateResult:
    """Solve L[rho] = 0.

    ``nullspace`` eigendecomposes the explicit superoperator and takes the
    kernel; ``long_time`` integrates from the maximally mixed state until
    the residual drops below ``tol``.  ``auto`` picks nullspace up to
    dimension 64.
    """
    if method == "auto":
        method = "nullspace" if liouv.dim <= NULLSPACE_MAX_DIM else "long_time"
    if method not in ("nullspace", "long_time"):
        raise ValueError("method must be 'nullspace', 'long_time' or 'auto'")

    if method == "nullspace":
        M = liouv.build_superoperator()
        eigvals, eigvecs = np.linalg.eig(M)
        scale = np.abs(eigvals).max()
        kernel = np.where(np.abs(eigvals) < ZERO_EIG_RTOL * max(scale, 1e-300))[0]
        if kernel.size == 0:
            raise SteadyStateError(
                f"no eigenvalue within {ZERO_EIG_RTOL:.0e} * spectral scale of zero"
            )
        d = liouv.dim
        # the kernel vector must carry trace; degenerate kernels can hide it
        best, best_tr = None, 0.0
        for idx in kernel:
            v = eigvecs[:, idx].reshape(d, d, order="F")
            tr = abs(np.trace(v))
            if tr > best_tr:
                best, best_tr = v, tr
        if best_tr < 1e-8:
            raise SteadyStateError(
                "kernel vector has vanishing trace (degenerate or defective kernel); "
                "use the long_time method"
            )
        rho = best / np.trace(best)
        rho = (rho + rho.conj().T) / 2
        rho = rho / np.trace(rho).real
        residual = liouv.residual_norm(rho)
        if residual > tol:
            raise SteadyStateError(
                f"nullspace residual {residual:.3e} exceeds tolerance {tol:.0e}"
            )
        return SteadyStateResult(
            rho_ss=rho,
            residual_norm=residual,
            method="nullspace",
            degeneracy_flag=kernel.size > 1,
            kernel_dim=int(kernel.size),
        )

    rho0 = np.eye(liouv.dim, dtype=complex) / liouv.dim
    # the reachable residual floor is roughly 10 * rtol * ||L||, so the
    # integration tolerance must sit well below the requested residual
    rtol = max(min(DEFAULT_RTOL, tol * 1e-3), 1e-13)
    trace = evolve(
        liouv,
        rho0,
        t_max,
        sample_times=[],
        rtol=rtol,
        atol=rtol * 1e-2,
        stop_residual=tol,
        retain_states=False,
        compute_eigs=False,
    )
    if not trace.stats["converged_early"]:
        raise SteadyStateError(
            f"long_time residual {trace.stats['final_residual_norm']:.3e} did not reach "
            f"{tol:.0e} within horizon {t_max}"
        )
    rho = trace.final_state
    return SteadyStateResult(
        rho_ss=rho,
        residual_norm=liouv.residual_norm(rho),
        method="long_time",
        degeneracy_flag=False,
    )


def _orth_rows(rows: np.ndarray, cutoff: float) -> np.ndarray:
    """Orthonormal row basis; directions with singular value <= cutoff are noise."""
    _, s, vh = np.linalg.svd(rows, full_matrices=False)
    return vh[s > cutoff]


def operator_algebra_dim(
    generators,
    rank_tol: float = 1e-10,
    max_iter: int = 30,
    chunk: int = 4096,
) -> int:
    """Dimension of the associative algebra spanned by the generators.

    Grows the span by pairwise products of the current orthonormal basis
    until the dimension stabilizes (multiplication + addition closure).
    Basis vectors are unit Frobenius norm, so products are O(1) and the
    rank tolerance is applied as an absolute singular-value cutoff.
    """
    mats = np.stack([np.asarray(g, dtype=complex) for g in generators])
    d = mats.shape[-1]
    full = d * d
    scale = np.linalg.norm(mats.reshape(len(mats), -1), axis=1).max()
    if scale == 0.0:
        return 0
    basis = _orth_rows(mats.reshape(len(mats), -1) / scale, rank_tol)
    for _ in range(max_iter):
        B = basis.reshape(-1, d, d)
        m = len(B)
        added = False
        pairs = [(a, b) for a in range(m) for b in range(m)]
        for lo in range(0, len(pairs), chunk):
            sel = pairs[lo : lo + chunk]
            ia = np.fromiter((p[0] for p in sel), dtype=int)
            ib = np.fromiter((p[1] for p in sel), dtype=int)
            prods = np.matmul(B[ia], B[ib]).reshape(len(sel), full)
            # project out the current span, keep what is genuinely new
            prods -= (prods @ basis.conj().T) @ basis
            extra = _orth_rows(prods, rank_tol)
            if extra.shape[0]:
                basis = np.vstack([basis, extra])
                added = True
                if basis.shape[0] >= full:
                    return full
        if not added:
            return basis.shape[0]
    raise RuntimeError("operator algebra closure did not stabilize within iteration cap")


def algebra_closure_dim(
    spec: SystemSpec,
    include_hamiltonian: bool = False,
    max_sites: int = 4,
    rank_tol: float = 1e-10,
) -> int:
    """Dimension of the algebra generated by the jump operators (and H).

    Steady-state uniqueness is certified (at finite precision) when the
    result equals dim^2 = 4^N.
    """
    n = spec.n_qubits
    if n > max_sites:
        raise ValueError(f"algebra closure limited to {max_sites} sites (got {n})")
    dims = spec.local_dims
    gens = []
    for j in range(n):
        gens.append(embed(pauli("plus"), j, dims))
        gens.append(embed(pauli("minus"), j, dims))
    if include_hamiltonian:
        gens.append(build_hamiltonian(spec))
    return operator_algebra_dim(gens, rank_tol=rank_tol)


def nogo_residual(spec: SystemSpec, cross_check_tol: float = 1e-12):
    """Closed-form L[rho_0] for the interaction-free product steady state.

    Returns (residual_norm, mjk_terms, ujk_terms) where the term lists hold
    (j, k, coefficient) for the flip-flop and double-flip channels
    ((m_j - m_k)(Ux + Uy) and (m_j + m_k)(Ux - Uy)).  The closed form is
    cross-checked entrywise against apply_liouvillian on the product state;
    both vanish exactly when all magnetizations are equal and the coupling
    is XXZ.
    """
    n = spec.n_qubits
    ms = spec.magnetizations()
    locals_ = [single_qubit_steady_state(q) for q in spec.qubits]
    sp, sm = pauli("plus"), pauli("minus")

    def assemble(j, op_j, k, op_k):
        factors = list(locals_)
        factors[j] = op_j
        factors[k] = op_k
        return kron(*factors)

    residual = np.zeros((spec.dim, spec.dim), dtype=complex)
    mjk_terms, ujk_terms = [], []
    for term in spec.interactions:
        j, k = term.j, term.k
        cm = (ms[j] - ms[k]) * (term.ux + term.uy)
        cu = (ms[j] + ms[k]) * (term.ux - term.uy)
        mjk_terms.append((j, k, float(cm)))
        ujk_terms.append((j, k, float(cu)))
        pair_sum = np.zeros_like(residual)
        if cm != 0.0:
            pair_sum += cm * (assemble(j, sp, k, sm) - assemble(j, sm, k, sp))
        if cu != 0.0:
            pair_sum += cu * (assemble(j, sp, k, sp) - assemble(j, sm, k, sm))
        residual += pair_sum
    # -i from the von Neumann term times the -1/2 of the pair expansion
    residual *= 0.5j

    liouv = Liouvillian.from_spec(spec)
    direct = liouv.apply(product_steady_state(spec))
    gap = np.max(np.abs(direct - residual))
    if gap > cross_check_tol:
        raise RuntimeError(
            f"closed-form residual disagrees with the generator by {gap:.3e} "
            f"(tolerance {cross_check_tol:.0e}); implementation inconsistency"
        )
    return NogoResidual(float(np.linalg.norm(residual)), mjk_terms, ujk_terms, residual)
