"""Textbook numpy implementation of the Lindblad right-hand side.

This is the fallback backend and the correctness reference for the compiled
core: dense embedded jump operators and matrix products, stepped with
scipy's Dormand-Prince RK45.  It works for any local dimensions.

The generator convention is

    L[rho] = -i [H, rho] + (1/2) sum_k rate_k (L_k rho L_k^+ - {L_k^+ L_k, rho} / 2)

i.e. each configured rate enters with an overall 1/2 in front of the
standard dissipator.
"""

import numpy as np
from scipy.integrate import solve_ivp

__all__ = ["DenseLindblad", "EvolveOutcome", "reference_evolve"]

STATUS_DONE = 0
STATUS_RESIDUAL = 1
STATUS_UNDERFLOW = 2
STATUS_MAX_STEPS = 3
STATUS_TRACE_DRIFT = 4

TRACE_DRIFT_LIMIT = 1e-6


class DenseLindblad:
    """Generator data held as dense matrices; ``apply`` evaluates L[rho]."""

    def __init__(self, hamiltonian, jump_ops):
        self.H = np.ascontiguousarray(hamiltonian, dtype=complex)
        self.d = self.H.shape[0]
        self.rates = np.array([float(rate) for rate, _ in jump_ops])
        self.Ls = [np.ascontiguousarray(L, dtype=complex) for _, L in jump_ops]
        self.Lds = [L.conj().T.copy() for L in self.Ls]
        self.LdLs = [Ld @ L for Ld, L in zip(self.Lds, self.Ls)]

    def apply(self, rho):
        H = self.H
        out = -1j * (H @ rho - rho @ H)
        for rate, L, Ld, LdL in zip(self.rates, self.Ls, self.Lds, self.LdLs):
            if rate == 0.0:
                continue
            out += (0.5 * rate) * (L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL))
        return out

    def residual_norm(self, rho) -> float:
        return float(np.linalg.norm(self.apply(rho)))


class EvolveOutcome:
    """Raw integrator output: pre-repair samples plus bookkeeping."""

    def __init__(self, times, samples, final_state, final_time, status, nfev, nsteps):
        self.times = times
        self.samples = samples
        self.final_state = final_state
        self.final_time = final_time
        self.status = status
        self.nfev = nfev
        self.nsteps = nsteps


def _solve_chunk(system, rho0, t0, t1, rtol, atol, t_eval):
    d = system.d

    def rhs(t, y):
        return system.apply(y.reshape(d, d)).ravel()

    sol = solve_ivp(
        rhs,
        (t0, t1),
        np.asarray(rho0, dtype=complex).ravel(),
        method="RK45",
        rtol=rtol,
        atol=atol,
        t_eval=t_eval,
    )
    if sol.status == -1:
        raise RuntimeError(f"integration failed: {sol.message}")
    return sol


def reference_evolve(
    system,
    rho0,
    t_end,
    sample_times,
    rtol=1e-8,
    atol=1e-10,
    stop_residual=0.0,
    t0=0.0,
):
    """Integrate d(rho)/dt = L[rho] with scipy RK45.

    With ``stop_residual > 0`` the run is split into geometrically growing
    chunks and stops as soon as ||L[rho]||_F drops below the threshold;
    samples past the stopping time are filled with the converged state.
    """
    d = system.d
    sample_times = np.asarray(sample_times, dtype=float)
    samples = np.empty((len(sample_times), d, d), dtype=complex)
    nfev = 0
    nsteps = 0

    if stop_residual <= 0.0:
        t_eval = np.unique(np.concatenate([sample_times, [t0, t_end]]))
        sol = _solve_chunk(system, rho0, t0, t_end, rtol, atol, t_eval)
        nfev, nsteps = sol.nfev, len(sol.t)
        states = {t: sol.y[:, i].reshape(d, d) for i, t in enumerate(sol.t)}
        for i, t in enumerate(sample_times):
            samples[i] = states[t]
        final = states[sol.t[-1]]
        return EvolveOutcome(sample_times, samples, final, t_end, STATUS_DONE, nfev, nsteps)

    rho = np.asarray(rho0, dtype=complex).copy()
    t = t0
    chunk = max((t_end - t0) / 256.0, 1e-3)
    filled = 0
    status = STATUS_DONE
    while t < t_end:
        t_next = min(t + chunk, t_end)
        in_chunk = sample_times[(sample_times > t) & (sample_times <= t_next)]
        t_eval = np.unique(np.concatenate([in_chunk, [t, t_next]]))
        sol = _solve_chunk(system, rho, t, t_next, rtol, atol, t_eval)
        nfev += sol.nfev
        nsteps += len(sol.t)
        for tv in in_chunk:
            idx = int(np.searchsorted(sol.t, tv))
            samples[filled] = sol.y[:, idx].reshape(d, d)
            filled += 1
        rho = sol.y[:, -1].reshape(d, d)
        t = t_next
        if system.residual_norm(rho) < stop_residual:
            status = STATUS_RESIDUAL
            break
        chunk *= 2.0
    samples[filled:] = rho
    return EvolveOutcome(sample_times, samples, rho, t, status, nfev, nsteps)
