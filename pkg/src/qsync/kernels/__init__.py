"""Kernel backends: compiled core with a numpy fallback, chosen at import.

Set ``QSYNC_BACKEND=python`` to force the fallback, ``QSYNC_BACKEND=fast``
to require the compiled extension (ImportError if missing); the default
``auto`` uses the extension when available.
"""

import os

import numpy as np

from . import reference
from .reference import (
    STATUS_DONE,
    STATUS_MAX_STEPS,
    STATUS_RESIDUAL,
    STATUS_TRACE_DRIFT,
    STATUS_UNDERFLOW,
    TRACE_DRIFT_LIMIT,
    DenseLindblad,
    EvolveOutcome,
    reference_evolve,
)

__all__ = [
    "BACKEND",
    "DenseLindblad",
    "EvolveOutcome",
    "FastQubitLindblad",
    "reference_evolve",
    "have_fast_backend",
]

_choice = os.environ.get("QSYNC_BACKEND", "auto").lower()
if _choice not in ("auto", "fast", "python"):
    raise RuntimeError(f"QSYNC_BACKEND must be auto, fast or python, not {_choice!r}")

_fast = None
if _choice in ("auto", "fast"):
    import importlib

    try:
        _fast = importlib.import_module("._fast", __name__)
    except ImportError:
        if _choice == "fast":
            raise
        _fast = None
BACKEND = "fast" if _fast is not None else "python"


def have_fast_backend() -> bool:
    return _fast is not None


class FastQubitLindblad:
    """Compiled-core handle for a qubit register (all local dimensions 2)."""

    def __init__(self, hamiltonian, gains, damps):
        if _fast is None:
            raise RuntimeError("compiled kernel backend is not available")
        self.d = np.asarray(hamiltonian).shape[0]
        self._kern = _fast.QubitKernel(hamiltonian, gains, damps)

    def apply(self, rho):
        return _fast.qubit_rhs(self._kern, np.ascontiguousarray(rho, dtype=complex))

    def residual_norm(self, rho) -> float:
        return float(np.linalg.norm(self.apply(rho)))

    def evolve(
        self,
        rho0,
        t_end,
        sample_times,
        rtol=1e-8,
        atol=1e-10,
        stop_residual=0.0,
        t0=0.0,
        max_steps=50_000_000,
        trace_drift_limit=TRACE_DRIFT_LIMIT,
    ) -> EvolveOutcome:
        sample_times = np.ascontiguousarray(sample_times, dtype=float)
        samples = np.empty((len(sample_times), self.d, self.d), dtype=complex)
        rho_final = np.empty((self.d, self.d), dtype=complex)
        status, t_final, n_acc, n_rej, nfev = _fast.qubit_evolve(
            self._kern,
            np.ascontiguousarray(rho0, dtype=complex),
            float(t0),
            float(t_end),
            float(rtol),
            float(atol),
            sample_times,
            samples,
            rho_final,
            float(stop_residual),
            int(max_steps),
            float(trace_drift_limit),
        )
        return EvolveOutcome(sample_times, samples, rho_final, t_final, status, nfev, n_acc + n_rej)
