"""Fidelity, expectation values, connected pair correlations and the
summed two-site correlation functions of a qubit register.
"""

from dataclasses import dataclass

import numpy as np

from .operators import embed, herm_sqrt, partial_trace, pauli, spin1_op

__all__ = [
    "CorrelationReport",
    "SUM_LABELS",
    "fidelity",
    "expectation",
    "connected_correlation",
    "max_connected_correlation",
    "correlation_sums",
]

SUM_LABELS = ("C++", "C--", "C+-", "C-+", "Cxx", "Cyy", "Cxy", "Cyx")

_LABEL_AXES = {
    "C++": ("plus", "plus"),
    "C--": ("minus", "minus"),
    "C+-": ("plus", "minus"),
    "C-+": ("minus", "plus"),
    "Cxx": ("x", "x"),
    "Cyy": ("y", "y"),
    "Cxy": ("x", "y"),
    "Cyx": ("y", "x"),
}


def fidelity(rho_a: np.ndarray, rho_b: np.ndarray) -> float:
    """Uhlmann fidelity Tr sqrt(sqrt(a) b sqrt(a)), clamped into [0, 1]."""
    rho_a = np.asarray(rho_a, dtype=complex)
    rho_b = np.asarray(rho_b, dtype=complex)
    if rho_a.shape != rho_b.shape:
        raise ValueError(f"dimension mismatch: {rho_a.shape} vs {rho_b.shape}")
    root = herm_sqrt(rho_a)
    inner = root @ rho_b @ root
    inner = (inner + inner.conj().T) / 2
    w = np.linalg.eigvalsh(inner)
    w = np.clip(w, 0.0, None)
    f = float(np.sum(np.sqrt(w)))
    if f > 1.0 + 1e-9:
        raise ValueError(f"fidelity {f} exceeds 1 beyond tolerance; invalid inputs")
    return min(f, 1.0)


def expectation(rho: np.ndarray, op: np.ndarray) -> complex:
    """Tr(rho op)."""
    rho = np.asarray(rho)
    op = np.asarray(op)
    if rho.shape != op.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {op.shape}")
    return complex(np.trace(rho @ op))


def _infer_local_dims(rho, local_dims):
    if local_dims is not None:
        return list(local_dims)
    d = rho.shape[0]
    n = int(round(np.log2(d)))
    if 2**n != d:
        raise ValueError("cannot infer qubit register from dimension; pass local_dims")
    return [2] * n


def _site_op(axis, dim):
    if dim == 2:
        return pauli(axis)
    if dim == 3:
        return spin1_op(axis)
    raise ValueError(f"no operators for local dimension {dim}")


def connected_correlation(rho, j, k, alpha, beta, local_dims=None) -> complex:
    """<A_j B_k> - <A_j><B_k> on the full state."""
    if j == k:
        raise ValueError("connected correlation needs two distinct sites")
    rho = np.asarray(rho, dtype=complex)
    dims = _infer_local_dims(rho, local_dims)
    A = embed(_site_op(alpha, dims[j]), j, dims)
    B = embed(_site_op(beta, dims[k]), k, dims)
    return expectation(rho, A @ B) - expectation(rho, A) * expectation(rho, B)


def max_connected_correlation(rho, local_dims=None, axes=("x", "y", "z")) -> float:
    """Largest |<A_j B_k> - <A_j><B_k>| over all pairs and axis combinations."""
    rho = np.asarray(rho, dtype=complex)
    dims = _infer_local_dims(rho, local_dims)
    n = len(dims)
    worst = 0.0
    for j in range(n):
        for k in range(j + 1, n):
            for a in axes:
                for b in axes:
                    worst = max(worst, abs(connected_correlation(rho, j, k, a, b, dims)))
    return worst


@dataclass
class CorrelationReport:
    sums: dict
    pair_connected: dict
    n_qubits: int

    def max_connected_modulus(self) -> float:
        return max(abs(v) for v in self.pair_connected.values())


def correlation_sums(rho: np.ndarray, check_tol: float = 1e-10) -> CorrelationReport:
    """Correlation functions summed over pairs j < k of a qubit register.

    ``sums`` holds the eight raw sums over <sigma_j^a sigma_k^b> for the
    labels C++, C--, C+-, C-+, Cxx, Cyy, Cxy, Cyx; ``pair_connected`` maps
    (j, k, a, b) over a, b in {x, y, z} to connected correlations.  The x/y
    sums are recomputed from reduced two-site matrices (anti-diagonal
    entries) and must agree with the embedded-operator route, which
    cross-validates partial_trace.
    """
    rho = np.asarray(rho, dtype=complex)
    dims = _infer_local_dims(rho, None)
    n = len(dims)
    if n < 2:
        raise ValueError("correlation sums need at least two qubits")

    sums = {label: 0.0 + 0.0j for label in SUM_LABELS}
    pair_connected = {}
    r_bar = 0.0 + 0.0j  # sum of <uu|rho_jk|dd> entries
    s_bar = 0.0 + 0.0j  # sum of <du|rho_jk|ud> entries
    for j in range(n):
        for k in range(j + 1, n):
            for label, (a, b) in _LABEL_AXES.items():
                A = embed(pauli(a), j, dims)
                B = embed(pauli(b), k, dims)
                sums[label] += expectation(rho, A @ B)
            for a in ("x", "y", "z"):
                for b in ("x", "y", "z"):
                    pair_connected[(j, k, a, b)] = connected_correlation(rho, j, k, a, b, dims)
            rho_jk = partial_trace(rho, {j, k}, dims)
            r_bar += rho_jk[3, 0]
            s_bar += rho_jk[2, 1]

    checks = {
        "Cxx": 2 * (np.real(s_bar) + np.real(r_bar)),
        "Cyy": 2 * (np.real(s_bar) - np.real(r_bar)),
        "Cxy": 2 * (np.imag(r_bar) - np.imag(s_bar)),
        "Cyx": 2 * (np.imag(r_bar) + np.imag(s_bar)),
        "C+-": s_bar,
        "C++": r_bar,
    }
    for label, expected in checks.items():
        if abs(sums[label] - expected) > check_tol:
            raise RuntimeError(
                f"correlation sum {label} disagrees with the reduced-matrix route "
                f"by {abs(sums[label] - expected):.3e}"
            )
    return CorrelationReport(sums=sums, pair_connected=pair_connected, n_qubits=n)
