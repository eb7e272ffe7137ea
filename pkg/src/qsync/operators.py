"""Dense complex operator algebra for small spin registers.

Conventions used throughout the package:

* local qubit basis is (|up>, |down>) with sigma_z |up> = +|up>;
* local spin-1 basis is (m=+1, m=0, m=-1), hbar = 1;
* site 0 is the leftmost (most significant) tensor factor, so for two
  qubits the register basis order is uu, ud, du, dd.

Everything is a plain ``numpy.ndarray`` of complex128; density matrices are
ordinary square arrays that satisfy :func:`validate_density_matrix`.
"""

import numpy as np

__all__ = [
    "PAULI_AXES",
    "pauli",
    "spin1_op",
    "kron",
    "embed",
    "partial_trace",
    "herm_sqrt",
    "is_hermitian",
    "validate_density_matrix",
]

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-10
PSD_CLAMP = 1e-10

_SQRT2 = np.sqrt(2.0)

_PAULI = {
    "identity": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "plus": np.array([[0, 1], [0, 0]], dtype=complex),
    "minus": np.array([[0, 0], [1, 0]], dtype=complex),
}

# spin-1 ladder operators: J+ |1,m> = sqrt(2 - m(m+1)) |1,m+1>
_J_PLUS = np.array([[0, _SQRT2, 0], [0, 0, _SQRT2], [0, 0, 0]], dtype=complex)
_J_MINUS = _J_PLUS.conj().T

_SPIN1 = {
    "identity": np.eye(3, dtype=complex),
    "x": (_J_PLUS + _J_MINUS) / 2,
    "y": (_J_PLUS - _J_MINUS) / 2j,
    "z": np.diag([1.0, 0.0, -1.0]).astype(complex),
    "plus": _J_PLUS,
    "minus": _J_MINUS,
}

PAULI_AXES = ("x", "y", "z", "plus", "minus", "identity")

_AXIS_ALIASES = {"+": "plus", "-": "minus", "i": "identity", "1": "identity"}


def _canonical_axis(axis: str) -> str:
    axis = _AXIS_ALIASES.get(axis, axis)
    if axis not in PAULI_AXES:
        raise ValueError(f"unknown operator axis {axis!r}; expected one of {PAULI_AXES}")
    return axis


def pauli(axis: str) -> np.ndarray:
    """Return a copy of the 2x2 Pauli / ladder / identity matrix."""
    return _PAULI[_canonical_axis(axis)].copy()


def spin1_op(axis: str) -> np.ndarray:
    """Return a copy of the 3x3 spin-1 angular momentum matrix (hbar = 1)."""
    return _SPIN1[_canonical_axis(axis)].copy()


def kron(*mats: np.ndarray) -> np.ndarray:
    """Kronecker product of one or more matrices, left factor most significant."""
    if not mats:
        raise ValueError("kron needs at least one matrix")
    out = np.asarray(mats[0], dtype=complex)
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def embed(op: np.ndarray, site: int, local_dims) -> np.ndarray:
    """Embed a single-site operator into the register: I x ... x op x ... x I."""
    local_dims = list(local_dims)
    n = len(local_dims)
    if not 0 <= site < n:
        raise IndexError(f"site {site} out of range for {n} sites")
    op = np.asarray(op, dtype=complex)
    if op.shape != (local_dims[site], local_dims[site]):
        raise ValueError(
            f"operator shape {op.shape} does not match local dimension {local_dims[site]} at site {site}"
        )
    factors = [np.eye(d, dtype=complex) for d in local_dims]
    factors[site] = op
    return kron(*factors)


def partial_trace(rho: np.ndarray, keep, local_dims) -> np.ndarray:
    """Trace out all sites not in ``keep``; kept sites stay in ascending order."""
    local_dims = list(local_dims)
    n = len(local_dims)
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("keep set must be nonempty")
    if keep[0] < 0 or keep[-1] >= n:
        raise IndexError(f"keep sites {keep} out of range for {n} sites")
    rho = np.asarray(rho, dtype=complex)
    d = int(np.prod(local_dims))
    if rho.shape != (d, d):
        raise ValueError(f"state shape {rho.shape} does not match register dimension {d}")

    tensor = rho.reshape(local_dims + local_dims)
    traced = [s for s in range(n) if s not in keep]
    # trace highest axes first so lower axis indices stay valid
    for s in sorted(traced, reverse=True):
        tensor = np.trace(tensor, axis1=s, axis2=s + n)
        n -= 1
    d_keep = int(np.prod([local_dims[s] for s in keep]))
    return tensor.reshape(d_keep, d_keep)


def is_hermitian(m: np.ndarray, tol: float = HERMITICITY_TOL) -> bool:
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def herm_sqrt(m: np.ndarray, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Hermitian PSD square root via eigendecomposition.

    Eigenvalues in [-PSD_CLAMP, 0) are clamped to zero (integrator noise);
    anything more negative raises, since that signals a non-PSD input bug
    rather than roundoff.
    """
    m = np.asarray(m, dtype=complex)
    herm_err = np.max(np.abs(m - m.conj().T))
    if herm_err > tol:
        raise ValueError(f"matrix is not Hermitian (max deviation {herm_err:.3e})")
    w, v = np.linalg.eigh(m)
    if w.min() < -PSD_CLAMP:
        raise ValueError(f"matrix is not PSD (min eigenvalue {w.min():.3e})")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def validate_density_matrix(rho: np.ndarray, name: str = "rho") -> np.ndarray:
    """Check Hermiticity, unit trace and numerical positivity; return as complex array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {rho.shape}")
    herm_err = np.max(np.abs(rho - rho.conj().T))
    if herm_err > HERMITICITY_TOL:
        raise ValueError(f"{name} is not Hermitian (max deviation {herm_err:.3e})")
    tr_err = abs(np.trace(rho) - 1.0)
    if tr_err > TRACE_TOL:
        raise ValueError(f"{name} has trace error {tr_err:.3e}")
    w = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    if w.min() < -PSD_CLAMP:
        raise ValueError(f"{name} has negative eigenvalue {w.min():.3e}")
    return rho
