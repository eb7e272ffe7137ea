# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled core: Lindblad right-hand side for qubit registers plus an
adaptive Dormand-Prince 5(4) stepper running on it.

Each jump operator of a qubit register touches a single bit of the basis
index, so the dissipator costs O(n d^2) index arithmetic instead of dense
matrix products.  The Hamiltonian commutator uses a CSR product when H is
sparse (spin-chain Hamiltonians are) and BLAS otherwise.  The stepper
mirrors scipy's RK45 error control so the numpy fallback and this core
are interchangeable up to integration tolerances.
"""

import numpy as np
import scipy.sparse

from libc.math cimport fabs, fmax, fmin, pow, sqrt
from scipy.linalg.cython_blas cimport zgemm

ctypedef double complex zcomplex

STATUS_DONE = 0
STATUS_RESIDUAL = 1
STATUS_UNDERFLOW = 2
STATUS_MAX_STEPS = 3
STATUS_TRACE_DRIFT = 4

cdef double SAFETY = 0.9
cdef double MIN_FACTOR = 0.2
cdef double MAX_FACTOR = 10.0
cdef double SPARSE_FILL_CUTOFF = 0.25

# Dormand-Prince tableau (same pair as scipy.integrate.RK45)
cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0
cdef double A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0
cdef double B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0


cdef class QubitKernel:
    """Precomputed generator data for one qubit register."""

    cdef int d, n_sites, nnz
    cdef bint sparse
    cdef zcomplex* H
    cdef zcomplex* hdata
    cdef int* hind
    cdef int* hptr
    cdef double* gains
    cdef double* damps
    cdef double* wdiag
    cdef long* masks
    cdef long* up_idx
    cdef object _refs  # keeps the backing numpy arrays alive

    def __init__(self, H, gains, damps):
        H = np.ascontiguousarray(H, dtype=complex)
        cdef int d = H.shape[0]
        cdef int n = len(gains)
        if 2 ** n != d:
            raise ValueError("Hamiltonian dimension does not match qubit count")
        gains = np.ascontiguousarray(gains, dtype=float)
        damps = np.ascontiguousarray(damps, dtype=float)
        masks = np.array([1 << (n - 1 - j) for j in range(n)], dtype=np.int64)
        idx = np.arange(d)
        up_idx = np.ascontiguousarray(
            np.stack([idx[(idx & m) == 0] for m in masks]), dtype=np.int64
        )
        bits = np.stack([(idx & m) != 0 for m in masks])  # True = spin down
        wdiag = np.ascontiguousarray(0.25 * (gains @ bits + damps @ ~bits), dtype=float)

        csr = scipy.sparse.csr_matrix(H)
        csr.eliminate_zeros()
        hdata = np.ascontiguousarray(csr.data, dtype=complex)
        hind = np.ascontiguousarray(csr.indices, dtype=np.int32)
        hptr = np.ascontiguousarray(csr.indptr, dtype=np.int32)
        if csr.nnz == 0:  # keep the pointer takes below valid
            hdata = np.zeros(1, dtype=complex)
            hind = np.zeros(1, dtype=np.int32)

        self._refs = (H, gains, damps, masks, up_idx, wdiag, hdata, hind, hptr)
        self.d = d
        self.n_sites = n
        self.nnz = csr.nnz
        self.sparse = csr.nnz <= SPARSE_FILL_CUTOFF * d * d
        cdef zcomplex[:, ::1] Hv = H
        cdef zcomplex[::1] hdv = hdata
        cdef int[::1] hiv = hind
        cdef int[::1] hpv = hptr
        cdef double[::1] gv = gains
        cdef double[::1] dv = damps
        cdef double[::1] wv = wdiag
        cdef long[::1] mv = masks
        cdef long[:, ::1] uv = up_idx
        self.H = &Hv[0, 0]
        self.hdata = &hdv[0]
        self.hind = &hiv[0]
        self.hptr = &hpv[0]
        self.gains = &gv[0]
        self.damps = &dv[0]
        self.wdiag = &wv[0]
        self.masks = &mv[0]
        self.up_idx = &uv[0, 0]

    cdef void rhs(self, zcomplex* rho, zcomplex* out) noexcept nogil:
        """out = -i[H, rho] + dissipators(rho)."""
        cdef int d = self.d
        cdef int j, a, b, r, c, m, half, p
        cdef double hg, hd
        cdef zcomplex mi = -1j
        cdef zcomplex pi_ = 1j
        cdef zcomplex one = 1.0
        cdef zcomplex zero = 0.0
        cdef zcomplex hv
        cdef char nn = b'N'

        if self.sparse:
            for a in range(d * d):
                out[a] = 0.0
            # -i H rho: row r of out accumulates -i H[r,c] * row c of rho
            for r in range(d):
                for p in range(self.hptr[r], self.hptr[r + 1]):
                    c = self.hind[p]
                    hv = mi * self.hdata[p]
                    for b in range(d):
                        out[r * d + b] = out[r * d + b] + hv * rho[c * d + b]
            # +i rho H: column c of out accumulates +i H[b,c] * column b of rho
            for a in range(d):
                for b in range(d):
                    for p in range(self.hptr[b], self.hptr[b + 1]):
                        c = self.hind[p]
                        out[a * d + c] = out[a * d + c] + pi_ * self.hdata[p] * rho[a * d + b]
        else:
            # BLAS sees C arrays as their transposes: zgemm(a=X, b=Y) -> out = alpha*Y@X
            zgemm(&nn, &nn, &d, &d, &d, &mi, rho, &d, self.H, &d, &zero, out, &d)
            zgemm(&nn, &nn, &d, &d, &d, &pi_, self.H, &d, rho, &d, &one, out, &d)

        half = d >> 1
        for j in range(self.n_sites):
            m = <int> self.masks[j]
            hg = 0.5 * self.gains[j]
            hd = 0.5 * self.damps[j]
            if hg != 0.0:
                # sigma+ rho sigma-: both indices have the site bit clear (up)
                for a in range(half):
                    r = <int> self.up_idx[j * half + a]
                    for b in range(half):
                        c = <int> self.up_idx[j * half + b]
                        out[r * d + c] = out[r * d + c] + hg * rho[(r + m) * d + (c + m)]
            if hd != 0.0:
                # sigma- rho sigma+: both indices have the site bit set (down)
                for a in range(half):
                    r = <int> self.up_idx[j * half + a] + m
                    for b in range(half):
                        c = <int> self.up_idx[j * half + b] + m
                        out[r * d + c] = out[r * d + c] + hd * rho[(r - m) * d + (c - m)]
        # anticommutators of every site collapse into one diagonal weight pass
        for r in range(d):
            for c in range(d):
                out[r * d + c] = out[r * d + c] - (self.wdiag[r] + self.wdiag[c]) * rho[r * d + c]


def qubit_rhs(QubitKernel kern, zcomplex[:, ::1] rho):
    """Evaluate L[rho]; returns a new array."""
    cdef int d = kern.d
    out_arr = np.empty((d, d), dtype=complex)
    cdef zcomplex[:, ::1] out = out_arr
    kern.rhs(&rho[0, 0], &out[0, 0])
    return out_arr


cdef double _error_norm(int L, zcomplex* err, zcomplex* y, zcomplex* ynew,
                        double rtol, double atol) noexcept nogil:
    cdef int i
    cdef double s, e, acc = 0.0
    for i in range(L):
        s = atol + rtol * fmax(abs(y[i]), abs(ynew[i]))
        e = abs(err[i]) / s
        acc += e * e
    return sqrt(acc / L)


cdef double _scaled_norm(int L, zcomplex* v, zcomplex* y, double rtol, double atol) noexcept nogil:
    cdef int i
    cdef double s, e, acc = 0.0
    for i in range(L):
        s = atol + rtol * abs(y[i])
        e = abs(v[i]) / s
        acc += e * e
    return sqrt(acc / L)


cdef double _frob(int L, zcomplex* v) noexcept nogil:
    cdef int i
    cdef double acc = 0.0
    for i in range(L):
        acc += v[i].real * v[i].real + v[i].imag * v[i].imag
    return sqrt(acc)


def qubit_evolve(QubitKernel kern, zcomplex[:, ::1] rho0,
                 double t0, double t_end, double rtol, double atol,
                 double[::1] sample_times, zcomplex[:, :, ::1] samples,
                 zcomplex[:, ::1] rho_final,
                 double stop_residual, long max_steps, double trace_drift_limit):
    """Adaptive DP45 integration of d(rho)/dt = L[rho].

    ``samples`` must be preallocated with shape (len(sample_times), d, d);
    sample times must be sorted and lie in [t0, t_end].  Returns
    (status, t_final, n_accepted, n_rejected, nfev).
    """
    cdef int d = kern.d
    cdef int L = d * d
    cdef int ns = sample_times.shape[0]

    buf = np.empty((10, L), dtype=complex)
    cdef zcomplex[:, ::1] work = buf
    cdef zcomplex* y = &work[0, 0]
    cdef zcomplex* ynew = &work[1, 0]
    cdef zcomplex* ystage = &work[2, 0]
    cdef zcomplex* k1 = &work[3, 0]
    cdef zcomplex* k2 = &work[4, 0]
    cdef zcomplex* k3 = &work[5, 0]
    cdef zcomplex* k4 = &work[6, 0]
    cdef zcomplex* k5 = &work[7, 0]
    cdef zcomplex* k6 = &work[8, 0]
    cdef zcomplex* k7 = &work[9, 0]

    cdef int i, si = 0
    cdef long n_acc = 0, n_rej = 0, nfev = 0
    cdef double t = t0, h, h_abs, h_min, err_norm, factor, d0, d1, d2, tr0, tr
    cdef bint step_rejected = False, clamped
    cdef double t_target
    cdef int status = STATUS_DONE

    for i in range(L):
        y[i] = rho0[i // d, i % d]
    tr0 = 0.0
    for i in range(d):
        tr0 += y[i * d + i].real

    while si < ns and sample_times[si] <= t0:
        for i in range(L):
            samples[si, i // d, i % d] = y[i]
        si += 1

    kern.rhs(y, k1)
    nfev += 1

    # Hairer-style initial step guess (same scheme scipy uses)
    d0 = _scaled_norm(L, y, y, rtol, atol)
    d1 = _scaled_norm(L, k1, y, rtol, atol)
    if d0 < 1e-5 or d1 < 1e-5:
        h = 1e-6
    else:
        h = 0.01 * d0 / d1
    for i in range(L):
        ystage[i] = y[i] + h * k1[i]
    kern.rhs(ystage, k2)
    nfev += 1
    for i in range(L):
        ystage[i] = k2[i] - k1[i]
    d2 = _scaled_norm(L, ystage, y, rtol, atol) / h
    if fmax(d1, d2) <= 1e-15:
        h_abs = fmax(1e-6, h * 1e-3)
    else:
        h_abs = pow(0.01 / fmax(d1, d2), 0.2)
    h_abs = fmin(fmin(100.0 * h, h_abs), t_end - t0)

    while True:
        if stop_residual > 0.0 and _frob(L, k1) < stop_residual:
            status = STATUS_RESIDUAL
            break
        if t >= t_end:
            break
        if n_acc + n_rej >= max_steps:
            status = STATUS_MAX_STEPS
            break

        h_min = 10.0 * fabs(t) * 2.220446049250313e-16
        if h_abs < h_min:
            status = STATUS_UNDERFLOW
            break
        h = h_abs
        t_target = t_end
        if si < ns and sample_times[si] < t_target:
            t_target = sample_times[si]
        clamped = False
        if t + h >= t_target:
            h = t_target - t
            clamped = True

        for i in range(L):
            ystage[i] = y[i] + h * A21 * k1[i]
        kern.rhs(ystage, k2)
        for i in range(L):
            ystage[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i])
        kern.rhs(ystage, k3)
        for i in range(L):
            ystage[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
        kern.rhs(ystage, k4)
        for i in range(L):
            ystage[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
        kern.rhs(ystage, k5)
        for i in range(L):
            ystage[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i])
        kern.rhs(ystage, k6)
        for i in range(L):
            ynew[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i])
        kern.rhs(ynew, k7)
        nfev += 6

        for i in range(L):
            ystage[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
        err_norm = _error_norm(L, ystage, y, ynew, rtol, atol)

        if err_norm < 1.0:
            if err_norm == 0.0:
                factor = MAX_FACTOR
            else:
                factor = fmin(MAX_FACTOR, SAFETY * pow(err_norm, -0.2))
            if step_rejected:
                factor = fmin(1.0, factor)
            h_abs = fabs(h) * factor
            step_rejected = False
            n_acc += 1
            t = t_target if clamped else t + h
            for i in range(L):
                y[i] = ynew[i]
                k1[i] = k7[i]  # FSAL
            tr = 0.0
            for i in range(d):
                tr += y[i * d + i].real
            if fabs(tr - tr0) > trace_drift_limit:
                status = STATUS_TRACE_DRIFT
                break
            while si < ns and sample_times[si] <= t:
                for i in range(L):
                    samples[si, i // d, i % d] = y[i]
                si += 1
        else:
            h_abs = fabs(h) * fmax(MIN_FACTOR, SAFETY * pow(err_norm, -0.2))
            step_rejected = True
            n_rej += 1

    # converged-early runs keep the final state for any remaining samples
    while si < ns:
        for i in range(L):
            samples[si, i // d, i % d] = y[i]
        si += 1
    for i in range(L):
        rho_final[i // d, i % d] = y[i]
    return status, t, n_acc, n_rej, nfev
