import numpy as np
import pytest

from qsync.liouville import (
    Liouvillian,
    SteadyStateError,
    algebra_closure_dim,
    apply_liouvillian,
    build_superoperator,
    evolve,
    nogo_residual,
    operator_algebra_dim,
    steady_state,
)
from qsync.model import (
    InteractionTerm,
    QubitParams,
    SystemSpec,
    magnetization,
    product_steady_state,
    xxz_spec,
)
from qsync.observables import fidelity
from qsync.operators import embed, pauli


def random_spec(rng, n, xxz=False, identical_ratios=False):
    ratio = rng.uniform(0.2, 3.0)
    qubits = []
    for _ in range(n):
        if identical_ratios:
            scale = rng.uniform(0.2, 2.0)
            qubits.append(QubitParams(rng.uniform(-1, 1), ratio * scale, scale))
        else:
            qubits.append(QubitParams(rng.uniform(-1, 1), rng.uniform(0.1, 2), rng.uniform(0.1, 2)))
    terms = []
    for j in range(n):
        for k in range(j + 1, n):
            ux = rng.uniform(-2, 2)
            uy = ux if xxz else rng.uniform(-2, 2)
            terms.append(InteractionTerm(j, k, ux, uy, rng.uniform(-2, 2)))
    return SystemSpec(tuple(qubits), tuple(terms))


def random_hermitian(rng, d):
    m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return m + m.conj().T


def test_apply_trace_and_hermiticity_preservation():
    rng = np.random.default_rng(0)
    spec = random_spec(rng, 3)
    liouv = Liouvillian.from_spec(spec)
    for _ in range(5):
        rho = random_hermitian(rng, 8)
        out = apply_liouvillian(liouv, rho)
        assert abs(np.trace(out)) < 1e-12 * max(1, np.max(np.abs(rho)))
        assert np.max(np.abs(out - out.conj().T)) < 1e-12 * max(1, np.max(np.abs(out)))


def test_apply_single_qubit_stationarity():
    q = QubitParams(0.7, 1.3, 0.4)
    liouv = Liouvillian.from_spec(SystemSpec((q,)))
    m = magnetization(q.gamma_gain, q.gamma_damp)
    rho = np.diag([(1 + m) / 2, (1 - m) / 2]).astype(complex)
    assert np.max(np.abs(apply_liouvillian(liouv, rho))) < 1e-14


def test_apply_product_state_stationary_for_identical_ratios():
    rng = np.random.default_rng(1)
    spec = random_spec(rng, 2, xxz=True, identical_ratios=True)
    liouv = Liouvillian.from_spec(spec)
    rho0 = product_steady_state(spec)
    assert np.max(np.abs(apply_liouvillian(liouv, rho0))) < 1e-12


def test_apply_dimension_mismatch():
    liouv = Liouvillian.from_spec(xxz_spec([0, 0], [1, 1], [1, 1], 1.0, 0.0))
    with pytest.raises(ValueError):
        apply_liouvillian(liouv, np.eye(2))


def test_superoperator_consistency_with_apply():
    rng = np.random.default_rng(2)
    spec = random_spec(rng, 2)
    liouv = Liouvillian.from_spec(spec)
    M = build_superoperator(liouv)
    assert liouv.representation == "explicit_superoperator"
    for _ in range(10):
        rho = random_hermitian(rng, 4)
        vec = rho.reshape(-1, order="F")
        direct = apply_liouvillian(liouv, rho).reshape(-1, order="F")
        assert np.max(np.abs(M @ vec - direct)) < 1e-11 * max(1, np.max(np.abs(direct)))


def test_superoperator_trivial_cases():
    # no rates, no frequency: the generator vanishes identically
    liouv = Liouvillian(np.zeros((2, 2), dtype=complex), [], [2])
    assert np.max(np.abs(build_superoperator(liouv))) == 0.0

    spec = SystemSpec((QubitParams(0.3, 1.0, 0.7),))
    M = build_superoperator(Liouvillian.from_spec(spec))
    eigs = np.linalg.eigvals(M)
    assert np.min(np.abs(eigs)) < 1e-12  # a steady state always exists
    assert eigs.real.max() < 1e-9  # semigroup stability


def test_superoperator_dimension_cap():
    liouv = Liouvillian(np.zeros((2, 2), dtype=complex), [], [2])
    liouv.dim = 256  # simulate an oversized register
    with pytest.raises(ValueError):
        liouv.build_superoperator()


def test_steady_state_single_qubit():
    q = QubitParams(0.0, 1.0, 4.0)
    result = steady_state(Liouvillian.from_spec(SystemSpec((q,))))
    assert result.method == "nullspace"
    assert not result.degeneracy_flag
    assert np.allclose(result.rho_ss, np.diag([0.2, 0.8]), atol=1e-12)


def test_steady_state_matches_product_for_identical_ratios():
    rng = np.random.default_rng(3)
    spec = random_spec(rng, 2, xxz=True, identical_ratios=True)
    result = steady_state(Liouvillian.from_spec(spec))
    assert np.max(np.abs(result.rho_ss - product_steady_state(spec))) < 1e-8


def test_steady_state_methods_agree():
    rng = np.random.default_rng(4)
    spec = random_spec(rng, 3)
    liouv = Liouvillian.from_spec(spec)
    a = steady_state(liouv, method="nullspace")
    b = steady_state(liouv, method="long_time", tol=1e-9)
    assert np.max(np.abs(a.rho_ss - b.rho_ss)) < 1e-7
    assert b.method == "long_time"


def test_steady_state_degenerate_kernel_flagged():
    # purely unitary generator: every diagonal state is stationary
    liouv = Liouvillian(np.diag([0.5, -0.5]).astype(complex), [], [2])
    result = steady_state(liouv)
    assert result.degeneracy_flag
    assert result.kernel_dim > 1


def test_steady_state_unique_kernel_for_dissipative_specs():
    rng = np.random.default_rng(5)
    for n, repeats in ((2, 3), (3, 3), (4, 2)):
        for _ in range(repeats):
            spec = random_spec(rng, n)
            result = steady_state(Liouvillian.from_spec(spec))
            assert result.kernel_dim == 1
            assert not result.degeneracy_flag


def test_superoperator_spectrum_is_stable():
    rng = np.random.default_rng(12)
    for _ in range(3):
        spec = random_spec(rng, 2)
        M = build_superoperator(Liouvillian.from_spec(spec))
        eigs = np.linalg.eigvals(M)
        assert eigs.real.max() <= 1e-9 * max(1.0, np.abs(eigs).max())


def test_evolve_reaches_steady_state():
    rng = np.random.default_rng(6)
    spec = random_spec(rng, 2)
    liouv = Liouvillian.from_spec(spec)
    ss = steady_state(liouv)
    trace = evolve(liouv, np.eye(4, dtype=complex) / 4, 300.0, [], stop_residual=1e-9,
                   retain_states=False)
    assert fidelity(trace.final_state, ss.rho_ss) > 1 - 1e-6


def test_evolve_validates_sample_times():
    liouv = Liouvillian.from_spec(SystemSpec((QubitParams(0, 1, 1),)))
    rho0 = np.eye(2, dtype=complex) / 2
    with pytest.raises(ValueError):
        evolve(liouv, rho0, 1.0, [0.5, 0.2])
    with pytest.raises(ValueError):
        evolve(liouv, rho0, 1.0, [0.5, 2.0])


def test_algebra_closure_dims():
    assert algebra_closure_dim(SystemSpec((QubitParams(0, 1, 1),))) == 4
    spec2 = xxz_spec([0, 0], [1, 1], [1, 1], 1.0, 0.0)
    assert algebra_closure_dim(spec2) == 16
    assert algebra_closure_dim(spec2, include_hamiltonian=True) == 16
    with pytest.raises(ValueError):
        algebra_closure_dim(xxz_spec([0] * 5, [1] * 5, [1] * 5, 1, 0))


def test_operator_algebra_identity_only():
    assert operator_algebra_dim([np.eye(2)]) == 1
    assert operator_algebra_dim([np.eye(3)]) == 1


def test_nogo_residual_zero_cases():
    rng = np.random.default_rng(7)
    ident = random_spec(rng, 3, xxz=True, identical_ratios=True)
    assert nogo_residual(ident).residual_norm < 1e-13

    # all magnetizations zero: XYZ coupling still leaves the product state fixed
    qubits = tuple(QubitParams(rng.uniform(-1, 1), s, s) for s in rng.uniform(0.3, 2.0, 3))
    terms = tuple(
        InteractionTerm(j, k, rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2))
        for j, k in [(0, 1), (0, 2), (1, 2)]
    )
    zero_m = SystemSpec(qubits, terms)
    assert nogo_residual(zero_m).residual_norm < 1e-13


def test_nogo_residual_coefficients():
    g1, d1 = 1.0, 1.0 / 3.0  # m = 0.5
    g2, d2 = 1.0 / 3.0, 1.0  # m = -0.5
    spec = SystemSpec(
        (QubitParams(0, g1, d1), QubitParams(0, g2, d2)),
        (InteractionTerm(0, 1, 1.0, 1.0, 0.7),),
    )
    result = nogo_residual(spec)
    assert result.residual_norm > 0
    (j, k, cm) = result.mjk_terms[0]
    assert (j, k) == (0, 1)
    assert cm == pytest.approx(2.0, abs=1e-12)
    assert result.ujk_terms[0][2] == pytest.approx(0.0, abs=1e-12)


def test_nogo_residual_matches_generator_on_random_specs():
    # the identity holds whether or not the residual vanishes
    rng = np.random.default_rng(8)
    for n in (2, 3, 4):
        for _ in range(3):
            spec = random_spec(rng, n)
            result = nogo_residual(spec)  # raises on cross-check failure
            liouv = Liouvillian.from_spec(spec)
            direct = apply_liouvillian(liouv, product_steady_state(spec))
            assert np.max(np.abs(direct - result.matrix)) < 1e-12


def test_dephasing_kernel_degenerate():
    # pure sigma_z dephasing: both diagonal projectors are steady
    z = np.diag([1.0, -1.0]).astype(complex)
    liouv = Liouvillian(np.zeros((2, 2), dtype=complex), [(1.0, z)], [2])
    result = steady_state(liouv)
    assert result.degeneracy_flag


def test_long_time_unreachable_tolerance_raises():
    spec = xxz_spec([0.5, 0], [1, 0.4], [0.7, 1.2], 1.0, 0.3)
    liouv = Liouvillian.from_spec(spec)
    with pytest.raises(SteadyStateError):
        steady_state(liouv, method="long_time", tol=1e-9, t_max=0.5)
