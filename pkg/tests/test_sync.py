import numpy as np
import pytest

from qsync.liouville import Liouvillian, steady_state
from qsync.model import product_steady_state, rates_for_magnetization, xxz_spec
from qsync.observables import expectation
from qsync.operators import embed, kron, pauli
from qsync.sync import (
    TwoQubitAnalyticParams,
    flip_flop,
    husimi_q_pair,
    husimi_q_single,
    s_function_single,
    s_rel_analytic,
    s_rel_quadrature,
    sync_report,
    two_qubit_analytic,
)

FOUR_PI = 4 * np.pi


def random_density(rng, d):
    m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = m @ m.conj().T
    return rho / np.trace(rho)


def sphere_quad(n=64):
    x, w = np.polynomial.legendre.leggauss(n)
    theta = np.arccos(x)
    phi = 2 * np.pi * np.arange(n) / n
    return theta, x, w, phi, 2 * np.pi / n


def test_husimi_single_examples():
    mixed = np.eye(2, dtype=complex) / 2
    for theta, phi in [(0.1, 0.3), (2.0, 4.1), (np.pi, 0.0)]:
        assert husimi_q_single(mixed, theta, phi) == pytest.approx(1 / FOUR_PI)
    up = np.diag([1.0, 0.0]).astype(complex)
    assert husimi_q_single(up, 0.0, 0.0) == pytest.approx(1 / (2 * np.pi))
    with pytest.raises(ValueError):
        husimi_q_single(mixed, -0.1, 0.0)
    with pytest.raises(ValueError):
        husimi_q_single(mixed, 0.1, 7.0)


def test_husimi_single_normalization_and_bloch_form():
    rng = np.random.default_rng(0)
    rho = random_density(rng, 2)
    theta, x, w, phi, wphi = sphere_quad(48)
    total = sum(
        wt * wphi * husimi_q_single(rho, th, ph) for th, wt in zip(theta, w) for ph in phi
    )
    assert total == pytest.approx(1.0, abs=1e-10)
    # closed form (1 + m.n)/(4 pi)
    m = [expectation(rho, pauli(a)).real for a in "xyz"]
    th, ph = 1.1, 2.3
    n = [np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)]
    assert husimi_q_single(rho, th, ph) == pytest.approx((1 + np.dot(m, n)) / FOUR_PI, abs=1e-12)


def test_husimi_pair_factorizes_and_normalizes():
    rng = np.random.default_rng(1)
    a, b = random_density(rng, 2), random_density(rng, 2)
    prod = kron(a, b)
    args = (0.7, 1.9, 2.2, 5.1)
    assert husimi_q_pair(prod, *args) == pytest.approx(
        husimi_q_single(a, args[0], args[2]) * husimi_q_single(b, args[1], args[3]),
        abs=1e-14,
    )
    mixed = np.eye(4, dtype=complex) / 4
    assert husimi_q_pair(mixed, *args) == pytest.approx(1 / FOUR_PI**2)

    rho = random_density(rng, 4)
    theta, x, w, phi, wphi = sphere_quad(32)
    total = 0.0
    for t1, w1 in zip(theta, w):
        for t2, w2 in zip(theta, w):
            for p1 in phi:
                q = np.array([husimi_q_pair(rho, t1, t2, p1, p2) for p2 in phi])
                total += w1 * w2 * wphi * wphi * q.sum()
    assert total == pytest.approx(1.0, abs=1e-9)


def test_s_function_single():
    diag = np.diag([0.3, 0.7]).astype(complex)
    for phi in np.linspace(0, 2 * np.pi, 7, endpoint=False):
        assert s_function_single(diag, phi) == 0

    plus = np.full((2, 2), 0.5, dtype=complex)  # <sigma+> = 1/2
    assert s_function_single(plus, 0.0) == pytest.approx(1 / 8)

    rng = np.random.default_rng(2)
    rho = random_density(rng, 2)
    grid = np.linspace(0, 2 * np.pi, 256, endpoint=False)
    integral = np.mean([s_function_single(rho, p) for p in grid]) * 2 * np.pi
    assert integral == pytest.approx(0.0, abs=1e-12)


def test_s_function_single_matches_theta_integral():
    # the integrand carries sqrt(1 - x^2), so Gauss-Legendre converges only
    # algebraically; order 512 puts the quadrature error below 1e-9
    rng = np.random.default_rng(3)
    rho = random_density(rng, 2)
    x, w = np.polynomial.legendre.leggauss(512)
    theta = np.arccos(x)
    for phi in (0.0, 1.0, 4.5):
        quad = sum(wt * husimi_q_single(rho, th, phi) for th, wt in zip(theta, w))
        assert s_function_single(rho, phi) == pytest.approx(quad - 1 / (2 * np.pi), abs=1e-8)


def test_s_rel_analytic_examples():
    rng = np.random.default_rng(4)
    prod = kron(random_density(rng, 2), np.diag([0.5, 0.5]).astype(complex))
    for phi in (0.0, 2.0):
        assert abs(s_rel_analytic(prod, phi)) < 1e-13

    rho = np.eye(4, dtype=complex) / 4
    rho[1, 2] = rho[2, 1] = 0.1  # <s+ s-> = 0.1
    assert s_rel_analytic(rho, 0.0) == pytest.approx(np.pi * 0.1 / 16)
    grid = np.linspace(0, 2 * np.pi, 720, endpoint=False)
    mx = max(s_rel_analytic(rho, p) for p in grid)
    assert mx == pytest.approx(np.pi * 0.1 / 16, abs=1e-6)


def test_s_rel_quadrature_is_oracle_for_analytic():
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(12):
        rho = random_density(rng, 4)
        for phi in (0.0, 1.7):
            gap = abs(s_rel_quadrature(rho, phi, 64, 64) - s_rel_analytic(rho, phi))
            worst = max(worst, gap)
    assert worst < 1e-6


def test_s_rel_quadrature_periodic_and_guarded():
    rng = np.random.default_rng(6)
    rho = random_density(rng, 4)
    a = s_rel_quadrature(rho, 0.9, 32, 32)
    b = s_rel_quadrature(rho, 0.9 + 2 * np.pi, 32, 32)
    assert a == pytest.approx(b, abs=1e-10)
    with pytest.raises(ValueError):
        s_rel_quadrature(rho, 0.0, 8, 64)


def test_two_qubit_analytic_examples():
    p = TwoQubitAnalyticParams(delta=0.4, u=1.2, gamma1=1.0, gamma2=2.0, m1=0.3, m2=0.3)
    assert two_qubit_analytic(p) == 0

    circled = TwoQubitAnalyticParams(delta=0.0, u=1.0, gamma1=1.6, gamma2=1.6, m1=0.25, m2=-0.25)
    value = two_qubit_analytic(circled)
    assert value == pytest.approx(-0.024038461538461536j, abs=1e-15)
    assert np.pi / 16 * abs(value) == pytest.approx(4.72e-3, abs=1e-5)

    far = TwoQubitAnalyticParams(delta=1e7, u=1.0, gamma1=1.6, gamma2=1.6, m1=0.25, m2=-0.25)
    assert abs(two_qubit_analytic(far)) < 1e-6


def test_sync_report_product_state_and_rotation_invariance():
    g1, d1 = rates_for_magnetization(0.3)
    g2, d2 = rates_for_magnetization(-0.5)
    spec = xxz_spec([0.0, 0.0], [g1, g2], [d1, d2], 1.0, 0.5)
    assert sync_report(product_steady_state(spec), spec).total < 1e-13

    result = steady_state(Liouvillian.from_spec(spec))
    report = sync_report(result.rho_ss, spec)
    assert report.total > 1e-4
    entry = report.per_pair[(0, 1)]
    assert entry["s_max"] == pytest.approx(np.pi / 16 * abs(entry["flip_flop"]), abs=1e-15)
    assert entry["phi0"] == pytest.approx(np.angle(entry["flip_flop"]))

    # global rotation exp(-i phi/2 sum sz) shifts phases, not amplitudes
    phi = 0.83
    zsum = embed(pauli("z"), 0, [2, 2]) + embed(pauli("z"), 1, [2, 2])
    u = np.diag(np.exp(-0.5j * phi * np.diag(zsum)))
    rotated = u @ result.rho_ss @ u.conj().T
    report_rot = sync_report(rotated, spec)
    assert report_rot.total == pytest.approx(report.total, abs=1e-12)


def test_flip_flop_matches_embedded_expectation():
    rng = np.random.default_rng(7)
    rho = random_density(rng, 8)
    op = embed(pauli("plus"), 0, [2, 2, 2]) @ embed(pauli("minus"), 2, [2, 2, 2])
    assert flip_flop(rho, 0, 2) == pytest.approx(expectation(rho, op))


def test_s_max_bound():
    rng = np.random.default_rng(8)
    spec = xxz_spec([0, 0], [1, 1], [1, 1], 1.0, 0.0)
    for _ in range(20):
        report = sync_report(random_density(rng, 4), spec)
        assert report.per_pair[(0, 1)]["s_max"] <= np.pi / 16 + 1e-12


@pytest.mark.parametrize("n", [3, 4, 5])
def test_blockade_persists_for_larger_registers(n):
    # identical gain/damping ratios + XXZ: every pair amplitude vanishes
    rng = np.random.default_rng(n)
    ratio = 0.4
    scales = rng.uniform(0.3, 2.0, n)
    spec = xxz_spec(
        rng.uniform(-1, 1, n), ratio * scales, scales, 1.5, 0.6, topology="all_to_all"
    )
    result = steady_state(Liouvillian.from_spec(spec))
    report = sync_report(result.rho_ss, spec)
    assert all(entry["s_max"] <= 1e-8 for entry in report.per_pair.values())
    assert report.total <= 1e-8 * len(report.per_pair)
