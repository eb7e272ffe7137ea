import numpy as np
import pytest

from qsync.model import (
    InteractionTerm,
    QubitParams,
    StateInit,
    SystemSpec,
    build_hamiltonian,
    ghz_state,
    initial_state,
    magnetization,
    product_steady_state,
    random_pure_state,
    rates_for_magnetization,
    xxz_spec,
)
from qsync.operators import embed, pauli


def test_magnetization_examples():
    assert magnetization(1, 1) == 0
    assert magnetization(1, 4) == pytest.approx(-0.6, abs=1e-15)
    assert magnetization(1, 0) == 1.0
    with pytest.raises(ValueError):
        magnetization(0, 0)


def test_magnetization_monotone_in_ratio():
    ratios = np.linspace(0.05, 20, 50)
    ms = [magnetization(r, 1.0) for r in ratios]
    assert np.all(np.diff(ms) > 0)
    assert magnetization(1.0, 1.0) == 0.0


def test_rates_for_magnetization_roundtrip():
    for m in np.linspace(-0.95, 0.95, 21):
        g, d = rates_for_magnetization(m)
        assert magnetization(g, d) == pytest.approx(m, abs=1e-12)
        assert max(g, d) == 1.0
    assert rates_for_magnetization(0.25) == (1.0, 0.6)


def test_spec_validation():
    q = QubitParams(0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        QubitParams(0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        InteractionTerm(1, 1)
    with pytest.raises(ValueError):
        SystemSpec((q, q), (InteractionTerm(0, 1), InteractionTerm(0, 1)))
    with pytest.raises(ValueError):
        SystemSpec((q,), (InteractionTerm(0, 1),))


def test_build_hamiltonian_examples():
    spec = SystemSpec((QubitParams(2.0, 1.0, 1.0),))
    assert np.array_equal(build_hamiltonian(spec), np.diag([1.0, -1.0]))

    heis = xxz_spec([0, 0], [1, 1], [1, 1], 1.0, 1.0)
    H = build_hamiltonian(heis)
    expected = np.diag([1.0, -1.0, -1.0, 1.0]).astype(complex)
    expected[1, 2] = expected[2, 1] = 2.0
    assert np.allclose(H, expected, atol=1e-15)
    assert np.max(np.abs(H - H.conj().T)) == 0


def test_hamiltonian_diagonal_without_xy_coupling():
    spec = xxz_spec([0.3, -0.7], [1, 1], [2, 2], 0.0, 1.3)
    H = build_hamiltonian(spec)
    assert np.max(np.abs(H - np.diag(np.diag(H)))) == 0


def test_hamiltonian_swap_symmetry_identical_qubits():
    spec = xxz_spec([0.4] * 3, [1.0] * 3, [2.0] * 3, 1.1, 0.3)
    H = build_hamiltonian(spec)
    # swap sites 0 and 2 via the permutation on basis indices
    n, d = 3, 8
    perm = np.zeros((d, d))
    for i in range(d):
        bits = [(i >> (n - 1 - j)) & 1 for j in range(n)]
        bits[0], bits[2] = bits[2], bits[0]
        k = sum(b << (n - 1 - j) for j, b in enumerate(bits))
        perm[k, i] = 1.0
    assert np.max(np.abs(perm @ H @ perm.T - H)) < 1e-13


def test_product_steady_state_examples():
    spec = xxz_spec([0, 0], [1, 1], [1, 1], 1.0, 1.0)
    assert np.allclose(product_steady_state(spec), np.eye(4) / 4)

    one = SystemSpec((QubitParams(0.0, 1.0, 4.0),))
    assert np.allclose(product_steady_state(one), np.diag([0.2, 0.8]), atol=1e-15)

    g, d = rates_for_magnetization(0.5)
    two = xxz_spec([0, 0], [g, g], [d, d], 0.0, 0.0)
    assert np.allclose(
        product_steady_state(two),
        np.diag([0.5625, 0.1875, 0.1875, 0.0625]),
        atol=1e-15,
    )


def test_product_steady_state_commutes_with_sigma_z():
    spec = xxz_spec([0, 0, 0], [1, 2, 0.3], [2, 4, 0.6], 1.0, 0.5)
    rho = product_steady_state(spec)
    for j in range(3):
        z = embed(pauli("z"), j, [2, 2, 2])
        assert np.max(np.abs(z @ rho - rho @ z)) < 1e-13


def test_ghz_state():
    rho = ghz_state(2)
    expected = np.zeros((4, 4))
    for r in (0, 3):
        for c in (0, 3):
            expected[r, c] = 0.5
    assert np.allclose(rho, expected)


def test_random_pure_state_deterministic_and_pure():
    a = random_pure_state(3, 42)
    b = random_pure_state(3, 42)
    c = random_pure_state(3, 43)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert abs(np.trace(a @ a) - 1) < 1e-12
    assert abs(np.trace(a) - 1) < 1e-12


def test_initial_state_dispatch():
    spec = xxz_spec([0, 0], [1, 1], [1, 2], 1.0, 0.0)
    assert np.allclose(initial_state(StateInit("ghz"), spec), ghz_state(2))
    assert np.allclose(
        initial_state(StateInit("product_steady"), spec), product_steady_state(spec)
    )
    explicit = np.diag([0.3, 0.2, 0.4, 0.1]).astype(complex)
    init = StateInit("explicit", explicit_matrix=explicit)
    assert np.allclose(initial_state(init, spec), explicit)
    bad = StateInit("explicit", explicit_matrix=np.diag([1.5, -0.5, 0, 0]).astype(complex))
    with pytest.raises(ValueError):
        initial_state(bad, spec)


def test_xxz_spec_topologies():
    full = xxz_spec([0] * 4, [1] * 4, [1] * 4, 1.0, 0.5, topology="all_to_all")
    assert len(full.interactions) == 6
    star = xxz_spec([0] * 4, [1] * 4, [1] * 4, 1.0, 0.5, topology="one_to_all")
    assert sorted((t.j, t.k) for t in star.interactions) == [(0, 1), (0, 2), (0, 3)]
    xyz = xxz_spec([0, 0], [1, 1], [1, 1], 2.0, 0.5, u_y=0.7)
    assert xyz.interactions[0].uy == 0.7
