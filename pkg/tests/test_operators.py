import numpy as np
import pytest

from qsync.operators import (
    embed,
    herm_sqrt,
    kron,
    partial_trace,
    pauli,
    spin1_op,
    validate_density_matrix,
)


def test_pauli_definitions():
    assert np.array_equal(pauli("plus"), [[0, 1], [0, 0]])
    assert np.array_equal(pauli("z"), [[1, 0], [0, -1]])
    assert np.array_equal(pauli("x") @ pauli("x"), np.eye(2))
    assert np.array_equal(pauli("minus"), pauli("plus").conj().T)
    # sigma+- = (x +- iy)/2
    assert np.allclose(pauli("plus"), (pauli("x") + 1j * pauli("y")) / 2)


def test_pauli_aliases_and_errors():
    assert np.array_equal(pauli("+"), pauli("plus"))
    with pytest.raises(ValueError):
        pauli("w")


def test_spin1_definitions():
    assert np.array_equal(spin1_op("z"), np.diag([1.0, 0.0, -1.0]))
    jx, jy, jz = spin1_op("x"), spin1_op("y"), spin1_op("z")
    assert np.allclose(jx @ jy - jy @ jx, 1j * jz, atol=1e-15)
    assert np.allclose(jy @ jz - jz @ jy, 1j * jx, atol=1e-15)
    # ladder matrix elements: J+ |1,-1> = sqrt(2) |1,0>
    down = np.array([0.0, 0.0, 1.0])
    assert np.allclose(spin1_op("plus") @ down, np.sqrt(2) * np.array([0, 1, 0]))


def test_kron_examples():
    assert np.array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))
    assert np.array_equal(
        np.diag(kron(pauli("z"), pauli("z"))), [1, -1, -1, 1]
    )
    k = kron(pauli("plus"), pauli("minus"))
    expected = np.zeros((4, 4))
    expected[1, 2] = 1.0
    assert np.array_equal(k, expected)


def test_kron_associativity():
    rng = np.random.default_rng(11)
    for _ in range(5):
        a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        c = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        assert np.allclose(kron(kron(a, b), c), kron(a, kron(b, c)), atol=1e-14)


def test_embed_examples():
    assert np.array_equal(np.diag(embed(pauli("z"), 0, [2, 2])), [1, 1, -1, -1])
    assert np.array_equal(np.diag(embed(pauli("z"), 1, [2, 2])), [1, -1, 1, -1])
    # sigma+ on site 1 of |up down up> (index 0b010 = 2) gives |up up up>
    psi = np.zeros(8)
    psi[2] = 1.0
    out = embed(pauli("plus"), 1, [2, 2, 2]) @ psi
    expected = np.zeros(8)
    expected[0] = 1.0
    assert np.array_equal(out, expected)


def test_embed_distinct_sites_commute():
    rng = np.random.default_rng(5)
    dims = [2, 3, 2]
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    ea, eb = embed(a, 0, dims), embed(b, 1, dims)
    assert np.max(np.abs(ea @ eb - eb @ ea)) < 1e-13


def test_embed_errors():
    with pytest.raises(IndexError):
        embed(pauli("x"), 2, [2, 2])
    with pytest.raises(ValueError):
        embed(pauli("x"), 0, [3, 2])


def ghz3():
    psi = np.zeros(8)
    psi[0] = psi[-1] = 1 / np.sqrt(2)
    return np.outer(psi, psi)


def test_partial_trace_examples():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    a = a @ a.conj().T
    a /= np.trace(a)
    b = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    b = b @ b.conj().T
    b /= np.trace(b)
    assert np.allclose(partial_trace(kron(a, b), {0}, [2, 2]), a, atol=1e-14)
    reduced = partial_trace(ghz3(), {0, 1}, [2, 2, 2])
    assert np.allclose(reduced, np.diag([0.5, 0, 0, 0.5]), atol=1e-15)
    assert abs(np.trace(reduced) - 1) < 1e-14


def test_partial_trace_composes_and_preserves():
    rng = np.random.default_rng(2)
    dims = [2, 2, 3]
    d = 12
    m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = m @ m.conj().T
    rho /= np.trace(rho)
    joint = partial_trace(rho, {1}, dims)
    seq = partial_trace(partial_trace(rho, {0, 1}, dims), {1}, [2, 2])
    assert np.max(np.abs(joint - seq)) < 1e-13
    assert np.max(np.abs(joint - joint.conj().T)) < 1e-13
    assert abs(np.trace(joint) - 1) < 1e-13


def test_partial_trace_errors():
    with pytest.raises(ValueError):
        partial_trace(np.eye(4) / 4, set(), [2, 2])
    with pytest.raises(IndexError):
        partial_trace(np.eye(4) / 4, {2}, [2, 2])


def test_herm_sqrt_examples():
    assert np.allclose(herm_sqrt(np.eye(3)), np.eye(3))
    assert np.allclose(herm_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))


def test_herm_sqrt_roundtrip_random_psd():
    rng = np.random.default_rng(3)
    for _ in range(10):
        m = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        psd = m @ m.conj().T
        root = herm_sqrt(psd)
        assert np.max(np.abs(root - root.conj().T)) < 1e-12
        assert np.linalg.eigvalsh(root).min() > -1e-12
        assert np.max(np.abs(root @ root - psd)) < 1e-10 * max(1, np.linalg.norm(psd))


def test_herm_sqrt_rejects_bad_inputs():
    with pytest.raises(ValueError):
        herm_sqrt(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        herm_sqrt(np.diag([1.0, -1e-6]))


def test_validate_density_matrix():
    validate_density_matrix(np.diag([0.25, 0.75]).astype(complex))
    with pytest.raises(ValueError):
        validate_density_matrix(np.diag([0.5, 0.75]))
    with pytest.raises(ValueError):
        validate_density_matrix(np.array([[0.5, 0.5], [0.0, 0.5]]))
    with pytest.raises(ValueError):
        validate_density_matrix(np.diag([1.5, -0.5]))
