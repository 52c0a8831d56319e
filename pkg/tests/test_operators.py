import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dissipative_spins.operators import (
    MAX_DIM,
    bell_state,
    bloch_to_density,
    dissipator,
    embed,
    ketbra,
    kron,
    partial_trace,
    pauli,
    trace_norm_hermitian,
)


def test_pauli_algebra():
    sx, sy, sz = pauli("x"), pauli("y"), pauli("z")
    np.testing.assert_allclose(sx @ sy, 1j * sz)
    np.testing.assert_allclose(sy @ sz, 1j * sx)
    np.testing.assert_allclose(sx @ sx, np.eye(2))
    np.testing.assert_allclose(pauli("identity"), np.eye(2))


def test_pauli_ladder_convention():
    # sigma^- lowers: |down><up|, so sigma^- |up> = |down>
    up = np.array([1.0, 0.0])
    down = np.array([0.0, 1.0])
    np.testing.assert_allclose(pauli("-") @ up, down)
    np.testing.assert_allclose(pauli("+") @ down, up)
    np.testing.assert_allclose(pauli("z") @ up, up)  # spin up = +1


def test_pauli_unknown_axis():
    with pytest.raises(ValueError):
        pauli("w")


def test_bloch_to_density_basics():
    rho = bloch_to_density(np.array([0.3, -0.1, 0.4]))
    assert abs(np.trace(rho) - 1) < 1e-15
    np.testing.assert_allclose(rho, rho.conj().T)
    np.testing.assert_allclose(np.trace(pauli("x") @ rho).real, 0.3)


def test_bloch_to_density_rejects_outside_ball():
    with pytest.raises(ValueError):
        bloch_to_density(np.array([1.0, 0.5, 0.0]))


@settings(deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=3, max_size=3))
def test_bloch_eigenvalues(alpha):
    alpha = np.array(alpha)
    r = np.linalg.norm(alpha)
    if r > 1:
        alpha = alpha / r
        r = 1.0
    ev = np.linalg.eigvalsh(bloch_to_density(alpha))
    np.testing.assert_allclose(sorted(ev), [(1 - r) / 2, (1 + r) / 2], atol=1e-12)


def test_kron_shapes_and_cap():
    assert kron(np.eye(2), np.eye(2), np.eye(2)).shape == (8, 8)
    n_over = int(np.log2(MAX_DIM)) + 1
    with pytest.raises(ValueError):
        kron(*([np.eye(2)] * n_over))


def test_partial_trace_factorizes_products():
    rho_a = bloch_to_density(np.array([0.2, 0.0, 0.5]))
    rho_b = bloch_to_density(np.array([0.0, -0.7, 0.1]))
    both = kron(rho_a, rho_b)
    np.testing.assert_allclose(partial_trace(both, [0], 2), rho_a, atol=1e-14)
    np.testing.assert_allclose(partial_trace(both, [1], 2), rho_b, atol=1e-14)


def test_partial_trace_preserves_trace():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    for keep in ([0], [1], [2], [0, 2]):
        assert abs(np.trace(partial_trace(x, keep, 3)) - np.trace(x)) < 1e-12


def test_dissipator_trace_free_and_hermiticity_preserving():
    rng = np.random.default_rng(1)
    c = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = h + h.conj().T
    out = dissipator(c, rho)
    assert abs(np.trace(out)) < 1e-12
    np.testing.assert_allclose(out, out.conj().T, atol=1e-12)


def test_dissipator_dimension_mismatch():
    with pytest.raises(ValueError):
        dissipator(np.eye(2), np.eye(4))


def test_trace_norm_diagonal():
    assert trace_norm_hermitian(np.diag([3.0, -4.0, 0.0])) == pytest.approx(7.0)


def test_trace_norm_rejects_non_hermitian():
    with pytest.raises(ValueError):
        trace_norm_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_trace_norm_symmetrizes_roundoff():
    base = np.diag([1.0, -1.0]).astype(complex)
    base[0, 1] = 1e-13  # below the hermiticity tolerance
    assert trace_norm_hermitian(base) == pytest.approx(2.0, abs=1e-10)


@settings(deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_trace_norm_upper_bounds_trace(seed):
    rng = np.random.default_rng(seed)
    h = rng.normal(size=(4, 4))
    h = h + h.T
    assert trace_norm_hermitian(h) >= abs(np.trace(h)) - 1e-12


def test_bell_states():
    plus = bell_state("+")
    minus = bell_state("-")
    assert abs(np.vdot(plus, plus) - 1) < 1e-15
    assert abs(np.vdot(plus, minus)) < 1e-15
    # ordering: |ud> component first, both share the 1/sqrt(2) weight
    np.testing.assert_allclose(plus, [0, 1, 1, 0] / np.sqrt(2))
    np.testing.assert_allclose(minus, [0, 1, -1, 0] / np.sqrt(2))


def test_ketbra():
    up = np.array([1.0, 0.0])
    down = np.array([0.0, 1.0])
    np.testing.assert_allclose(ketbra(down, up), pauli("-"))


def test_embed_site_order():
    a = np.array([[1, 2], [3, 4]], dtype=complex)
    b = np.array([[0, 5], [6, 0]], dtype=complex)
    eye = np.eye(2)
    np.testing.assert_allclose(embed(kron(a, b), [0, 1], 3), kron(a, b, eye))
    np.testing.assert_allclose(embed(kron(a, b), [0, 2], 3), kron(a, eye, b))
    # unordered site lists place the first operator slot on the named site
    np.testing.assert_allclose(embed(kron(a, b), [2, 0], 3), kron(b, eye, a))


def test_embed_single_site_matches_kron():
    z = pauli("z")
    np.testing.assert_allclose(embed(z, [1], 3), kron(np.eye(2), z, np.eye(2)))
