"""Bond norm functional, its compiled fast path, and the critical fits.

Closed-form oracle used below: at alpha = 0 the bond derivative of the
(renormalized) model is diagonal in the Bell basis with eigenvalues

    (1/4 - lambda/2, 1/4 - lambda/2, 1/4 + lambda/2, lambda/2 - 3/4) / (z-1)

derived by applying each jump channel to the maximally mixed pair by hand.
Summing magnitudes gives the disordered norm (3/2 - lambda)/(z-1) for
lambda < 1/2 and (lambda + 1/2)/(z-1) up to lambda = 3/2.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dissipative_spins.models import LatticeSpec, dissipative_heisenberg
from dissipative_spins.operators import kron, pauli
from dissipative_spins.variational import (
    CompiledBond,
    FitError,
    ProductAnsatz,
    SweepRecord,
    compile_bond_evaluator,
    fit_critical,
    landau_expansion,
    mean_field_hamiltonian_term,
    mean_field_jump_term,
    minimize_norm,
    order_parameters,
    reduced_derivative,
)

Z6 = LatticeSpec(z=6, bipartite=True, renormalize=True)


def heis(lam, lattice=Z6):
    return dissipative_heisenberg(lam, lattice)


def bell_basis():
    s = 1 / np.sqrt(2)
    return np.array(
        [
            [1, 0, 0, 0],
            [0, 0, 0, 1],
            [0, s, s, 0],
            [0, s, -s, 0],
        ]
    ).T  # columns: uu, dd, psi+, psi-


def test_origin_spectrum_closed_form():
    for lam in (0.0, 0.3, 0.5, 1.0, 1.4):
        nb = reduced_derivative(heis(lam), ProductAnsatz.uniform(np.zeros(3)))
        b = bell_basis()
        in_bell = b.conj().T @ nb.total @ b
        zc = Z6.z - 1
        expected = np.array(
            [0.25 - lam / 2, 0.25 - lam / 2, 0.25 + lam / 2, lam / 2 - 0.75]
        ) / zc
        np.testing.assert_allclose(np.diag(in_bell), expected, atol=1e-12)
        np.testing.assert_allclose(
            in_bell, np.diag(np.diag(in_bell)), atol=1e-12
        )


def test_disordered_norm_closed_form():
    zc = Z6.z - 1
    for lam in (0.1, 0.3, 0.45):
        nb = reduced_derivative(heis(lam), ProductAnsatz.uniform(np.zeros(3)))
        assert nb.total_norm == pytest.approx((1.5 - lam) / zc, abs=1e-12)
    for lam in (0.6, 1.0, 1.45):
        nb = reduced_derivative(heis(lam), ProductAnsatz.uniform(np.zeros(3)))
        assert nb.total_norm == pytest.approx((lam + 0.5) / zc, abs=1e-12)


def test_breakdown_parts_hermitian_traceless():
    nb = reduced_derivative(
        heis(0.8), ProductAnsatz.bipartite([0.2, 0.1, -0.3], [0.0, 0.4, 0.2])
    )
    for part in (nb.d_loc, nb.d_int, nb.d_mf):
        np.testing.assert_allclose(part, part.conj().T, atol=1e-12)
        assert abs(np.trace(part)) < 1e-12
    assert nb.total_norm >= 0


def test_dark_states_at_lambda_zero():
    model = heis(0.0)
    for alpha in ([1, 0, 0], [0, 1, 0], [0.6, 0.0, 0.8], [0, 0, -1]):
        nb = reduced_derivative(model, ProductAnsatz.uniform(np.array(alpha, float)))
        assert nb.total_norm < 1e-12


@settings(deadline=None, max_examples=30)
@given(st.integers(0, 2**31 - 1), st.floats(0.0, 2.0))
def test_compiled_matches_explicit(seed, lam):
    rng = np.random.default_rng(seed)
    a = rng.uniform(-0.57, 0.57, 3)
    b = rng.uniform(-0.57, 0.57, 3)
    model = heis(lam)
    cb = compile_bond_evaluator(model)
    ref = reduced_derivative(model, ProductAnsatz.bipartite(a, b))
    np.testing.assert_allclose(cb.derivative(a, b), ref.total, atol=1e-12)
    assert cb.norm(a, b) == pytest.approx(ref.total_norm, abs=1e-12)


def test_compiled_rejects_hamiltonian_terms():
    model = heis(1.0)
    model.hamiltonian_terms.append((2, kron(pauli("z"), pauli("z"))))
    with pytest.raises(ValueError):
        CompiledBond(model)


@settings(deadline=None, max_examples=20)
@given(st.floats(0.0, 0.99), st.floats(-0.5, 0.5), st.floats(0.0, 2.0))
def test_in_plane_rotation_symmetry(r, az, lam):
    # the functional only sees the in-plane magnitude, never the angle
    if r**2 + az**2 > 1:
        r = np.sqrt(max(0.0, 1 - az**2)) * 0.99
    cb = compile_bond_evaluator(heis(lam))
    nx = cb.norm(np.array([r, 0, az]), np.array([r, 0, az]))
    ny = cb.norm(np.array([0, r, az]), np.array([0, r, az]))
    mixed = np.array([r / np.sqrt(2), r / np.sqrt(2), az])
    nm = cb.norm(mixed, mixed)
    assert nx == pytest.approx(ny, abs=1e-11)
    assert nx == pytest.approx(nm, abs=1e-11)


def test_bond_swap_symmetry():
    # exchanging the sublattice roles cannot change the norm
    cb = compile_bond_evaluator(heis(1.3))
    a = np.array([0.1, 0.0, 0.4])
    b = np.array([-0.2, 0.0, -0.3])
    assert cb.norm(a, b) == pytest.approx(cb.norm(b, a), abs=1e-12)


def test_mean_field_hamiltonian_decoupling():
    h = kron(pauli("z"), pauli("x"))
    out = mean_field_hamiltonian_term(h, "i", np.array([1.0, 0.0, 0.0]))
    np.testing.assert_allclose(out, kron(pauli("z"), np.eye(2)), atol=1e-14)
    out_j = mean_field_hamiltonian_term(h, "j", np.array([1.0, 0.0, 0.0]))
    np.testing.assert_allclose(out_j, kron(np.eye(2), pauli("z")), atol=1e-14)
    # orthogonal neighbor polarization kills the term
    out0 = mean_field_hamiltonian_term(h, "i", np.array([0.0, 0.0, 1.0]))
    np.testing.assert_allclose(out0, 0 * out0, atol=1e-14)


def test_mean_field_jump_brute_force():
    """Dual route: explicit 8x8 embedding vs an independent loop-based trace."""
    rng = np.random.default_rng(5)
    c = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    pair = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    pair = pair + pair.conj().T
    pair /= np.trace(pair).real
    nb_alpha = np.array([0.3, -0.2, 0.1])

    got = mean_field_jump_term(c, "i", nb_alpha, pair)

    # independent construction: dissipator on (i, k), then a hand-written
    # partial trace over k using index arithmetic only
    rho_k = 0.5 * (
        np.eye(2)
        + nb_alpha[0] * pauli("x")
        + nb_alpha[1] * pauli("y")
        + nb_alpha[2] * pauli("z")
    )
    three = np.kron(pair, rho_k)
    c_ik = np.zeros((8, 8), dtype=complex)
    for i in range(2):
        for ip in range(2):
            for k in range(2):
                for kp in range(2):
                    for j in range(2):
                        # site order (i, j, k): row index 4*i + 2*j + k
                        c_ik[4 * i + 2 * j + k, 4 * ip + 2 * j + kp] += c[
                            2 * i + k, 2 * ip + kp
                        ]
    dot = (
        c_ik @ three @ c_ik.conj().T
        - 0.5 * (c_ik.conj().T @ c_ik @ three + three @ c_ik.conj().T @ c_ik)
    )
    manual = np.zeros((4, 4), dtype=complex)
    for a in range(4):
        for b in range(4):
            for k in range(2):
                manual[a, b] += dot[2 * a + k, 2 * b + k]
    np.testing.assert_allclose(got, manual, atol=1e-12)


def test_minimize_dark_at_zero():
    res = minimize_norm(heis(0.0), kind="uniform", seed=3)
    assert res.converged
    assert res.norm < 1e-10
    ansatz, norm = res  # result unpacks as a pair
    assert norm == res.norm
    m, _ = order_parameters(ansatz)
    assert m > 0.9  # fully polarized dark state


def test_minimize_ordered_phase_value():
    res = minimize_norm(heis(0.3), kind="uniform", seed=0)
    m, ms = order_parameters(res.ansatz)
    assert ms == pytest.approx(0.0, abs=1e-8)
    # regression pin from a dense scan of the same functional
    assert m == pytest.approx(0.17306, abs=2e-4)
    assert abs(res.ansatz.alpha_A[2]) < 1e-6


def test_minimize_disordered_phase():
    res = minimize_norm(heis(1.0), kind="bipartite", seed=0)
    m, ms = order_parameters(res.ansatz)
    assert m < 1e-6 and ms < 1e-6
    assert res.norm == pytest.approx(0.3, abs=1e-9)  # (lambda + 1/2)/5


def test_minimize_staggered_phase():
    res = minimize_norm(heis(1.6), kind="bipartite", seed=0)
    _, ms = order_parameters(res.ansatz)
    assert ms == pytest.approx(0.04495, abs=2e-4)  # regression pin
    # z components antialign across sublattices
    assert res.ansatz.alpha_A[2] * res.ansatz.alpha_B[2] < 0


def test_minimize_gauge_off_agrees():
    on = minimize_norm(heis(0.35), kind="uniform", seed=1, gauge_fix=True)
    off = minimize_norm(heis(0.35), kind="uniform", seed=1, gauge_fix=False)
    assert on.norm == pytest.approx(off.norm, abs=1e-8)
    m_on, _ = order_parameters(on.ansatz)
    m_off, _ = order_parameters(off.ansatz)
    assert m_on == pytest.approx(m_off, abs=1e-6)


def test_minimize_bipartite_needs_bipartite_lattice():
    model = dissipative_heisenberg(1.0, LatticeSpec(z=6, bipartite=False))
    with pytest.raises(ValueError):
        minimize_norm(model, kind="bipartite")


def test_landau_u2_signs():
    assert landau_expansion(heis(0.3), "in-plane", 0.03, 11).u2 < 0
    assert landau_expansion(heis(1.0), "in-plane", 0.03, 11).u2 > 0
    assert landau_expansion(heis(1.4), "staggered-z", 0.03, 11).u2 > 0
    assert landau_expansion(heis(1.6), "staggered-z", 0.03, 11).u2 < 0


def test_landau_u2_root_sits_at_transition():
    """The u2 = 0 crossing is the Landau estimate of the critical coupling.

    Exactly at the transition the kink of the norm sits at phi = 0 and the
    fitted u2 jumps between branch values, so |u2| is only small at the
    bisected sign-change root, not at lambda = 0.5 itself.
    """
    def u2(lam):
        return landau_expansion(heis(lam), "in-plane", 0.03, 11).u2

    lo, hi = 0.48, 0.52
    flo = u2(lo)
    assert flo < 0 < u2(hi)
    while hi - lo > 5e-4:
        mid = 0.5 * (lo + hi)
        if (u2(mid) < 0) == (flo < 0):
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    assert abs(root - 0.5) < 0.02
    assert abs(u2(root)) < 0.02


def test_landau_quartic_confinement():
    # windows must span the eigenvalue-crossing kink to see the quartic term
    fit = landau_expansion(heis(0.52), "in-plane", 0.15, 11)
    assert fit.u2 > 0 and fit.u4 > 0 and fit.valid_quartic
    fit = landau_expansion(heis(1.48), "staggered-z", 0.40, 11)
    assert fit.u2 > 0 and fit.u4 > 0


def test_landau_validation():
    with pytest.raises(ValueError):
        landau_expansion(heis(1.0), "in-plane", 0.1, 4)
    with pytest.raises(ValueError):
        landau_expansion(heis(1.0), "radial", 0.1, 11)
    model = dissipative_heisenberg(1.0, LatticeSpec(z=6, bipartite=False))
    with pytest.raises(ValueError):
        landau_expansion(model, "staggered-z", 0.1, 11)


def _synthetic_records(lams, beta=0.5, lam_c=0.5, amp=0.4, which="m"):
    recs = []
    for lam in lams:
        val = amp * max(0.0, lam_c - lam) ** beta
        m = val if which == "m" else 0.0
        ms = val if which == "m_s" else 0.0
        recs.append(
            SweepRecord(
                lam=float(lam),
                alpha_A=np.zeros(3),
                alpha_B=np.zeros(3),
                m=m,
                m_s=ms,
                norm=0.1,
                converged=True,
                restarts_used=8,
            )
        )
    return recs


def test_fit_critical_recovers_synthetic_exponent():
    lams = np.round(np.arange(0.30, 0.701, 0.002), 9)
    fit = fit_critical(_synthetic_records(lams), which="m")
    assert fit.lambda_c == pytest.approx(0.5, abs=2e-3)
    assert fit.beta == pytest.approx(0.5, abs=0.01)
    assert fit.r_squared > 0.999
    lo, hi = fit.window
    assert lo >= 0.39 and hi <= 0.5  # strictly ordered side


def test_fit_critical_other_exponent():
    lams = np.round(np.arange(0.30, 0.701, 0.002), 9)
    fit = fit_critical(_synthetic_records(lams, beta=0.33), which="m")
    assert fit.beta == pytest.approx(0.33, abs=0.01)


def test_fit_critical_rising_order_parameter():
    # ordered side above lambda_c, like the staggered transition
    lams = np.round(np.arange(1.30, 1.701, 0.002), 9)
    recs = []
    for lam in lams:
        val = 0.3 * max(0.0, lam - 1.5) ** 0.5
        recs.append(
            SweepRecord(lam=float(lam), alpha_A=np.zeros(3), alpha_B=np.zeros(3),
                        m=0.0, m_s=val, norm=0.1, converged=True, restarts_used=8)
        )
    fit = fit_critical(recs, which="m_s")
    assert fit.lambda_c == pytest.approx(1.5, abs=2e-3)
    assert fit.beta == pytest.approx(0.5, abs=0.01)


def test_fit_critical_no_transition():
    lams = np.round(np.arange(0.6, 0.8, 0.005), 9)
    with pytest.raises(FitError):
        fit_critical(_synthetic_records(lams), which="m")


def test_fit_critical_needs_enough_records():
    with pytest.raises(FitError):
        fit_critical(_synthetic_records([0.4, 0.6]), which="m")


def test_fit_critical_ignores_unconverged():
    lams = np.round(np.arange(0.30, 0.701, 0.002), 9)
    recs = _synthetic_records(lams)
    # poison a few ordered-side records but mark them unconverged
    bad = [r for r in recs if 0.40 < r.lam < 0.42]
    for r in bad:
        recs[recs.index(r)] = SweepRecord(
            lam=r.lam, alpha_A=r.alpha_A, alpha_B=r.alpha_B,
            m=0.9, m_s=0.0, norm=r.norm, converged=False, restarts_used=8,
        )
    fit = fit_critical(recs, which="m")
    assert fit.beta == pytest.approx(0.5, abs=0.01)


def test_ansatz_validation():
    with pytest.raises(ValueError):
        ProductAnsatz.uniform(np.array([1.2, 0.0, 0.0]))
    with pytest.raises(ValueError):
        ProductAnsatz("diagonal", np.zeros(3), np.zeros(3))
