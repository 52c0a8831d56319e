"""Adiabatic elimination of fast-decaying auxiliary particles.

Given a system weakly driven (V+) into an excited manifold that decays
rapidly via jumps c_k, second-order perturbation theory yields an effective
master equation on the slow manifold:

    H_eff = H_g - (1/2) V- [Htilde^-1 + (Htilde^-1)^dag] V+
    c_eff,k = c_k Htilde^-1 V+

with the non-Hermitian excited-manifold Hamiltonian
Htilde = H_e - (i/2) sum_k c_k^dag c_k. The inverse is taken on the decaying
manifold only (the excited projector's range); eliminating a manifold that
does not decay is reported as an error rather than silently regularized.

All operators act on the full (system x auxiliary) Hilbert space; callers
describe the block structure through projectors. Jump rates are folded into
the matrices as sqrt(gamma) prefactors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import dissipator, partial_trace, trace_norm_hermitian


class GaplessEliminationError(ValueError):
    """The excited manifold contains a non-decaying direction."""


@dataclass(frozen=True)
class EliminationProblem:
    """Inputs to one adiabatic elimination.

    h_ground: slow-manifold Hamiltonian (often zero).
    h_excited: excited-manifold Hamiltonian.
    v_plus: excitation operator (slow -> fast); V- is its adjoint.
    jumps: decay jump operators with sqrt(rate) folded in.
    p_excited: orthogonal projector onto the excited manifold.
    """

    h_ground: np.ndarray
    h_excited: np.ndarray
    v_plus: np.ndarray
    jumps: tuple
    p_excited: np.ndarray

    def __post_init__(self):
        dim = self.h_ground.shape[0]
        mats = [self.h_ground, self.h_excited, self.v_plus, self.p_excited]
        mats += list(self.jumps)
        for m in mats:
            if m.shape != (dim, dim):
                raise ValueError("all operators must share one square dimension")
        p = self.p_excited
        if np.abs(p @ p - p).max() > 1e-10 or np.abs(p - p.conj().T).max() > 1e-10:
            raise ValueError("p_excited must be an orthogonal projector")

    @property
    def dim(self) -> int:
        return self.h_ground.shape[0]

    @property
    def v_minus(self) -> np.ndarray:
        return self.v_plus.conj().T


def nonhermitian_hamiltonian(problem: EliminationProblem) -> np.ndarray:
    """Htilde = H_e - (i/2) sum_k c_k^dag c_k, restricted to the excited block."""
    acc = problem.h_excited.astype(complex).copy()
    for c in problem.jumps:
        acc = acc - 0.5j * (c.conj().T @ c)
    p = problem.p_excited
    return p @ acc @ p


def invert_on_decaying_manifold(
    htilde: np.ndarray, p_excited: np.ndarray, gap_tol: float = 1e-10
) -> np.ndarray:
    """Pseudo-inverse of Htilde on the range of the excited projector.

    Htilde is diagonalized inside the projector's range (it is not normal,
    so a direct eigendecomposition of the restricted block is used). Any
    eigenvalue of magnitude below gap_tol means part of the manifold
    neither decays nor dephases, and the perturbative elimination has no
    leading order there.
    """
    evals, evecs = np.linalg.eigh(p_excited)
    cols = evecs[:, evals > 0.5]  # orthonormal basis of the excited manifold
    if cols.shape[1] == 0:
        return np.zeros_like(htilde)
    block = cols.conj().T @ htilde @ cols
    w, v = np.linalg.eig(block)
    if np.abs(w).min() < gap_tol:
        raise GaplessEliminationError(
            "gapless elimination: excited manifold has a non-decaying "
            f"direction (|eigenvalue| = {np.abs(w).min():.3e})"
        )
    inv_block = v @ np.diag(1.0 / w) @ np.linalg.inv(v)
    return cols @ inv_block @ cols.conj().T


def effective_hamiltonian(problem: EliminationProblem) -> np.ndarray:
    htilde = nonhermitian_hamiltonian(problem)
    inv = invert_on_decaying_manifold(htilde, problem.p_excited)
    shift = problem.v_minus @ (inv + inv.conj().T) @ problem.v_plus
    return problem.h_ground - 0.5 * shift


def effective_jumps(problem: EliminationProblem) -> list:
    htilde = nonhermitian_hamiltonian(problem)
    inv = invert_on_decaying_manifold(htilde, problem.p_excited)
    return [c @ inv @ problem.v_plus for c in problem.jumps]


def _lindblad_rhs(rho, hamiltonian, jumps):
    acc = -1j * (hamiltonian @ rho - rho @ hamiltonian)
    for c in jumps:
        acc += dissipator(c, rho)
    return acc


def _rk4_evolve(rho0, hamiltonian, jumps, t_max, dt):
    rho = rho0.astype(complex).copy()
    steps = int(round(t_max / dt))
    for _ in range(steps):
        k1 = _lindblad_rhs(rho, hamiltonian, jumps)
        k2 = _lindblad_rhs(rho + 0.5 * dt * k1, hamiltonian, jumps)
        k3 = _lindblad_rhs(rho + 0.5 * dt * k2, hamiltonian, jumps)
        k4 = _lindblad_rhs(rho + dt * k3, hamiltonian, jumps)
        rho = rho + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return rho


@dataclass(frozen=True)
class EliminationValidation:
    error: float          # trace distance full vs effective at t_max
    t_max: float
    rho_full: np.ndarray  # full evolution, auxiliary traced out
    rho_eff: np.ndarray


def validate_elimination(
    problem: EliminationProblem,
    rho0_system: np.ndarray,
    rho0_aux: np.ndarray,
    aux_sites,
    n_sites: int,
    t_max: float = 50.0,
    dt: float = 0.02,
) -> EliminationValidation:
    """Compare full dynamics against the eliminated effective dynamics.

    Both are integrated by fixed-step RK4 from the product of rho0_system
    and rho0_aux; the auxiliary is traced out of the full result and the
    trace distance (half the trace norm of the difference) at t_max is
    reported. The error should scale with the square of the perturbation,
    i.e. drop by ~4 when the drive weakens by 2 at fixed decay rate.
    """
    aux_sites = sorted(aux_sites)
    keep = [s for s in range(n_sites) if s not in aux_sites]
    # build rho0 on the full space in site order (system sites, aux sites)
    rho0 = np.kron(rho0_system, rho0_aux)
    order = keep + aux_sites
    if order != list(range(n_sites)):
        perm = np.argsort(order)
        dims = [2] * n_sites
        t = rho0.reshape(dims + dims)
        t = np.transpose(t, list(perm) + [n_sites + p for p in perm])
        rho0 = t.reshape(2**n_sites, 2**n_sites)

    h_full = problem.h_ground + problem.h_excited + problem.v_plus + problem.v_minus
    rho_full = _rk4_evolve(rho0, h_full, list(problem.jumps), t_max, dt)
    rho_full_sys = partial_trace(rho_full, keep, n_sites)

    h_eff = effective_hamiltonian(problem)
    c_eff = effective_jumps(problem)
    h_eff_sys = strip_auxiliary(h_eff, aux_sites, n_sites, rho0_aux)
    c_eff_sys = [strip_auxiliary(c, aux_sites, n_sites, rho0_aux) for c in c_eff]
    rho_eff = _rk4_evolve(rho0_system.astype(complex), h_eff_sys, c_eff_sys, t_max, dt)

    err = 0.5 * trace_norm_hermitian(rho_full_sys - rho_eff)
    return EliminationValidation(
        error=float(err), t_max=t_max, rho_full=rho_full_sys, rho_eff=rho_eff
    )


def strip_auxiliary(op: np.ndarray, aux_sites, n_sites: int, aux_state: np.ndarray) -> np.ndarray:
    """Project a full-space operator onto the system given a frozen auxiliary.

    The auxiliary factor of an eliminated operator is a projector onto the
    auxiliary rest state, so contracting it with that state (op_sys =
    tr_aux[(1 (x) rho_aux) op]) leaves the pure system operator. Exact when
    the operator factorizes; used to express eliminated operators on the
    system space.
    """
    aux_sites = sorted(aux_sites)
    keep = [s for s in range(n_sites) if s not in aux_sites]
    n_aux = len(aux_sites)
    full = np.asarray(op, dtype=complex)
    # weight the auxiliary slot with its state, then trace it out
    dims = [2] * n_sites
    t = full.reshape(dims + dims)
    # move aux sites to the end on both row and column indices
    perm = keep + aux_sites
    t = np.transpose(t, list(perm) + [n_sites + p for p in perm])
    d_sys = 2 ** len(keep)
    d_aux = 2**n_aux
    t = t.reshape(d_sys, d_aux, d_sys, d_aux)
    return np.einsum("abcd,db->ac", t, np.asarray(aux_state, dtype=complex))
