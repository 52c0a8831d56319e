"""Exact Liouvillians on small clusters, for cross-checking the mean field.

Column-stacking convention throughout: vec(rho) stacks the columns of rho
(Fortran order), so vec(A rho B) = kron(B^T, A) vec(rho) and the generator
reads

    L = -i[kron(1, H) - kron(H^T, 1)]
        + sum_k [ kron(conj(c_k), c_k)
                  - 1/2 kron(1, c_k^dag c_k)
                  - 1/2 kron((c_k^dag c_k)^T, 1) ].

Spectra of Lindblad generators come in conjugate pairs with non-positive
real parts; the null space holds the steady states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .models import DissipativeModel
from .operators import embed, trace_norm_hermitian


@dataclass(frozen=True)
class Liouvillian:
    matrix: np.ndarray
    dim: int  # Hilbert-space dimension d; matrix is d^2 x d^2

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return unvec(self.matrix @ vec(rho), self.dim)


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho, dtype=complex).flatten(order="F")


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(v, dtype=complex).reshape(dim, dim, order="F")


def build_liouvillian(hamiltonian, jumps) -> Liouvillian:
    h = np.asarray(hamiltonian, dtype=complex)
    d = h.shape[0]
    if h.shape != (d, d):
        raise ValueError("hamiltonian must be square")
    eye = np.eye(d)
    mat = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for c in jumps:
        c = np.asarray(c, dtype=complex)
        if c.shape != (d, d):
            raise ValueError("jump operator dimension mismatch")
        cdc = c.conj().T @ c
        mat += np.kron(c.conj(), c)
        mat -= 0.5 * np.kron(eye, cdc)
        mat -= 0.5 * np.kron(cdc.T, eye)
    return Liouvillian(matrix=mat, dim=d)


def ring_liouvillian(model: DissipativeModel, n_sites: int) -> Liouvillian:
    """Exact generator of the model on a periodic chain of n_sites spins.

    Every two-site term is placed on each nearest-neighbor bond (i, i+1);
    for n_sites = 2 the two bonds of the formal ring coincide, so the pair
    is counted once. Matrices are used exactly as stored on the model, so
    any renormalization convention carries over unchanged (it rescales the
    generator without moving its null space).
    """
    if n_sites < 2:
        raise ValueError("need at least 2 sites")
    d = 2**n_sites
    h = np.zeros((d, d), dtype=complex)
    jumps = []
    bonds = [(i, (i + 1) % n_sites) for i in range(n_sites)]
    if n_sites == 2:
        bonds = [(0, 1)]
    for arity, term in model.hamiltonian_terms:
        if arity == 1:
            for s in range(n_sites):
                h += embed(term, [s], n_sites)
        else:
            for i, j in bonds:
                h += embed(term, [i, j], n_sites)
    for jt in model.jump_terms:
        if jt.arity == 1:
            for s in range(n_sites):
                jumps.append(embed(jt.matrix, [s], n_sites))
        else:
            for i, j in bonds:
                jumps.append(embed(jt.matrix, [i, j], n_sites))
    return build_liouvillian(h, jumps)


@dataclass(frozen=True)
class SteadySpace:
    dimension: int
    basis: list  # Hermitian representatives; trace 1 where trace is nonzero


def steady_states(liou: Liouvillian, tol: float = 1e-9) -> SteadySpace:
    """Null space of the generator, returned as Hermitian representatives.

    The Lindblad generator commutes with the adjoint operation, so the null
    space is spanned by Hermitian matrices; each basis element is
    orthogonalized in the Hilbert-Schmidt inner product and rescaled to
    trace 1 when its trace is nonzero (traceless directions are kept with
    unit Hilbert-Schmidt norm).
    """
    evals, evecs = np.linalg.eig(liou.matrix)
    null_cols = [evecs[:, k] for k in range(evals.size) if abs(evals[k]) < tol]
    dim = len(null_cols)
    herm_candidates = []
    for col in null_cols:
        x = unvec(col, liou.dim)
        herm_candidates.append(x + x.conj().T)
        herm_candidates.append(1j * (x - x.conj().T))
    basis = []
    for cand in herm_candidates:
        for b in basis:
            cand = cand - np.trace(b.conj().T @ cand) * b
        nrm = np.sqrt(abs(np.trace(cand.conj().T @ cand)))
        if nrm > 10 * tol:
            basis.append(cand / nrm)
        if len(basis) == dim:
            break
    out = []
    for b in basis:
        tr = np.trace(b).real
        out.append(b / tr if abs(tr) > 1e-9 else b)
    return SteadySpace(dimension=dim, basis=out)


def exact_norm(liou: Liouvillian, rho: np.ndarray) -> float:
    """Trace norm of the exact time derivative of rho under the generator."""
    return trace_norm_hermitian(liou.apply(rho))
