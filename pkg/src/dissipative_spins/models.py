"""Declarative dissipative lattice models.

A :class:`DissipativeModel` is a lattice description plus the Hamiltonian and
jump terms of a translationally invariant master equation. The constructors
here build the purely dissipative Heisenberg (XXZ) family: a ferromagnetic
pump set that makes every uniform product state dark, and an anisotropy set
(rate lambda) whose dark states are the two Neel bond states.

Two-site jump matrices are written in the basis {uu, ud, du, dd}; the rate is
folded into the matrix (a term with rate g carries a sqrt(g) prefactor), so
downstream code never tracks rates separately.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .operators import bell_state, ketbra

_UU = np.array([1, 0, 0, 0], dtype=complex)
_UD = np.array([0, 1, 0, 0], dtype=complex)
_DU = np.array([0, 0, 1, 0], dtype=complex)
_DD = np.array([0, 0, 0, 1], dtype=complex)


@dataclass(frozen=True)
class LatticeSpec:
    """Lattice parameters: coordination number, bipartiteness, rate convention.

    ``renormalize`` applies lambda = lambda'/(z-1) to every two-particle
    coupling rate (matrices divided by sqrt(z-1)) so the mean-field term
    stays finite as z grows.
    """

    z: int = 6
    bipartite: bool = True
    renormalize: bool = True

    def __post_init__(self):
        if self.z < 2:
            raise ValueError(f"coordination number z={self.z} must be >= 2")


@dataclass(frozen=True)
class JumpTerm:
    arity: int
    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        if self.arity not in (1, 2):
            raise ValueError("jump arity must be 1 or 2")
        d = 2**self.arity
        if self.matrix.shape != (d, d):
            raise ValueError(
                f"jump {self.label!r}: matrix shape {self.matrix.shape} "
                f"does not match arity {self.arity}"
            )


@dataclass(frozen=True)
class DissipativeModel:
    lattice: LatticeSpec
    hamiltonian_terms: list = field(default_factory=list)  # (arity, matrix)
    jump_terms: list = field(default_factory=list)

    @property
    def purely_dissipative(self) -> bool:
        return len(self.hamiltonian_terms) == 0


def ferro_pump_jumps():
    """The three unit-rate pump operators out of the singlet.

    |uu><psi-|, |dd><psi-| and |psi+><psi-| drain the antisymmetric Bell
    state into the spin-triplet space, so every symmetric product state
    (any uniform ferromagnet) is dark.
    """
    psi_m = bell_state("-")
    psi_p = bell_state("+")
    return [
        JumpTerm(2, ketbra(_UU, psi_m), "uu<psi-"),
        JumpTerm(2, ketbra(_DD, psi_m), "dd<psi-"),
        JumpTerm(2, ketbra(psi_p, psi_m), "psi+<psi-"),
    ]


def anisotropy_jumps(lam: float):
    """Four rate-lambda operators draining the polarized bond states.

    sqrt(lambda) {|ud><uu|, |du><uu|, |ud><dd|, |du><dd|}: they lift the
    SU(2) symmetry and leave |ud> and |du> (the Neel bond states) dark.
    """
    if lam < 0:
        raise ValueError(f"anisotropy rate lambda={lam} must be >= 0")
    s = np.sqrt(lam)
    return [
        JumpTerm(2, s * ketbra(_UD, _UU), "ud<uu"),
        JumpTerm(2, s * ketbra(_DU, _UU), "du<uu"),
        JumpTerm(2, s * ketbra(_UD, _DD), "ud<dd"),
        JumpTerm(2, s * ketbra(_DU, _DD), "du<dd"),
    ]


def dissipative_heisenberg(lam: float, lattice: LatticeSpec) -> DissipativeModel:
    """Purely dissipative Heisenberg model: ferro pumps plus anisotropy set.

    With ``lattice.renormalize`` every two-particle rate is divided by
    (z-1); for this all-two-particle model that is an exact overall rescale
    of the dynamics, so the phase boundaries are convention independent
    (only the norm scale and the z-scaling of the interaction part change).
    """
    terms = ferro_pump_jumps() + anisotropy_jumps(lam)
    if lattice.renormalize:
        scale = 1.0 / np.sqrt(lattice.z - 1)
        terms = [JumpTerm(t.arity, scale * t.matrix, t.label) for t in terms]
    return DissipativeModel(lattice=lattice, hamiltonian_terms=[], jump_terms=terms)


def xxz_hamiltonian(J: float, lam: float) -> np.ndarray:
    """Equilibrium XXZ bond Hamiltonian -J[XX + YY + (1-lambda) ZZ].

    Documentation/oracle companion of the dissipative model; not used by
    the variational sweep itself.
    """
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    return -J * (
        np.kron(sx, sx) + np.kron(sy, sy) + (1 - lam) * np.kron(sz, sz)
    )


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def parse_config(text: str) -> dict:
    """Parse the plain-text ``key = value`` model config format.

    Recognized keys: lambda, z, bipartite, renormalize, ansatz. Lines
    starting with '#' and blank lines are skipped. Unknown keys are an
    error so typos fail loudly.
    """
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        key = key.strip().lower()
        val = val.strip()
        if key == "lambda":
            out["lambda"] = float(val)
        elif key == "z":
            out["z"] = int(val)
        elif key in ("bipartite", "renormalize"):
            low = val.lower()
            if low in _TRUE:
                out[key] = True
            elif low in _FALSE:
                out[key] = False
            else:
                raise ValueError(f"config line {lineno}: bad boolean {val!r}")
        elif key == "ansatz":
            if val not in ("uniform", "bipartite"):
                raise ValueError(f"config line {lineno}: bad ansatz {val!r}")
            out["ansatz"] = val
        else:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
    return out


def model_from_config(cfg: dict) -> DissipativeModel:
    """Build the Heisenberg model a config dict describes."""
    lattice = LatticeSpec(
        z=cfg.get("z", 6),
        bipartite=cfg.get("bipartite", True),
        renormalize=cfg.get("renormalize", True),
    )
    return dissipative_heisenberg(cfg.get("lambda", 1.0), lattice)
