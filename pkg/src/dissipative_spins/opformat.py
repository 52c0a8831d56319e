"""Plain-text serialization of multi-site spin operators and problem files.

Operator text: one term per line,

    coeff_re coeff_im [site:token ...]

where each token is a single-site factor: a Pauli letter (x, y, z), a
raising/lowering operator (+, -), or a ket-bra in the computational basis
(uu, ud, du, dd; first letter ket, second bra, u = spin up). Sites not
listed carry the identity; a line with no tokens is a multiple of the
identity. Lines starting with '#' and blank lines are ignored; '#' also
starts an inline comment. Site 0 is the leftmost (most significant) tensor
factor.

Problem files describe one adiabatic elimination in INI-like sections:

    [sites]            n = <total sites>, aux = <aux site indices>
    [H_g] [H_e] [V+] [P_e]   operator bodies (V- is the adjoint of V+)
    [jump]             optional 'rate = <gamma>' line, then an operator
                       body; sqrt(rate) is folded into the matrix;
                       repeat the section for several jumps

Parse failures raise OperatorFormatError carrying the offending line
number.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .effective import EliminationProblem
from .operators import embed, kron, pauli


class OperatorFormatError(ValueError):
    def __init__(self, message: str, line: int = 0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


_KET = {"u": np.array([1.0, 0.0]), "d": np.array([0.0, 1.0])}


def _token_matrix(token: str):
    if token in ("x", "y", "z", "+", "-"):
        return pauli(token)
    if len(token) == 2 and token[0] in _KET and token[1] in _KET:
        return np.outer(_KET[token[0]], _KET[token[1]]).astype(complex)
    return None


def parse_operator_text(text: str, n_sites: int) -> np.ndarray:
    """Sum of all term lines, as a 2^n x 2^n matrix."""
    dim = 2**n_sites
    total = np.zeros((dim, dim), dtype=complex)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) < 2:
            raise OperatorFormatError("expected 'coeff_re coeff_im ...'", lineno)
        try:
            coeff = complex(float(fields[0]), float(fields[1]))
        except ValueError:
            raise OperatorFormatError(
                f"bad coefficient {fields[0]!r} {fields[1]!r}", lineno
            ) from None
        factors = {}
        for tok in fields[2:]:
            site_str, _, name = tok.partition(":")
            if not _:
                raise OperatorFormatError(f"token {tok!r} lacks a ':'", lineno)
            try:
                site = int(site_str)
            except ValueError:
                raise OperatorFormatError(f"bad site index {site_str!r}", lineno) from None
            if not 0 <= site < n_sites:
                raise OperatorFormatError(
                    f"site {site} outside 0..{n_sites - 1}", lineno
                )
            if site in factors:
                raise OperatorFormatError(f"site {site} listed twice", lineno)
            mat = _token_matrix(name)
            if mat is None:
                raise OperatorFormatError(f"unknown token {name!r}", lineno)
            factors[site] = mat
        if factors:
            sites = sorted(factors)
            term = kron(*[factors[s] for s in sites])
            total += coeff * embed(term, sites, n_sites)
        else:
            total += coeff * np.eye(dim)
    return total


def format_operator(op: np.ndarray, n_sites: int, tol: float = 1e-12) -> str:
    """Pauli-string decomposition of op, one term per line.

    Inverse of parse_operator_text up to the choice of basis (output uses
    x/y/z only, never the ket-bra tokens).
    """
    op = np.asarray(op, dtype=complex)
    dim = 2**n_sites
    if op.shape != (dim, dim):
        raise ValueError(f"operator shape {op.shape} does not match {n_sites} sites")
    letters = ("identity", "x", "y", "z")
    lines = []
    for combo in product(range(4), repeat=n_sites):
        p = kron(*[pauli(letters[k]) for k in combo]) if n_sites else np.eye(1)
        coeff = np.trace(p.conj().T @ op) / dim
        if abs(coeff) <= tol:
            continue
        toks = [f"{s}:{letters[k]}" for s, k in enumerate(combo) if k != 0]
        lines.append(
            " ".join(["%.12g" % coeff.real, "%.12g" % coeff.imag] + toks)
        )
    return "\n".join(lines)


@dataclass(frozen=True)
class ProblemFile:
    n_sites: int
    aux_sites: tuple
    rates: tuple
    problem: EliminationProblem


_OP_SECTIONS = ("H_g", "H_e", "V+", "P_e")


def parse_problem_text(text: str) -> ProblemFile:
    sections = {}   # name -> list of (lineno, line) bodies
    jump_bodies = []  # one list per [jump] section
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name == "jump":
                jump_bodies.append([])
                current = jump_bodies[-1]
            elif name == "sites" or name in _OP_SECTIONS:
                if name in sections:
                    raise OperatorFormatError(f"duplicate section [{name}]", lineno)
                sections[name] = []
                current = sections[name]
            else:
                raise OperatorFormatError(f"unknown section [{name}]", lineno)
            continue
        if current is None:
            raise OperatorFormatError("content before any section header", lineno)
        current.append((lineno, line))

    if "sites" not in sections:
        raise OperatorFormatError("missing [sites] section")
    n_sites = None
    aux_sites = ()
    for lineno, line in sections["sites"]:
        key, eq, value = (p.strip() for p in line.partition("="))
        if not eq:
            raise OperatorFormatError("expected 'key = value'", lineno)
        if key == "n":
            n_sites = int(value)
        elif key == "aux":
            aux_sites = tuple(
                int(v) for v in value.replace(",", " ").split()
            )
        else:
            raise OperatorFormatError(f"unknown [sites] key {key!r}", lineno)
    if n_sites is None or n_sites < 1:
        raise OperatorFormatError("[sites] must set n to a positive integer")
    for s in aux_sites:
        if not 0 <= s < n_sites:
            raise OperatorFormatError(f"aux site {s} outside 0..{n_sites - 1}")

    def parse_body(body):
        # bodies hold only non-blank lines, so map parse positions back to
        # the original file line by line
        joined = "\n".join(line for _, line in body)
        try:
            return parse_operator_text(joined, n_sites)
        except OperatorFormatError as exc:
            orig = body[exc.line - 1][0] if 0 < exc.line <= len(body) else exc.line
            raise OperatorFormatError(str(exc).split(": ", 1)[1], orig) from None

    def body_matrix(name):
        dim = 2**n_sites
        if name not in sections or not sections[name]:
            return np.zeros((dim, dim), dtype=complex)
        return parse_body(sections[name])

    if "V+" not in sections:
        raise OperatorFormatError("missing [V+] section")
    if "P_e" not in sections:
        raise OperatorFormatError("missing [P_e] section")

    jumps = []
    rates = []
    for body in jump_bodies:
        rate = 1.0
        op_lines = []
        for lineno, line in body:
            if line.replace(" ", "").startswith("rate="):
                try:
                    rate = float(line.partition("=")[2])
                except ValueError:
                    raise OperatorFormatError("bad rate value", lineno) from None
                if rate < 0:
                    raise OperatorFormatError("rate must be nonnegative", lineno)
            else:
                op_lines.append((lineno, line))
        if not op_lines:
            raise OperatorFormatError("[jump] section has no operator lines")
        mat = parse_body(op_lines)
        jumps.append(np.sqrt(rate) * mat)
        rates.append(rate)

    problem = EliminationProblem(
        h_ground=body_matrix("H_g"),
        h_excited=body_matrix("H_e"),
        v_plus=body_matrix("V+"),
        jumps=tuple(jumps),
        p_excited=body_matrix("P_e"),
    )
    return ProblemFile(
        n_sites=n_sites, aux_sites=aux_sites, rates=tuple(rates), problem=problem
    )
