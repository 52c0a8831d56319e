"""Command-line front end.

Subcommands: sweep (phase-diagram scan over the anisotropy), fit (critical
point and exponent from sweep CSV), landau (quartic expansion of the norm at
one coupling), effective (adiabatic elimination of a problem file), oracle
(exact small-cluster diagnostics).

Exit codes: 0 success, 1 malformed input files, 2 fit or elimination
failure, 3 resource cap exceeded. Sweeps are bit-stable for a fixed --seed
regardless of --jobs: each grid point derives its own seed from the global
one and its coupling.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .effective import (
    GaplessEliminationError,
    effective_hamiltonian,
    effective_jumps,
    validate_elimination,
)
from .liouville import ring_liouvillian, steady_states
from .models import LatticeSpec, dissipative_heisenberg, parse_config
from .opformat import OperatorFormatError, format_operator, parse_problem_text
from .variational import (
    FitError,
    SweepRecord,
    fit_critical,
    landau_expansion,
    minimize_norm,
    order_parameters,
)

CSV_HEADER = "lambda,ax_A,ay_A,az_A,ax_B,ay_B,az_B,m,ms,norm,converged,restarts"
MAX_ORACLE_SITES = 6


def _point_seed(seed: int, lam: float) -> int:
    # stable per-coupling seed so results never depend on evaluation order
    return (seed * 1_000_003 + int(round(lam * 1e6))) % 2**32


def _sweep_point(task):
    lam, z, bipartite, renormalize, kind, restarts, seed = task
    lattice = LatticeSpec(z=z, bipartite=bipartite, renormalize=renormalize)
    model = dissipative_heisenberg(lam, lattice)
    res = minimize_norm(
        model, kind=kind, restarts=restarts, seed=_point_seed(seed, lam)
    )
    m, m_s = order_parameters(res.ansatz)
    return SweepRecord(
        lam=lam,
        alpha_A=res.ansatz.alpha_A,
        alpha_B=res.ansatz.alpha_B,
        m=m,
        m_s=m_s,
        norm=res.norm,
        converged=res.converged,
        restarts_used=res.restarts_used,
    )


def _format_record(r: SweepRecord) -> str:
    cols = [
        r.lam,
        r.alpha_A[0], r.alpha_A[1], r.alpha_A[2],
        r.alpha_B[0], r.alpha_B[1], r.alpha_B[2],
        r.m, r.m_s, r.norm,
    ]
    text = ",".join("%.12g" % c for c in cols)
    return f"{text},{1 if r.converged else 0},{r.restarts_used}"


def read_sweep_csv(text: str):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise OperatorFormatError("empty sweep CSV")
    header = [h.strip() for h in lines[0].split(",")]
    expected = CSV_HEADER.split(",")
    if header != expected:
        raise OperatorFormatError(f"unexpected CSV header {lines[0]!r}", line=1)
    records = []
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != len(expected):
            raise OperatorFormatError(
                f"expected {len(expected)} columns, got {len(parts)}", lineno
            )
        try:
            vals = [float(p) for p in parts]
        except ValueError:
            raise OperatorFormatError(f"bad number in {ln!r}", lineno) from None
        records.append(
            SweepRecord(
                lam=vals[0],
                alpha_A=np.array(vals[1:4]),
                alpha_B=np.array(vals[4:7]),
                m=vals[7],
                m_s=vals[8],
                norm=vals[9],
                converged=bool(int(vals[10])),
                restarts_used=int(vals[11]),
            )
        )
    return records


def _load_config(path):
    if path is None:
        return {}
    with open(path) as fh:
        return parse_config(fh.read())


def _write_out(args, text: str):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
    else:
        print(text)


def _model_settings(args, cfg):
    z = args.z if args.z is not None else cfg.get("z", 6)
    kind = args.ansatz if args.ansatz is not None else cfg.get("ansatz", "uniform")
    if kind not in ("uniform", "bipartite"):
        raise OperatorFormatError(f"unknown ansatz {kind!r}")
    if args.renormalize is None:
        renorm = cfg.get("renormalize", True)
    else:
        renorm = args.renormalize == "on"
    # a bipartite ansatz needs the two-sublattice structure on the lattice
    bipartite = bool(cfg.get("bipartite", True)) or kind == "bipartite"
    return z, kind, renorm, bipartite


def cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    z, kind, renorm, bipartite = _model_settings(args, cfg)
    step = args.step
    if step <= 0:
        raise OperatorFormatError("step must be positive")
    lams = []
    k = 0
    while True:
        lam = args.lambda_min + k * step
        if lam > args.lambda_max + 1e-9:
            break
        lams.append(round(lam, 9))
        k += 1

    def run(points):
        tasks = [
            (lam, z, bipartite, renorm, kind, args.restarts, args.seed)
            for lam in points
        ]
        if args.jobs > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                return list(pool.map(_sweep_point, tasks, chunksize=4))
        return [_sweep_point(t) for t in tasks]

    records = {r.lam: r for r in run(lams)}

    if args.refine and records:
        # refine the grid around every order-parameter onset
        fine = step / 10.0
        srec = sorted(records.values(), key=lambda r: r.lam)
        extra = set()
        for key in ("m", "m_s"):
            vals = np.array([getattr(r, key) for r in srec])
            above = vals > args.threshold
            for i in np.nonzero(above[:-1] != above[1:])[0]:
                center = 0.5 * (srec[i].lam + srec[i + 1].lam)
                j = 0
                while True:
                    off = j * fine
                    if off > 5 * step:
                        break
                    for lam in (center - off, center + off):
                        lam = round(lam, 9)
                        if args.lambda_min <= lam <= args.lambda_max and lam not in records:
                            extra.add(lam)
                    j += 1
        for r in run(sorted(extra)):
            records[r.lam] = r

    rows = [CSV_HEADER]
    rows += [_format_record(records[lam]) for lam in sorted(records)]
    _write_out(args, "\n".join(rows))
    return 0


def cmd_fit(args) -> int:
    if args.infile == "-":
        text = sys.stdin.read()
    else:
        with open(args.infile) as fh:
            text = fh.read()
    records = read_sweep_csv(text)
    which = "m" if args.which == "m" else "m_s"
    fit = fit_critical(
        records,
        which=which,
        window=(args.window[0], args.window[1]),
        threshold=args.threshold,
    )
    out = {
        "which": args.which,
        "lambda_c": fit.lambda_c,
        "beta": fit.beta,
        "window": [fit.window[0], fit.window[1]],
        "r_squared": fit.r_squared,
        "n_records": len(records),
    }
    _write_out(args, json.dumps(out))
    return 0


def cmd_landau(args) -> int:
    cfg = _load_config(args.config)
    z, _, renorm, bipartite = _model_settings(args, cfg)
    lam = args.lam if args.lam is not None else cfg.get("lambda", 1.0)
    if args.direction == "staggered-z":
        bipartite = True
    lattice = LatticeSpec(z=z, bipartite=bipartite, renormalize=renorm)
    model = dissipative_heisenberg(lam, lattice)
    fit = landau_expansion(model, args.direction, args.phi_max, args.samples)
    out = {
        "lambda": lam,
        "direction": args.direction,
        "phi_max": args.phi_max,
        "u0": fit.u0,
        "u2": fit.u2,
        "u4": fit.u4,
        "residual": fit.residual,
    }
    _write_out(args, json.dumps(out))
    return 0


def cmd_effective(args) -> int:
    with open(args.problem) as fh:
        pf = parse_problem_text(fh.read())
    h_eff = effective_hamiltonian(pf.problem)
    c_eff = effective_jumps(pf.problem)
    chunks = ["[H_eff]"]
    body = format_operator(h_eff, pf.n_sites)
    if body:
        chunks.append(body)
    for k, c in enumerate(c_eff):
        chunks.append(f"[c_eff {k}]")
        body = format_operator(c, pf.n_sites)
        if body:
            chunks.append(body)
    if args.validate:
        n_sys = pf.n_sites - len(pf.aux_sites)
        rho_sys = np.eye(2**n_sys, dtype=complex) / 2**n_sys
        down = np.zeros((2 ** len(pf.aux_sites),) * 2, dtype=complex)
        down[-1, -1] = 1.0  # auxiliaries start in their all-down rest state
        val = validate_elimination(
            pf.problem, rho_sys, down, list(pf.aux_sites), pf.n_sites,
            t_max=args.t_max,
        )
        chunks.append("[validation]")
        chunks.append(f"# trace distance at t = {val.t_max:g}")
        chunks.append(f"error = {val.error:.6e}")
    _write_out(args, "\n".join(chunks))
    return 0


def cmd_oracle(args) -> int:
    if args.n >= MAX_ORACLE_SITES + 1:
        print(
            f"oracle: n = {args.n} exceeds the exact-diagonalization cap "
            f"({MAX_ORACLE_SITES} sites)",
            file=sys.stderr,
        )
        return 3
    cfg = _load_config(args.config)
    z, _, renorm, bipartite = _model_settings(args, cfg)
    lam = args.lam if args.lam is not None else cfg.get("lambda", 1.0)
    lattice = LatticeSpec(z=z, bipartite=bipartite, renormalize=renorm)
    model = dissipative_heisenberg(lam, lattice)
    liou = ring_liouvillian(model, args.n)
    evals = np.linalg.eigvals(liou.matrix)
    space = steady_states(liou)
    d = liou.dim
    # trace preservation: the identity is a left null vector
    ident = np.eye(d, dtype=complex).flatten(order="F")
    tp_defect = float(np.abs(ident.conj() @ liou.matrix).max())
    # spectrum closed under conjugation
    conj_defect = 0.0
    for w in evals:
        conj_defect = max(conj_defect, float(np.abs(evals - w.conjugate()).min()))
    out = {
        "n": args.n,
        "lambda": lam,
        "dark_dimension": space.dimension,
        "max_real_part": float(evals.real.max()),
        "trace_defect": tp_defect,
        "conjugate_pair_defect": conj_defect,
    }
    _write_out(args, json.dumps(out))
    return 0


def _window(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("window must be 'lo,hi'")
    lo, hi = float(parts[0]), float(parts[1])
    if not 0 < lo < hi:
        raise argparse.ArgumentTypeError("window must satisfy 0 < lo < hi")
    return (lo, hi)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dspin",
        description="steady-state phase diagrams of purely dissipative spin models",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_model_flags(p):
        p.add_argument("--config", help="key = value model config file")
        p.add_argument("--z", type=int, help="lattice coordination number")
        p.add_argument("--ansatz", choices=["uniform", "bipartite"])
        p.add_argument("--renormalize", choices=["on", "off"])
        p.add_argument("--out", help="output path (default stdout)")

    p = sub.add_parser("sweep", help="scan the anisotropy and minimize the norm")
    add_model_flags(p)
    p.add_argument("--lambda-min", type=float, required=True)
    p.add_argument("--lambda-max", type=float, required=True)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--threshold", type=float, default=1e-4,
                   help="order-parameter onset used to place grid refinement")
    p.add_argument("--no-refine", dest="refine", action="store_false",
                   help="skip the automatic fine grid around the transition")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit", help="critical coupling and exponent from sweep CSV")
    p.add_argument("--in", dest="infile", default="-", help="sweep CSV ('-' = stdin)")
    p.add_argument("--which", choices=["m", "ms"], default="m")
    p.add_argument("--window", type=_window, default=(0.01, 0.1),
                   help="|lambda - lambda_c| range for the exponent fit, 'lo,hi'")
    p.add_argument("--threshold", type=float, default=1e-4)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("landau", help="quartic norm expansion at one coupling")
    add_model_flags(p)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--direction", choices=["in-plane", "staggered-z"],
                   default="in-plane")
    p.add_argument("--phi-max", type=float, default=0.03,
                   help="fit window; keep small near a transition, the norm "
                        "is only quartic below its first kink")
    p.add_argument("--samples", type=int, default=11)
    p.set_defaults(func=cmd_landau)

    p = sub.add_parser("effective", help="adiabatically eliminate a problem file")
    p.add_argument("--problem", required=True)
    p.add_argument("--validate", action="store_true",
                   help="integrate full vs effective dynamics and report the error")
    p.add_argument("--t-max", type=float, default=50.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_effective)

    p = sub.add_parser("oracle", help="exact diagnostics on a small ring")
    add_model_flags(p)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--n", type=int, default=2, help="ring size (capped at 6)")
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OperatorFormatError, FileNotFoundError) as exc:
        print(f"dspin {args.command}: {exc}", file=sys.stderr)
        return 1
    except (FitError, GaplessEliminationError) as exc:
        print(f"dspin {args.command}: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        # bad config values, malformed model parameters
        print(f"dspin {args.command}: {exc}", file=sys.stderr)
        return 1


def console_main():
    sys.exit(main())


if __name__ == "__main__":
    console_main()
