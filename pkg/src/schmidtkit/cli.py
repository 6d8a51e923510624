"""Command-line front end.

Exit codes: 0 success, 1 internal numeric failure, 2 invalid input. All JSON
output is deterministic for a fixed --seed (which falls back to the
SCHMIDTKIT_SEED environment variable, then to 0).
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import io
from .certify import (
    analyze,
    isotropic_sn,
    tensor_copy_bound,
)
from .linalg import InvariantViolation
from .maps import kpositivity_probe, map_from_choi
from .states import isotropic
from .twirl import (
    fidelity_with_max_entangled,
    twirl_exact,
    twirl_mc,
    two_copy_coefficients,
    two_copy_construction,
)

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_INVALID = 2

F_TIGHT = 1.0 / np.sqrt(2.0)
F_CONJECTURED = np.sqrt(3.0) / 2.0


def _default_seed() -> int:
    env = os.environ.get("SCHMIDTKIT_SEED")
    try:
        return int(env) if env else 0
    except ValueError:
        return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="schmidtkit",
        description="Schmidt-number bounds and certificates for bipartite density matrices",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="certify Schmidt-number bounds for a state file")
    p.add_argument("--input", required=True, help="density-matrix JSON file")
    p.add_argument("--search-upper", type=int, default=None, metavar="K",
                   help="also search for a rank-<=K upper-bound decomposition")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--search-vectors", type=int, default=None,
                   help="ansatz size for the upper-bound search")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="print the report as JSON")
    fmt.add_argument("--text", action="store_true", help="print a text summary (default)")
    p.add_argument("--out", default=None, help="also write the JSON report here")

    p = sub.add_parser("isotropic", help="classify an isotropic state exactly")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--f", type=float, required=True)
    p.add_argument("--emit-state", default=None, metavar="FILE")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("demo-nonadditivity",
                       help="run the two-copy rank-2 construction and verify it")
    p.add_argument("--dump", default=None, metavar="FILE",
                   help="write the 1152-member ensemble to FILE")

    p = sub.add_parser("figure-step", help="emit Schmidt-number step data as CSV")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--copies", type=int, default=2, choices=(1, 2))
    p.add_argument("--grid", type=int, default=400)
    p.add_argument("--out", required=True)

    p = sub.add_parser("probe-map", help="search for a k-positivity violation of a Choi file")
    p.add_argument("--choi", required=True, help="Hermitian Choi-matrix JSON file (raw)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--restarts", type=int, default=50)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("twirl", help="project a state onto the isotropic family")
    p.add_argument("--input", required=True)
    p.add_argument("--mode", choices=("exact", "mc"), default="exact")
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)

    return parser


def _cmd_analyze(args) -> int:
    rho = io.read_matrix_file(args.input)
    seed = args.seed if args.seed is not None else _default_seed()
    report = analyze(
        rho,
        search_upper=args.search_upper,
        restarts=args.restarts,
        seed=seed,
        search_m_vectors=args.search_vectors,
    )
    text = io.dumps(io.report_payload(report))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    if args.json:
        sys.stdout.write(text)
    else:
        upper = "unknown" if report.upper_bound is None else str(report.upper_bound)
        print(f"schmidt number lower bound: {report.lower_bound}")
        print(f"schmidt number upper bound: {upper}")
        for cert in report.certificates:
            if cert.kind == "map_witness":
                label = "reduction map p=%.6g" % cert.p if cert.p is not None else "transpose map"
                print(f"  witness[{label}, k={cert.k}]: min eigenvalue {cert.min_eigenvalue:.6e}")
            elif cert.kind == "fidelity_bound":
                print(f"  fidelity bound: f_hat={cert.f_hat:.12g} -> SN >= {cert.sn_bound}")
            elif cert.kind == "ensemble_upper":
                print(f"  ensemble upper: rank <= {cert.k}, "
                      f"{len(cert.ensemble.states)} members, residual {cert.residual:.3e}")
            elif cert.kind == "isotropic_exact":
                print(f"  isotropic state: N={cert.n}, F={cert.f:.12g}, SN = {cert.k} exactly")
    return EXIT_OK


def _cmd_isotropic(args) -> int:
    k = isotropic_sn(args.n, args.f)
    lo, hi = (k - 1) / args.n, k / args.n
    if args.emit_state:
        state = isotropic(args.n, args.f)
        io.write_matrix_file(args.emit_state, state.matrix, state.idx)
    if args.json:
        sys.stdout.write(io.dumps({
            "n": args.n,
            "f": args.f,
            "schmidt_number": k,
            "interval": {"open_lower": lo, "closed_upper": hi},
        }))
    else:
        print(f"isotropic state N={args.n}, F={args.f:g}: Schmidt number {k}")
        print(f"classification interval: {lo:.12g} < F <= {hi:.12g}")
    return EXIT_OK


def _cmd_demo(args) -> int:
    ensemble, mixture = two_copy_construction()
    s2 = np.sqrt(2.0)
    a_expect = (s2 - 1.0) ** 2 / 18.0
    b_expect = (s2 - 1.0) / 6.0
    c_expect = 0.5
    a, b1, b2, c = two_copy_coefficients(mixture)

    from .states import isotropic as iso, tensor_copies

    target = tensor_copies(iso(2, F_TIGHT), 2)
    dist = float(np.linalg.norm(mixture.matrix - target.matrix))
    ens_dist = float(np.linalg.norm(ensemble.mixture().matrix - mixture.matrix))
    from .states import schmidt_rank

    max_rank = max(schmidt_rank(st) for st in ensemble.states)

    checks = [
        ("coefficient a", abs(a - a_expect) < 1e-10, f"{a:.15g} vs {a_expect:.15g}"),
        ("coefficient b (pair 1)", abs(b1 - b_expect) < 1e-10, f"{b1:.15g} vs {b_expect:.15g}"),
        ("coefficient b (pair 2)", abs(b2 - b_expect) < 1e-10, f"{b2:.15g} vs {b_expect:.15g}"),
        ("coefficient c", abs(c - c_expect) < 1e-10, f"{c:.15g} vs {c_expect:.15g}"),
        ("mixture equals isotropic(2, 1/sqrt(2))^(x)2", dist < 1e-10, f"distance {dist:.3e}"),
        ("ensemble mixture consistent", ens_dist < 1e-10, f"distance {ens_dist:.3e}"),
        ("all 1152 members Schmidt rank <= 2", max_rank <= 2, f"max rank {max_rank}"),
    ]
    ok = True
    for name, passed, detail in checks:
        print(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
        ok = ok and passed
    if args.dump:
        io.write_ensemble_file(args.dump, ensemble)
        print(f"ensemble written to {args.dump} ({len(ensemble.states)} members)")
    print("RESULT:", "PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_NUMERIC


def _cmd_figure(args) -> int:
    if args.n != 2:
        raise InvariantViolation(f"step data is emitted for N=2 only, got N={args.n}")
    if args.grid < 2:
        raise InvariantViolation(f"grid must have at least 2 points, got {args.grid}")
    specials = [0.5, F_TIGHT, F_CONJECTURED]
    fs = sorted(set(np.linspace(0.0, 1.0, args.grid).tolist()) | set(specials))
    lines = ["F,sn_one_copy,sn_two_copy_lower,marker"]
    for f in fs:
        one = isotropic_sn(2, f)
        two = tensor_copy_bound(f, 2, 2) if args.copies == 2 else ""
        marker = ""
        if f == F_TIGHT:
            marker = "tight:sn2"
        elif f == F_CONJECTURED:
            marker = "conjectured:sn3"
        lines.append(f"{io.format_float(f)},{one},{two},{marker}")
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {len(fs)} rows to {args.out}")
    return EXIT_OK


def _cmd_probe(args) -> int:
    matrix, idx = io.read_matrix_file(args.choi, raw=True)
    lam = map_from_choi(matrix, idx.d_a, idx.d_b)
    seed = args.seed if args.seed is not None else _default_seed()
    result = kpositivity_probe(lam, args.k, restarts=args.restarts, seed=seed)
    if args.json:
        amps = result.state.amplitudes
        sys.stdout.write(io.dumps({
            "violation": result.violation,
            "min_eigenvalue": result.min_eigenvalue,
            "state_re": [float(x) for x in amps.real],
            "state_im": [float(x) for x in amps.imag],
        }))
    elif result.violation:
        print(f"violation: min eigenvalue {result.min_eigenvalue:.12g} < -1e-08")
        amps = result.state.amplitudes
        print("witness state (re):", " ".join(io.format_float(x) for x in amps.real))
        print("witness state (im):", " ".join(io.format_float(x) for x in amps.imag))
    else:
        print(f"no violation found (not a certificate); best value {result.min_eigenvalue:.12g}")
    return EXIT_OK


def _cmd_twirl(args) -> int:
    rho = io.read_matrix_file(args.input)
    seed = args.seed if args.seed is not None else _default_seed()
    if args.mode == "exact":
        out = twirl_exact(rho)
    else:
        out = twirl_mc(rho, samples=args.samples, seed=seed)
        exact = twirl_exact(rho)
        dist = float(np.linalg.norm(out.matrix - exact.matrix))
        print(f"distance to exact twirl: {dist:.6e}")
    io.write_matrix_file(args.out, out.matrix, out.idx)
    print(f"F = {fidelity_with_max_entangled(rho):.12g}")
    return EXIT_OK


_HANDLERS = {
    "analyze": _cmd_analyze,
    "isotropic": _cmd_isotropic,
    "demo-nonadditivity": _cmd_demo,
    "figure-step": _cmd_figure,
    "probe-map": _cmd_probe,
    "twirl": _cmd_twirl,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (InvariantViolation, FileNotFoundError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (np.linalg.LinAlgError, FloatingPointError, RuntimeError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
