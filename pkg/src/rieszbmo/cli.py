"""Command-line front end.

    rieszbmo generate  --n 2 --N 128 --L 1 --kind random_bmo --amplitude 1 --seed 3 -o f.rfld
    rieszbmo transform --op riesz --j 1 -i f.rfld -o rf.rfld
    rieszbmo analyze   --measure ap --p 2 -i w.rfld -o a2.json
    rieszbmo construct -i f.rfld --seed 7 -o run.json
    rieszbmo verify    --check majorization --eps 0.6 -i f.rfld -o maj.json
    rieszbmo roundtrip -i f.rfld --seed 7 -o report.json

Exit status: 0 on success / pass, 1 when a check fails (its report is still
written), 2 on usage or I/O errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import construction, grid, rfld, transforms, verification, weights
from .reports import VerificationReport, emit_profile, write_report

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("rieszbmo")


class UsageError(Exception):
    pass


def _power_of_two(s: str) -> int:
    try:
        N = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{s!r} is not an integer") from None
    if N < 8 or N & (N - 1):
        raise argparse.ArgumentTypeError(f"{N} is not a power of two >= 8")
    return N


def _positive(s: str) -> float:
    x = float(s)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"{s} is not positive")
    return x


def _floats(s: str) -> list[float]:
    return [float(t) for t in s.split(",") if t.strip()]


def _ints(s: str) -> list[int]:
    return [int(t) for t in s.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rieszbmo", description=__doc__.split("\n\n")[0])
    p.add_argument("--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def io(sp, inp=True):
        if inp:
            sp.add_argument("-i", "--input", required=True, type=Path)
        sp.add_argument("-o", "--output", required=True, type=Path)

    def report_opts(sp):
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--profile", type=Path, help="also write the CSV profile(s) here")

    g = sub.add_parser("generate", help="write a corpus field")
    g.add_argument("--n", type=int, required=True, choices=(1, 2, 3))
    g.add_argument("--N", type=_power_of_two, required=True)
    g.add_argument("--L", type=_positive, required=True)
    g.add_argument("--kind", required=True, choices=grid.FIELD_KINDS)
    g.add_argument("--value", type=float)
    g.add_argument("--k", type=_ints, help="wavevector, comma separated")
    g.add_argument("--amplitude", type=float)
    g.add_argument("--phase", type=float)
    g.add_argument("--center", type=_floats)
    g.add_argument("--radius", type=_positive)
    g.add_argument("--floor", type=float)
    g.add_argument("--exponent", type=float)
    g.add_argument("--r0", type=float)
    g.add_argument("--smoothing", type=float)
    g.add_argument("--block-level", type=int)
    g.add_argument("--seed", type=int)
    io(g, inp=False)

    t = sub.add_parser("transform", help="apply an operator to a field")
    t.add_argument("--op", required=True,
                   choices=("riesz", "hilbert", "poisson", "maximal", "abs", "exp", "log", "pow", "scale", "max_with"))
    t.add_argument("--j", type=int, default=1)
    t.add_argument("--t", type=_positive)
    t.add_argument("--arg", type=float)
    io(t)

    a = sub.add_parser("analyze", help="dyadic BMO / A_p / reverse Hölder / alpha search")
    a.add_argument("--measure", required=True, choices=("bmo", "bmo-log", "ap", "rhi", "alpha"))
    a.add_argument("--p", type=float, default=2.0)
    a.add_argument("--q", type=float, default=2.0)
    a.add_argument("--tau", type=float, default=4.0)
    a.add_argument("--min-level", type=int, default=0)
    a.add_argument("--max-level", type=int)
    io(a)
    report_opts(a)

    c = sub.add_parser("construct", help="build g1, g2 with f = (g1/g2)^alpha")
    _construction_opts(c)
    io(c)

    v = sub.add_parser("verify", help="run one numerical check")
    v.add_argument("--check", required=True,
                   choices=("majorization", "subharmonicity", "key-inequality", "sufficiency", "certify", "phi-tail"))
    v.add_argument("-i", "--input", type=Path)
    v.add_argument("--manifest", type=Path, help="construction manifest (for --check certify)")
    v.add_argument("--eps", type=float)
    v.add_argument("--t0", type=_positive)
    v.add_argument("--t", type=_floats, help="comma separated heights")
    v.add_argument("--heights", type=_floats)
    v.add_argument("--h", type=_positive)
    v.add_argument("--q", type=float, default=2.0)
    v.add_argument("--rho", type=float, default=1.0)
    v.add_argument("--tol", type=float)
    v.add_argument("--n", type=int, choices=(1, 2, 3))
    v.add_argument("--N", type=_power_of_two)
    v.add_argument("--L", type=_positive)
    v.add_argument("--level", type=int)
    v.add_argument("--index", type=_ints)
    v.add_argument("--expansion", type=_floats, default=[4.0, 8.0, 16.0, 32.0])
    v.add_argument("-o", "--output", required=True, type=Path)
    report_opts(v)

    r = sub.add_parser("roundtrip", help="factorize, certify and re-check sufficiency")
    _construction_opts(r)
    r.add_argument("--tol", type=float, default=1e-6)
    io(r)
    report_opts(r)
    return p


def _construction_opts(sp):
    d = construction.ConstructionConfig()
    sp.add_argument("--seed", type=int, default=d.seed)
    sp.add_argument("--tau", type=float, default=d.tau)
    sp.add_argument("--sigma", type=float, default=d.sigma)
    sp.add_argument("--probes", type=int, default=d.probe_count)
    sp.add_argument("--iterations", type=int, default=d.iterations)
    sp.add_argument("--tail-tol", type=float, default=d.tail_tol)
    sp.add_argument("--k-max", type=int, default=d.k_max)


def _config(args) -> construction.ConstructionConfig:
    return construction.ConstructionConfig(
        tau=args.tau, sigma=args.sigma, probe_count=args.probes, iterations=args.iterations,
        seed=args.seed, tail_tol=args.tail_tol, k_max=args.k_max,
    )


def _read(path) -> grid.ScalarField:
    try:
        return rfld.read_rfld(path)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e}") from None
    except rfld.RFLDError as e:
        raise UsageError(f"malformed RFLD input {path}: {e}") from None


def _emit(report: VerificationReport, args) -> int:
    if args.format == "csv":
        emit_profile(report, args.output)
    else:
        write_report(report, args.output)
    if args.profile is not None:
        emit_profile(report, args.profile)
    return EXIT_OK if report.passed else EXIT_FAIL


# -- commands --------------------------------------------------------------------


def cmd_generate(args) -> int:
    spec = grid.make_grid(args.n, args.N, args.L)
    keys = ("value", "k", "amplitude", "phase", "center", "radius", "floor", "exponent", "r0", "smoothing")
    params = {k: getattr(args, k) for k in keys if getattr(args, k) is not None}
    if args.block_level is not None:
        params["block_level"] = args.block_level
    try:
        f = grid.generate_field(spec, args.kind, params, args.seed)
    except ValueError as e:
        raise UsageError(str(e)) from None
    rfld.write_rfld(args.output, f)
    return EXIT_OK


def cmd_transform(args) -> int:
    f = _read(args.input)
    try:
        if args.op == "riesz":
            out = transforms.riesz(f, args.j)
        elif args.op == "hilbert":
            out = transforms.hilbert_circle(f)
        elif args.op == "poisson":
            if args.t is None:
                raise UsageError("--op poisson needs --t")
            out = transforms.poisson_extend(f, args.t)
        elif args.op == "maximal":
            out = transforms.maximal_dyadic(f)
        else:
            out = grid.field_compose([f], args.op, args.arg)
    except (ValueError, ZeroDivisionError) as e:
        raise UsageError(str(e)) from None
    rfld.write_rfld(args.output, out)
    return EXIT_OK


def supremum_report(name: str, rep: weights.CubeSupremumReport) -> VerificationReport:
    return VerificationReport(
        name, bool(np.isfinite(rep.value)), {"value": rep.value},
        {"cube": rep.worst_cube.to_dict()}, {}, [], profiles={"per_level": rep.per_level},
    )


def cmd_analyze(args) -> int:
    f = _read(args.input)
    lv = dict(min_level=args.min_level, max_level=args.max_level)
    try:
        if args.measure == "bmo":
            report = supremum_report("bmo", weights.bmo_norm(f, **lv))
        elif args.measure == "bmo-log":
            report = supremum_report("bmo_log", weights.bmo_norm(grid.field_compose(f, "log"), **lv))
        elif args.measure == "ap":
            report = supremum_report(f"a{args.p:g}", weights.ap_characteristic(f, args.p, **lv))
        elif args.measure == "rhi":
            report = supremum_report("reverse_holder", weights.reverse_holder_constant(f, args.q, **lv))
        else:
            try:
                dec = weights.find_alpha(f, args.tau)
            except weights.AlphaSearchError as e:
                report = VerificationReport("alpha", False, {"a2": e.a2_value}, {}, {"tau": args.tau},
                                            [f"FAIL: {e}"])
            else:
                report = VerificationReport(
                    "alpha", True, {"alpha": dec.alpha, "a2_of_v_squared": dec.a2_of_v_squared,
                                    **{f"a2[{k}]": v for k, v in dec.memberships.items()}},
                    {}, {"tau": args.tau}, [],
                )
    except ValueError as e:
        raise UsageError(str(e)) from None
    return _emit(report, args)


def cmd_construct(args) -> int:
    f = _read(args.input)
    try:
        result = construction.build_factorization(f, _config(args))
    except (construction.FactorizationError, weights.AlphaSearchError) as e:
        print(f"construction failed: {e}", file=sys.stderr)
        return EXIT_FAIL
    construction.write_manifest(result, args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    chk = args.check
    tol = {} if args.tol is None else {"tol": args.tol}
    if chk == "phi-tail":
        if None in (args.n, args.N, args.L, args.level):
            raise UsageError("phi-tail needs --n, --N, --L and --level")
        spec = grid.make_grid(args.n, args.N, args.L)
        index = tuple(args.index) if args.index else (0,) * args.n
        cube = grid.DyadicCube(args.level, index)
        try:
            vals = {e: verification.phi_tail_norm(spec, cube, e) for e in args.expansion}
        except ValueError as e:
            raise UsageError(str(e)) from None
        pos = [(e, v) for e, v in vals.items() if v > 0]
        slope = float(np.polyfit(np.log([e for e, _ in pos]), np.log([v for _, v in pos]), 1)[0]) if len(pos) >= 2 else float("nan")
        limit = args.tol if args.tol is not None else -0.9
        ok = bool(slope <= limit)
        report = VerificationReport("phi_tail", ok, {"slope": slope, **{f"phi[{e:g}]": v for e, v in vals.items()}},
                                    {}, {"slope": limit}, [] if ok else [f"FAIL: slope {slope:.3f} > {limit}"],
                                    profiles={"phi_per_expansion": vals})
        return _emit(report, args)

    if args.input is None:
        raise UsageError(f"--check {chk} needs --input")
    f = _read(args.input)
    try:
        if chk == "majorization":
            report = verification.check_majorization(f, args.eps, args.t0, args.t, **tol)
        elif chk == "subharmonicity":
            if args.heights is None:
                raise UsageError("subharmonicity needs --heights")
            eps = args.eps if args.eps is not None else verification.default_epsilon(f.spec.n)
            report = verification.check_subharmonicity(f, eps, args.heights, args.h, **tol)
        elif chk == "key-inequality":
            if args.t is None:
                raise UsageError("key-inequality needs --t")
            report = verification.check_key_inequality(f, args.q, args.t)
        elif chk == "sufficiency":
            report = verification.check_sufficiency(f, args.rho, args.eps)
        else:
            if args.manifest is None:
                raise UsageError("certify needs --manifest")
            try:
                result = construction.read_manifest(args.manifest)
            except (OSError, KeyError, json.JSONDecodeError, rfld.RFLDError) as e:
                raise UsageError(f"bad manifest {args.manifest}: {e}") from None
            if result.g1.spec != f.spec:
                raise UsageError("manifest fields and input live on different grids")
            report = construction.certify_factorization(f, result, **tol)
    except ValueError as e:
        raise UsageError(str(e)) from None
    return _emit(report, args)


def cmd_roundtrip(args) -> int:
    f = _read(args.input)
    try:
        report = verification.roundtrip(f, _config(args), args.tol)
    except (construction.FactorizationError, weights.AlphaSearchError) as e:
        report = VerificationReport("roundtrip", False, notes=[f"FAIL: construction: {e}"])
    except ValueError as e:
        raise UsageError(str(e)) from None
    return _emit(report, args)


COMMANDS = {
    "generate": cmd_generate,
    "transform": cmd_transform,
    "analyze": cmd_analyze,
    "construct": cmd_construct,
    "verify": cmd_verify,
    "roundtrip": cmd_roundtrip,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if not args.output.parent.exists():
            raise UsageError(f"output directory {args.output.parent} does not exist")
        inp = getattr(args, "input", None)
        if inp is not None and not inp.exists():
            raise UsageError(f"input {inp} not found")
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"rieszbmo {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"rieszbmo {args.command}: I/O error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
