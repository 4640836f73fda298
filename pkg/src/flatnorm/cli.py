"""Command-line interface.

Every subcommand writes one JSON record (see :mod:`flatnorm.records`) to
``--out`` or standard output.  Exit codes: 0 success, 2 unreadable input,
3 infeasible problem or exhausted branch-and-bound budget, 4 anything else.
On failure the record carries an ``error`` object instead of ``outputs``.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import fixtures, records
from .deform import compare_bounds, deformation_bounds, refinement_convergence, retract_curve
from .errors import FlatNormError, InfeasibleProblem, NodeBudgetExceeded, ParseError
from .geometry import regularity_report
from .io import atomic_write, parse_chain, parse_curve, parse_off, parse_tetgen, parse_weights, write_chain, write_tetgen
from .msfn import MsfnProblem, compute_msfn, euclidean_weights, lambda_sweep, unit_weights
from .pyramid import generate_noisy_pyramid
from .rational import parse_rational
from .tu import DEFAULT_SIZE_CAP, certify

log = logging.getLogger("flatnorm")

EXIT_OK, EXIT_PARSE, EXIT_INFEASIBLE, EXIT_INTERNAL = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(f"command line: {message}")


def load_mesh(spec: str):
    """``(complex, input files, face chain)`` from an OFF file, a TetGen stem or ``fixture:NAME``."""
    if spec.startswith("fixture:"):
        name = spec.split(":", 1)[1]
        if name not in fixtures.ALL:
            raise ParseError(f"unknown fixture {name!r}; choose from {', '.join(sorted(fixtures.ALL))}")
        return fixtures.ALL[name](), [], None
    path = Path(spec)
    if path.suffix.lower() == ".off":
        return parse_off(path), [path], None
    stem = path.with_suffix("") if path.suffix in (".node", ".ele", ".face") else path
    node = stem.with_suffix(".node")
    if not node.exists():
        raise ParseError(f"no mesh at {spec} (expected .off or a TetGen .node/.ele pair)")
    K, faces = parse_tetgen(node)
    files = [node, stem.with_suffix(".ele")]
    if stem.with_suffix(".face").exists():
        files.append(stem.with_suffix(".face"))
    return K, files, faces


def _weights(args, K, dim):
    if args.weights == "unit":
        return unit_weights(K, dim)
    if args.weights == "file":
        if not args.weights_file:
            raise ParseError("--weights file needs --weights-file")
        return parse_weights(args.weights_file, K, dim)
    return euclidean_weights(K, dim)


def _lambda_grid(args):
    if args.lambdas:
        return [parse_rational(t) for t in args.lambdas.split(",") if t.strip()]
    if args.lambda_range:
        try:
            a, b, steps = args.lambda_range.split(":")
            a, b, steps = parse_rational(a), parse_rational(b), int(steps)
        except ValueError:
            raise ParseError("--lambda-range expects a:b:steps") from None
        if steps < 1:
            raise ParseError("--lambda-range needs at least one step")
        if steps == 1:
            return [a]
        return [a + (b - a) * Fraction(i, steps - 1) for i in range(steps)]
    raise ParseError("sweep needs --lambdas or --lambda-range")


def _chain_and_dim(args, K, files):
    d = args.dim if args.dim is not None else K.dim - 1
    files.append(Path(args.chain))
    t = parse_chain(args.chain, K, d)
    if getattr(args, "chain2", None):
        files.append(Path(args.chain2))
        t = t - parse_chain(args.chain2, K, d)
    return d, t


# ---------------------------------------------------------------------------
# subcommands; each returns (outputs, input files, parameters)
# ---------------------------------------------------------------------------


def cmd_msfn(args):
    K, files, _ = load_mesh(args.mesh)
    d, t = _chain_and_dim(args, K, files)
    lam = parse_rational(args.lam)
    P = MsfnProblem(K, d, t, lam, _weights(args, K, d), _weights(args, K, d + 1), args.cap_multiplicity)
    r = compute_msfn(P, node_limit=args.node_limit)
    out = records.msfn_json(K, r, P.input_mass())
    out["dim"] = d
    out["weights"] = {"d": records.weights_json(P.w), "d_plus_1": records.weights_json(P.v)}
    params = {"dim": d, "lambda": str(lam), "weights": args.weights, "cap": args.cap_multiplicity, "mesh": args.mesh}
    return out, files, params


def cmd_sweep(args):
    K, files, _ = load_mesh(args.mesh)
    d, t = _chain_and_dim(args, K, files)
    grid = _lambda_grid(args)
    sw = lambda_sweep(K, d, t, grid, _weights(args, K, d), _weights(args, K, d + 1),
                      multiplicity_cap=args.cap_multiplicity, node_limit=args.node_limit)
    out = {
        "dim": d,
        "results": [records.msfn_json(K, r) for _, r in sw.results],
        "breakpoints": [
            {"lo": records.exact(b.lo), "hi": records.exact(b.hi),
             "crossing": None if b.crossing is None else records.exact(b.crossing)}
            for b in sw.breakpoints
        ],
    }
    if args.csv:
        atomic_write(args.csv, records.sweep_csv(sw))
        out["csv"] = str(args.csv)
    params = {"dim": d, "lambdas": [str(x) for x in grid], "weights": args.weights, "mesh": args.mesh}
    return out, files, params


def cmd_certify(args):
    K, files, _ = load_mesh(args.mesh)
    d = args.dim if args.dim is not None else K.dim - 1
    cert = certify(K, d, embedded_codim_one=args.embedded_codim_one, size_cap=args.size_cap)
    params = {"dim": d, "hint": args.embedded_codim_one, "cap": args.size_cap, "mesh": args.mesh}
    return records.certificate_json(K, d, cert), files, params


def cmd_regularity(args):
    K, files, _ = load_mesh(args.mesh)
    R = regularity_report(K)
    return records.regularity_json(R, full=args.full), files, {"mesh": args.mesh, "full": args.full}


def cmd_bounds(args):
    K, files, _ = load_mesh(args.mesh)
    d = args.dim if args.dim is not None else K.dim - 1
    R = regularity_report(K)
    out = {"regularity": records.regularity_json(R)}
    if d >= 1 and K.ambient_dim is not None:
        out["comparison"] = records.bounds_json(compare_bounds(K, d, args.mass_t, args.mass_bdt, R))
    else:
        out["comparison"] = {"ours": records.bounds_json(deformation_bounds(R, d, args.mass_t, args.mass_bdt))}
    params = {"dim": d, "mass_t": args.mass_t, "mass_bdt": args.mass_bdt, "mesh": args.mesh}
    return out, files, params


def cmd_retract(args):
    K, files, _ = load_mesh(args.mesh)
    curve = parse_curve(args.curve)
    files.append(Path(args.curve))
    tr = retract_curve(K, curve, center_samples=args.samples, seed=args.seed)
    params = {"samples": args.samples, "seed": args.seed, "mesh": args.mesh}
    return records.trace_json(K, tr), files, params


def cmd_refine(args):
    K, files, _ = load_mesh(args.mesh)
    curve = parse_curve(args.curve)
    files.append(Path(args.curve))
    rows = refinement_convergence(K, curve, args.levels, center_samples=args.samples, seed=args.seed)
    params = {"levels": args.levels, "samples": args.samples, "seed": args.seed, "mesh": args.mesh}
    return {"rows": records.refinement_json(rows)}, files, params


def cmd_gen_pyramid(args):
    P = generate_noisy_pyramid(args.n, args.noise, args.seed, layers=args.layers)
    stem = Path(args.stem)
    write_tetgen(P.K, stem, faces=P.surface)
    chain_path = stem.with_suffix(".chain")
    write_chain(P.K, P.surface, chain_path)
    out = {
        "counts": list(P.K.counts()),
        "surface_triangles": len(P.surface),
        "files": [str(stem.with_suffix(s)) for s in (".node", ".ele", ".face", ".chain")],
    }
    return out, [], {"n": args.n, "noise": args.noise, "seed": args.seed, "layers": args.layers}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="flatnorm", description="Multiscale simplicial flat norm toolkit")
    p.add_argument("--out", help="write the JSON record here instead of standard output")
    p.add_argument("--no-timing", action="store_true", help="write timing_ms as null (byte-stable records)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def mesh_arg(sp):
        sp.add_argument("--mesh", required=True, help="OFF file, TetGen stem/.node, or fixture:NAME")
        sp.add_argument("--dim", type=int, help="chain dimension d (default: top dimension - 1)")

    def chain_args(sp):
        mesh_arg(sp)
        sp.add_argument("--chain", required=True)
        sp.add_argument("--chain2", help="subtract this chain (flat distance between the two)")
        sp.add_argument("--weights", choices=("euclid", "unit", "file"), default="euclid")
        sp.add_argument("--weights-file")
        sp.add_argument("--cap-multiplicity", action="store_true", help="restrict every split variable to [0, 1]")
        sp.add_argument("--node-limit", type=int, default=20000)

    sp = sub.add_parser("msfn", help="flat norm at one scale")
    chain_args(sp)
    sp.add_argument("--lambda", dest="lam", required=True)
    sp.set_defaults(func=cmd_msfn)

    sp = sub.add_parser("sweep", help="flat norm over a grid of scales")
    chain_args(sp)
    sp.add_argument("--lambdas", help="comma-separated list")
    sp.add_argument("--lambda-range", help="a:b:steps, evenly spaced and inclusive")
    sp.add_argument("--csv", help="also write a CSV table here")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("certify-tu", help="total unimodularity certificate of the boundary matrix")
    mesh_arg(sp)
    sp.add_argument("--embedded-codim-one", action="store_true",
                    help="assert the (d+1)-complex is geometrically embedded in R^(d+1)")
    sp.add_argument("--size-cap", type=int, default=DEFAULT_SIZE_CAP)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("regularity", help="mesh regularity constants")
    mesh_arg(sp)
    sp.add_argument("--full", action="store_true", help="include per-simplex data")
    sp.set_defaults(func=cmd_regularity)

    sp = sub.add_parser("bounds", help="deformation mass bounds and the cell-complex comparison")
    mesh_arg(sp)
    sp.add_argument("--mass-t", type=float, required=True)
    sp.add_argument("--mass-bdt", type=float, default=0.0)
    sp.set_defaults(func=cmd_bounds)

    for name, func, helptext in (("retract", cmd_retract, "push a PL curve onto the 1-skeleton"),
                                 ("refine-study", cmd_refine, "retraction under repeated midpoint subdivision")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--mesh", required=True)
        sp.add_argument("--curve", required=True)
        sp.add_argument("--samples", type=int, default=16)
        sp.add_argument("--seed", type=int, default=0)
        if name == "refine-study":
            sp.add_argument("--levels", type=int, default=3)
        sp.set_defaults(func=func)

    sp = sub.add_parser("gen-pyramid", help="write the noisy pyramid mesh and its surface chain")
    sp.add_argument("--n", type=int, default=22)
    sp.add_argument("--noise", type=float, default=0.05)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--layers", type=int, default=4)
    sp.add_argument("--stem", required=True, help="output path without extension")
    sp.set_defaults(func=cmd_gen_pyramid)
    return p


def _emit(args_out, text):
    if args_out:
        atomic_write(args_out, text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    out_path = None
    command = argv[0] if argv else ""
    try:
        args = parser.parse_args(argv)
        out_path = args.out
        command = args.command
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
        t0 = time.perf_counter()
        outputs, files, params = args.func(args)
        elapsed = None if args.no_timing else (time.perf_counter() - t0) * 1000.0
        rec = records.make_record(command, records.inputs_digest(files, params), outputs, elapsed)
        _emit(out_path, records.dumps(rec))
        return EXIT_OK
    except (ParseError, FileNotFoundError, IsADirectoryError) as exc:
        code = EXIT_PARSE
        err = exc
    except (InfeasibleProblem, NodeBudgetExceeded) as exc:
        code = EXIT_INFEASIBLE
        err = exc
    except FlatNormError as exc:
        code = EXIT_INTERNAL
        err = exc
    except Exception as exc:  # noqa: BLE001 - the contract is a machine-readable record for any failure
        code = EXIT_INTERNAL
        err = exc
        log.debug("internal error", exc_info=True)
    rec = {"command": command, "error": {"type": type(err).__name__, "message": str(err)}, "exit_code": code}
    _emit(out_path, records.dumps(rec))
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
