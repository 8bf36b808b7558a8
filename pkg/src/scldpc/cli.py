"""Command-line interface.

Every subcommand resolves its configuration as defaults, then an optional
JSON file (``--config``), then explicit flags.  Results and a JSON manifest
(resolved configuration, package versions, wall time) are written
atomically into the output directory, which defaults to ``$SCLDPC_OUTPUT_DIR``
or ``./scldpc-out``.

Exit status is 0 on success, 2 on invalid input and 1 on runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import platform
import sys
import time
from datetime import datetime, timezone
from importlib import metadata
from pathlib import Path

import numpy as np

from . import construct, cycles, design, enumeration, exit_chart, simulate
from .matrix_io import atomic_write_text, cb_from_powers, read_matrix

log = logging.getLogger("scldpc")

OUTPUT_ENV = "SCLDPC_OUTPUT_DIR"

# Options shared by all subcommands; they never reach the manifest's config.
_GLOBAL = {"command", "config", "out_dir", "verbose"}


class UsageError(ValueError):
    """Invalid command-line or configuration input."""


def _snr_range(text: str) -> list:
    """Parse ``a:step:b`` (inclusive) or a comma list into SNR values."""
    try:
        if ":" in text:
            a, step, b = (float(t) for t in text.split(":"))
            if step <= 0 or b < a:
                raise ValueError
            n = int(np.floor((b - a) / step + 1e-9)) + 1
            return [round(a + i * step, 10) for i in range(n)]
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad SNR specification {text!r}; use a:step:b") from None


def _int_list(text: str) -> list:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}") from None


def _add_code_params(p, gamma=True):
    if gamma:
        p.add_argument("--gamma", type=int, help="rows of the partitioning matrix")
    p.add_argument("--kappa", type=int, help="columns of the partitioning matrix")
    p.add_argument("--z", type=int, help="circulant size")
    p.add_argument("--l", type=int, help="coupling length")
    p.add_argument("--alpha", type=int, help="power-matrix multiplier (c_ij = alpha*i*j mod z)")


def _add_exit_params(p):
    p.add_argument("--tol", type=float, default=1e-4, help="threshold bisection tolerance")
    p.add_argument("--model", choices=sorted(exit_chart.MODELS), default="exact",
                   help="J-function model")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scldpc",
        description="Design and evaluation of partitioned spatially coupled LDPC codes.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with option values (flags override it)")
    common.add_argument("--out-dir", help=f"output directory (default ${OUTPUT_ENV} or ./scldpc-out)")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("enumerate", parents=[common],
                       help="list one column distribution per equivalence class")
    p.add_argument("--gamma", type=int, help="number of rows")
    p.add_argument("--kappa", type=int, help="number of columns")
    p.add_argument("--filtered", action="store_true", help="drop matrices with a constant row")
    p.set_defaults(required=("gamma", "kappa"))

    p = sub.add_parser("count", parents=[common], help="count equivalence classes")
    p.add_argument("--gamma", type=int, help="number of rows")
    p.add_argument("--kappa", type=int, help="number of columns")
    p.add_argument("--what", choices=("nonequivalent", "filtered", "distributions"),
                   default="nonequivalent", help="quantity to count")
    p.set_defaults(required=("gamma", "kappa"))

    p = sub.add_parser("cycles", parents=[common], help="6-cycle counts of a matrix file")
    p.add_argument("--matrix", help="partitioning or power matrix file")
    p.add_argument("--z", type=int, help="circulant size (overrides the file header)")
    p.add_argument("--l", type=int, default=5, help="coupling length for partitioning matrices")
    p.add_argument("--alpha", type=int, default=6, help="power-matrix multiplier")
    p.set_defaults(required=("matrix",))

    p = sub.add_parser("threshold", parents=[common], help="EXIT threshold of a matrix file")
    p.add_argument("--matrix", help="protograph or partitioning matrix file")
    p.add_argument("--l", type=int,
                   help="treat the file as a partitioning matrix coupled over l replicas")
    p.add_argument("--proxy", choices=("left", "right"),
                   help="threshold of a boundary protograph of the partitioning matrix instead")
    _add_exit_params(p)
    p.set_defaults(required=("matrix",))

    p = sub.add_parser("design", parents=[common], help="Pareto design without locality")
    _add_code_params(p)
    _add_exit_params(p)
    p.add_argument("--min-gain", type=float, help="threshold margin of the filter (default: tol)")
    p.add_argument("--patience", type=int, help="early exit after this many non-improving candidates")
    p.add_argument("--n-jobs", type=int, default=1, help="worker processes")
    p.set_defaults(required=("gamma", "kappa", "z", "l", "alpha"))

    p = sub.add_parser("design-local", parents=[common], help="Pareto design with sub-block locality")
    p.add_argument("--gamma-c", type=int, help="coupling rows")
    p.add_argument("--gamma-l", type=int, help="local rows")
    _add_code_params(p, gamma=False)
    p.add_argument("--scheme", choices=("regular", "balanced", "unbalanced"), default="regular",
                   help="local-row layout used during the search")
    p.add_argument("--nu", type=int, default=0, help="zeros in the local rows")
    p.add_argument("--side", choices=("left", "right"), default="right",
                   help="boundary protograph used as the search proxy")
    p.add_argument("--cd-scheme", choices=("balanced", "unbalanced"),
                   help="re-evaluate the CD member with this local layout (uses --final-nu)")
    p.add_argument("--td-scheme", choices=("balanced", "unbalanced"),
                   help="re-evaluate the TD member with this local layout (uses --final-nu)")
    p.add_argument("--final-nu", type=int, help="zeros of the re-evaluation layouts")
    _add_exit_params(p)
    p.add_argument("--min-gain", type=float, help="threshold margin of the filter (default: tol)")
    p.add_argument("--n-jobs", type=int, default=1, help="worker processes")
    p.set_defaults(required=("gamma_c", "gamma_l", "kappa", "z", "l", "alpha"))

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo BER over AWGN")
    p.add_argument("--code", help="partitioning matrix or power matrix file")
    p.add_argument("--snr", type=_snr_range, help="SNR points in dB as a:step:b")
    p.add_argument("--mode", choices=("global", "local"), default="global",
                   help="decode the coupled code or one replica's local code")
    p.add_argument("--z", type=int, help="circulant size (overrides the file header)")
    p.add_argument("--l", type=int, default=5, help="coupling length")
    p.add_argument("--alpha", type=int, default=6, help="power-matrix multiplier")
    p.add_argument("--snr-convention", choices=("ebn0", "symbol"), default="ebn0",
                   help="read SNR as Eb/N0 at the code's design rate, or as 1/sigma^2")
    p.add_argument("--rate", type=float,
                   help="read SNR as Eb/N0 at this rate instead (e.g. the full code's rate "
                        "when decoding locally)")
    p.add_argument("--seed", type=int, default=0, help="root seed")
    p.add_argument("--min-frame-errors", type=int, default=50, help="frame errors per point")
    p.add_argument("--max-frames", type=int, default=100_000, help="frame cap per point")
    p.add_argument("--max-iter", type=int, default=100, help="BP iteration cap")
    p.add_argument("--n-jobs", type=int, default=1, help="worker processes")
    p.set_defaults(required=("code", "snr"))
    return parser


def load_config(path) -> dict:
    """Read a JSON config; a manifest written by this tool is accepted as well.

    Keys may use dashes or underscores.
    """
    text = Path(path).read_text()
    data = json.loads(text) if text.strip() else {}
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    if "config" in data and "command" in data and isinstance(data["config"], dict):
        data = data["config"]
    return {k.replace("-", "_"): v for k, v in data.items()}


def _subparser(parser, command):
    for action in parser._subparsers._group_actions:
        if command in action.choices:
            return action.choices[command]
    raise UsageError(f"unknown command {command!r}")


def resolve(argv, parser=None) -> argparse.Namespace:
    """Parse ``argv`` applying defaults, then the config file, then flags."""
    parser = parser or build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        raise UsageError("a command is required")
    sp = _subparser(parser, args.command)
    if args.config:
        cfg = load_config(args.config)
        dests = {a.dest for a in sp._actions} - _GLOBAL - {"help", "required"}
        unknown = sorted(set(cfg) - dests)
        if unknown:
            raise UsageError(f"unknown config keys for {args.command}: {', '.join(unknown)}")
        if "snr" in cfg and isinstance(cfg["snr"], str):
            cfg["snr"] = _snr_range(cfg["snr"])
        sp.set_defaults(**cfg)
        args = parser.parse_args(argv)
    missing = [d for d in args.required if getattr(args, d, None) is None]
    if missing:
        sp.print_usage(sys.stderr)
        flags = ", ".join("--" + d.replace("_", "-") for d in missing)
        raise UsageError(f"{args.command}: missing required option(s) {flags}")
    return args


def _config_of(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in _GLOBAL | {"required"}}


def _versions() -> dict:
    out = {"python": platform.python_version()}
    for pkg in ("artifact", "numpy", "numba", "scipy", "scikit-learn", "joblib"):
        try:
            out[pkg] = metadata.version(pkg)
        except metadata.PackageNotFoundError:
            out[pkg] = None
    return out


def _csv_text(rows, columns) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _fmt(r.get(k)) for k in columns})
    return buf.getvalue()


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


def _load_code_matrix(path, z_flag):
    mf = read_matrix(path)
    z = z_flag if z_flag is not None else mf.z
    return mf, z


def cmd_enumerate(args, out):
    stream = enumeration.enumerate_nonequivalent(args.kappa, args.gamma)
    if args.filtered:
        stream = enumeration.filter_nonconstant_rows(stream)
    rows = [{"index": i, "column_distribution": " ".join(map(str, n))} for i, n in enumerate(stream)]
    out["enumerate.csv"] = _csv_text(rows, ["index", "column_distribution"])
    print(len(rows))


def cmd_count(args, out):
    if args.what == "distributions":
        n = enumeration.count_distributions(args.kappa, args.gamma)
    elif args.what == "filtered":
        n = enumeration.count_filtered(args.kappa, args.gamma)
    else:
        n = enumeration.count_nonequivalent(args.kappa, args.gamma)
    out["count.json"] = json.dumps({"gamma": args.gamma, "kappa": args.kappa,
                                    "what": args.what, "count": n}) + "\n"
    print(n)


def cmd_cycles(args, out):
    mf, z = _load_code_matrix(args.matrix, args.z)
    if z is None:
        raise UsageError("z is required (file header or --z)")
    if mf.kind == "powers":
        H = cb_from_powers(mf.matrix, z)
        report = {
            "proto_cycles6": cycles.count_c6_proto(H.proto()),
            "lifted_cycles6": cycles.count_c6_lifted(H.proto(), H.powers(), z),
            "lifted_cycles4": cycles.count_c4_lifted(H.proto(), H.powers(), z),
            "z": z,
        }
    else:
        P = mf.matrix
        C = construct.power_matrix(P.shape[0], P.shape[1], args.alpha, z)
        report = cycles.cycle_report(P, C, z, args.l).to_dict()
    text = json.dumps(report, indent=2) + "\n"
    out["cycles.json"] = text
    print(text, end="")


def cmd_threshold(args, out):
    mf = read_matrix(args.matrix, "symbols")
    M = mf.matrix
    if args.proxy:
        sigma = exit_chart.proxy_global_threshold(M, args.tol, side=args.proxy, model=args.model)
        res = {"sigma": sigma}
    else:
        proto = construct.couple_partition(M, args.l) if args.l else (M == 1).astype(np.int8)
        if args.l is None and np.any(M == construct.STAR):
            raise UsageError("'*' entries need --l (partitioning matrix)")
        r = exit_chart.threshold(proto, args.tol, model=args.model)
        res = {"sigma": r.sigma, "iterations": r.iterations, "bracket_width": r.bracket_width}
    res["snr_db"] = exit_chart.sigma_to_snr_db(res["sigma"])
    text = json.dumps(res, indent=2) + "\n"
    out["threshold.json"] = text
    print(text, end="")


DESIGN_COLUMNS = ["rank", "column_distribution", "P_serialized", "cycles6_proto",
                  "cycles6_lifted", "threshold_sigma", "threshold_snr_db", "tag"]


def cmd_design(args, out):
    plist = design.pareto_design(args.gamma, args.kappa, args.z, args.l, args.alpha, args.tol,
                                 min_gain=args.min_gain, patience=args.patience,
                                 model=args.model, n_jobs=args.n_jobs)
    out["design.csv"] = _csv_text(plist.to_rows(), DESIGN_COLUMNS)
    for c in (plist.cd, plist.td):
        print(f"{c.tag}: cycles6={c.lifted_cycles6} sigma*={c.threshold:.4f}")


def cmd_design_local(args, out):
    plist = design.locality_design(args.gamma_c, args.gamma_l, args.kappa, args.z, args.l,
                                   args.alpha, args.scheme, args.nu, args.tol,
                                   min_gain=args.min_gain, side=args.side, model=args.model,
                                   n_jobs=args.n_jobs)
    out["design_local.csv"] = _csv_text(plist.to_rows(), DESIGN_COLUMNS + ["proxy_threshold"])
    for c in (plist.cd, plist.td):
        print(f"{c.tag}: cycles6={c.lifted_cycles6} sigma*={c.threshold:.4f}")
    variants = []
    for member, scheme in ((plist.cd, args.cd_scheme), (plist.td, args.td_scheme)):
        if scheme is None:
            continue
        if args.final_nu is None:
            raise UsageError("--final-nu is required with --cd-scheme/--td-scheme")
        B_L = construct.build_local(args.gamma_l, args.kappa, args.final_nu, scheme)
        c = design.with_local_rows(member, B_L, args.z, args.l, args.alpha, args.tol,
                                   model=args.model)
        c.tag = f"{member.tag}+{scheme}"
        variants.append({"rank": len(variants), **c.to_dict()})
        print(f"{c.tag}: cycles6={c.lifted_cycles6} sigma*={c.threshold:.4f}")
    if variants:
        out["design_local_variants.csv"] = _csv_text(variants, DESIGN_COLUMNS)


SIM_COLUMNS = ["snr_db", "frames", "frame_errors", "bit_errors", "ber", "ci_lo", "ci_hi"]


def cmd_simulate(args, out):
    mf, z = _load_code_matrix(args.code, args.z)
    if z is None:
        raise UsageError("z is required (file header or --z)")
    if mf.kind == "powers":
        if args.mode == "local":
            raise UsageError("local decoding needs a partitioning matrix file")
        H = cb_from_powers(mf.matrix, z)
    else:
        P = mf.matrix
        C = construct.power_matrix(P.shape[0], P.shape[1], args.alpha, z)
        H = simulate.local_code(P, C, z) if args.mode == "local" else construct.lift_coupled(P, C, z, args.l)
    if args.rate is not None:
        rate = args.rate
    else:
        rate = simulate.code_rate(H) if args.snr_convention == "ebn0" else None
    cfg = simulate.SimConfig(snr_db=args.snr, max_frames=args.max_frames,
                             min_frame_errors=args.min_frame_errors, max_iter=args.max_iter,
                             seed=args.seed, rate=rate, n_jobs=args.n_jobs)
    points = simulate.simulate_ber(H, cfg)
    rows = [{"snr_db": p.snr_db, "frames": p.frames_simulated, "frame_errors": p.frame_errors,
             "bit_errors": p.bit_errors, "ber": p.ber, "ci_lo": p.ci_lo, "ci_hi": p.ci_hi}
            for p in points]
    out["simulate.csv"] = _csv_text(rows, SIM_COLUMNS)
    for r in rows:
        print(f"{r['snr_db']:g} dB: BER={r['ber']:.3e} ({r['frame_errors']}/{r['frames']} frames)")


COMMANDS = {
    "enumerate": cmd_enumerate,
    "count": cmd_count,
    "cycles": cmd_cycles,
    "threshold": cmd_threshold,
    "design": cmd_design,
    "design-local": cmd_design_local,
    "simulate": cmd_simulate,
}


def run(argv=None) -> int:
    """Run the CLI and return the exit status."""
    parser = build_parser()
    try:
        args = resolve(argv, parser)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (UsageError, json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    out_dir = Path(args.out_dir or os.environ.get(OUTPUT_ENV) or "scldpc-out")
    outputs: dict = {}
    started = datetime.now(timezone.utc).isoformat()
    t0 = time.perf_counter()
    try:
        COMMANDS[args.command](args, outputs)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - report any runtime failure as exit 1
        log.exception("command failed")
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for name, text in outputs.items():
        atomic_write_text(out_dir / name, text)
    manifest = {
        "command": args.command,
        "config": _config_of(args),
        "outputs": sorted(outputs),
        "versions": _versions(),
        "started_at": started,
        "wall_time_s": time.perf_counter() - t0,
    }
    atomic_write_text(out_dir / f"{args.command}.manifest.json",
                      json.dumps(manifest, indent=2, default=str) + "\n")
    return 0


def main() -> None:
    sys.exit(run())
