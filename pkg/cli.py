"""
Command-line entry point.

    python cli.py run --n 1024 --k 512 --decoder fsl --snr 1.5 2.0 2.5 --out results/fsl16 --format csv json
    python cli.py verify
    python cli.py build-tables --n 1024 --k 512 --block-size 16
    python cli.py census | spectra | adjust | compare a.json b.json [--plotscript overlay.py]

Exit codes: 0 ok, 1 a check failed, 2 the configuration was rejected.
"""

import argparse
import json
import logging
import os
import sys
from typing import List, Optional

from pydantic import ValidationError

import settings
from campaign import build_code, run_campaign
from code_construct import (EXTENDED_FAMILIES, OuterCode, OuterFamily, adjust_info_bits, block_rate_histogram,
                            describe_construction, hybrid_outer_generator, max_table_rows,
                            polar_outer_generator, weight_spectrum)
from errors import ConfigError, PolarError
from fsl_decoder import plan_segmentation
from fsl_nodes import FslParams
from polar_core import CodeSpec
from reports import census_report, emit_report, format_census, load_report, snr_gap_at_bler, write_plotscript
from schemas import CampaignConfig, ReportFormat
from syndrome_tables import TableCache, table_footprint, tables_for_segmentation
from verify_suite import CHECK_NAMES, run_verify

logger = logging.getLogger("polar")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_CONFIG = 2

REPORT_SUFFIX = {ReportFormat.csv: ".csv", ReportFormat.json: ".json", ReportFormat.plotscript: ".py"}


# ---------------- Argument parsing ----------------
def add_code_args(p: argparse.ArgumentParser):
    p.add_argument("--n", type=int, help="mother code length N")
    p.add_argument("--k", type=int, help="payload bits K")
    p.add_argument("--crc", type=int, help="CRC length (0, 6, 11, 16, 24)")
    p.add_argument("--construction", choices=["pw", "adjusted", "hybrid"])
    p.add_argument("--adjust-klow", type=int, dest="k_low")
    p.add_argument("--adjust-khigh", type=int, dest="k_high")
    p.add_argument("--dual-ebch-10", action="store_true", default=None, dest="dual_ebch_10",
                   help="use the dimension-10 dual eBCH outer code in hybrid constructions")


def add_decoder_args(p: argparse.ArgumentParser):
    p.add_argument("--decoder", choices=["scl", "fsl"])
    p.add_argument("--list-size", type=int, dest="list_size")
    p.add_argument("--block-size", type=int, choices=[8, 16], dest="block_size")
    p.add_argument("--flip-t", type=int, dest="flip_t")
    p.add_argument("--lsd", type=int)
    p.add_argument("--mode", choices=["4b-ml", "fast-sscl", "fsl8", "fsl16"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polar", description="Polar-code FSL/SCL toolkit")
    parser.add_argument("--log-level", default=settings.LOG_LEVEL)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Monte-Carlo BLER campaign")
    run.add_argument("--config", help="CampaignConfig JSON file; flags override its fields")
    add_code_args(run)
    add_decoder_args(run)
    run.add_argument("--snr", type=float, nargs="+", help="SNR points in dB, ascending")
    run.add_argument("--snr-convention", choices=["es", "eb"], dest="convention")
    run.add_argument("--min-errors", type=int, dest="min_errors")
    run.add_argument("--max-frames", type=int, dest="max_frames")
    run.add_argument("--batch-size", type=int, dest="batch_size")
    run.add_argument("--seed", type=int)
    run.add_argument("--workers", type=int)
    run.add_argument("--out", help="report path without extension")
    run.add_argument("--format", nargs="+", choices=[f.value for f in ReportFormat], dest="formats")
    run.add_argument("--label")
    run.add_argument("--archive", action="store_true", help="store the campaign in the database")

    verify = sub.add_parser("verify", help="run the release checks")
    verify.add_argument("--samples", type=int, default=1000, help="oracle samples per check")
    verify.add_argument("--ml-frames", type=int, default=10000, dest="ml_frames")
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--check", action="append", choices=CHECK_NAMES, dest="checks")

    tables = sub.add_parser("build-tables", help="precompute the syndrome tables of a code")
    add_code_args(tables)
    add_decoder_args(tables)
    tables.add_argument("--cache-dir", dest="cache_dir", default=None)

    census = sub.add_parser("census", help="leaf-node census for every segmentation mode")
    add_code_args(census)

    spectra = sub.add_parser("spectra", help="outer-code distance spectra, polar vs hybrid")
    spectra.add_argument("--k-local", type=int, nargs="+", dest="k_local", default=list(range(1, 16)))

    adjust = sub.add_parser("adjust", help="block-rate histogram before and after re-adjustment")
    add_code_args(adjust)
    adjust.add_argument("--block-size", type=int, default=16, dest="block_size")
    adjust.add_argument("--k-low", type=int, default=5, dest="adjust_low")
    adjust.add_argument("--k-high", type=int, default=9, dest="adjust_high")

    compare = sub.add_parser("compare", help="SNR gap between two JSON reports at a target BLER")
    compare.add_argument("reference", help="JSON report of the reference curve")
    compare.add_argument("candidate", help="JSON report of the compared curve")
    compare.add_argument("--target", type=float, default=1e-2)
    compare.add_argument("--max-gap", type=float, default=None, dest="max_gap",
                         help="fail (exit 1) when the gap exceeds this many dB")
    compare.add_argument("--plotscript", default=None, help="also write a plot script overlaying both curves")
    return parser


# ---------------- Configuration ----------------
def _set(tree: dict, section: str, key: str, value):
    if value is not None:
        tree.setdefault(section, {})[key] = value


def config_from_args(args: argparse.Namespace) -> CampaignConfig:
    data = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {args.config}: {e}") from e

    _set(data, "code", "n", getattr(args, "n", None))
    _set(data, "code", "k", getattr(args, "k", None))
    _set(data, "code", "crc_len", getattr(args, "crc", None))
    _set(data, "code", "construction", getattr(args, "construction", None))
    _set(data, "code", "k_low", getattr(args, "k_low", None))
    _set(data, "code", "k_high", getattr(args, "k_high", None))
    _set(data, "code", "dual_ebch_10", getattr(args, "dual_ebch_10", None))
    _set(data, "code", "block_len", getattr(args, "block_size", None))
    _set(data, "decoder", "kind", getattr(args, "decoder", None))
    _set(data, "decoder", "list_size", getattr(args, "list_size", None))
    _set(data, "decoder", "block_len", getattr(args, "block_size", None))
    _set(data, "decoder", "flip_budget", getattr(args, "flip_t", None))
    _set(data, "decoder", "patterns_per_syndrome", getattr(args, "lsd", None))
    _set(data, "decoder", "mode", getattr(args, "mode", None))

    if hasattr(args, "snr"):
        _set(data, "channel", "snr_points_db", getattr(args, "snr", None))
        _set(data, "channel", "convention", getattr(args, "convention", None))
        _set(data, "stopping", "min_block_errors", getattr(args, "min_errors", None))
        _set(data, "stopping", "max_frames", getattr(args, "max_frames", None))
        _set(data, "stopping", "batch_size", getattr(args, "batch_size", None))
        _set(data, "output", "path", getattr(args, "out", None))
        _set(data, "output", "formats", getattr(args, "formats", None))
        _set(data, "output", "label", getattr(args, "label", None))
        if args.seed is not None:
            data["seed"] = args.seed
        if args.workers is not None:
            data["workers"] = args.workers
    else:
        data.setdefault("channel", {"snr_points_db": [0.0]})

    return CampaignConfig(**data)


def report_paths(base: str, formats) -> List[tuple]:
    stem, ext = os.path.splitext(base)
    if ext.lstrip(".") not in ("csv", "json", "py"):
        stem = base
    return [(ReportFormat(f), stem + REPORT_SUFFIX[ReportFormat(f)]) for f in formats]


# ---------------- Commands ----------------
def cmd_run(args) -> int:
    config = config_from_args(args)
    points = run_campaign(config)

    print(f"{config.describe()}")
    print(f"{'snr_db':>8} {'frames':>10} {'errors':>8} {'bler':>12}")
    for p in points:
        print(f"{p.snr_db:>8g} {p.frames:>10} {p.block_errors:>8} {p.bler:>12.4e}")

    if config.output.path:
        for fmt, path in report_paths(config.output.path, config.output.formats):
            emit_report(points, fmt, path, config=config)
            print(f"wrote {path}")

    if args.archive:
        import database
        from config_db import SessionLocal, init_db
        init_db()
        db = SessionLocal()
        try:
            record = database.create_campaign_record(db, config, describe_construction(build_code(config)))
            database.store_points(db, record, points)
            print(f"archived as campaign {record.id}")
        finally:
            db.close()
    return EXIT_OK


def cmd_verify(args) -> int:
    report = run_verify(samples=args.samples, ml_frames=args.ml_frames, seed=args.seed, only=args.checks)
    print(report.format())
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_build_tables(args) -> int:
    config = config_from_args(args)
    spec = build_code(config)
    params = config.decoder.fsl_params()
    cache = TableCache(args.cache_dir)
    nodes = plan_segmentation(spec, params, config.decoder.mode)
    tables = tables_for_segmentation(nodes, params, cache)
    print(f"{len(tables)} syndrome table(s), {table_footprint(tables)} pattern words, cache {cache.directory}")
    for key, table in sorted(tables.items(), key=lambda kv: str(kv[0])):
        print(f"  B={table.block_len} K_B={table.k_local} rows={table.n_rows} l_sd={table.l_sd}"
              f"{' (truncated)' if table.truncated else ''}")
    return EXIT_OK


def cmd_census(args) -> int:
    config = config_from_args(args)
    spec = build_code(config)
    print(f"N={spec.n_mother} K={spec.k_payload} crc={spec.crc_len} {spec.construction_tag.value}")
    print(format_census(census_report(spec)))
    return EXIT_OK


def _spectrum_line(name: str, k_local: int, code: OuterCode) -> str:
    spectrum = weight_spectrum(code)
    cells = " ".join(f"{int(c):>5}" for c in spectrum.counts[1:])
    return f"{name:<14}{k_local:>3} {cells}   d={spectrum.min_distance} A={spectrum.a_dmin}"


def cmd_spectra(args) -> int:
    print(f"{'code':<14}{'K_B':>3} " + " ".join(f"{w:>5}" for w in range(1, 17)))
    for k_local in args.k_local:
        try:
            polar = OuterCode(family=OuterFamily.polar, generator=polar_outer_generator(k_local))
            print(_spectrum_line("polar", k_local, polar))
            hybrid = hybrid_outer_generator(k_local, EXTENDED_FAMILIES)
        except PolarError as e:
            raise ConfigError(str(e)) from e
        if hybrid.family != OuterFamily.polar:
            print(_spectrum_line(hybrid.family.value, k_local, hybrid))
    return EXIT_OK


def cmd_adjust(args) -> int:
    config = config_from_args(args)
    spec = CodeSpec.pw(config.code.n, config.code.k, config.code.crc_len)
    block_len = args.block_size
    adjusted = adjust_info_bits(spec, block_len, args.adjust_low, args.adjust_high)
    params = FslParams.preset(block_len)
    before, after = block_rate_histogram(spec, block_len), block_rate_histogram(adjusted, block_len)
    print(f"{'K_B':>4} {'before':>7} {'after':>7}")
    for k in sorted(set(before) | set(after)):
        print(f"{k:>4} {before.get(k, 0):>7} {after.get(k, 0):>7}")
    print(f"max table rows: {max_table_rows(spec, params)} -> {max_table_rows(adjusted, params)}")
    return EXIT_OK


def cmd_compare(args) -> int:
    try:
        label_a, points_a = load_report(args.reference)
        label_b, points_b = load_report(args.candidate)
    except OSError as e:
        raise ConfigError(f"cannot read report: {e}") from e
    if args.plotscript:
        name_a, name_b = label_a or args.reference, label_b or args.candidate
        if name_a == name_b:
            name_a, name_b = args.reference, args.candidate
        curves = {name_a: points_a, name_b: points_b}
        path = write_plotscript(curves, args.plotscript, title="BLER comparison")
        print(f"wrote {path}")
    gap = snr_gap_at_bler(points_a, points_b, args.target)
    print(f"{label_b or args.candidate} needs {gap:+.3f} dB vs {label_a or args.reference} at BLER {args.target:g}")
    if args.max_gap is not None and gap > args.max_gap:
        return EXIT_CHECK_FAILED
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "verify": cmd_verify,
    "build-tables": cmd_build_tables,
    "census": cmd_census,
    "spectra": cmd_spectra,
    "adjust": cmd_adjust,
    "compare": cmd_compare,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format="%(asctime)s - %(levelname)s - %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ValidationError) as e:
        logger.error(f"[CONFIG] {e}")
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except PolarError as e:
        logger.error(f"[CONFIG] {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAD_CONFIG


if __name__ == "__main__":
    sys.exit(main())
