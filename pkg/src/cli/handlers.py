import argparse
import json
import os
import sys

from constants import EXIT_FATAL_CONFIG, EXIT_OK, EXIT_PARTIAL, STATUS_DECODE_ERROR
from exceptions import ConfigError, CurationError, ParameterError
from models.config_model import CaliperMethod
from pipeline.runner import run
from pipeline.scoring import score
from synth.corpus import MIX_PRESETS, export_corpus, iter_corpus
from utils.cli_utils import collect_inputs, print_summary, resolve_output_folder, resolve_path
from utils.config_manager import ConfigManager
from utils.log_utils import setup_logging
from utils.manifest_writer import sort_manifest
from version import VERSION


def create_main_parser():
    """Top-level parser, used for help output and -V"""
    parser = argparse.ArgumentParser(
        description="Breast ultrasound dataset curation",
        epilog="""
Commands:
  python main.py run --help      (Process a batch of images into a manifest)
  python main.py score --help    (Compare a manifest with ground truth)
  python main.py gen --help      (Generate a labeled synthetic corpus)
        """,
        formatter_class=argparse.RawDescriptionHelpFormatter
    )
    parser.add_argument("command", nargs="?", choices=["run", "score", "gen"], help="Command to run")
    parser.add_argument("-V", "--version", action="version", version=VERSION)
    return parser


def parse_canvas(value):
    """Parse WIDTHxHEIGHT for argparse"""
    try:
        width, height = (int(v) for v in value.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WIDTHxHEIGHT, got {value!r}") from None
    if width <= 0 or height <= 0:
        raise argparse.ArgumentTypeError(f"canvas sides must be positive, got {value!r}")
    return width, height


def run_pipeline_cli(argv=None):
    """Command-line entry point for batch processing; returns the exit code"""
    # Store original working directory for CLI paths
    original_cwd = os.getcwd()

    parser = argparse.ArgumentParser(prog="main.py run", description="Curate a batch of ultrasound images")
    parser.add_argument("--config", help="Configuration file (defaults to the bundled config.ini)")
    parser.add_argument("--input", action="append", default=[],
                        help="Image file, folder or glob pattern; repeat for several (replaces [io] inputs)")
    parser.add_argument("--manifest", help="Output manifest path")
    parser.add_argument("--workers", type=int, help="Number of worker processes")
    parser.add_argument("--emit-crops", help="Folder for cropped scan areas")
    parser.add_argument("--method", choices=[m.value for m in CaliperMethod],
                        help="Caliper detection method")
    args = parser.parse_args(sys.argv[2:] if argv is None else argv)

    try:
        config_path = resolve_path(args.config, original_cwd) if args.config else None
        config = ConfigManager(config_path)
        setup_logging(*config.get_logging())
        pipeline_config = config.get_pipeline_config()
    except ConfigError as e:
        print(f"Error: {e}")
        return EXIT_FATAL_CONFIG

    # CLI paths are relative to the working directory, config paths to the config file
    if args.input:
        paths = collect_inputs(args.input, original_cwd, print)
    else:
        paths = collect_inputs(pipeline_config.inputs, config.config_dir, print)
    if not paths:
        print("Warning: No input images found")

    pipeline_config.manifest = resolve_output_folder(
        args.manifest, pipeline_config.manifest, original_cwd, config.config_dir)
    if args.emit_crops or pipeline_config.emit_crops:
        pipeline_config.emit_crops = resolve_output_folder(
            args.emit_crops, pipeline_config.emit_crops or "", original_cwd, config.config_dir)
    if args.workers is not None:
        pipeline_config.workers = args.workers
    if args.method:
        pipeline_config.calipers.method = CaliperMethod(args.method)

    try:
        summary = run(pipeline_config, paths, print)
        if pipeline_config.workers > 1:
            sort_manifest(pipeline_config.manifest)
    except ConfigError as e:
        print(f"Error: {e}")
        return EXIT_FATAL_CONFIG

    print(f"Manifest saved: {pipeline_config.manifest}")
    print_summary(summary, print)
    if summary.status_counts.get(STATUS_DECODE_ERROR):
        print(f"Warning: {summary.status_counts[STATUS_DECODE_ERROR]} image(s) could not be processed")
        return EXIT_PARTIAL
    return EXIT_OK


def run_score_cli(argv=None):
    """Command-line entry point for scoring a manifest; returns the exit code"""
    original_cwd = os.getcwd()

    parser = argparse.ArgumentParser(prog="main.py score", description="Score a manifest against ground truth")
    parser.add_argument("--manifest", required=True, help="Manifest written by the run command")
    parser.add_argument("--truth", required=True, help="Ground-truth file with the same record schema")
    parser.add_argument("--summary-json", help="Also write the summary as JSON to this path")
    args = parser.parse_args(sys.argv[2:] if argv is None else argv)

    manifest = resolve_path(args.manifest, original_cwd)
    truth = resolve_path(args.truth, original_cwd)
    for label, path in (("Manifest", manifest), ("Ground truth", truth)):
        if not os.path.isfile(path):
            print(f"Error: {label} not found: {path}")
            return EXIT_FATAL_CONFIG

    try:
        summary = score(manifest, truth, print)
    except CurationError as e:
        print(f"Error: {e}")
        return EXIT_FATAL_CONFIG

    print_summary(summary, print)
    if args.summary_json:
        summary_path = resolve_path(args.summary_json, original_cwd)
        with open(summary_path, "w", encoding="utf-8") as f:
            json.dump(summary.to_dict(), f, indent=2, sort_keys=True)
        print(f"Summary saved: {summary_path}")
    return EXIT_OK


def run_gen_cli(argv=None):
    """Command-line entry point for synthetic corpus generation; returns the exit code"""
    original_cwd = os.getcwd()

    parser = argparse.ArgumentParser(prog="main.py gen", description="Generate a labeled synthetic corpus")
    parser.add_argument("--seed", type=int, default=7, help="Corpus seed")
    parser.add_argument("--n", type=int, required=True, help="Number of images")
    parser.add_argument("--out", required=True, help="Output folder")
    parser.add_argument("--mix", choices=sorted(MIX_PRESETS), default="default", help="Category mix preset")
    parser.add_argument("--canvas", type=parse_canvas, default=(400, 300), help="Image size as WIDTHxHEIGHT")
    parser.add_argument("--sidecar-suffix", default=".ocr.tsv", help="Suffix of the OCR token files")
    args = parser.parse_args(sys.argv[2:] if argv is None else argv)

    out_dir = resolve_path(args.out, original_cwd)
    try:
        items = iter_corpus(args.seed, args.n, args.mix, args.canvas)
        truth_path = export_corpus(items, out_dir, args.sidecar_suffix)
    except (ParameterError, ConfigError) as e:
        print(f"Error: {e}")
        return EXIT_FATAL_CONFIG
    except OSError as e:
        print(f"Error: Cannot write corpus to {out_dir}: {e}")
        return EXIT_FATAL_CONFIG

    print(f"Generated {args.n} images in {out_dir}")
    print(f"Ground truth saved: {truth_path}")
    return EXIT_OK
