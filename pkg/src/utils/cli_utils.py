import os
from collections.abc import Callable

from models.summary_model import RunSummary
from utils.file_utils import expand_pattern, get_all_files, has_glob_chars


def resolve_path(path: str, base_dir: str) -> str:
    """Absolute normalized path; relative paths are taken from base_dir"""
    if not os.path.isabs(path):
        path = os.path.join(base_dir, path)
    return os.path.abspath(os.path.normpath(path))


def resolve_output_folder(output_arg: str | None,
                          config_default: str,
                          user_cwd: str,
                          app_dir: str) -> str:
    """Resolve a CLI output path.
    - output_arg relative to user_cwd (CLI UX)
    - config_default relative to app_dir (config semantics)
    Returns absolute normalized path.
    """
    if output_arg:
        return resolve_path(output_arg, user_cwd)
    return resolve_path(config_default, app_dir)


def collect_inputs(inputs: list[str],
                   base_dir: str,
                   print_fn: Callable[[str], None] = print) -> list[str]:
    """Collect image files from explicit files, folders (recursively) and glob patterns.
    Resolves relative paths against base_dir. Prints warnings via print_fn.
    Returns a de-duplicated list of absolute file paths in a stable order.
    """
    all_files: list[str] = []

    for item in inputs:
        candidate = resolve_path(item, base_dir)
        if has_glob_chars(item):
            matches = expand_pattern(candidate)
            if not matches:
                print_fn(f"Warning: No images match: {item}")
            all_files.extend(matches)
        elif os.path.isdir(candidate):
            all_files.extend(get_all_files(candidate))
        elif os.path.isfile(candidate):
            # explicit files are kept whatever their extension; decoding decides
            all_files.append(candidate)
        else:
            print_fn(f"Warning: Input not found: {candidate}")

    seen: set[str] = set()
    unique = []
    for path in all_files:
        path = os.path.abspath(path)
        if path not in seen:
            seen.add(path)
            unique.append(path)
    return unique


def print_summary(summary: RunSummary, print_fn: Callable[[str], None] = print) -> None:
    """Print flag counts, then the confusion table when the summary was scored"""
    for line in summary.format_counts():
        print_fn(line)
    if summary.confusion:
        print_fn("")
        for line in summary.format_table():
            print_fn(line)
    if summary.unmatched:
        print_fn(f"Warning: {len(summary.unmatched)} record(s) without a counterpart were excluded")
