"""
Line-delimited manifest files: one JSON object per image.

Records are written with sorted keys and UTF-8 text so two runs over the same inputs
produce identical bytes. The writer is the single sink of a batch; worker processes
hand their finished reports back to the parent, which writes them here.
"""

import json
import os
from collections.abc import Iterable, Iterator

from exceptions import ConfigError, CurationError
from models.report_model import ScanReport


def encode_record(report: ScanReport) -> str:
    return json.dumps(report.to_dict(), sort_keys=True, ensure_ascii=False)


def check_writable(path: str) -> None:
    """Raise ConfigError when the manifest cannot be created at `path`"""
    directory = os.path.dirname(os.path.abspath(path))
    if os.path.isdir(path):
        raise ConfigError(f"Manifest path is a directory: {path}")
    try:
        os.makedirs(directory, exist_ok=True)
    except OSError as e:
        raise ConfigError(f"Cannot create manifest directory {directory}: {e}") from e
    if not os.access(directory, os.W_OK):
        raise ConfigError(f"Manifest directory is not writable: {directory}")


class ManifestWriter:
    """Write ScanReports to a manifest, removing the partial file if writing fails"""

    def __init__(self, path: str):
        self.path = path
        self.count = 0
        check_writable(path)
        try:
            self.file = open(path, "w", encoding="utf-8", newline="\n")
        except OSError as e:
            raise ConfigError(f"Cannot open manifest {path}: {e}") from e

    def write(self, report: ScanReport) -> None:
        self.file.write(encode_record(report) + "\n")
        self.count += 1

    def close(self) -> None:
        if not self.file.closed:
            self.file.close()

    def discard(self) -> None:
        """Close and delete the partial manifest"""
        self.close()
        if os.path.exists(self.path):
            try:
                os.remove(self.path)
            except OSError as e:
                print(f"Error removing partial manifest: {e!s}")

    def __enter__(self) -> "ManifestWriter":
        return self

    def __exit__(self, exc_type, exc_val, exc_tb) -> None:
        # only an interrupted write leaves a partial file behind; per-image failures are records
        if exc_type is not None and not issubclass(exc_type, CurationError):
            self.discard()
        else:
            self.close()


def write_manifest(reports: Iterable[ScanReport], path: str) -> int:
    """Write all reports to `path`; returns the number of records"""
    with ManifestWriter(path) as writer:
        for report in reports:
            writer.write(report)
        return writer.count


def iter_manifest(path: str) -> Iterator[ScanReport]:
    with open(path, encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                yield ScanReport.from_dict(json.loads(line))
            except (ValueError, KeyError, TypeError) as e:
                raise CurationError(f"{path}:{line_number}: malformed record: {e}") from e


def read_manifest(path: str) -> list[ScanReport]:
    return list(iter_manifest(path))


def sort_manifest(path: str, out_path: str | None = None) -> str:
    """
    Rewrite a manifest ordered by source_id.

    Parallel runs emit records in completion order; after sorting, the file is
    byte-identical to the serial run's.
    """
    with open(path, encoding="utf-8") as f:
        lines = [line.rstrip("\n") for line in f if line.strip()]
    keyed = sorted(lines, key=lambda line: (json.loads(line)["source_id"], line))
    target = out_path or path
    tmp = target + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as f:
        for line in keyed:
            f.write(line + "\n")
    os.replace(tmp, target)
    return target
