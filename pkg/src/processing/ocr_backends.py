"""
OCR backends speaking the token-line protocol.

A token line is `text<TAB>x<TAB>y<TAB>w<TAB>h<TAB>confidence`. The external process
backend receives the path of a temporary PNG per request and answers with token lines
followed by a blank line. The sidecar backend reads the same lines from a text file
stored next to each image, which makes it a deterministic stand-in for tests and for
synthetic corpora.
"""

from __future__ import annotations

import logging
import os
import shlex
import subprocess
import tempfile
from typing import Protocol

from exceptions import OcrBackendError, ParameterError
from models.config_model import TextConfig
from models.image_model import BoundingBox, ScanImage
from models.report_model import OcrToken
from processing.imgprim import encode_png

logger = logging.getLogger(__name__)


class OcrBackend(Protocol):
    def recognize(self, img: ScanImage) -> list[OcrToken]: ...

    def close(self) -> None: ...


def parse_token_line(line: str) -> OcrToken:
    fields = line.rstrip("\r\n").split("\t")
    if len(fields) != 6:
        raise OcrBackendError(f"Expected 6 tab-separated fields, got {len(fields)}: {line!r}")
    text = fields[0].strip()
    try:
        x, y, w, h = (round(float(v)) for v in fields[1:5])
        confidence = float(fields[5])
        return OcrToken(text, BoundingBox(x, y, x + w, y + h), confidence)
    except (ValueError, ParameterError) as e:
        raise OcrBackendError(f"Malformed token line {line!r}: {e}") from e


def format_token_line(token: OcrToken) -> str:
    b = token.bbox
    return f"{token.text}\t{b.x_left}\t{b.y_top}\t{b.w}\t{b.h}\t{token.confidence:.4f}"


def parse_token_lines(lines: list[str]) -> list[OcrToken]:
    """Token lines, skipping blanks and `#` comments"""
    return [parse_token_line(line) for line in lines if line.strip() and not line.startswith("#")]


class StaticOcrBackend:
    """In-memory backend: tokens looked up by source id, with an optional default"""

    def __init__(self, tokens: dict[str, list[OcrToken]] | None = None,
                 default: list[OcrToken] | None = None):
        self.tokens = dict(tokens or {})
        self.default = list(default or [])

    def recognize(self, img: ScanImage) -> list[OcrToken]:
        return list(self.tokens.get(img.source_id, self.default))

    def close(self) -> None:
        pass


class SidecarOcrBackend:
    """Reads `<image stem><suffix>` token files written next to each image"""

    def __init__(self, suffix: str = ".ocr.tsv"):
        self.suffix = suffix

    def sidecar_path(self, source_id: str) -> str:
        return os.path.splitext(source_id)[0] + self.suffix

    def recognize(self, img: ScanImage) -> list[OcrToken]:
        path = self.sidecar_path(img.source_id)
        try:
            with open(path, encoding="utf-8") as f:
                lines = f.readlines()
        except OSError as e:
            raise OcrBackendError(f"No OCR sidecar for {img.source_id}: {e}") from e
        return parse_token_lines(lines)

    def close(self) -> None:
        pass


class SubprocessOcrBackend:
    """
    Long-running external OCR process, one request in flight at a time.

    The process is started on first use. Each worker owns its own instance.
    """

    def __init__(self, command: str):
        self.command = shlex.split(command)
        if not self.command:
            raise OcrBackendError("Empty OCR backend command")
        self._proc: subprocess.Popen[str] | None = None

    def _ensure_started(self) -> subprocess.Popen[str]:
        if self._proc is None or self._proc.poll() is not None:
            try:
                self._proc = subprocess.Popen(
                    self.command,
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    text=True,
                    encoding="utf-8",
                    bufsize=1,
                )
            except OSError as e:
                raise OcrBackendError(f"Cannot start OCR backend {self.command[0]}: {e}") from e
            logger.info("Started OCR backend: %s", " ".join(self.command))
        return self._proc

    def _request(self, image_path: str) -> list[str]:
        proc = self._ensure_started()
        assert proc.stdin is not None and proc.stdout is not None
        try:
            proc.stdin.write(image_path + "\n")
            proc.stdin.flush()
        except OSError as e:
            raise OcrBackendError(f"OCR backend stopped accepting requests: {e}") from e
        lines = []
        error = None
        while True:
            line = proc.stdout.readline()
            if line == "":
                raise OcrBackendError("OCR backend exited before finishing its response")
            if not line.strip():
                break
            if line.startswith("ERROR\t"):
                error = line[6:].strip()
            elif error is None:
                lines.append(line)
        # terminator consumed even for an error response
        if error is not None:
            raise OcrBackendError(f"OCR backend error: {error}")
        return lines

    def recognize(self, img: ScanImage) -> list[OcrToken]:
        fd, path = tempfile.mkstemp(suffix=".png", prefix="ocr_")
        os.close(fd)
        try:
            encode_png(img, path)
            return parse_token_lines(self._request(path))
        finally:
            try:
                os.remove(path)
            except OSError:
                pass

    def close(self) -> None:
        if self._proc is None:
            return
        try:
            if self._proc.stdin:
                self._proc.stdin.close()
            self._proc.wait(timeout=5)
        except (OSError, subprocess.TimeoutExpired):
            self._proc.kill()
        self._proc = None


def create_backend(cfg: TextConfig) -> OcrBackend | None:
    if cfg.backend == "sidecar":
        return SidecarOcrBackend(cfg.sidecar_suffix)
    if cfg.backend == "subprocess":
        return SubprocessOcrBackend(cfg.backend_command)
    return None
