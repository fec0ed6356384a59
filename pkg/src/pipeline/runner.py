"""
Batch orchestration: decode, run the enabled stages in fixed order, write the manifest.

Stage order is crop, filters, dualview, calipers, textkx. With crop enabled, the
filters and the caliper detector see the final crop box; dual-view detection and
OCR always see the full frame.

Every input produces exactly one record. Failures are isolated per image: an
undecodable file becomes a DECODE_ERROR record, an OCR failure an OCR_SKIPPED
record that keeps the other stages' results. Any other stage failure leaves that
stage out of an otherwise normal record and is noted in its `error` field; a frame
too narrow for the midline test is recorded as not dual-view.
"""

from __future__ import annotations

import logging
import os
import time
from collections.abc import Callable, Iterator
from concurrent.futures import FIRST_COMPLETED, Future, ProcessPoolExecutor, wait
from typing import TypeVar

from constants import STATUS_DECODE_ERROR, STATUS_OCR_SKIPPED
from exceptions import ConfigError, ImageFormatError, OcrBackendError, ParameterError, PreconditionError
from models.config_model import PipelineConfig
from models.image_model import BoundingBox, ScanImage
from models.report_model import DualViewReport, ScanReport
from models.summary_model import RunSummary
from pipeline.scoring import count_report
from processing.artifacts import detect_calipers, detect_dual_view, split_dual_view
from processing.cropper import crop_scan
from processing.filters import evaluate_scan
from processing.imgprim import crop_image, decode_image, encode_png
from processing.ocr_backends import OcrBackend, create_backend
from processing.textkx import AnnotationGrammar, classify_annotation, recognize_text
from utils.file_utils import output_name
from utils.manifest_writer import ManifestWriter, check_writable

logger = logging.getLogger(__name__)

# Jobs queued per worker; bounds memory on very large batches
QUEUE_DEPTH = 4

T = TypeVar("T")


class ImageProcessor:
    """Runs the enabled stages on one image at a time; owns its OCR backend"""

    def __init__(self, config: PipelineConfig):
        self.config = config
        self.grammar = AnnotationGrammar.build(config.text.patterns) if config.enable_textkx else None
        self._backend: OcrBackend | None = None

    @property
    def backend(self) -> OcrBackend | None:
        if self._backend is None and self.config.enable_textkx:
            self._backend = create_backend(self.config.text)
        return self._backend

    def close(self) -> None:
        if self._backend is not None:
            self._backend.close()
            self._backend = None

    def process(self, path: str) -> ScanReport:
        try:
            img = decode_image(path)
        except ImageFormatError as e:
            logger.warning("Cannot decode %s: %s", path, e)
            return ScanReport(source_id=path, status=STATUS_DECODE_ERROR, error=str(e))
        return self.analyze(img)

    def analyze(self, img: ScanImage) -> ScanReport:
        """Run the enabled stages; a stage that fails is left out of the record and noted in `error`"""
        config = self.config
        report = ScanReport(source_id=img.source_id, width=img.width, height=img.height)
        timings: dict[str, float] = {}
        problems: list[str] = []

        def stage(name: str, fn: Callable[[], T]) -> T | None:
            started = time.perf_counter()
            try:
                return fn()
            except (ParameterError, PreconditionError) as e:
                logger.warning("Stage %s skipped for %s: %s", name, img.source_id, e)
                problems.append(f"{name}: {e}")
            except Exception as e:
                logger.exception("Stage %s failed for %s", name, img.source_id)
                problems.append(f"{name}: {type(e).__name__}: {e}")
            finally:
                timings[name] = (time.perf_counter() - started) * 1000.0
            return None

        scan_area: BoundingBox | None = None
        if config.enable_crop:
            report.crop = stage("crop", lambda: crop_scan(img, config.crop))
            if report.crop is not None:
                scan_area = report.crop.final_box
        if config.enable_filters:
            report.filter = stage("filters", lambda: evaluate_scan(img, config.filters, scan_area))
        if config.enable_dualview:
            report.dual_view = stage("dualview",
                                     lambda: detect_dual_view(img, config.dualview, config.filters))
            if report.dual_view is None:
                report.dual_view = DualViewReport(False)
        if config.enable_calipers:
            report.calipers = stage("calipers", lambda: detect_calipers(img, config.calipers, scan_area))
        if config.enable_textkx:
            stage("textkx", lambda: self._extract_text(img, report))

        if config.record_timings:
            report.timings = dict(timings)
        stage("emit", lambda: self._emit_images(img, report))
        if problems:
            report.error = "; ".join(problems)
        return report

    def _extract_text(self, img: ScanImage, report: ScanReport) -> None:
        backend = self.backend
        if backend is None:
            raise ParameterError("Text extraction is enabled but no OCR backend is configured")
        text_cfg = self.config.text
        try:
            tokens = recognize_text(img, backend, text_cfg.min_confidence, text_cfg.line_tolerance)
        except OcrBackendError as e:
            logger.warning("OCR skipped for %s: %s", img.source_id, e)
            report.status = STATUS_OCR_SKIPPED
            return
        report.text = classify_annotation(tokens, self.grammar, text_cfg.line_tolerance)

    def _emit_images(self, img: ScanImage, report: ScanReport) -> None:
        out_dir = self.config.emit_crops
        if not out_dir:
            return
        if report.crop is not None:
            crop = crop_image(img, report.crop.final_box)
            encode_png(crop, os.path.join(out_dir, output_name(img.source_id, self.config.crop_suffix)))
        if self.config.dualview.emit_split and report.dual_view and report.dual_view.split_x:
            left, right = split_dual_view(img, report.dual_view.split_x)
            encode_png(left, os.path.join(out_dir, output_name(img.source_id, "_left")))
            encode_png(right, os.path.join(out_dir, output_name(img.source_id, "_right")))


# Per-process processor used by pool workers
_worker_processor: ImageProcessor | None = None


def _init_worker(config: PipelineConfig) -> None:
    global _worker_processor
    _worker_processor = ImageProcessor(config)


def _process_in_worker(path: str) -> ScanReport:
    assert _worker_processor is not None
    return _worker_processor.process(path)


def process_image(path: str, config: PipelineConfig) -> ScanReport:
    """Process a single file with a throwaway processor"""
    processor = ImageProcessor(config)
    try:
        return processor.process(path)
    finally:
        processor.close()


def iter_reports(paths: list[str], config: PipelineConfig) -> Iterator[ScanReport]:
    """Reports in input order when serial, in completion order with workers > 1"""
    if config.workers == 1:
        processor = ImageProcessor(config)
        try:
            for path in paths:
                yield processor.process(path)
        finally:
            processor.close()
        return

    pending: set[Future[ScanReport]] = set()
    queue = iter(paths)
    with ProcessPoolExecutor(max_workers=config.workers, initializer=_init_worker,
                             initargs=(config,)) as executor:
        for path in queue:
            pending.add(executor.submit(_process_in_worker, path))
            if len(pending) >= config.workers * QUEUE_DEPTH:
                break
        while pending:
            done, pending = wait(pending, return_when=FIRST_COMPLETED)
            for future in done:
                yield future.result()
                next_path = next(queue, None)
                if next_path is not None:
                    pending.add(executor.submit(_process_in_worker, next_path))


def prepare_outputs(config: PipelineConfig) -> None:
    """Validate settings and output locations before any image is touched"""
    try:
        config.validate()
    except ParameterError as e:
        raise ConfigError(str(e)) from e
    check_writable(config.manifest)
    if config.emit_crops:
        try:
            os.makedirs(config.emit_crops, exist_ok=True)
        except OSError as e:
            raise ConfigError(f"Cannot create crop folder {config.emit_crops}: {e}") from e


def run(config: PipelineConfig, paths: list[str], print_fn: Callable[[str], None] = print) -> RunSummary:
    """
    Process `paths` and write one manifest record per path.

    Raises ConfigError for an invalid configuration or unwritable outputs; nothing is
    processed in that case. Per-image problems never raise.
    """
    prepare_outputs(config)
    summary = RunSummary()
    total = len(paths)
    logger.info("Processing %d images with stages %s", total, ", ".join(config.enabled_stages()))
    with ManifestWriter(config.manifest) as writer:
        for report in iter_reports(paths, config):
            writer.write(report)
            count_report(summary, report)
            done = summary.images
            if done % config.progress_step == 0 or done == total:
                print_fn(f"Processed {done}/{total} images")
    return summary
