import configparser
import dataclasses
import os
import sys
from enum import Enum
from typing import Any

from exceptions import ConfigError, ParameterError
from models.config_model import (
    CaliperConfig,
    CropConfig,
    DualViewConfig,
    FilterConfig,
    PipelineConfig,
    TextConfig,
)
from models.image_model import HsvRange

# Config dataclass read from each settings section
SECTION_TYPES: dict[str, type] = {
    "crop": CropConfig,
    "filters": FilterConfig,
    "dualview": DualViewConfig,
    "calipers": CaliperConfig,
    "textkx": TextConfig,
}
PATTERNS_SECTION = "textkx.patterns"


def bundled_config_path() -> str:
    """Default config shipped with the application (inside the bundle when frozen)"""
    if hasattr(sys, '_MEIPASS'):
        base_path = sys._MEIPASS  # Temporary directory for PyInstaller
    else:
        base_path = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    return os.path.join(base_path, "config.ini")


class ConfigManager:
    """Class for reading pipeline settings from an INI file"""

    def __init__(self, config_path: str | None = None):
        """Load `config_path`, or the bundled default when no path is given"""
        self.bundled_config_path = bundled_config_path()
        self.config_path = os.path.abspath(config_path or self.bundled_config_path)
        if not os.path.isfile(self.config_path):
            raise ConfigError(f"Configuration file not found: {self.config_path}")

        # Regex patterns may contain '%', so no interpolation
        self.config = configparser.ConfigParser(interpolation=None)
        self._read()

    @property
    def config_dir(self) -> str:
        """Folder that relative paths in the config file are resolved against"""
        return os.path.dirname(self.config_path)

    def _read(self) -> None:
        try:
            with open(self.config_path, encoding="utf-8") as f:
                self.config.read_file(f)
        except (OSError, configparser.Error) as e:
            raise ConfigError(f"Cannot read configuration {self.config_path}: {e}") from e

    def get(self, section, option, fallback=None):
        """Get a configuration value"""
        return self.config.get(section, option, fallback=fallback)

    def get_list(self, section, option):
        """Get a comma-separated list of items from a specified section and option"""
        items = self.get(section, option, fallback="")
        return [item.strip() for item in items.replace("\n", ",").split(",") if item.strip()]

    def get_hsv_ranges(self, section, option) -> list[HsvRange]:
        """Parse `name:hue_lo-hue_hi:sat_lo-sat_hi:val_lo-val_hi` items"""
        try:
            return [HsvRange.parse(item) for item in self.get_list(section, option)]
        except ParameterError as e:
            raise ConfigError(f"[{section}] {option}: {e}") from e

    def get_patterns(self) -> dict[str, list[str]]:
        """Extra annotation patterns, one regex per line, keyed by category"""
        if not self.config.has_section(PATTERNS_SECTION):
            return {}
        patterns = {}
        for key, value in self.config.items(PATTERNS_SECTION):
            lines = [line.strip() for line in value.splitlines() if line.strip()]
            if lines:
                patterns[key] = lines
        return patterns

    def _coerce(self, section: str, option: str, default: Any) -> Any:
        """Read one option with the type of its dataclass default"""
        try:
            if isinstance(default, bool):
                return self.config.getboolean(section, option)
            if isinstance(default, int):
                return self.config.getint(section, option)
            if isinstance(default, float):
                return self.config.getfloat(section, option)
            if isinstance(default, Enum):
                return type(default)(self.get(section, option).strip().upper())
        except ValueError as e:
            raise ConfigError(f"[{section}] {option}: {e}") from e
        if isinstance(default, list):
            return self.get_hsv_ranges(section, option)
        return self.get(section, option).strip()

    def _section_settings(self, section: str, config_type: type) -> Any:
        defaults = config_type()
        values = {}
        for f in dataclasses.fields(config_type):
            if isinstance(getattr(defaults, f.name), dict):
                continue
            if self.config.has_option(section, f.name):
                values[f.name] = self._coerce(section, f.name, getattr(defaults, f.name))
        if section == "textkx":
            values["patterns"] = self.get_patterns()
        try:
            return config_type(**values)
        except ParameterError as e:
            raise ConfigError(f"[{section}] {e}") from e

    def get_pipeline_config(self) -> PipelineConfig:
        """Materialize every section into a validated PipelineConfig"""
        settings = {name: self._section_settings(name, config_type)
                    for name, config_type in SECTION_TYPES.items()}
        calipers = settings["calipers"]
        if not calipers.box_range_valid:
            raise ConfigError(f"[calipers] box_min ({calipers.box_min}) must be below box_max ({calipers.box_max})")

        defaults = PipelineConfig()
        values: dict[str, Any] = {}
        for option in ("enable_crop", "enable_filters", "enable_dualview", "enable_calipers",
                       "enable_textkx", "workers", "record_timings", "progress_step"):
            if self.config.has_option("pipeline", option):
                values[option] = self._coerce("pipeline", option, getattr(defaults, option))

        emit_crops = self.get("io", "emit_crops", fallback="").strip()
        config = PipelineConfig(
            crop=settings["crop"],
            filters=settings["filters"],
            dualview=settings["dualview"],
            calipers=calipers,
            text=settings["textkx"],
            inputs=self.get_list("io", "inputs"),
            manifest=self.get("io", "manifest", fallback=defaults.manifest).strip(),
            emit_crops=emit_crops or None,
            crop_suffix=self.get("io", "crop_suffix", fallback=defaults.crop_suffix).strip(),
            **values,
        )
        try:
            config.validate()
        except ParameterError as e:
            raise ConfigError(str(e)) from e
        return config

    def get_logging(self) -> tuple[str, str | None]:
        """(level name, log file or None); a relative log file is taken from the config folder"""
        log_file = self.get("logging", "log_file", fallback="").strip()
        level = self.get("logging", "level", fallback="WARNING").strip()
        return level, os.path.join(self.config_dir, log_file) if log_file else None
