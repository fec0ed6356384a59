import logging

from exceptions import ConfigError

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def setup_logging(level: str = "WARNING", log_file: str | None = None) -> None:
    """
    Configure the root logger for a CLI run.

    Diagnostics go to stderr so they never mix with the summary printed on stdout.
    An unknown level name falls back to WARNING. Raises ConfigError when the log
    file cannot be opened.
    """
    numeric_level = logging.getLevelName(level.strip().upper()) if level else logging.WARNING
    if not isinstance(numeric_level, int):
        numeric_level = logging.WARNING

    handlers: list[logging.Handler] = [logging.StreamHandler()]
    if log_file:
        try:
            handlers.append(logging.FileHandler(log_file, encoding="utf-8"))
        except OSError as e:
            raise ConfigError(f"Cannot open log file {log_file}: {e}") from e
    logging.basicConfig(level=numeric_level, format=LOG_FORMAT, handlers=handlers, force=True)
