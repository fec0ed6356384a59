"""Exception types raised by the curation toolkit"""


class CurationError(Exception):
    """Base class for all toolkit errors"""


class ImageFormatError(CurationError, ValueError):
    """Raster has an unsupported layout or could not be decoded"""


class PreconditionError(CurationError, ValueError):
    """Operation called on input it is not defined for"""


class ParameterError(CurationError, ValueError):
    """Parameter out of range or inconsistent with the input"""


class OcrBackendError(CurationError):
    """OCR backend unavailable or returned a malformed response"""


class SceneSpecError(CurationError, ValueError):
    """Synthetic scene description is invalid"""


class ConfigError(CurationError):
    """Fatal configuration problem detected before processing"""
