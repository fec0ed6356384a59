"""Constants used throughout the application"""

# Exit codes
EXIT_OK = 0
EXIT_FATAL_CONFIG = 1
EXIT_PARTIAL = 2

# Record status values
STATUS_OK = "OK"
STATUS_DECODE_ERROR = "DECODE_ERROR"
STATUS_OCR_SKIPPED = "OCR_SKIPPED"

# Fixed stage order; crop runs first so filters and calipers see the scan area
STAGE_ORDER = ["crop", "filters", "dualview", "calipers", "textkx"]

# Raster formats accepted as pipeline input
IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff")

# Default HSV ranges: (name, hue_lo, hue_hi, sat_lo, sat_hi, val_lo, val_hi)
# Hue in degrees (wrap-around when hue_lo > hue_hi), saturation/value in [0, 1]
DEFAULT_DOPPLER_RANGES = [
    ("red", 345.0, 15.0, 0.45, 1.0, 0.35, 1.0),
    ("orange", 15.0, 45.0, 0.45, 1.0, 0.35, 1.0),
    ("yellow", 45.0, 70.0, 0.45, 1.0, 0.35, 1.0),
    ("green", 70.0, 160.0, 0.30, 1.0, 0.30, 1.0),
    ("blue", 190.0, 260.0, 0.45, 1.0, 0.35, 1.0),
]

DEFAULT_INDICATOR_RANGES = [
    ("green", 70.0, 160.0, 0.25, 1.0, 0.40, 1.0),
    ("white", 0.0, 360.0, 0.0, 0.10, 0.90, 1.0),
]

DEFAULT_DUALVIEW_EXCLUSION_RANGES = [
    ("teal", 160.0, 200.0, 0.30, 1.0, 0.30, 1.0),
    ("green", 70.0, 160.0, 0.25, 1.0, 0.40, 1.0),
]

# Procedural keyword list (word-boundary regex alternatives)
PROCEDURAL_KEYWORDS = [
    "BIOPSY", "BX", "FNA", "CORE", "NEEDLE", "WIRE", "GUID(?:E|ED|ANCE)",
    "PRE-?FIRE", "POST-?FIRE", "CLIP", "MARKER", "COIL", "ASPIRATION",
    "LOC(?:ALIZATION)?",
]

# Scored categories, in report order
FLAG_CATEGORIES = ["invalid", "non_b_mode", "dual_view", "calipers", "text_presence"]
FIELD_CATEGORIES = [
    "laterality", "orientation", "distance", "position",
    "axilla", "lesion_measurement", "procedural",
]
SCORE_CATEGORIES = FLAG_CATEGORIES + FIELD_CATEGORIES

# Display names for the summary table
CATEGORY_DISPLAY_NAMES = {
    "invalid": "Invalid scan",
    "non_b_mode": "Enhanced scan mode",
    "dual_view": "Dual-view scan",
    "calipers": "Caliper presence",
    "text_presence": "Text presence",
    "laterality": "Laterality",
    "orientation": "Orientation",
    "distance": "Distance",
    "position": "Position",
    "axilla": "Axilla",
    "lesion_measurement": "Lesion measurement",
    "procedural": "Procedural",
}

# Sample characteristic rows reported for every run
SUMMARY_ROWS = [
    "images", "any_artifact", "non_text_artifact", "calipers", "invalid",
    "dual_view", "text_annotations", "procedural", "bf_highlighting", "non_b_mode",
]
