from constants import (
    CATEGORY_DISPLAY_NAMES,
    EXIT_FATAL_CONFIG,
    EXIT_OK,
    EXIT_PARTIAL,
    FIELD_CATEGORIES,
    FLAG_CATEGORIES,
    SCORE_CATEGORIES,
    STAGE_ORDER,
    SUMMARY_ROWS,
)


def test_exit_codes_are_distinct():
    assert (EXIT_OK, EXIT_FATAL_CONFIG, EXIT_PARTIAL) == (0, 1, 2)


def test_stage_order_starts_with_crop():
    assert STAGE_ORDER == ["crop", "filters", "dualview", "calipers", "textkx"]


def test_every_scored_category_has_a_display_name():
    assert SCORE_CATEGORIES == FLAG_CATEGORIES + FIELD_CATEGORIES
    assert set(SCORE_CATEGORIES) <= set(CATEGORY_DISPLAY_NAMES)


def test_summary_rows_start_with_image_count():
    assert SUMMARY_ROWS[0] == "images"
    assert len(SUMMARY_ROWS) == len(set(SUMMARY_ROWS))
