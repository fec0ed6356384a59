import glob
import os

from constants import IMAGE_EXTENSIONS


def is_image_file(path):
    """True for files with a supported raster extension (case-insensitive)"""
    return os.path.splitext(path)[1].lower() in IMAGE_EXTENSIONS


def get_all_files(directory):
    """
    Recursively get all image files in a directory

    Args:
        directory (str): Directory path to scan

    Returns:
        list: Sorted list of file paths
    """
    files = []

    for root, _, filenames in os.walk(directory):
        for filename in filenames:
            if is_image_file(filename):
                files.append(os.path.join(root, filename))

    return sorted(files)


def expand_pattern(pattern):
    """Sorted matches of a glob pattern (recursive `**` allowed), image files only"""
    return sorted(p for p in glob.glob(pattern, recursive=True) if os.path.isfile(p) and is_image_file(p))


def has_glob_chars(path):
    return any(ch in path for ch in "*?[")


def output_name(source_path, suffix, extension=".png"):
    """File name for a derived image: `<stem><suffix><extension>`"""
    stem = os.path.splitext(os.path.basename(source_path))[0]
    return f"{stem}{suffix}{extension}"
