"""Build a single-file executable of the curation CLI with PyInstaller"""
import argparse
import os
import re
import subprocess
import sys

ROOT_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
SRC_DIR = os.path.join(ROOT_DIR, "src")
APP_NAME = "buscurate"


def read_version():
    """VERSION string from src/version.py without importing it"""
    version_py_path = os.path.join(SRC_DIR, "version.py")
    try:
        with open(version_py_path, encoding="utf-8") as f:
            content = f.read()
    except OSError as e:
        print(f"ERROR: Could not read version.py: {e}")
        sys.exit(1)
    match = re.search(r'^VERSION = "([^"]+)"', content, re.MULTILINE)
    if not match:
        print("ERROR: Could not extract VERSION from version.py")
        sys.exit(1)
    return match.group(1)


def pyinstaller_command(version, dist_dir):
    # --add-data uses ';' on Windows and ':' elsewhere
    separator = ";" if os.name == "nt" else ":"
    return [
        sys.executable, "-m", "PyInstaller",
        "--onefile",
        "--clean",
        "--noconfirm",
        "--name", f"{APP_NAME}-{version}",
        "--paths", SRC_DIR,
        "--add-data", f"{os.path.join(SRC_DIR, 'config.ini')}{separator}.",
        "--distpath", dist_dir,
        os.path.join(SRC_DIR, "main.py"),
    ]


def main():
    parser = argparse.ArgumentParser(description="Build the buscurate executable")
    parser.add_argument("--dist", default=os.path.join(ROOT_DIR, "dist"), help="Output folder")
    parser.add_argument("--dry-run", action="store_true", help="Print the PyInstaller command only")
    args = parser.parse_args()

    version = read_version()
    command = pyinstaller_command(version, args.dist)
    print(f"Building {APP_NAME} {version}")
    print(" ".join(command))
    if args.dry_run:
        return 0

    result = subprocess.run(command, cwd=ROOT_DIR)
    if result.returncode != 0:
        print(f"ERROR: PyInstaller failed with exit code {result.returncode}")
        return result.returncode
    print(f"Executable written to {args.dist}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
