from itertools import groupby
from pathlib import Path
from typing import Dict, List

import black
from flake8.main.cli import main as flake_main

# tutorials are rendered as notebooks, hence the narrower limit
LINE_LENGTHS: Dict[str, int] = {"regimecalc": 120, "scripts": 120, "tests": 120, "tutorials": 80}

FLAKE8_OPTIONS = [
    "--select=E,W,F",
    # black breaks lines before binary operators
    "--ignore=W503",
    "--per-file-ignores=**/__init__.py:F401",
]


def _by_length() -> Dict[int, List[str]]:
    ordered = sorted(LINE_LENGTHS.items(), key=lambda item: item[1])
    return {length: [root for root, _ in group] for length, group in groupby(ordered, key=lambda item: item[1])}


def _run_flake():
    status = 0
    for length, roots in _by_length().items():
        status |= flake_main([f"--max-line-length={length}", *FLAKE8_OPTIONS, *roots])
    exit(status)


def _run_black(modify: bool):
    report = black.Report(check=not modify, quiet=False)
    write_back = black.WriteBack.YES if modify else black.WriteBack.CHECK
    for root, length in LINE_LENGTHS.items():
        mode = black.Mode(line_length=length)
        for path in sorted(Path(root).glob("**/*.py")):
            black.reformat_one(path, False, write_back, mode, report)
    exit(report.return_code)
