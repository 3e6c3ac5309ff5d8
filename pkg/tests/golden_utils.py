"""Shared harness for the golden-file CLI tests.

Reports are byte-stable except for the wall-clock field, which is masked on
both sides before comparison. Regenerate the stored files with
``python -m tests.make_golden`` after an intentional report change.
"""

from __future__ import annotations

import re
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"

_TIMING = re.compile(r'"elapsed_seconds": [-+0-9.eE]+')

# (name, argv, expected exit code)
CASES = [
    ("check_kernel_identity", ["check-kernel", "--input", "tests/fixtures/identity3.json"], 0),
    ("check_kernel_block", ["check-kernel", "--input", "tests/fixtures/block.json", "--strict"], 0),
    ("interpolate_pair", ["interpolate", "--input", "tests/fixtures/pair.json"], 0),
    ("deflate_pair", ["deflate", "--input", "tests/fixtures/pair.json", "--point", "s1"], 0),
    (
        "tensor_pair",
        [
            "tensor",
            "--input",
            "tests/fixtures/tensor_a.json",
            "--input2",
            "tests/fixtures/tensor_b.json",
        ],
        0,
    ),
    ("multiplier_pair", ["multiplier", "--input", "tests/fixtures/pair.json"], 0),
    ("multiplier_block", ["multiplier", "--input", "tests/fixtures/block.json"], 0),
    ("berezin_pair", ["berezin", "--input", "tests/fixtures/pair.json"], 0),
    ("frame_bounds_pair", ["frame-bounds", "--input", "tests/fixtures/pair.json"], 0),
    ("parseval_pair", ["parseval", "--input", "tests/fixtures/pair.json"], 1),
    ("parseval_tight", ["parseval", "--input", "tests/fixtures/tight_frame.json"], 0),
    ("papadakis_tight", ["papadakis", "--input", "tests/fixtures/tight_frame.json"], 0),
    ("psi_multiplier", ["psi-multiplier", "--input", "tests/fixtures/features_psi.json"], 0),
    ("selftest", ["selftest"], 0),
]


def run_cli(argv):
    return subprocess.run(
        [sys.executable, "-m", "rkmod.cli", *argv],
        capture_output=True,
        text=True,
        cwd=ROOT,
    )


def mask_timing(text: str) -> str:
    return _TIMING.sub('"elapsed_seconds": "MASKED"', text)
