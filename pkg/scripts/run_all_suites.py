#!/usr/bin/env python3
"""Run every shipped verification suite and aggregate one summary.

Usage: python3 scripts/run_all_suites.py [OUT_DIR]
"""

import json
import sys
import time
from pathlib import Path

from ssdkit.cli import main


def run(out_dir: str) -> int:
    t0 = time.perf_counter()
    code = main(["verify", "--suite", "all", "--out", out_dir])
    main(["report", "--out", out_dir])
    summary = json.loads((Path(out_dir) / "summary.json").read_text())
    print(f"\n{summary['n_checks']} checks, {summary['n_failed']} failed, "
          f"{summary['n_skipped']} skipped in {time.perf_counter() - t0:.0f}s")
    for suite, info in sorted(summary["suites"].items()):
        mark = "ok " if info["passed"] else "FAIL"
        print(f"  [{mark}] {suite}")
    return code


if __name__ == "__main__":
    sys.exit(run(sys.argv[1] if len(sys.argv) > 1 else "reports"))
