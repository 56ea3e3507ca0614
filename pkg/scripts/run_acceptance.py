"""Run the acceptance suite and print one PASS/FAIL line per criterion."""

import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", str(ROOT / "tests" / "test_acceptance.py"), "-q", "-p", "no:randomly"],
        capture_output=True, text=True, check=False, cwd=ROOT,
    )
    lines = [l for l in proc.stdout.splitlines() if l.startswith(("PASS criterion", "FAIL criterion"))]
    print("\n".join(lines))
    sys.exit(proc.returncode)
