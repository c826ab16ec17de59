"""
demo.py - lacuna walkthrough

Runs the toolkit end to end on the sample presentations in data/, one stage
at a time. Press Enter between stages; pass --no-pause to run straight through.

Usage:
    python demo.py
    python demo.py --no-pause
"""

import os
import subprocess
import sys
import tempfile

BASE_DIR = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.join(BASE_DIR, "data")
WORK = tempfile.mkdtemp(prefix="lacuna-demo-")

PAUSE = "--no-pause" not in sys.argv


def banner(title: str, stage: str = "") -> None:
    line = "=" * 60
    print(f"\n{line}")
    if stage:
        print(f"  {stage}")
    print(f"  {title}")
    print(f"{line}\n")


def pause(msg: str = "Press Enter to continue to the next stage...") -> None:
    print(f"\n{'─' * 60}")
    if PAUSE:
        input(f"  {msg}")
    print()


def data(name: str) -> str:
    return os.path.join(DATA, name)


def work(name: str) -> str:
    return os.path.join(WORK, name)


def run_lacuna(*args: str) -> int:
    """Run one lacuna command, streaming its report and diagnostics."""
    print(f"$ lacuna {' '.join(os.path.relpath(a, BASE_DIR) if a.startswith(BASE_DIR) else a for a in args)}")
    result = subprocess.run([sys.executable, "-X", "utf8", os.path.join(BASE_DIR, "lacuna.py"), *args], cwd=BASE_DIR)
    if result.returncode != 0:
        print(f"\n[!] exit code {result.returncode}")
    return result.returncode


def show_file_summary(filepath: str, max_lines: int = 20) -> None:
    """Print the first N lines of a file."""
    try:
        with open(filepath, "r", encoding="utf-8") as f:
            lines = f.readlines()
        print(f"--- {os.path.basename(filepath)} (first {min(max_lines, len(lines))} of {len(lines)} lines) ---")
        for line in lines[:max_lines]:
            print(line, end="")
        if len(lines) > max_lines:
            print(f"\n  ... ({len(lines) - max_lines} more lines)")
    except FileNotFoundError:
        print(f"[!] File not found: {filepath}")


# ═══════════════════════════════════════════════════════════════════════
#  STAGE 1: Presentations and small cancellation
# ═══════════════════════════════════════════════════════════════════════

def demo_presentations() -> None:
    banner("Presentations and small cancellation", "STAGE 1")
    show_file_summary(data("genus2.pres"))
    print("\n>> The genus-2 surface group: every piece has length 1, so C'(1/7) holds\n")
    run_lacuna("check-sc", "--pres", data("genus2.pres"), "--mu", "1/7")

    print("\n>> Z^2 = <a, b | abAB> is not C'(1/6): expect exit code 1\n")
    run_lacuna("check-sc", "--pres", data("z2.pres"))

    print("\n>> Finite groups by coset enumeration\n")
    run_lacuna("coset", "--pres", data("s3.pres"))


# ═══════════════════════════════════════════════════════════════════════
#  STAGE 2: The word problem
# ═══════════════════════════════════════════════════════════════════════

def demo_dehn() -> None:
    banner("Dehn's algorithm", "STAGE 2")
    print("   Watch for: one reduction step per relator cell on stderr\n")
    run_lacuna("dehn", "--pres", data("genus2.pres"), "--word", "ababABcdCDBA", "--trace")


# ═══════════════════════════════════════════════════════════════════════
#  STAGE 3: Cayley balls and metric measurements
# ═══════════════════════════════════════════════════════════════════════

def demo_geometry() -> None:
    banner("Cayley balls, δ and divergence", "STAGE 3")
    print(">> Radius-8 balls of the free group and of Z^2\n")
    run_lacuna("ball", "--pres", data("free2.pres"), "--oracle", "free", "--radius", "8", "--out", work("free.json"))
    run_lacuna("ball", "--pres", data("z2.pres"), "--oracle", "abelian", "--radius", "8", "--out", work("z2.json"))

    print("\n>> Four-point δ: 0 for the tree, 2 for the lattice\n")
    run_lacuna("delta", "--ball", work("free.json"), "--no-thin")
    run_lacuna("delta", "--ball", work("z2.json"), "--no-thin")

    print("\n>> Divergence of aa, bb around the identity\n")
    for ball in ("free.json", "z2.json"):
        run_lacuna("div", "--ball", work(ball), "--a", "aa", "--b", "bb", "--c", "1", "--delta", "1/2", "--lambda", "0")


# ═══════════════════════════════════════════════════════════════════════
#  STAGE 4: Rips fillings and the certificate
# ═══════════════════════════════════════════════════════════════════════

def demo_certificate() -> None:
    banner("Rips complexes and the local-to-global certificate", "STAGE 4")
    print(">> A unit square of Z^2 fills with two triangles at scale 2\n")
    run_lacuna("fill", "--ball", work("z2.json"), "--d", "2", "--loop", "1", "a", "ab", "b", "--delta", "1/4")

    print("\n>> Certificates at the scaled-down test constants: PASS for F2, FAIL for Z^2\n")
    run_lacuna("certify", "--ball", work("free.json"), "--D", "1", "--R", "4", "--test-constants")
    run_lacuna("certify", "--ball", work("z2.json"), "--D", "1", "--R", "4", "--test-constants")


# ═══════════════════════════════════════════════════════════════════════
#  STAGE 5: Generators
# ═══════════════════════════════════════════════════════════════════════

def demo_generators() -> None:
    banner("Lacunary families and schedules", "STAGE 5")
    run_lacuna("gen", "lacunary", "--count", "3", "--format", "pres", "--out", work("lacunary.pres"))
    show_file_summary(work("lacunary.pres"), max_lines=8)

    print("\n>> Graded schedule check on the sample schedule\n")
    run_lacuna("graded-check", "--schedule", data("schedule.json"))


# ═══════════════════════════════════════════════════════════════════════
#  Main
# ═══════════════════════════════════════════════════════════════════════

def main():
    print("=" * 60)
    print("  lacuna walkthrough")
    print("  small cancellation, Cayley balls, hyperbolicity certificates")
    print("=" * 60)
    print(f"\nScratch files go to {WORK}")

    stages = [
        ("Press Enter to start Stage 1: Presentations...", demo_presentations),
        ("Press Enter for Stage 2: Dehn's algorithm...", demo_dehn),
        ("Press Enter for Stage 3: Cayley balls...", demo_geometry),
        ("Press Enter for Stage 4: Certificates...", demo_certificate),
        ("Press Enter for Stage 5: Generators...", demo_generators),
    ]
    for msg, stage in stages:
        pause(msg)
        stage()

    banner("Walkthrough complete")
    for name in sorted(os.listdir(WORK)):
        print(f"  [OK] {name}")


if __name__ == "__main__":
    main()
