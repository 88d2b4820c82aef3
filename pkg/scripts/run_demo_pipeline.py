#!/usr/bin/env python3
"""End-to-end demo: generate a corpus, mine idioms, and report compression.

Runs the whole pipeline through the same CLI entry points a user would call,
leaving every intermediate artifact in the output directory for inspection:

    corpus.txt       mini-language source programs
    trees.txt        their parse trees, one per line
    idioms.json      the mined idiom set with provenance
    compressed.txt   trees rewritten with the top-K idioms
    expanded.txt     the verified round-trip expansion
    report.json      per-tree and aggregate compression statistics
"""

import argparse
import sys
from pathlib import Path

from treeidioms.cli import main as cli


def run(*argv):
    code = cli([str(a) for a in argv])
    if code != 0:
        sys.exit(code)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--count", type=int, default=500,
                        help="number of demo programs")
    parser.add_argument("--budget", type=int, default=600,
                        help="idiom extraction budget (n)")
    parser.add_argument("--k", type=int, default=200,
                        help="idiom prefix used for compression")
    parser.add_argument("--sweep", default="0,100,200,400,600")
    parser.add_argument("--out", type=Path, default=Path("demo_out"))
    args = parser.parse_args()

    d = args.out
    d.mkdir(parents=True, exist_ok=True)

    run("demo-corpus", "--seed", args.seed, "--count", args.count,
        "-o", d / "corpus.txt")
    run("parse", d / "corpus.txt", "-o", d / "trees.txt")
    run("extract", d / "trees.txt", "--grammar", "builtin:mini",
        "-n", args.budget, "-o", d / "idioms.json")
    run("compress", d / "trees.txt", "--idioms", d / "idioms.json",
        "--grammar", "builtin:mini", "--k", args.k, "--sweep", args.sweep,
        "--report", d / "report.json", "-o", d / "compressed.txt")
    run("expand", d / "compressed.txt", "--idioms", d / "idioms.json",
        "--grammar", "builtin:mini", "--verify", d / "trees.txt",
        "-o", d / "expanded.txt")
    run("catalog", "--idioms", d / "idioms.json",
        "--grammar", "builtin:mini", "--top", 10)


if __name__ == "__main__":
    main()
