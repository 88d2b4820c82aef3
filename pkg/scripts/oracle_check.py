#!/usr/bin/env python3
"""Cross-check the optimized extractor against the naive oracle.

Runs both implementations over a batch of seeded random corpora and reports
the first divergence, if any.  Useful as a quick sanity sweep after touching
the counting, selection, or rewriting code.
"""

import argparse
import json
import sys
import time

from treeidioms.mining import MiningConfig, extract_idioms, idiom_set_to_json
from treeidioms.minilang import generate_demo_corpus, mini_language, parse
from treeidioms.oracle import reference_extract


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--corpora", type=int, default=100)
    parser.add_argument("--programs", type=int, default=30,
                        help="programs per corpus")
    parser.add_argument("--budget", type=int, default=10)
    parser.add_argument("--first-seed", type=int, default=1000)
    args = parser.parse_args()

    config = MiningConfig(n=args.budget)
    start = time.perf_counter()
    for seed in range(args.first_seed, args.first_seed + args.corpora):
        programs = generate_demo_corpus(seed, args.programs)
        lang_fast, lang_slow = mini_language(), mini_language()
        fast = extract_idioms([parse(p, lang_fast) for p in programs],
                              lang_fast.grammar, config)
        slow = reference_extract([parse(p, lang_slow) for p in programs],
                                 lang_slow.grammar, config)
        fast_json = json.dumps(idiom_set_to_json(fast.idiom_set,
                                                 lang_fast.grammar))
        slow_json = json.dumps(idiom_set_to_json(slow.idiom_set,
                                                 lang_slow.grammar))
        if fast_json != slow_json or fast.corpus != slow.corpus:
            print(f"divergence at seed {seed}", file=sys.stderr)
            return 1
    elapsed = time.perf_counter() - start
    print(f"{args.corpora} corpora agree ({elapsed:.1f}s)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
