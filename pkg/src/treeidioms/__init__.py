"""Mining and applying syntax-tree idioms.

Repeatedly collapses the most frequent depth-2 subtree of a parse-tree
corpus into a single production rule, then uses the mined rule set to
shorten the derivation sequences of arbitrary trees, losslessly.
"""

from .grammar import Grammar, ProductionRule, Symbol, TreeIdiomsError
from .mining import (Depth2Pattern, Idiom, IdiomSet, MiningConfig,
                     collapse_pattern, count_patterns, expand_idiom,
                     extract_idioms, most_frequent, rewrite_corpus)
from .compress import (CompressionReport, compress_corpus, compress_tree,
                       expand_tree, k_sweep)
from .minilang import SourceProgram, generate_demo_corpus, mini_language, parse
from .trees import (ParseTree, deserialize_tree, replay, rule_sequence,
                    serialize_tree, validate_tree)

__version__ = "0.1.0"

__all__ = [
    "Grammar", "ProductionRule", "Symbol", "TreeIdiomsError",
    "Depth2Pattern", "Idiom", "IdiomSet", "MiningConfig",
    "collapse_pattern", "count_patterns", "expand_idiom", "extract_idioms",
    "most_frequent", "rewrite_corpus",
    "CompressionReport", "compress_corpus", "compress_tree", "expand_tree",
    "k_sweep",
    "SourceProgram", "generate_demo_corpus", "mini_language", "parse",
    "ParseTree", "deserialize_tree", "replay", "rule_sequence",
    "serialize_tree", "validate_tree",
]
