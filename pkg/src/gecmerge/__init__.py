"""Toolkit for combining black-box grammatical-error-correction systems.

Builds on a shared token-level edit model: parse and write M2 files,
extract edits by aligning corrected text against its source, score
hypotheses edit-by-edit, learn which (error-type, agreement-subset)
groups of edits to keep so that F-beta is maximized, spellcheck with a
frequency model, and generate synthetic error corpora by applying
corrections backwards.
"""

from .align import AlignmentOp, align_tokens, classify_edit, extract_edits
from .combine import (
    CellStats,
    PolicyEntry,
    SelectionPolicy,
    StatsTable,
    Subset,
    SystemOutput,
    apply_policy,
    build_stats,
    combine_iterative,
    empty_system,
    filter_system,
    load_policy,
    optimize_selection,
    partition_pair,
    save_policy,
    train_policy,
)
from .core import (
    AnnotatedSentence,
    Edit,
    M2Corpus,
    OverlapError,
    ReverseAction,
    apply_edits,
    reverse_edit,
    spans_overlap,
)
from .m2 import M2ParseError, dump_m2, load_m2, parse_m2, write_m2
from .rng import SplitMix64
from .score import (
    CorpusAlignmentError,
    Score,
    TypeStats,
    f_beta_from_counts,
    match_edits,
    precision_stability,
    score_corpus,
)
from .spellcheck import (
    FrequencyModel,
    build_model,
    correct_sentence,
    is_suspect,
    suggest,
)
from .synth import (
    CorrectionId,
    ErrorDistribution,
    GenerationExhaustedError,
    generate_corpus,
    generate_pair,
    measure_distribution,
)

__version__ = "0.1.0"
