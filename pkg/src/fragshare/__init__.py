"""fragshare: fragment labeled corpora into privacy-safer training releases.

The pipeline extracts NP/VP constituents of 2-4 words from parsed documents,
filters rare (uniquely linkable) forms by document frequency, and recombines
fragments across documents into label-preserving training examples.  Audit
operations quantify what a release still leaks: identifier word percentages,
fragment k-anonymity, and chunk-level identifier exposure.
"""

__version__ = "0.1.0"

from .assembler import AssembledExample, AssemblyConfig, AssemblyStats, assemble, render, validate_examples
from .audit import (
    AuditReport,
    IdentifierLexicon,
    LinkageReport,
    audit_reduction,
    builtin_lexicon,
    exposure,
    k_anonymity,
    lexicon_from_terms,
    load_lexicon_dir,
    scan_identifiers,
)
from .chunker import Fragment, FragmentPool, build_pool, extract_shallow, extract_tree, filter_rare
from .dataset import ReleaseStats, SplitSpec, emit_release, read_release, split, stats
from .errors import (
    ConfigError,
    FragshareError,
    ParseError,
    PoolExhaustedError,
    ValidationError,
)
from .ingest import parse_bracketed, parse_canonical, parse_tagged, write_bracketed, write_canonical, write_tagged
from .model import Corpus, Document, Sentence, Token, TreeNode, normalize_label
from .synthetic import SynthSpec, generate_synthetic

__all__ = [
    "AssembledExample",
    "AssemblyConfig",
    "AssemblyStats",
    "AuditReport",
    "ConfigError",
    "Corpus",
    "Document",
    "Fragment",
    "FragmentPool",
    "FragshareError",
    "IdentifierLexicon",
    "LinkageReport",
    "ParseError",
    "PoolExhaustedError",
    "ReleaseStats",
    "Sentence",
    "SplitSpec",
    "SynthSpec",
    "Token",
    "TreeNode",
    "ValidationError",
    "assemble",
    "audit_reduction",
    "build_pool",
    "builtin_lexicon",
    "emit_release",
    "exposure",
    "extract_shallow",
    "extract_tree",
    "filter_rare",
    "generate_synthetic",
    "k_anonymity",
    "lexicon_from_terms",
    "load_lexicon_dir",
    "normalize_label",
    "parse_bracketed",
    "parse_canonical",
    "parse_tagged",
    "read_release",
    "render",
    "scan_identifiers",
    "split",
    "stats",
    "validate_examples",
    "write_bracketed",
    "write_canonical",
    "write_tagged",
]
