"""Pipeline command line: ingest, extract, assemble, audit, stats, run_all.

Every stage writes its artifacts into the output directory plus a manifest
line (stage, config hash, input/output hashes, seed, tool version) that is
sufficient to re-run the stage bit-identically.  All randomness derives from
the single config seed; no stage reads system entropy.

Exit codes: 0 ok, 2 config error, 3 data error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from . import __version__
from .assembler import AssemblyConfig, AssemblyStats, assemble
from .audit import (
    audit_reduction,
    builtin_lexicon,
    exposure,
    format_audit_table,
    format_exposure,
    format_linkage,
    k_anonymity,
    load_lexicon_dir,
    write_audit_json,
)
from .chunker import build_pool, extract_shallow, extract_tree, filter_rare, read_fragments, write_fragments
from .dataset import SplitSpec, emit_release, read_release, split, stats as release_stats, format_stats
from .errors import ConfigError, FragshareError, ParseError, PoolExhaustedError, ValidationError
from .ingest import parse_bracketed, parse_canonical, parse_tagged, write_canonical
from .synthetic import DEFAULT_PLANT_RATES, PLANT_CATEGORIES, SynthSpec, generate_synthetic

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_IO = 4

STAGE_ORDER = ("ingest", "extract", "assemble", "audit", "stats")

INPUT_FORMATS = ("bracketed", "tagged", "jsonl", "synthetic")
FLAG_FORMATS = ("bracketed", "tagged", "jsonl")


@dataclass
class PipelineConfig:
    seed: int = 0
    input_format: str = "synthetic"
    input_path: str | None = None
    n_docs: int = 200
    case_fraction: float = 0.10
    sentences_per_doc: tuple[int, int] = (8, 14)
    plant_rates: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_PLANT_RATES))
    min_len: int = 2
    max_len: int = 4
    min_doc_freq: int = 1
    test_fraction: float = 0.10
    stratify: bool = True
    target_ratio: float = 2.0
    order: tuple[str, ...] = ("NP", "NP", "VP", "VP")
    reuse: str = "none"
    separator: str = ". "
    with_provenance: bool = False
    lexicon_dir: str | None = None
    output_dir: str = "out"

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["sentences_per_doc"] = list(self.sentences_per_doc)
        out["order"] = list(self.order)
        out["plant_rates"] = dict(self.plant_rates)
        return out

    def validate(self) -> None:
        if self.input_format not in INPUT_FORMATS:
            raise ConfigError(f"input format must be one of {INPUT_FORMATS}, got {self.input_format!r}")
        if self.input_format != "synthetic":
            if not self.input_path:
                raise ConfigError(f"input format {self.input_format!r} requires an input path")
            if not Path(self.input_path).exists():
                raise ConfigError(f"input path does not exist: {self.input_path}")
        else:
            if self.n_docs < 1:
                raise ConfigError("n_docs must be >= 1")
            if not 0.0 <= self.case_fraction <= 1.0:
                raise ConfigError("case_fraction must be in [0, 1]")
            if len(self.sentences_per_doc) != 2 or not 1 <= self.sentences_per_doc[0] <= self.sentences_per_doc[1]:
                raise ConfigError(f"sentences_per_doc must be [lo, hi] with 1 <= lo <= hi, got {list(self.sentences_per_doc)}")
            for cat, rate in self.plant_rates.items():
                if cat not in PLANT_CATEGORIES:
                    raise ConfigError(f"unknown plant category {cat!r}")
                if not 0.0 <= rate <= 1.0:
                    raise ConfigError(f"plant rate for {cat!r} must be in [0, 1]")
        if not 1 <= self.min_len <= self.max_len:
            raise ConfigError(f"bounds must satisfy 1 <= min_len <= max_len, got [{self.min_len}, {self.max_len}]")
        if self.min_doc_freq < 1:
            raise ConfigError("min_doc_freq must be >= 1")
        if not 0.0 < self.test_fraction < 1.0:
            raise ConfigError("test_fraction must be in (0, 1)")
        if self.target_ratio <= 0:
            raise ConfigError("target_ratio must be > 0")
        if tuple(sorted(self.order)) != ("NP", "NP", "VP", "VP"):
            raise ConfigError(f"order must be a permutation of NP,NP,VP,VP, got {list(self.order)}")
        if self.reuse not in ("none", "with_replacement"):
            raise ConfigError(f"reuse must be 'none' or 'with_replacement', got {self.reuse!r}")
        if self.lexicon_dir is not None and not Path(self.lexicon_dir).is_dir():
            raise ConfigError(f"lexicon directory does not exist: {self.lexicon_dir}")


_CONFIG_SECTIONS = {
    "seed": None,
    "output_dir": None,
    "with_provenance": None,
    "input": {"format": "input_format", "path": "input_path", "n_docs": "n_docs",
              "case_fraction": "case_fraction", "sentences_per_doc": "sentences_per_doc",
              "plant_rates": "plant_rates"},
    "chunking": {"min_len": "min_len", "max_len": "max_len", "min_doc_freq": "min_doc_freq"},
    "split": {"test_fraction": "test_fraction", "stratify": "stratify"},
    "assembly": {"target_ratio": "target_ratio", "order": "order", "reuse": "reuse",
                 "separator": "separator"},
    "audit": {"lexicon_dir": "lexicon_dir"},
}


def load_config(path: str | Path) -> PipelineConfig:
    """Read the JSON config file; unknown keys are config errors."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    cfg = PipelineConfig()
    for key, value in raw.items():
        section = _CONFIG_SECTIONS.get(key, "missing")
        if section == "missing":
            raise ConfigError(f"unknown config key {key!r}")
        if section is None:
            setattr(cfg, key, value)
            continue
        if not isinstance(value, dict):
            raise ConfigError(f"config section {key!r} must be an object")
        for sub, attr in section.items():
            if sub in value:
                setattr(cfg, attr, value.pop(sub))
        if value:
            raise ConfigError(f"unknown keys in config section {key!r}: {sorted(value)}")
    cfg.sentences_per_doc = tuple(cfg.sentences_per_doc)
    cfg.order = tuple(cfg.order)
    return cfg


def _apply_flags(cfg: PipelineConfig, args: argparse.Namespace) -> None:
    if args.seed is not None:
        cfg.seed = args.seed
    if args.input is not None:
        cfg.input_path = args.input
    if args.format is not None:
        cfg.input_format = args.format
    if args.min_doc_freq is not None:
        cfg.min_doc_freq = args.min_doc_freq
    if args.target_ratio is not None:
        cfg.target_ratio = args.target_ratio
    if args.order is not None:
        cfg.order = tuple(part.strip() for part in args.order.split(","))
    if args.with_provenance:
        cfg.with_provenance = True
    if args.lexicon_dir is not None:
        cfg.lexicon_dir = args.lexicon_dir
    if args.output_dir is not None:
        cfg.output_dir = args.output_dir
    if args.min_len is not None:
        cfg.min_len = args.min_len
    if args.max_len is not None:
        cfg.max_len = args.max_len
    if args.test_fraction is not None:
        cfg.test_fraction = args.test_fraction


def _config_hash(cfg: PipelineConfig) -> str:
    canonical = json.dumps(cfg.to_dict(), sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_text(path: Path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def _record_stage(cfg: PipelineConfig, stage: str, inputs: Sequence[Path], outputs: Sequence[Path]) -> None:
    outdir = Path(cfg.output_dir)
    manifest_path = outdir / "manifest.jsonl"
    entries: dict[str, dict] = {}
    if manifest_path.exists():
        for line in manifest_path.read_text(encoding="utf-8").splitlines():
            if line.strip():
                entry = json.loads(line)
                entries[entry["stage"]] = entry
    entries[stage] = {
        "stage": stage,
        "version": __version__,
        "seed": cfg.seed,
        "config_sha256": _config_hash(cfg),
        "inputs": {p.name: _sha256_file(p) for p in inputs},
        "outputs": {p.name: _sha256_file(p) for p in outputs},
    }
    lines = [
        json.dumps(entries[s], sort_keys=True, ensure_ascii=False)
        for s in STAGE_ORDER
        if s in entries
    ]
    _write_text(manifest_path, "\n".join(lines) + "\n")


def _require_artifact(cfg: PipelineConfig, name: str, description: str, produced_by: str) -> Path:
    path = Path(cfg.output_dir) / name
    if not path.exists():
        raise ValidationError(
            f"missing {description} artifact {path}; run the `{produced_by}` stage first"
        )
    return path


def _load_lexicon(cfg: PipelineConfig):
    if cfg.lexicon_dir:
        return load_lexicon_dir(cfg.lexicon_dir)
    return builtin_lexicon()


# ---------------------------------------------------------------------------
# stages


def cmd_ingest(cfg: PipelineConfig) -> None:
    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    inputs: list[Path] = []
    if cfg.input_format == "synthetic":
        spec = SynthSpec(
            n_docs=cfg.n_docs,
            seed=cfg.seed,
            case_fraction=cfg.case_fraction,
            sentences_per_doc=cfg.sentences_per_doc,
            plant_rates=cfg.plant_rates,
        )
        corpus = generate_synthetic(spec)
    else:
        in_path = Path(cfg.input_path)
        inputs.append(in_path)
        text = in_path.read_text(encoding="utf-8")
        parser = {"bracketed": parse_bracketed, "tagged": parse_tagged, "jsonl": parse_canonical}[
            cfg.input_format
        ]
        corpus = parser(text)
    out = outdir / "corpus.jsonl"
    _write_text(out, write_canonical(corpus))
    log.info("ingest: %d documents (%s)", len(corpus), cfg.input_format)
    _record_stage(cfg, "ingest", inputs, [out])


def cmd_extract(cfg: PipelineConfig) -> None:
    corpus_path = _require_artifact(cfg, "corpus.jsonl", "corpus", "ingest")
    corpus = parse_canonical(corpus_path.read_text(encoding="utf-8"))
    train, test = split(corpus, SplitSpec(seed=cfg.seed, test_fraction=cfg.test_fraction, stratify=cfg.stratify))
    outdir = Path(cfg.output_dir)
    train_path = outdir / "train.jsonl"
    test_path = outdir / "test.jsonl"
    _write_text(train_path, write_canonical(train))
    _write_text(test_path, write_canonical(test))

    fragments = []
    for doc in train.documents:
        if all(s.tree is not None for s in doc.sentences):
            fragments.extend(extract_tree(doc, cfg.min_len, cfg.max_len))
        else:
            fragments.extend(extract_shallow(doc, cfg.min_len, cfg.max_len))
    pool = build_pool(train, fragments)
    pool = filter_rare(pool, cfg.min_doc_freq)
    frag_path = outdir / "fragments.jsonl"
    _write_text(frag_path, write_fragments(pool))
    log.info(
        "extract: %d train / %d test documents, %d fragments kept at min_doc_freq=%d",
        len(train), len(test), len(pool), cfg.min_doc_freq,
    )
    _record_stage(cfg, "extract", [corpus_path], [train_path, test_path, frag_path])


def cmd_assemble(cfg: PipelineConfig) -> None:
    frag_path = _require_artifact(cfg, "fragments.jsonl", "fragment pool", "extract")
    train_path = _require_artifact(cfg, "train.jsonl", "training split", "extract")
    train = parse_canonical(train_path.read_text(encoding="utf-8"))
    fragments = read_fragments(frag_path.read_text(encoding="utf-8"))
    pool = build_pool(train, fragments)
    acfg = AssemblyConfig(
        seed=cfg.seed,
        order=cfg.order,
        target_ratio=cfg.target_ratio,
        reuse=cfg.reuse,
        separator=cfg.separator,
    )
    stats = AssemblyStats()
    examples = assemble(pool, train, acfg, stats=stats)
    outdir = Path(cfg.output_dir)
    release_path = outdir / "release.jsonl"
    audit_path = outdir / "release.audit.jsonl"
    emit_release(examples, release_path, with_provenance=cfg.with_provenance)
    # provenance-bearing sidecar for the audit stage; never part of the release
    emit_release(examples, audit_path, with_provenance=True)
    log.info(
        "assemble: %d examples (skipped %s, shortfall %s)",
        len(examples), dict(sorted(stats.skipped.items())), dict(sorted(stats.shortfall.items())),
    )
    _record_stage(cfg, "assemble", [train_path, frag_path], [release_path, audit_path])


def cmd_audit(cfg: PipelineConfig) -> None:
    train_path = _require_artifact(cfg, "train.jsonl", "training split", "extract")
    release_path = _require_artifact(cfg, "release.audit.jsonl", "provenance release", "assemble")
    train = parse_canonical(train_path.read_text(encoding="utf-8"))
    release = read_release(release_path.read_text(encoding="utf-8"))
    lexicon = _load_lexicon(cfg)
    report = audit_reduction(train, release, lexicon)
    linkage = k_anonymity(release, train)
    rates = exposure(release, lexicon)
    outdir = Path(cfg.output_dir)
    json_path = outdir / "audit.json"
    text_path = outdir / "audit.txt"
    _write_text(json_path, write_audit_json(report, linkage, rates))
    _write_text(
        text_path,
        format_audit_table(report) + "\n" + format_linkage(linkage) + "\n" + format_exposure(rates),
    )
    log.info(
        "audit: total identifiers %.4f%% -> %.4f%% of words, min_k=%d",
        report.total.full_pct, report.total.frag_pct, linkage.min_k,
    )
    _record_stage(cfg, "audit", [train_path, release_path], [json_path, text_path])


def cmd_stats(cfg: PipelineConfig) -> None:
    train_path = _require_artifact(cfg, "train.jsonl", "training split", "extract")
    release_path = _require_artifact(cfg, "release.audit.jsonl", "provenance release", "assemble")
    train = parse_canonical(train_path.read_text(encoding="utf-8"))
    release = read_release(release_path.read_text(encoding="utf-8"))
    st = release_stats(release, train)
    outdir = Path(cfg.output_dir)
    json_path = outdir / "stats.json"
    text_path = outdir / "stats.txt"
    _write_text(json_path, json.dumps(st.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n")
    _write_text(text_path, format_stats(st))
    log.info("stats: %d examples, mean %.2f words", st.n_examples, st.mean_example_words)
    _record_stage(cfg, "stats", [train_path, release_path], [json_path, text_path])


def cmd_run_all(cfg: PipelineConfig) -> None:
    cmd_ingest(cfg)
    cmd_extract(cfg)
    cmd_assemble(cfg)
    cmd_audit(cfg)
    cmd_stats(cfg)


_COMMANDS = {
    "ingest": cmd_ingest,
    "extract": cmd_extract,
    "assemble": cmd_assemble,
    "audit": cmd_audit,
    "stats": cmd_stats,
    "run_all": cmd_run_all,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its values")
    common.add_argument("--output-dir", help="artifact directory")
    common.add_argument("--input", help="input corpus file")
    common.add_argument("--format", choices=FLAG_FORMATS, help="input corpus format")
    common.add_argument("--seed", type=int, help="master seed for all stages")
    common.add_argument("--min-doc-freq", type=int, help="rare-constituent filter threshold")
    common.add_argument("--target-ratio", type=float, help="examples per source document")
    common.add_argument("--order", help="part order, e.g. NP,NP,VP,VP")
    common.add_argument("--with-provenance", action="store_true", default=False,
                        help="include part provenance in release.jsonl (not for real releases)")
    common.add_argument("--lexicon-dir", help="directory of *.txt identifier wordlists")
    common.add_argument("--min-len", type=int, help="minimum fragment word length")
    common.add_argument("--max-len", type=int, help="maximum fragment word length")
    common.add_argument("--test-fraction", type=float, help="held-out test fraction")

    parser = argparse.ArgumentParser(
        prog="fragshare",
        description="Fragment labeled corpora into privacy-safer NP/VP training releases and audit them.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    help_lines = {
        "ingest": "parse or synthesize the corpus into canonical JSONL",
        "extract": "split train/test, extract NP/VP fragments, filter rare forms",
        "assemble": "synthesize the fragmented release",
        "audit": "identifier-reduction, k-anonymity, and exposure reports",
        "stats": "release statistics",
        "run_all": "run every stage in order",
    }
    for name in (*STAGE_ORDER, "run_all"):
        sub.add_parser(name, parents=[common], help=help_lines[name])
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else PipelineConfig()
        _apply_flags(cfg, args)
        cfg.validate()
    except ConfigError as exc:
        print(json.dumps({"error": "config", "message": str(exc)}), file=sys.stderr)
        return EXIT_CONFIG
    try:
        _COMMANDS[args.command](cfg)
    except (ParseError, ValidationError, PoolExhaustedError) as exc:
        print(json.dumps({"error": "data", "message": str(exc)}), file=sys.stderr)
        return EXIT_DATA
    except FragshareError as exc:
        print(json.dumps({"error": "data", "message": str(exc)}), file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(json.dumps({"error": "io", "message": str(exc)}), file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
