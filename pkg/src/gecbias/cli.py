"""Command-line entry point: augment, evaluate, gap, distribution, flag-bias, check."""

from __future__ import annotations

import argparse
import logging
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .annotate import HeuristicConfig, annotate_document, link_coreference
from .corpus import (
    AnnotatedSentence,
    InvariantError,
    M2Record,
    ParallelPair,
    ParseError,
    emit_m2,
    emit_parallel,
    parse_conllu,
    parse_m2,
    parse_parallel,
)
from .gec_eval import (
    EvalReport,
    ScoringError,
    apply_edits,
    category_distribution,
    edit_distribution,
    extract_edits,
    flag_explicit_bias,
    gap_report,
    hypothesis_edits_from_text,
    label_edits,
    score_against_gold,
    summarize_bias_flags,
)
from .lexicon import LEXICON_ENV, LexiconError, load_lexicon_dir
from .parallel import augment_pair
from .st_cda import COREF_META, AnnotationError

log = logging.getLogger("gecbias")

SUBCOMMANDS = ("augment", "evaluate", "gap", "distribution", "flag-bias", "check")
EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2


class InputError(Exception):
    """Bad user input: unreadable files, malformed data, inconsistent options."""


class InternalError(Exception):
    """An output failed a self-check."""


@dataclass
class RunConfig:
    subcommand: str
    inputs: list = field(default_factory=list)
    output: str | None = None
    mode: str | None = None
    lexicon_dir: str | None = None
    annotate: str = "required"
    seed: int = 0
    sample_n: int | None = None
    discard_log: str | None = None
    format: str = "conllu"
    lenient_segments: bool = False
    keep_unchanged: bool = False
    originals: str | None = None
    gold: list = field(default_factory=list)
    annotator: int | None = None

    def validate(self) -> None:
        if self.subcommand not in SUBCOMMANDS:
            raise InputError(f"unknown subcommand {self.subcommand!r}")
        if self.subcommand == "augment" and self.mode not in ("fm", "st"):
            raise InputError("augment requires --mode fm|st")
        if self.annotate not in ("required", "heuristic"):
            raise InputError("--annotate must be 'required' or 'heuristic'")
        if self.sample_n is not None and self.sample_n < 0:
            raise InputError("--sample-n must be non-negative")


# ------------------------------------------------------------------------ io


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror or exc}") from None


def _text_lines(text: str) -> list[list[str]]:
    return [line.split() for line in text.splitlines()]


def _lacks_annotations(sent: AnnotatedSentence) -> bool:
    return all(t.upos == "_" for t in sent.tokens)


def _reannotate(sentences: list[AnnotatedSentence], config: RunConfig, lexicon) -> list[AnnotatedSentence]:
    """Fill in missing tags or a missing coreference layer when --annotate heuristic."""
    if config.annotate != "heuristic":
        return sentences
    out = list(sentences)
    todo = [k for k, s in enumerate(sentences) if _lacks_annotations(s)]
    if todo:
        annotated = annotate_document(
            [sentences[k].forms for k in todo], HeuristicConfig(), [sentences[k].id for k in todo], lexicon
        )
        for k, sent in zip(todo, annotated):
            out[k] = AnnotatedSentence(sent.id, sent.tokens, {**sentences[k].meta, **sent.meta})
    no_coref = [k for k, s in enumerate(out) if k not in todo and not _has_coref_layer(s)]
    for k in no_coref:
        out[k] = link_coreference([out[k]], HeuristicConfig(), lexicon)[0]
    return out


def _has_coref_layer(sent: AnnotatedSentence) -> bool:
    return COREF_META in sent.meta or any(t.coref is not None for t in sent.tokens)


def _annotate_forms(rows: list[list[str]], ids: list[str], config: RunConfig, lexicon) -> list[AnnotatedSentence]:
    if config.annotate != "heuristic":
        raise InputError(f"--format {config.format} carries no annotations; pass --annotate heuristic")
    # Each sentence is annotated on its own so coreference never leaks across pairs.
    return [annotate_document([r], HeuristicConfig(), [i], lexicon)[0] for r, i in zip(rows, ids)]


def _load_pairs(config: RunConfig, lexicon) -> tuple[list[ParallelPair], list[M2Record] | None]:
    text = _read(config.inputs[0])
    if config.format == "conllu":
        pairs = parse_parallel(text)
        out = []
        for p in pairs:
            src, tgt = _reannotate([p.source, p.target], config, lexicon)
            out.append(ParallelPair(p.id, src, tgt))
        return out, None
    if config.format == "m2":
        records = parse_m2(text)
        pairs = []
        for k, r in enumerate(records, start=1):
            groups = r.by_annotator()
            edits = groups[min(groups)] if groups else []
            corrected = apply_edits(list(r.original_tokens), edits)
            if not r.original_tokens or not corrected:
                raise InputError(f"record {k}: empty sentence cannot be augmented")
            src, tgt = _annotate_forms([list(r.original_tokens), corrected], [f"{k}-source", f"{k}-target"], config, lexicon)
            pairs.append(ParallelPair(str(k), src, tgt))
        return pairs, records
    pairs = []
    for k, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        src_text, sep, tgt_text = line.partition("\t")
        if not sep or not src_text.split() or not tgt_text.split():
            raise InputError(f"line {k}: expected 'source<TAB>target'")
        src, tgt = _annotate_forms([src_text.split(), tgt_text.split()], [f"{k}-source", f"{k}-target"], config, lexicon)
        pairs.append(ParallelPair(str(k), src, tgt))
    return pairs, None


def _sample(items: list, config: RunConfig) -> list[int]:
    """Indices to process, in input order."""
    if config.sample_n is None:
        return list(range(len(items)))
    if config.sample_n > len(items):
        raise InputError(f"--sample-n {config.sample_n} exceeds corpus size {len(items)}")
    return sorted(random.Random(config.seed).sample(range(len(items)), config.sample_n))


def _emit_pairs(pairs: list[ParallelPair], fmt: str) -> str:
    if fmt == "conllu":
        return emit_parallel(pairs)
    if fmt == "m2":
        records = []
        for p in pairs:
            edits = label_edits(extract_edits(p.source.forms, p.target.forms), p.source, p.target)
            records.append(M2Record(p.source.forms, edits))
        return emit_m2(records)
    return "".join(f"{p.source.text}\t{p.target.text}\n" for p in pairs)


# --------------------------------------------------------------- subcommands


def _augment(config: RunConfig, lexicon) -> int:
    pairs, _ = _load_pairs(config, lexicon)
    chosen = _sample(pairs, config)
    kept, originals, discards = [], [], []
    # Targets sharing a doc_id are one coreference document.
    docs: dict[str, list[AnnotatedSentence]] = {}
    for p in pairs:
        if "doc_id" in p.target.meta:
            docs.setdefault(p.target.meta["doc_id"], []).append(p.target)
    for k in chosen:
        pair = pairs[k]
        context = docs.get(pair.target.meta.get("doc_id"))
        result = augment_pair(
            pair, config.mode, lexicon, strict_segments=not config.lenient_segments, target_context=context
        )
        if not result.accepted:
            discards.append(f"{pair.id}\t{result.discard.value}\n")
            continue
        if not result.changed and not config.keep_unchanged:
            continue
        new = result.pair
        for side in (new.source, new.target):
            try:
                side.validate()
            except InvariantError as exc:
                raise InternalError(f"pair {pair.id}: augmented sentence invalid: {exc}") from None
        kept.append(new)
        originals.append(pair)
    _write(config.output, _emit_pairs(kept, config.format))
    if config.originals:
        _write(config.originals, _emit_pairs(originals, config.format))
    discard_path = config.discard_log
    if discard_path is None and config.output not in (None, "-"):
        discard_path = config.output + ".discards.tsv"
    if discard_path is not None:
        _write(discard_path, "".join(discards))
    log.info("augment: %d selected, %d written, %d discarded", len(chosen), len(kept), len(discards))
    return EXIT_OK


def _hyp_edits(config: RunConfig, hyp_path: str, gold: list[M2Record]):
    text = _read(hyp_path)
    if config.format == "m2":
        hyp = parse_m2(text)
        if len(hyp) != len(gold):
            raise ScoringError(
                f"sentence count mismatch: {len(hyp)} hypothesis sentences vs {len(gold)} gold sentences"
            )
        out = []
        for r in hyp:
            groups = r.by_annotator()
            out.append(groups[min(groups)] if groups else [])
        return out
    return hypothesis_edits_from_text(gold, _text_lines(text))


def _score(config: RunConfig, hyp_path: str, gold_path: str) -> EvalReport:
    gold = parse_m2(_read(gold_path))
    return score_against_gold(_hyp_edits(config, hyp_path, gold), gold)


def _evaluate(config: RunConfig, lexicon) -> int:
    if len(config.inputs) != 1 or len(config.gold) != 1:
        raise InputError("evaluate takes one hypothesis file and one --gold M2 file")
    report = _score(config, config.inputs[0], config.gold[0])
    _write(config.output, report.to_tsv())
    return EXIT_OK


def _gap(config: RunConfig, lexicon) -> int:
    if len(config.gold) == 2 and len(config.inputs) == 2:
        orig = _score(config, config.inputs[0], config.gold[0])
        aug = _score(config, config.inputs[1], config.gold[1])
    elif not config.gold and len(config.inputs) == 2:
        try:
            orig, aug = (EvalReport.from_tsv(_read(p)) for p in config.inputs)
        except ScoringError as exc:
            raise InputError(str(exc)) from None
    else:
        raise InputError("gap takes two report files, or two hypotheses with two --gold files")
    gap = gap_report(orig, aug)
    _write(config.output, "f05_orig\tf05_aug\tdelta\n" + gap.format_pp() + "\n")
    return EXIT_OK


def _distribution(config: RunConfig, lexicon) -> int:
    chunks = []
    for path in config.inputs:
        records = parse_m2(_read(path))
        chunks.append(f"# {path}\n")
        chunks.append(edit_distribution(records, config.annotator).to_tsv("type"))
        chunks.append(category_distribution(records, config.annotator).to_tsv("category"))
    _write(config.output, "".join(chunks))
    return EXIT_OK


def _flag_bias(config: RunConfig, lexicon) -> int:
    if len(config.inputs) != 2:
        raise InputError("flag-bias takes an annotated source CoNLL-U file and a hypothesis text file")
    sources = _reannotate(parse_conllu(_read(config.inputs[0])), config, lexicon)
    hyps = _text_lines(_read(config.inputs[1]))
    if len(hyps) != len(sources):
        raise InputError(f"sentence count mismatch: {len(hyps)} hypothesis sentences vs {len(sources)} source sentences")
    docs: dict[str, list[AnnotatedSentence]] = {}
    for sent in sources:
        docs.setdefault(sent.meta.get("doc_id") or sent.id, []).append(sent)
    lines, per_sentence = [], []
    for sent, hyp in zip(sources, hyps):
        flags = flag_explicit_bias(sent, hyp, lexicon, context=docs[sent.meta.get("doc_id") or sent.id])
        per_sentence.append(flags)
        lines.append(f"{sent.id}\t{','.join(f.value for f in flags) or '-'}\n")
    total, without_refl = summarize_bias_flags(per_sentence)
    lines.append(f"# total\t{total}\n# without_themself\t{without_refl}\n")
    _write(config.output, "".join(lines))
    return EXIT_OK


def _check(config: RunConfig, lexicon) -> int:
    for path in config.inputs:
        text = _read(path)
        if config.format == "m2":
            records = parse_m2(text)
            for r in records:
                r.validate()
            summary = f"{len(records)} M2 records"
        elif config.format == "conllu":
            sentences = parse_conllu(text)
            for s in sentences:
                s.validate()
            summary = f"{len(sentences)} sentences"
            if any("pair_id" in s.meta for s in sentences):
                summary += f", {len(parse_parallel(text))} pairs"
        else:
            summary = f"{sum(1 for line in text.splitlines() if line.strip())} lines"
        _write(config.output, f"{path}\tok\t{summary}\n")
    return EXIT_OK


HANDLERS = {
    "augment": _augment,
    "evaluate": _evaluate,
    "gap": _gap,
    "distribution": _distribution,
    "flag-bias": _flag_bias,
    "check": _check,
}


def run(config: RunConfig) -> int:
    """Execute one subcommand; returns the process exit code."""
    try:
        config.validate()
        lexicon = load_lexicon_dir(config.lexicon_dir)
        return HANDLERS[config.subcommand](config, lexicon)
    except (InputError, ParseError, InvariantError, LexiconError, AnnotationError, ScoringError) as exc:
        print(f"gecbias {config.subcommand}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InternalError as exc:
        print(f"gecbias {config.subcommand}: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        log.debug("unexpected failure", exc_info=True)
        print(f"gecbias {config.subcommand}: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


# ------------------------------------------------------------------- parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gecbias", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def common(p, fmt_default="conllu"):
        p.add_argument("-o", "--output", help="output path (default stdout)")
        p.add_argument("--lexicon-dir", help=f"directory with pronouns/nouns/names TSVs (default ${LEXICON_ENV} or bundled)")
        p.add_argument("--format", choices=("conllu", "m2", "text"), default=fmt_default)

    p = sub.add_parser("augment", help="gender-swap a parallel corpus")
    p.add_argument("input")
    p.add_argument("--mode", choices=("fm", "st"), required=True)
    p.add_argument("--annotate", choices=("required", "heuristic"), default="required")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sample-n", type=int)
    p.add_argument("--discard-log")
    p.add_argument("--lenient-segments", action="store_true", help="tolerate unequal segments with nothing to swap")
    p.add_argument("--keep-unchanged", action="store_true", help="also write pairs that had nothing to swap")
    p.add_argument("--originals", help="write the untouched versions of the written pairs here")
    common(p)

    p = sub.add_parser("evaluate", help="score hypotheses against a gold M2 file")
    p.add_argument("hypothesis")
    p.add_argument("--gold", required=True)
    common(p, "text")

    p = sub.add_parser("gap", help="F0.5 gap between original and augmented subsets")
    p.add_argument("inputs", nargs=2, metavar=("ORIG", "AUG"), help="two report TSVs, or two hypotheses with --gold twice")
    p.add_argument("--gold", action="append", default=[])
    common(p, "text")

    p = sub.add_parser("distribution", help="edit type and category tables")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--annotator", type=int)
    common(p, "m2")

    p = sub.add_parser("flag-bias", help="explicit-bias flags for corrected sentences")
    p.add_argument("source")
    p.add_argument("hypothesis")
    p.add_argument("--annotate", choices=("required", "heuristic"), default="required")
    common(p)

    p = sub.add_parser("check", help="validate file formats")
    p.add_argument("inputs", nargs="+")
    common(p)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    inputs = {
        "augment": lambda: [args.input],
        "evaluate": lambda: [args.hypothesis],
        "flag-bias": lambda: [args.source, args.hypothesis],
    }.get(args.subcommand, lambda: list(args.inputs))()
    gold = getattr(args, "gold", [])
    return RunConfig(
        subcommand=args.subcommand,
        inputs=inputs,
        output=args.output,
        mode=getattr(args, "mode", None),
        lexicon_dir=args.lexicon_dir,
        annotate=getattr(args, "annotate", "required"),
        seed=getattr(args, "seed", 0),
        sample_n=getattr(args, "sample_n", None),
        discard_log=getattr(args, "discard_log", None),
        format=args.format,
        lenient_segments=getattr(args, "lenient_segments", False),
        keep_unchanged=getattr(args, "keep_unchanged", False),
        originals=getattr(args, "originals", None),
        gold=[gold] if isinstance(gold, str) else list(gold),
        annotator=getattr(args, "annotator", None),
    )


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
