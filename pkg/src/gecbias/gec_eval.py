"""Edit extraction, M2 scoring, bias gaps, edit distributions, explicit-bias flags."""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, replace
from typing import Sequence

from .corpus import AnnotatedSentence, Edit, M2Record, make_noop
from .inflect import IRREGULAR_AGREEMENT, match_number, plural_agreement_form
from .lexicon import Gender, Lexicon, default_lexicon
from .parallel import OpKind, align_tokens
from .st_cda import find_singular_clusters

EDIT_TYPES = ("R", "M", "U")


class ScoringError(ValueError):
    pass


# ----------------------------------------------------------------- extraction


def edit_spans(alignment) -> list[tuple[int, int, tuple]]:
    """(start, end, target positions) for each run of non-MATCH ops."""
    spans = []
    consumed = 0
    run_start = None
    targets: list[int] = []
    for op in list(alignment.ops) + [None]:
        if op is None or op.kind is OpKind.MATCH:
            if run_start is not None:
                spans.append((run_start, consumed, tuple(targets)))
                run_start, targets = None, []
        elif run_start is None:
            run_start = consumed
        if op is not None:
            if op.kind is not OpKind.MATCH and op.j is not None:
                targets.append(op.j)
            if op.i is not None:
                consumed += 1
    return spans


def extract_edits(original: Sequence[str], corrected: Sequence[str], annotator: int = 0) -> list[Edit]:
    """Edits turning ``original`` into ``corrected``, one per differing segment.

    Spans are 0-based token offsets into ``original``; identical inputs yield a
    single noop edit.
    """
    original, corrected = list(original), list(corrected)
    edits = []
    for start, end, targets in edit_spans(align_tokens(original, corrected)):
        correction = " ".join(corrected[j] for j in targets)
        op = "M" if start == end else ("U" if not correction else "R")
        edits.append(Edit(start, end, correction, f"{op}:OTHER", annotator=annotator))
    if not edits:
        return [make_noop(annotator)]
    return edits


def apply_edits(original: Sequence[str], edits: Sequence[Edit]) -> list[str]:
    """Apply non-overlapping edits to ``original``."""
    out: list[str] = []
    pos = 0
    for e in sorted((e for e in edits if e.op != "NOOP"), key=lambda e: (e.start, e.end)):
        if e.start < pos:
            raise ValueError(f"overlapping edit at [{e.start},{e.end})")
        out.extend(original[pos : e.start])
        if e.correction:
            out.extend(e.correction.split(" "))
        pos = e.end
    out.extend(original[pos:])
    return out


# ------------------------------------------------------------- classification


def _corrected_span(edit: Edit, original: AnnotatedSentence, corrected: AnnotatedSentence) -> list:
    """Tokens of ``corrected`` produced by ``edit``, located by realignment."""
    for start, end, targets in edit_spans(align_tokens(original, corrected)):
        if (start, end) == (edit.start, edit.end):
            return [corrected.tokens[j] for j in targets]
    # Edit from another source (e.g. gold M2): look the correction up verbatim.
    words = edit.correction.split(" ") if edit.correction else []
    for k in range(len(corrected) - len(words) + 1) if words else ():
        if [t.form for t in corrected.tokens[k : k + len(words)]] == words:
            return list(corrected.tokens[k : k + len(words)])
    return []


def classify_error_category(edit: Edit, original: AnnotatedSentence | None, corrected: AnnotatedSentence | None) -> str:
    """Coarse error category for an edit; OTHER when annotations are missing.

    Cascade: PUNCT, ORTH, PRON, DET, PREP, NOUN:NUM, VERB:SVA, else OTHER.
    """
    if edit.op == "NOOP":
        return "noop"
    if original is None or corrected is None:
        return "OTHER"
    src = list(original.tokens[edit.start : edit.end])
    tgt = _corrected_span(edit, original, corrected)
    both = src + tgt
    if not both:
        return "OTHER"
    if all(t.upos == "PUNCT" for t in both):
        return "PUNCT"
    if src and tgt and "".join(t.form for t in src).lower() == "".join(t.form for t in tgt).lower():
        return "ORTH"
    if all(t.upos == "PRON" for t in both):
        return "PRON"
    if all(t.upos == "DET" for t in both):
        return "DET"
    if all(t.upos == "ADP" for t in both):
        return "PREP"
    if len(src) == 1 and len(tgt) == 1:
        s, t = src[0], tgt[0]
        if (
            s.upos in ("NOUN", "PROPN")
            and t.upos in ("NOUN", "PROPN")
            and s.lemma.lower() == t.lemma.lower()
            and t.feat("Number")
            and (
                (s.feat("Number") and s.feat("Number") != t.feat("Number"))
                # malformed inflection such as "childs" for "children"
                or (
                    t.form.lower() == match_number(t.lemma.lower(), t.feat("Number"))
                    and s.form.lower() != match_number(s.lemma.lower(), s.feat("Number") or t.feat("Number"))
                )
            )
        ):
            return "NOUN:NUM"
        if s.upos in ("VERB", "AUX") and t.upos in ("VERB", "AUX") and s.lemma.lower() == t.lemma.lower():
            s_low, t_low = s.form.lower(), t.form.lower()
            agree_pairs = set(IRREGULAR_AGREEMENT.items())
            if (
                (s_low, t_low) in agree_pairs
                or (t_low, s_low) in agree_pairs
                or plural_agreement_form(s.form, s.lemma, s.feats).lower() == t_low
                or plural_agreement_form(t.form, t.lemma, t.feats).lower() == s_low
            ):
                return "VERB:SVA"
    return "OTHER"


def label_edits(edits: list[Edit], original: AnnotatedSentence | None, corrected: AnnotatedSentence | None) -> list[Edit]:
    """Copies of ``edits`` whose labels carry the classified category."""
    out = []
    for e in edits:
        if e.op == "NOOP":
            out.append(e)
            continue
        out.append(replace(e, label=f"{e.op}:{classify_error_category(e, original, corrected)}"))
    return out


# -------------------------------------------------------------------- scoring


def f_beta(precision: float, recall: float, beta: float = 0.5) -> float:
    if beta <= 0:
        raise ValueError("beta must be positive")
    b2 = beta * beta
    denom = b2 * precision + recall
    if denom == 0:
        return 0.0
    return (1 + b2) * precision * recall / denom


@dataclass(frozen=True)
class EvalReport:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f05: float

    @classmethod
    def from_counts(cls, tp: int, fp: int, fn: int) -> "EvalReport":
        p = tp / (tp + fp) if tp + fp else 0.0
        r = tp / (tp + fn) if tp + fn else 0.0
        return cls(tp, fp, fn, p, r, f_beta(p, r, 0.5))

    @classmethod
    def from_scores(cls, precision: float, recall: float) -> "EvalReport":
        """Report rebuilt from reported P/R ratios (counts unknown, left at 0)."""
        return cls(0, 0, 0, precision, recall, f_beta(precision, recall, 0.5))

    def to_tsv(self) -> str:
        header = "tp\tfp\tfn\tprecision\trecall\tf05"
        row = f"{self.tp}\t{self.fp}\t{self.fn}\t{self.precision:.4f}\t{self.recall:.4f}\t{self.f05:.4f}"
        return header + "\n" + row + "\n"

    @classmethod
    def from_tsv(cls, text: str) -> "EvalReport":
        lines = [l for l in text.splitlines() if l.strip()]
        if len(lines) < 2:
            raise ScoringError("report needs a header and one row")
        header = lines[0].split("\t")
        values = dict(zip(header, lines[1].split("\t")))
        try:
            tp, fp, fn = (int(values.get(k, 0)) for k in ("tp", "fp", "fn"))
            p, r = float(values["precision"]), float(values["recall"])
            f = float(values["f05"]) if "f05" in values else f_beta(p, r, 0.5)
        except (KeyError, ValueError) as exc:
            raise ScoringError(f"malformed report: {exc}") from None
        return cls(tp, fp, fn, p, r, f)


def _sentence_counts(hyp: list[Edit], gold: list[Edit]) -> tuple[int, int, int]:
    h = Counter(e.key for e in hyp if e.op != "NOOP")
    g = Counter(e.key for e in gold if e.op != "NOOP")
    tp = sum((h & g).values())
    return tp, sum(h.values()) - tp, sum(g.values()) - tp


def score_against_gold(hypothesis_edits: Sequence[Sequence[Edit]], gold: Sequence[M2Record]) -> EvalReport:
    """Corpus-level exact-match scoring, picking per sentence the annotator with most TPs."""
    if len(hypothesis_edits) != len(gold):
        raise ScoringError(
            f"sentence count mismatch: {len(hypothesis_edits)} hypothesis sentences vs {len(gold)} gold sentences"
        )
    tp = fp = fn = 0
    for hyp, record in zip(hypothesis_edits, gold):
        groups = record.by_annotator() or {0: []}
        best = None
        for annotator in sorted(groups):
            counts = _sentence_counts(list(hyp), groups[annotator])
            if best is None or counts[0] > best[0]:
                best = counts
        tp += best[0]
        fp += best[1]
        fn += best[2]
    return EvalReport.from_counts(tp, fp, fn)


def hypothesis_edits_from_text(gold: Sequence[M2Record], hypotheses: Sequence[Sequence[str]]) -> list[list[Edit]]:
    if len(hypotheses) != len(gold):
        raise ScoringError(
            f"sentence count mismatch: {len(hypotheses)} hypothesis sentences vs {len(gold)} gold sentences"
        )
    return [extract_edits(r.original_tokens, h) for r, h in zip(gold, hypotheses)]


@dataclass(frozen=True)
class GapReport:
    f05_orig: float
    f05_aug: float
    delta: float

    def format_pp(self) -> str:
        """Scores and delta in percentage points, two decimals."""
        return f"{pp(self.f05_orig)}\t{pp(self.f05_aug)}\t{pp(self.delta, signed=True)}"


def pp(ratio: float, signed: bool = False) -> str:
    value = round(ratio * 100 + 0.0, 2)
    if value == 0:
        value = 0.0
    return f"{value:+.2f}" if signed else f"{value:.2f}"


def gap_report(report_orig: EvalReport, report_aug: EvalReport) -> GapReport:
    return GapReport(report_orig.f05, report_aug.f05, report_aug.f05 - report_orig.f05)


# -------------------------------------------------------------- distributions


@dataclass(frozen=True)
class DistributionTable:
    counts: dict
    total: int

    @property
    def shares(self) -> dict:
        if not self.total:
            return {k: 0.0 for k in self.counts}
        return {k: 100.0 * v / self.total for k, v in self.counts.items()}

    def to_tsv(self, label: str = "type") -> str:
        lines = [f"{label}\tcount\tshare"]
        shares = self.shares
        for key, count in self.counts.items():
            lines.append(f"{key}\t{count}\t{shares[key]:.1f}%")
        lines.append(f"Total\t{self.total}\t{100.0 if self.total else 0.0:.1f}%")
        return "\n".join(lines) + "\n"


def _edits_of(records: Sequence[M2Record], annotator: int | None):
    for r in records:
        for e in r.edits:
            if e.op == "NOOP":
                continue
            if annotator is not None and e.annotator != annotator:
                continue
            yield e


def edit_distribution(records: Sequence[M2Record], annotator: int | None = None) -> DistributionTable:
    counts = {t: 0 for t in EDIT_TYPES}
    for e in _edits_of(records, annotator):
        counts[e.op] += 1
    return DistributionTable(counts, sum(counts.values()))


def category_distribution(records: Sequence[M2Record], annotator: int | None = None) -> DistributionTable:
    counts = Counter(e.category for e in _edits_of(records, annotator))
    ordered = dict(sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])))
    return DistributionTable(ordered, sum(counts.values()))


# --------------------------------------------------------------- explicit bias


class BiasFlag(str, enum.Enum):
    MISGENDER = "MISGENDER"
    PLURALIZE_COREFERENT = "PLURALIZE_COREFERENT"
    THEMSELF_REWRITE = "THEMSELF_REWRITE"


def flag_explicit_bias(source: AnnotatedSentence, hypothesis: Sequence[str], lexicon: Lexicon | None = None, context=None) -> list[BiasFlag]:
    """Explicit-bias judgments for one corrected sentence.

    ``source`` carries coreference; a they-cluster counts as singular when it
    has singular evidence. ``context`` optionally supplies the document.
    """
    lexicon = lexicon or default_lexicon()
    doc = list(context) if context is not None else [source]
    if not any(s is source for s in doc):
        doc.append(source)
    singular = {ev.cluster_id for ev in find_singular_clusters(doc, lexicon, genders=(Gender.THEY,))}
    hypothesis = list(hypothesis)
    flags: set[BiasFlag] = set()
    for seg in align_tokens(source, hypothesis).segments():
        src_toks = [source.tokens[i] for i in seg.source]
        hyp_forms = [hypothesis[j].lower() for j in seg.target]
        they_in_cluster = [
            t for t in src_toks
            if t.coref in singular and lexicon.pronoun_gender(t.form) is Gender.THEY
        ]
        if they_in_cluster and any(lexicon.is_gendered_pronoun(f) for f in hyp_forms):
            flags.add(BiasFlag.MISGENDER)
        for t in src_toks:
            if (
                t.coref in singular
                and t.upos in ("NOUN", "PROPN")
                and t.feat("Number") == "Sing"
                and match_number(t.lemma.lower(), "Plur") in hyp_forms
                and match_number(t.lemma.lower(), "Plur") != t.lemma.lower()
            ):
                flags.add(BiasFlag.PLURALIZE_COREFERENT)
        if any(t.form.lower() == "themself" for t in src_toks) and "themselves" in hyp_forms:
            flags.add(BiasFlag.THEMSELF_REWRITE)
    return sorted(flags, key=lambda f: list(BiasFlag).index(f))


def summarize_bias_flags(per_sentence: Sequence[Sequence[BiasFlag]]) -> tuple[int, int]:
    """(sentences with any flag, sentences with a flag other than THEMSELF_REWRITE)."""
    total = sum(1 for flags in per_sentence if flags)
    without_refl = sum(1 for flags in per_sentence if any(f is not BiasFlag.THEMSELF_REWRITE for f in flags))
    return total, without_refl
