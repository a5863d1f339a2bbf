"""Consistent augmentation of (source, target) pairs through token alignment.

The target (grammatical) side is planned first. Source tokens aligned as
matches inherit the target's replacement; inside each differing segment the
two sides are compared position by position, and the pair is discarded when
a consistent swap is impossible.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import NamedTuple, Sequence

from .corpus import AnnotatedSentence, ParallelPair
from .fm_cda import Replacement, SwapKind, SwapPlan, apply_plan, fm_token_replacement, plan_fm_swap, pronoun_replacement
from .inflect import plural_agreement_form
from .lexicon import Gender, Lexicon
from .st_cda import plan_st_swap


class OpKind(str, enum.Enum):
    MATCH = "MATCH"
    SUB = "SUB"
    DEL = "DEL"
    INS = "INS"


class AlignOp(NamedTuple):
    kind: OpKind
    i: int | None  # 0-based source position
    j: int | None  # 0-based target position


class Segment(NamedTuple):
    source: tuple  # source positions, in order
    target: tuple  # target positions, in order
    ops: tuple


@dataclass(frozen=True)
class Alignment:
    ops: tuple

    @property
    def cost(self) -> int:
        return sum(op.kind is not OpKind.MATCH for op in self.ops)

    @property
    def kinds(self) -> tuple:
        return tuple(op.kind for op in self.ops)

    def segments(self) -> list[Segment]:
        """Maximal runs of non-MATCH ops."""
        out = []
        run: list[AlignOp] = []
        for op in list(self.ops) + [None]:
            if op is None or op.kind is OpKind.MATCH:
                if run:
                    out.append(
                        Segment(
                            tuple(o.i for o in run if o.i is not None),
                            tuple(o.j for o in run if o.j is not None),
                            tuple(run),
                        )
                    )
                    run = []
            else:
                run.append(op)
        return out


def _forms(seq) -> list[str]:
    if isinstance(seq, AnnotatedSentence):
        return seq.forms
    return list(seq)


def align_tokens(source, target) -> Alignment:
    """Minimum-cost Levenshtein alignment over exact token forms.

    Ties are broken during the backtrace from the end: MATCH, then SUB, then
    DEL, then INS.
    """
    a, b = _forms(source), _forms(target)
    n, m = len(a), len(b)
    dist = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        dist[i][0] = i
    for j in range(1, m + 1):
        dist[0][j] = j
    for i in range(1, n + 1):
        row, prev = dist[i], dist[i - 1]
        ai = a[i - 1]
        for j in range(1, m + 1):
            diag = prev[j - 1] + (0 if ai == b[j - 1] else 1)
            row[j] = min(diag, prev[j] + 1, row[j - 1] + 1)

    ops: list[AlignOp] = []
    i, j = n, m
    while i > 0 or j > 0:
        here = dist[i][j]
        if i > 0 and j > 0 and a[i - 1] == b[j - 1] and dist[i - 1][j - 1] == here:
            ops.append(AlignOp(OpKind.MATCH, i - 1, j - 1))
            i, j = i - 1, j - 1
        elif i > 0 and j > 0 and a[i - 1] != b[j - 1] and dist[i - 1][j - 1] + 1 == here:
            ops.append(AlignOp(OpKind.SUB, i - 1, j - 1))
            i, j = i - 1, j - 1
        elif i > 0 and dist[i - 1][j] + 1 == here:
            ops.append(AlignOp(OpKind.DEL, i - 1, None))
            i -= 1
        else:
            ops.append(AlignOp(OpKind.INS, None, j - 1))
            j -= 1
    ops.reverse()
    return Alignment(tuple(ops))


# ---------------------------------------------------------------- augmentation


class DiscardReason(str, enum.Enum):
    SEGMENT_LENGTH_MISMATCH = "SEGMENT_LENGTH_MISMATCH"
    SWAP_MISMATCH = "SWAP_MISMATCH"
    VERB_AGREEMENT_MISMATCH = "VERB_AGREEMENT_MISMATCH"


class Mode(str, enum.Enum):
    FM = "fm"
    ST = "st"


@dataclass(frozen=True)
class AugmentResult:
    pair: ParallelPair | None = None
    discard: DiscardReason | None = None
    changed: bool = False

    @property
    def accepted(self) -> bool:
        return self.discard is None


def _source_nominal_swap(mode: Mode, source: AnnotatedSentence, pos: int, target_repl, lexicon, diagnostics) -> Replacement | None:
    """What the source token at ``pos`` would be swapped to, if anything."""
    tok = source.tokens[pos]
    if mode is Mode.FM:
        return fm_token_replacement(source, tok, lexicon, diagnostics)
    # Singular evidence lives on the target side; a source pronoun is swapped
    # only where its aligned target pronoun was.
    if target_repl is None or target_repl.kind is not SwapKind.PRONOUN:
        return None
    if not lexicon.is_gendered_pronoun(tok.form):
        return None
    return pronoun_replacement(source, tok, lexicon, Gender.THEY, diagnostics)


def _same_swap(src_form: str, src_repl, tgt_form: str, tgt_repl) -> bool:
    return (
        src_repl.kind is tgt_repl.kind
        and src_form.lower() == tgt_form.lower()
        and src_repl.new_form.lower() == tgt_repl.new_form.lower()
    )


def _copy_replacement(repl: Replacement, src_tok, tgt_tok) -> Replacement:
    if repl.new_lemma is not None and src_tok.lemma != tgt_tok.lemma:
        return replace(repl, new_lemma=None)
    return repl


def plan_target(target: AnnotatedSentence, mode, lexicon: Lexicon, target_context=None) -> SwapPlan:
    if Mode(mode) is Mode.FM:
        return plan_fm_swap(target, lexicon)
    return plan_st_swap(target, lexicon, context=target_context)


def augment_pair(pair: ParallelPair, mode, lexicon: Lexicon, strict_segments: bool = True, target_context=None) -> AugmentResult:
    """Swap a pair consistently, or report why it had to be discarded.

    With ``strict_segments`` (the default) any differing segment whose sides
    have unequal token counts discards the pair. Otherwise such a segment is
    tolerated when neither side holds a swap candidate.
    A pair whose target has nothing to swap comes back unchanged.
    """
    mode = Mode(mode)
    source, target = pair.source, pair.target
    target_plan = plan_target(target, mode, lexicon, target_context)
    if not target_plan.replacements:
        return AugmentResult(pair, None, False)

    alignment = align_tokens(source, target)
    tgt_repl = {j - 1: r for j, r in target_plan.replacements.items()}  # 0-based
    source_plan = SwapPlan()
    diagnostics: list[str] = []

    for op in alignment.ops:
        if op.kind is OpKind.MATCH and op.j in tgt_repl:
            repl = _copy_replacement(tgt_repl[op.j], source.tokens[op.i], target.tokens[op.j])
            source_plan.add(op.i + 1, repl)

    verb_checks: list[tuple[int, int]] = []
    for seg in alignment.segments():
        if len(seg.source) != len(seg.target):
            if strict_segments or any(j in tgt_repl for j in seg.target):
                return AugmentResult(None, DiscardReason.SEGMENT_LENGTH_MISMATCH)
            if mode is Mode.FM:
                has_source_swap = any(
                    fm_token_replacement(source, source.tokens[i], lexicon, diagnostics) for i in seg.source
                )
            else:
                has_source_swap = any(lexicon.is_gendered_pronoun(source.tokens[i].form) for i in seg.source)
            if has_source_swap:
                return AugmentResult(None, DiscardReason.SEGMENT_LENGTH_MISMATCH)
            continue
        for i, j in zip(seg.source, seg.target):
            t_repl = tgt_repl.get(j)
            if t_repl is not None and t_repl.kind is SwapKind.VERB_AGREEMENT:
                verb_checks.append((i, j))
                t_repl = None
            s_repl = _source_nominal_swap(mode, source, i, t_repl, lexicon, diagnostics)
            if s_repl is None and t_repl is None:
                continue
            if s_repl is None or t_repl is None or not _same_swap(source.tokens[i].form, s_repl, target.tokens[j].form, t_repl):
                return AugmentResult(None, DiscardReason.SWAP_MISMATCH)
            source_plan.add(i + 1, s_repl)

    for i, j in verb_checks:
        src_tok, tgt_tok = source.tokens[i], target.tokens[j]
        if src_tok.form == tgt_tok.form:
            source_plan.add(i + 1, _copy_replacement(tgt_repl[j], src_tok, tgt_tok))
            continue
        new = plural_agreement_form(src_tok.form, src_tok.lemma, src_tok.feats)
        if new == src_tok.form:
            return AugmentResult(None, DiscardReason.VERB_AGREEMENT_MISMATCH)
        source_plan.add(i + 1, Replacement(new, SwapKind.VERB_AGREEMENT))

    new_source = apply_plan(source, source_plan)
    new_target = apply_plan(target, target_plan)
    if align_tokens(new_source, new_target).kinds != alignment.kinds:
        # A swap that reshapes the alignment would add or remove edits.
        return AugmentResult(None, DiscardReason.SWAP_MISMATCH)
    return AugmentResult(ParallelPair(pair.id, new_source, new_target), None, True)


def augment_corpus(pairs: Sequence[ParallelPair], mode, lexicon: Lexicon, strict_segments: bool = True):
    """Augment pairs in order; yields (pair, AugmentResult)."""
    for pair in pairs:
        yield pair, augment_pair(pair, mode, lexicon, strict_segments)
