"""Singular-they swaps driven by coreference clusters with singular antecedents.

A cluster qualifies when one of its coreferring expressions is a singular
common/proper noun, or a singular possessum of one of its possessive pronouns.
Masculine and feminine pronouns of a qualifying cluster are rewritten into the
they paradigm (reflexives become *themself*), and the verbs agreeing with
rewritten subjects are re-inflected.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

from .corpus import AnnotatedSentence, Token
from .fm_cda import Replacement, SwapKind, SwapPlan, pronoun_replacement, resolve_slot
from .inflect import plural_agreement_form
from .lexicon import CaseSlot, Gender, Lexicon

log = logging.getLogger(__name__)

SUBJECT_DEPRELS = {"nsubj", "nsubj:pass", "nsubjpass"}
AUX_DEPRELS = {"aux", "aux:pass", "auxpass", "cop"}
VERBAL_UPOS = {"VERB", "AUX"}
# Sentence comment (``# coref = ...``) declaring a coreference layer with no clusters.
COREF_META = "coref"


class AnnotationError(ValueError):
    pass


class EvidenceKind(str, enum.Enum):
    SINGULAR_NOUN = "SINGULAR_NOUN"
    SINGULAR_POSSESSUM = "SINGULAR_POSSESSUM"


@dataclass(frozen=True)
class SingularityEvidence:
    cluster_id: int
    evidence_token: int
    kind: EvidenceKind
    # position of the sentence holding the evidence within the document
    sentence: int = 0


def _as_document(sentences) -> list[AnnotatedSentence]:
    if isinstance(sentences, AnnotatedSentence):
        return [sentences]
    return list(sentences)


def _is_singular_nominal(tok: Token) -> bool:
    return tok.upos in ("NOUN", "PROPN") and tok.feat("Number") == "Sing"


def find_singular_clusters(sentences, lexicon: Lexicon, genders=(Gender.MASC, Gender.FEM)) -> list[SingularityEvidence]:
    """First singularity evidence for every cluster holding a pronoun of ``genders``.

    ``sentences`` is one sentence or a document (coref ids shared across it).
    """
    doc = _as_document(sentences)
    wanted = set(genders)
    target_clusters: list[int] = []
    for sent in doc:
        for tok in sent.tokens:
            if tok.coref is None or tok.coref in target_clusters:
                continue
            if tok.upos in ("PRON", "DET", "_") and set(lexicon.pronoun_slots(tok.form).values()) & wanted:
                target_clusters.append(tok.coref)

    evidence: dict[int, SingularityEvidence] = {}
    for s_pos, sent in enumerate(doc):
        for tok in sent.tokens:
            cid = tok.coref
            if cid in target_clusters and cid not in evidence and _is_singular_nominal(tok):
                evidence[cid] = SingularityEvidence(cid, tok.index, EvidenceKind.SINGULAR_NOUN, s_pos)
    for s_pos, sent in enumerate(doc):
        for tok in sent.tokens:
            cid = tok.coref
            if cid not in target_clusters or cid in evidence:
                continue
            if resolve_slot(sent, tok, lexicon) is not CaseSlot.POSS_DET:
                continue
            if 1 <= tok.head <= len(sent) and _is_singular_nominal(sent[tok.head]):
                evidence[cid] = SingularityEvidence(cid, tok.head, EvidenceKind.SINGULAR_POSSESSUM, s_pos)
    return [evidence[c] for c in target_clusters if c in evidence]


def _require_annotations(doc: list[AnnotatedSentence], lexicon: Lexicon) -> None:
    has_coref = any(COREF_META in s.meta for s in doc) or any(t.coref is not None for s in doc for t in s.tokens)
    for sent in doc:
        for tok in sent.tokens:
            if lexicon.is_gendered_pronoun(tok.form):
                if not has_coref:
                    raise AnnotationError(f"annotations required: sentence {sent.id!r} has no coreference layer")
                if tok.upos == "_":
                    raise AnnotationError(f"annotations required: token {tok.index} of {sent.id!r} lacks POS")


def agreeing_verbs(sentence: AnnotatedSentence, subject: Token) -> list[Token]:
    """Finite verbs/auxiliaries whose agreement follows ``subject``.

    Covers the governing predicate, its aux/cop dependents, and conjoined
    predicates that share the subject (no subject of their own).
    """
    if subject.deprel not in SUBJECT_DEPRELS or not 1 <= subject.head <= len(sentence):
        return []
    out: list[Token] = []
    seen: set[int] = set()

    def collect(pred: Token) -> None:
        if pred.index in seen:
            return
        seen.add(pred.index)
        if pred.upos in VERBAL_UPOS:
            out.append(pred)
        for child in sentence.children(pred.index):
            if child.deprel in AUX_DEPRELS and child.upos in VERBAL_UPOS and child.index not in seen:
                seen.add(child.index)
                out.append(child)
        for child in sentence.children(pred.index):
            if child.deprel == "conj" and not any(c.deprel in SUBJECT_DEPRELS for c in sentence.children(child.index)):
                collect(child)

    collect(sentence[subject.head])
    return sorted(out, key=lambda t: t.index)


def plan_st_document(sentences, lexicon: Lexicon, agreement_table: dict | None = None) -> list[SwapPlan]:
    """Plans for every sentence of a document, with evidence gathered document-wide."""
    doc = _as_document(sentences)
    _require_annotations(doc, lexicon)
    evidenced = {ev.cluster_id for ev in find_singular_clusters(doc, lexicon)}
    plans = []
    for sent in doc:
        plan = SwapPlan()
        swapped_subjects: list[Token] = []
        for tok in sent.tokens:
            if tok.coref not in evidenced or not lexicon.is_gendered_pronoun(tok.form):
                continue
            if tok.upos not in ("PRON", "DET"):
                continue
            repl = pronoun_replacement(sent, tok, lexicon, Gender.THEY, plan.diagnostics)
            if repl is None:
                continue
            plan.add(tok.index, repl)
            if repl.slot is CaseSlot.NOM:
                swapped_subjects.append(tok)
        for subj in swapped_subjects:
            for verb in agreeing_verbs(sent, subj):
                if verb.index in plan.replacements:
                    continue
                new = plural_agreement_form(verb.form, verb.lemma, verb.feats, agreement_table)
                if new != verb.form:
                    plan.add(verb.index, Replacement(new, SwapKind.VERB_AGREEMENT))
        for msg in plan.diagnostics:
            log.debug("%s: %s", sent.id, msg)
        plans.append(plan)
    return plans


def plan_st_swap(sentence: AnnotatedSentence, lexicon: Lexicon, context=None, agreement_table: dict | None = None) -> SwapPlan:
    """Plan for one sentence; ``context`` optionally supplies the rest of its document."""
    if context is None:
        return plan_st_document([sentence], lexicon, agreement_table)[0]
    doc = list(context)
    position = next((i for i, s in enumerate(doc) if s is sentence), None)
    if position is None:
        doc.append(sentence)
        position = len(doc) - 1
    return plan_st_document(doc, lexicon, agreement_table)[position]
