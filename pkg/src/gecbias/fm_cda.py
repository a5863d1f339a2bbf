"""Feminine <-> masculine counterfactual swaps on a single annotated sentence."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field, replace

from .corpus import AnnotatedSentence, Token
from .inflect import match_case
from .lexicon import CaseSlot, Gender, Lexicon, LexiconError

log = logging.getLogger(__name__)

NOMINAL_UPOS = {"NOUN", "PROPN"}
POSSESSIVE_DEPRELS = {"nmod:poss", "det:poss", "poss"}
OBJECT_DEPRELS = {"obj", "iobj", "dobj", "obl", "pobj", "dative", "nmod", "obl:arg"}


class SwapKind(str, enum.Enum):
    PRONOUN = "PRONOUN"
    NOUN = "NOUN"
    NAME = "NAME"
    VERB_AGREEMENT = "VERB_AGREEMENT"


@dataclass(frozen=True)
class Replacement:
    new_form: str
    kind: SwapKind
    slot: CaseSlot | None = None
    new_lemma: str | None = None


@dataclass
class SwapPlan:
    replacements: dict = field(default_factory=dict)
    discarded: str | None = None
    diagnostics: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return bool(self.replacements)

    def add(self, index: int, repl: Replacement) -> None:
        if index in self.replacements:
            raise ValueError(f"token {index} already has a replacement")
        self.replacements[index] = repl


class PlanError(ValueError):
    pass


def _has_nominal_head(sentence: AnnotatedSentence, tok: Token) -> bool:
    if tok.deprel in POSSESSIVE_DEPRELS:
        return True
    if 1 <= tok.head <= len(sentence):
        return sentence[tok.head].upos in NOMINAL_UPOS
    return False


def resolve_slot(sentence: AnnotatedSentence, tok: Token, lexicon: Lexicon, diagnostics: list | None = None) -> CaseSlot | None:
    """Case slot of a pronoun token from its form, POS, features and attachment.

    Only *her* (ACC vs POSS_DET) and *his* (POSS_DET vs POSS_IND) need the
    annotations; every other paradigm form has a single slot.
    """
    slots = lexicon.pronoun_slots(tok.form)
    if not slots:
        return None
    if len(slots) == 1:
        return next(iter(slots))

    note = diagnostics.append if diagnostics is not None else (lambda _msg: None)
    poss = tok.feat("Poss") == "Yes"
    reflex = tok.feat("Reflex") == "Yes"
    if reflex and CaseSlot.REFL in slots:
        return CaseSlot.REFL
    nominal_head = _has_nominal_head(sentence, tok)

    if CaseSlot.ACC in slots and CaseSlot.POSS_DET in slots:
        # her
        if tok.upos == "DET" or poss:
            return CaseSlot.POSS_DET
        if tok.feat("Case") == "Acc":
            return CaseSlot.ACC
        if tok.deprel in POSSESSIVE_DEPRELS:
            return CaseSlot.POSS_DET
        if tok.deprel in OBJECT_DEPRELS:
            return CaseSlot.ACC
        note(f"token {tok.index} {tok.form!r}: cannot tell accusative from possessive")
        return None

    if CaseSlot.POSS_DET in slots and CaseSlot.POSS_IND in slots:
        # his
        if tok.upos == "DET":
            if not nominal_head:
                note(f"token {tok.index} {tok.form!r}: DET tag without nominal head, keeping determiner reading")
            return CaseSlot.POSS_DET
        if tok.upos == "PRON" and poss and not nominal_head:
            return CaseSlot.POSS_IND
        if nominal_head:
            return CaseSlot.POSS_DET
        note(f"token {tok.index} {tok.form!r}: possessive reading unresolved, preferring determiner")
        return CaseSlot.POSS_DET

    note(f"token {tok.index} {tok.form!r}: ambiguous pronoun slots {sorted(s.value for s in slots)}")
    return None


def pronoun_replacement(sentence, tok, lexicon, target: Gender, diagnostics: list) -> Replacement | None:
    slot = resolve_slot(sentence, tok, lexicon, diagnostics)
    if slot is None:
        return None
    try:
        new = lexicon.map_pronoun(tok.form, slot, target)
    except LexiconError as exc:
        diagnostics.append(f"token {tok.index}: {exc}")
        return None
    if new is None:
        return None
    source_gender = lexicon.pronoun_slots(tok.form)[slot]
    new_lemma = None
    # Only rewrite lemmas that follow the NOM-form convention, so swaps stay involutive.
    if tok.lemma.lower() == lexicon.paradigms[source_gender].forms[CaseSlot.NOM]:
        new_lemma = match_case(tok.lemma, lexicon.paradigms[target].forms[CaseSlot.NOM])
    return Replacement(new, SwapKind.PRONOUN, slot, new_lemma)


def _lemma_swap(lemma: str, old: str, new: str) -> str | None:
    if lemma.lower() == old.lower():
        return match_case(lemma, new)
    return None


def fm_token_replacement(sentence: AnnotatedSentence, tok: Token, lexicon: Lexicon, diagnostics: list) -> Replacement | None:
    """Swap for one token under masculine<->feminine CDA, or None."""
    gender = lexicon.pronoun_gender(tok.form)
    if gender in (Gender.MASC, Gender.FEM) and tok.upos in ("PRON", "DET", "_"):
        return pronoun_replacement(sentence, tok, lexicon, gender.opposite(), diagnostics)
    if tok.upos == "NOUN":
        resolved = lexicon.noun_lemma(tok.lemma, tok.form)
        if resolved is not None:
            base, seen_number = resolved
            number = tok.feat("Number") or seen_number or "Sing"
            new = lexicon.map_common_noun(base, tok.form, None, number)
            if new is not None and new != tok.form:
                new_lemma = _lemma_swap(tok.lemma, base, lexicon.nouns.counterpart(base))
                return Replacement(new, SwapKind.NOUN, None, new_lemma)
        return None
    if tok.upos == "PROPN":
        new = lexicon.map_name(tok.form)
        if new is not None:
            return Replacement(new, SwapKind.NAME, None, _lemma_swap(tok.lemma, tok.form.lower(), new))
        resolved = lexicon.noun_lemma(tok.lemma, tok.form)
        # Titles such as "Mr." are often tagged PROPN.
        if resolved is not None:
            new = lexicon.map_common_noun(resolved[0], tok.form, None, tok.feat("Number") or resolved[1] or "Sing")
            if new is not None and new != tok.form:
                new_lemma = _lemma_swap(tok.lemma, resolved[0], lexicon.nouns.counterpart(resolved[0]))
                return Replacement(new, SwapKind.NOUN, None, new_lemma)
    return None


def plan_fm_swap(sentence: AnnotatedSentence, lexicon: Lexicon) -> SwapPlan:
    plan = SwapPlan()
    for tok in sentence.tokens:
        repl = fm_token_replacement(sentence, tok, lexicon, plan.diagnostics)
        if repl is not None:
            plan.add(tok.index, repl)
    for msg in plan.diagnostics:
        log.debug("%s: %s", sentence.id, msg)
    return plan


def apply_plan(sentence: AnnotatedSentence, plan: SwapPlan) -> AnnotatedSentence:
    """New sentence with planned forms (and lemmas of swapped nominals) substituted."""
    if plan.discarded:
        raise PlanError(f"cannot apply a discarded plan ({plan.discarded})")
    if not plan.replacements:
        return sentence
    n = len(sentence)
    tokens = list(sentence.tokens)
    for index, repl in plan.replacements.items():
        if not 1 <= index <= n:
            raise PlanError(f"replacement index {index} outside sentence of {n} tokens")
        tok = tokens[index - 1]
        lemma = tok.lemma if repl.new_lemma is None else repl.new_lemma
        tokens[index - 1] = replace(tok, form=repl.new_form, lemma=lemma)
    return replace(sentence, tokens=tuple(tokens))
