import random
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gecbias.corpus import AnnotatedSentence, Token, emit_conllu, sentence_from_forms
from gecbias.fm_cda import PlanError, Replacement, SwapKind, SwapPlan, apply_plan, plan_fm_swap, resolve_slot
from gecbias.lexicon import CaseSlot, default_lexicon
from generators import Builder, fm_corpus, fm_sentence, pron


def gave_her_his_book(her_feats):
    b = Builder()
    he = pron(b, "MASC", "NOM", capital=True)
    gave = b.add("gave", "give", "VERB", {"Tense": "Past", "VerbForm": "Fin"})
    her = b.add("her", "she", "PRON", her_feats)
    his = pron(b, "MASC", "POSS_DET")
    book = b.add("book", "book", "NOUN", {"Number": "Sing"})
    b.link(he, gave, "nsubj")
    b.link(her, gave, "iobj")
    b.link(his, book, "nmod:poss")
    b.link(book, gave, "obj")
    return b.build("g")


def forms_of(plan):
    return {i: r.new_form for i, r in plan.replacements.items()}


class TestPlan:
    def test_he_gave_her_his_book_possessive_reading(self, lexicon):
        sent = gave_her_his_book({"Gender": "Fem", "Poss": "Yes", "PronType": "Prs"})
        plan = plan_fm_swap(sent, lexicon)
        assert forms_of(plan) == {1: "She", 3: "his", 4: "her"}
        assert plan.replacements[3].slot is CaseSlot.POSS_DET
        assert plan.replacements[4].slot is CaseSlot.POSS_DET

    def test_he_gave_her_his_book_accusative_reading(self, lexicon):
        sent = gave_her_his_book({"Case": "Acc", "Gender": "Fem", "PronType": "Prs"})
        assert forms_of(plan_fm_swap(sent, lexicon)) == {1: "She", 3: "him", 4: "her"}

    def test_sport_man(self, lexicon):
        b = Builder()
        my = b.add("my", "my", "PRON", {"Poss": "Yes", "Person": "1"})
        fav = b.add("favourite", None, "ADJ")
        sport = b.add("sport", None, "NOUN", {"Number": "Sing"})
        man = b.add("man", None, "NOUN", {"Number": "Sing"})
        for k in (my, fav, sport):
            b.link(k, man, "nmod:poss" if k == my else "amod" if k == fav else "compound")
        plan = plan_fm_swap(b.build("t2"), lexicon)
        assert forms_of(plan) == {4: "woman"}
        assert plan.replacements[4].kind is SwapKind.NOUN

    def test_no_gendered_terms(self, lexicon):
        b = Builder()
        t = b.add("The", "the", "DET")
        n = b.add("table", None, "NOUN", {"Number": "Sing"})
        c = b.add("is", "be", "AUX")
        r = b.add("red", None, "ADJ")
        b.link(t, n, "det")
        b.link(n, r, "nsubj")
        b.link(c, r, "cop")
        assert not plan_fm_swap(b.build("t"), lexicon)

    def test_names_and_titles(self, lexicon):
        b = Builder()
        mr = b.add("Mr.", "Mr.", "PROPN", {"Number": "Sing"})
        john = b.add("John", "John", "PROPN", {"Number": "Sing"})
        taylor = b.add("Taylor", "Taylor", "PROPN", {"Number": "Sing"})
        left = b.add("left", "leave", "VERB")
        b.link(mr, john, "compound")
        b.link(taylor, john, "flat")
        b.link(john, left, "nsubj")
        plan = plan_fm_swap(b.build("n"), lexicon)
        assert forms_of(plan) == {1: "Ms.", 2: lexicon.map_name("John")}

    def test_independent_possessive(self, lexicon):
        b = Builder()
        book = b.add("book", None, "NOUN", {"Number": "Sing"})
        cop = b.add("is", "be", "AUX")
        his = pron(b, "MASC", "POSS_IND")
        b.link(book, his, "nsubj")
        b.link(cop, his, "cop")
        plan = plan_fm_swap(b.build("p"), lexicon)
        assert forms_of(plan) == {3: "hers"}
        assert plan.replacements[3].slot is CaseSlot.POSS_IND

    def test_det_his_without_noun_prefers_determiner_with_diagnostic(self, lexicon):
        sent = sentence_from_forms(["his", "."])
        toks = (replace(sent[1], upos="DET"), replace(sent[2], head=1, deprel="punct"))
        sent = AnnotatedSentence("d", toks)
        diagnostics = []
        assert resolve_slot(sent, sent[1], lexicon, diagnostics) is CaseSlot.POSS_DET
        assert diagnostics

    def test_unresolvable_her_is_skipped(self, lexicon):
        sent = AnnotatedSentence("h", (Token(1, "her", "she", "PRON", {}, 0, "root"),))
        plan = plan_fm_swap(sent, lexicon)
        assert not plan
        assert any("her" in d for d in plan.diagnostics)

    def test_reflexive(self, lexicon):
        b = Builder()
        s = pron(b, "FEM", "NOM", capital=True)
        v = b.add("hurt", "hurt", "VERB")
        r = pron(b, "FEM", "REFL")
        b.link(s, v, "nsubj")
        b.link(r, v, "obj")
        assert forms_of(plan_fm_swap(b.build("r"), lexicon)) == {1: "He", 3: "himself"}


class TestApply:
    def test_empty_plan_identity(self, lexicon):
        sent = fm_sentence(random.Random(3), "x")
        assert apply_plan(sent, SwapPlan()) == sent

    def test_single_replacement(self):
        sent = sentence_from_forms(["a", "b", "c"])
        plan = SwapPlan()
        plan.add(3, Replacement("z", SwapKind.NOUN))
        out = apply_plan(sent, plan)
        assert out.forms == ["a", "b", "z"]
        assert out.tokens[:2] == sent.tokens[:2]
        assert sent.forms == ["a", "b", "c"]

    def test_discarded_plan(self):
        with pytest.raises(PlanError):
            apply_plan(sentence_from_forms(["a"]), SwapPlan(discarded="SWAP_MISMATCH"))

    def test_bad_index(self):
        plan = SwapPlan()
        plan.add(5, Replacement("z", SwapKind.NOUN))
        with pytest.raises(PlanError):
            apply_plan(sentence_from_forms(["a"]), plan)

    def test_duplicate_replacement(self):
        plan = SwapPlan()
        plan.add(1, Replacement("z", SwapKind.NOUN))
        with pytest.raises(ValueError):
            plan.add(1, Replacement("y", SwapKind.NOUN))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10_000))
def test_involution_and_preserved_fields(seed):
    lexicon = default_lexicon()
    sent = fm_sentence(random.Random(seed), f"s{seed}")
    once = apply_plan(sent, plan_fm_swap(sent, lexicon))
    twice = apply_plan(once, plan_fm_swap(once, lexicon))
    assert emit_conllu([twice]) == emit_conllu([sent])
    assert len(once) == len(sent)
    for a, b in zip(sent.tokens, once.tokens):
        assert (a.upos, a.feats, a.head, a.deprel, a.coref) == (b.upos, b.feats, b.head, b.deprel, b.coref)


def test_corpus_has_swaps(lexicon):
    corpus = fm_corpus(100, seed=7)
    kinds = {r.kind for s in corpus for r in plan_fm_swap(s, lexicon).replacements.values()}
    assert kinds == {SwapKind.PRONOUN, SwapKind.NOUN, SwapKind.NAME}
