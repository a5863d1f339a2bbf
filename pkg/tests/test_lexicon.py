import pytest
from hypothesis import given
from hypothesis import strategies as st

from gecbias.lexicon import (
    DEFAULT_PARADIGMS,
    CaseSlot,
    Gender,
    LexiconError,
    NameTable,
    NounPairTable,
    default_lexicon,
    load_lexicon,
    load_lexicon_dir,
)

MASC, FEM, THEY = Gender.MASC, Gender.FEM, Gender.THEY


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_paradigms_are_complete():
    assert [DEFAULT_PARADIGMS[MASC].forms[s] for s in CaseSlot] == ["he", "him", "his", "his", "himself"]
    assert [DEFAULT_PARADIGMS[FEM].forms[s] for s in CaseSlot] == ["she", "her", "her", "hers", "herself"]
    assert [DEFAULT_PARADIGMS[THEY].forms[s] for s in CaseSlot] == ["they", "them", "their", "theirs", "themself"]


def test_bundled_pronoun_file_matches_defaults(lexicon):
    assert lexicon.paradigms == DEFAULT_PARADIGMS


class TestMapPronoun:
    def test_him_to_her(self, lexicon):
        assert lexicon.map_pronoun("him", CaseSlot.ACC, FEM) == "her"

    def test_her_syncretism(self, lexicon):
        assert lexicon.map_pronoun("her", CaseSlot.POSS_DET, MASC) == "his"
        assert lexicon.map_pronoun("her", CaseSlot.ACC, MASC) == "him"

    def test_capitalisation(self, lexicon):
        assert lexicon.map_pronoun("He", CaseSlot.NOM, THEY) == "They"
        assert lexicon.map_pronoun("HIMSELF", CaseSlot.REFL, THEY) == "THEMSELF"

    def test_unknown_form_is_no_swap(self, lexicon):
        assert lexicon.map_pronoun("table", CaseSlot.NOM, FEM) is None

    def test_slot_mismatch_is_error(self, lexicon):
        with pytest.raises(LexiconError):
            lexicon.map_pronoun("him", CaseSlot.NOM, FEM)

    @pytest.mark.parametrize("slot", list(CaseSlot))
    def test_involution_per_slot(self, lexicon, slot):
        for g, other in ((MASC, FEM), (FEM, MASC)):
            form = lexicon.paradigms[g].forms[slot]
            assert lexicon.map_pronoun(lexicon.map_pronoun(form, slot, other), slot, g) == form

    def test_themself_never_themselves(self, lexicon):
        assert lexicon.map_pronoun("herself", CaseSlot.REFL, THEY) == "themself"


class TestNouns:
    def test_actor_actress_both_ways(self, tmp_path):
        lex = load_lexicon(noun_path=write(tmp_path, "n.tsv", "actor\tactress\n"))
        assert lex.nouns.counterpart("actor") == "actress"
        assert lex.nouns.counterpart("actress") == "actor"

    def test_sport_man(self, lexicon):
        assert lexicon.map_common_noun("man", "man", None, "Sing") == "woman"

    def test_plural(self, lexicon):
        assert lexicon.map_common_noun("actor", "actors", None, "Plur") == "actresses"
        assert lexicon.map_common_noun("woman", "Women", None, "Plur") == "Men"

    def test_non_gendered(self, lexicon):
        assert lexicon.map_common_noun("table", "table") is None

    def test_duplicate_lemma_rejected(self):
        with pytest.raises(LexiconError):
            NounPairTable.from_pairs([("actor", "actress"), ("actor", "player")])

    def test_non_bijective_rejected(self):
        with pytest.raises(LexiconError):
            NounPairTable.from_pairs([("host", "hostess"), ("hostess", "host")])

    def test_table_involution(self, lexicon):
        for lemma in list(lexicon.nouns.masc_to_fem) + list(lexicon.nouns.fem_to_masc):
            assert lexicon.nouns.counterpart(lexicon.nouns.counterpart(lemma)) == lemma


class TestNames:
    def test_dual_listed_excluded(self):
        table = NameTable.from_entries([("Alex", "M"), ("Alex", "F"), ("John", "M"), ("Mary", "F")])
        assert table.excluded == {"alex"}
        assert "alex" not in table.mapping
        assert table.mapping["john"] == "mary"

    def test_pairs_by_position_shorter_truncates(self):
        table = NameTable.from_entries([("John", "M"), ("Paul", "M"), ("Mary", "F")])
        assert table.mapping == {"john": "mary", "mary": "john"}

    def test_map_name_involution(self, lexicon):
        for name in lexicon.names.mapping:
            assert lexicon.map_name(lexicon.map_name(name)) == name
        assert lexicon.map_name("John") == lexicon.map_name("john").capitalize()

    def test_bundled_dual_name_is_no_swap(self, lexicon):
        assert "taylor" in lexicon.names.excluded
        assert lexicon.map_name("Taylor") is None

    def test_unknown(self, lexicon):
        assert lexicon.map_name("Zxqv") is None

    def test_empty_name_file(self, tmp_path):
        lex = load_lexicon(name_path=write(tmp_path, "names.tsv", ""))
        assert lex.names.mapping == {}


class TestLoading:
    def test_lexicon_dir_override_and_fallback(self, tmp_path, monkeypatch):
        write(tmp_path, "nouns.tsv", "# comment\nlord\tlady\n")
        lex = load_lexicon_dir(tmp_path)
        assert lex.nouns.counterpart("lord") == "lady"
        assert lex.map_name("John") is not None  # names fall back to the bundled file
        monkeypatch.setenv("GECBIAS_LEXICON_DIR", str(tmp_path))
        assert load_lexicon_dir().nouns.counterpart("lady") == "lord"

    def test_bad_pronoun_row(self, tmp_path):
        with pytest.raises(LexiconError):
            load_lexicon(pronoun_path=write(tmp_path, "p.tsv", "MASC\tNOM\n"))

    def test_incomplete_paradigm(self, tmp_path):
        with pytest.raises(LexiconError):
            load_lexicon(pronoun_path=write(tmp_path, "p.tsv", "MASC\tNOM\the\n"))


def recase(word, pattern):
    return {"lower": word.lower(), "upper": word.upper(), "title": word[:1].upper() + word[1:].lower()}[pattern]


@given(st.sampled_from(["lower", "upper", "title"]), st.sampled_from(list(CaseSlot)), st.sampled_from([MASC, FEM]))
def test_capitalisation_law_pronouns(pattern, slot, gender):
    lex = default_lexicon()
    form = recase(lex.paradigms[gender].forms[slot], pattern)
    out = lex.map_pronoun(form, slot, gender.opposite())
    assert out == recase(out, pattern)


@given(st.sampled_from(["lower", "upper", "title"]), st.data())
def test_capitalisation_law_names_and_nouns(pattern, data):
    lex = default_lexicon()
    name = data.draw(st.sampled_from(sorted(lex.names.mapping)))
    out = lex.map_name(recase(name, pattern))
    assert out == recase(out, pattern)
    lemma = data.draw(st.sampled_from(sorted(lex.nouns.masc_to_fem)))
    out = lex.map_common_noun(lemma, recase(lemma, pattern), None, "Sing")
    assert out == recase(out, pattern)
