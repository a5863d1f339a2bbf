"""Rule-based English inflection for swaps: they-agreement on verbs, noun number."""

from __future__ import annotations

from pathlib import Path

# 3sg present form -> form agreeing with plural/they subjects
IRREGULAR_AGREEMENT = {
    "is": "are",
    "was": "were",
    "has": "have",
    "does": "do",
    "isn't": "aren't",
    "wasn't": "weren't",
    "hasn't": "haven't",
    "doesn't": "don't",
}

# Contracted auxiliaries depend on the lemma they stand for ("'s" = is | has).
CONTRACTED_AGREEMENT = {
    ("'s", "be"): "'re",
    ("'s", "have"): "'ve",
}

IRREGULAR_PLURALS = {
    "man": "men",
    "woman": "women",
    "child": "children",
    "person": "people",
    "foot": "feet",
    "tooth": "teeth",
    "goose": "geese",
    "mouse": "mice",
    "ox": "oxen",
    "wife": "wives",
    "life": "lives",
    "knife": "knives",
    "wolf": "wolves",
    "half": "halves",
    "leaf": "leaves",
    "self": "selves",
    "thief": "thieves",
    "shelf": "shelves",
    "calf": "calves",
    "loaf": "loaves",
    "hero": "heroes",
    "potato": "potatoes",
    "tomato": "tomatoes",
    "echo": "echoes",
    "veto": "vetoes",
    "sheep": "sheep",
    "fish": "fish",
    "deer": "deer",
    "series": "series",
    "species": "species",
}

# "-man" words that pluralise regularly
_MAN_REGULAR = {"human", "german", "shaman", "talisman", "caiman", "ottoman", "roman", "walkman"}

_SIBILANT_ENDINGS = ("s", "x", "z", "ch", "sh")
_VOWELS = set("aeiou")


def match_case(template: str, word: str) -> str:
    """Render ``word`` in the casing pattern of ``template`` (UPPER, Title or lower)."""
    letters = [c for c in template if c.isalpha()]
    if len(letters) > 1 and all(c.isupper() for c in letters):
        return word.upper()
    if letters and letters[0].isupper():
        lowered = word.lower()
        for i, c in enumerate(lowered):
            if c.isalpha():
                return lowered[:i] + c.upper() + lowered[i + 1 :]
        return lowered
    return word.lower()


def pluralize(noun: str) -> str:
    noun = noun.lower()
    if noun in IRREGULAR_PLURALS:
        return IRREGULAR_PLURALS[noun]
    if noun.endswith("man") and noun not in _MAN_REGULAR:
        return noun[:-3] + "men"
    if noun.endswith(_SIBILANT_ENDINGS):
        return noun + "es"
    if noun.endswith("y") and len(noun) > 1 and noun[-2] not in _VOWELS:
        return noun[:-1] + "ies"
    return noun + "s"


def match_number(lemma: str, number: str) -> str:
    return pluralize(lemma) if number == "Plur" else lemma


def third_singular(lemma: str) -> str:
    """walk -> walks, go -> goes, cry -> cries, miss -> misses."""
    lemma = lemma.lower()
    if lemma == "be":
        return "is"
    if lemma == "have":
        return "has"
    if lemma.endswith(_SIBILANT_ENDINGS + ("o",)):
        return lemma + "es"
    if lemma.endswith("y") and len(lemma) > 1 and lemma[-2] not in _VOWELS:
        return lemma[:-1] + "ies"
    return lemma + "s"


def strip_third_singular(form: str) -> str:
    """Undo 3sg -s by orthographic rules; returns ``form`` when no rule is safe.

    Rule order: -ies -> -y, -es after s/x/z/ch/sh/o, plain -s. A result that
    still ends in a single s is rejected so the operation stays idempotent.
    """
    low = form.lower()
    if not low.endswith("s") or low.endswith("ss"):
        return form
    if low.endswith("ies") and len(low) > 4:
        result = low[:-3] + "y"
    elif low.endswith("es") and low[:-2].endswith(_SIBILANT_ENDINGS + ("o",)):
        result = low[:-2]
    else:
        result = low[:-1]
    if not any(c.isalpha() for c in result) or (result.endswith("s") and not result.endswith("ss")):
        return form
    return match_case(form, result)


def _is_pres_3sg(feats: dict) -> bool:
    return (
        feats.get("Tense") == "Pres"
        and feats.get("Person") == "3"
        and feats.get("Number", "Sing") == "Sing"
        and feats.get("VerbForm", "Fin") == "Fin"
    )


def plural_agreement_form(form: str, lemma: str = "_", feats: dict | None = None, table: dict | None = None) -> str:
    """Form of a verb/auxiliary agreeing with a *they* subject.

    Unknown or non-agreeing forms (past, modal, participle) come back unchanged.
    """
    feats = feats or {}
    table = IRREGULAR_AGREEMENT if table is None else table
    low = form.lower()
    if low in table:
        return match_case(form, table[low])
    lem = (lemma or "_").lower()
    if (low, lem) in CONTRACTED_AGREEMENT:
        return CONTRACTED_AGREEMENT[(low, lem)]
    if lem not in ("_", "") and lem != low:
        if low == third_singular(lem):
            return match_case(form, lem)
        if _is_pres_3sg(feats) and lem.isalpha():
            return strip_third_singular(form)
        return form
    if _is_pres_3sg(feats) and lem in ("_", ""):
        return strip_third_singular(form)
    return form


def load_agreement_table(path) -> dict:
    """Optional override: TSV rows ``3sg_form<TAB>plural_form`` merged over the defaults."""
    table = dict(IRREGULAR_AGREEMENT)
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise ValueError(f"{path}:{line_no}: expected 2 tab-separated columns")
        key, value = cols[0].strip().lower(), cols[1].strip().lower()
        if key == value:
            raise ValueError(f"{path}:{line_no}: {key!r} maps to itself")
        table[key] = value
    return table
