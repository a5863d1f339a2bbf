"""Gendered term dictionaries: pronoun paradigms, common-noun pairs, names."""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .inflect import match_case, match_number


class LexiconError(ValueError):
    pass


class CaseSlot(str, enum.Enum):
    NOM = "NOM"
    ACC = "ACC"
    POSS_DET = "POSS_DET"
    POSS_IND = "POSS_IND"
    REFL = "REFL"


class Gender(str, enum.Enum):
    MASC = "MASC"
    FEM = "FEM"
    THEY = "THEY"

    def opposite(self) -> "Gender":
        if self is Gender.MASC:
            return Gender.FEM
        if self is Gender.FEM:
            return Gender.MASC
        raise ValueError("THEY has no binary counterpart")


@dataclass(frozen=True)
class PronounParadigm:
    gender: Gender
    forms: dict

    def __post_init__(self):
        missing = [s.value for s in CaseSlot if s not in self.forms]
        if missing:
            raise LexiconError(f"{self.gender.value} paradigm lacks slots: {', '.join(missing)}")


DEFAULT_PARADIGMS = {
    Gender.MASC: PronounParadigm(
        Gender.MASC,
        {CaseSlot.NOM: "he", CaseSlot.ACC: "him", CaseSlot.POSS_DET: "his", CaseSlot.POSS_IND: "his", CaseSlot.REFL: "himself"},
    ),
    Gender.FEM: PronounParadigm(
        Gender.FEM,
        {CaseSlot.NOM: "she", CaseSlot.ACC: "her", CaseSlot.POSS_DET: "her", CaseSlot.POSS_IND: "hers", CaseSlot.REFL: "herself"},
    ),
    Gender.THEY: PronounParadigm(
        Gender.THEY,
        {CaseSlot.NOM: "they", CaseSlot.ACC: "them", CaseSlot.POSS_DET: "their", CaseSlot.POSS_IND: "theirs", CaseSlot.REFL: "themself"},
    ),
}


@dataclass(frozen=True)
class NounPairTable:
    masc_to_fem: dict
    fem_to_masc: dict

    @classmethod
    def from_pairs(cls, pairs) -> "NounPairTable":
        m2f: dict[str, str] = {}
        f2m: dict[str, str] = {}
        for masc, fem in pairs:
            masc, fem = masc.lower(), fem.lower()
            if masc in m2f:
                raise LexiconError(f"duplicate masculine lemma {masc!r}")
            if fem in f2m:
                raise LexiconError(f"duplicate feminine lemma {fem!r}")
            m2f[masc] = fem
            f2m[fem] = masc
        both = set(m2f) & set(f2m)
        if both:
            raise LexiconError(f"lemma listed on both sides, table is not a bijection: {sorted(both)}")
        return cls(m2f, f2m)

    def gender_of(self, lemma: str) -> Gender | None:
        lemma = lemma.lower()
        if lemma in self.masc_to_fem:
            return Gender.MASC
        if lemma in self.fem_to_masc:
            return Gender.FEM
        return None

    def counterpart(self, lemma: str) -> str | None:
        lemma = lemma.lower()
        return self.masc_to_fem.get(lemma) or self.fem_to_masc.get(lemma)

    def __contains__(self, lemma: str) -> bool:
        return self.gender_of(lemma) is not None

    def __len__(self) -> int:
        return len(self.masc_to_fem)


@dataclass(frozen=True)
class NameTable:
    masc_names: frozenset
    fem_names: frozenset
    mapping: dict
    excluded: frozenset

    @classmethod
    def from_entries(cls, entries) -> "NameTable":
        """Build from (name, 'M'|'F') rows; i-th masculine name pairs with i-th feminine name."""
        masc: list[str] = []
        fem: list[str] = []
        for name, tag in entries:
            name = name.lower()
            bucket = masc if tag == "M" else fem
            if name not in bucket:
                bucket.append(name)
        excluded = frozenset(masc) & frozenset(fem)
        masc_usable = [n for n in masc if n not in excluded]
        fem_usable = [n for n in fem if n not in excluded]
        mapping = {}
        for m, f in zip(masc_usable, fem_usable):
            mapping[m] = f
            mapping[f] = m
        return cls(frozenset(masc), frozenset(fem), mapping, excluded)

    def gender_of(self, name: str) -> Gender | None:
        name = name.lower()
        if name in self.excluded:
            return None
        if name in self.masc_names:
            return Gender.MASC
        if name in self.fem_names:
            return Gender.FEM
        return None

    def known(self, name: str) -> bool:
        name = name.lower()
        return name in self.masc_names or name in self.fem_names


@dataclass(frozen=True)
class Lexicon:
    nouns: NounPairTable
    names: NameTable
    paradigms: dict = field(default_factory=lambda: dict(DEFAULT_PARADIGMS))

    def __post_init__(self):
        # (form, slot) -> gender, used for source-gender lookup and slot checks
        index: dict[str, dict[CaseSlot, Gender]] = {}
        for gender, paradigm in self.paradigms.items():
            for slot, form in paradigm.forms.items():
                index.setdefault(form.lower(), {})[slot] = gender
        object.__setattr__(self, "_pronoun_index", index)
        form_index: dict[str, tuple[str, str]] = {}
        for lemma in list(self.nouns.masc_to_fem) + list(self.nouns.fem_to_masc):
            form_index.setdefault(lemma, (lemma, "Sing"))
            form_index.setdefault(match_number(lemma, "Plur"), (lemma, "Plur"))
        object.__setattr__(self, "_noun_form_index", form_index)

    # pronouns -------------------------------------------------------------

    def pronoun_slots(self, form: str) -> dict:
        """Slot -> gender for every paradigm cell this form occupies."""
        return dict(self._pronoun_index.get(form.lower(), {}))

    def pronoun_gender(self, form: str) -> Gender | None:
        genders = set(self.pronoun_slots(form).values())
        return genders.pop() if len(genders) == 1 else None

    def is_gendered_pronoun(self, form: str) -> bool:
        return self.pronoun_gender(form) in (Gender.MASC, Gender.FEM)

    def map_pronoun(self, form: str, slot: CaseSlot, target: Gender) -> str | None:
        """Counterpart of ``form`` in ``target``'s paradigm, same slot and casing.

        Returns None when the form belongs to no paradigm. Raises LexiconError
        when the form exists but cannot fill ``slot``.
        """
        slots = self.pronoun_slots(form)
        if not slots:
            return None
        if slot not in slots:
            raise LexiconError(f"{form!r} cannot fill slot {slot.value}")
        return match_case(form, self.paradigms[target].forms[slot])

    # nouns ----------------------------------------------------------------

    def noun_lemma(self, lemma: str, form: str) -> tuple[str, str] | None:
        """Resolve a table lemma and number for a noun token, or None."""
        if lemma and lemma.lower() in self.nouns:
            low = lemma.lower()
            number = "Plur" if form.lower() != low and form.lower() == match_number(low, "Plur") else None
            return low, number
        hit = self._noun_form_index.get(form.lower())
        if hit:
            return hit
        return None

    def map_common_noun(self, lemma: str, form: str, target: Gender | None = None, number: str | None = None) -> str | None:
        """Swap a definitionally gendered noun, keeping number and casing.

        ``target`` defaults to the opposite of the lemma's gender. Returns None
        (no swap) when the lemma is not in the table.
        """
        resolved = self.noun_lemma(lemma, form)
        if resolved is None:
            return None
        base, seen_number = resolved
        gender = self.nouns.gender_of(base)
        if target is None or target is Gender.THEY:
            target = gender.opposite()
        if gender is target:
            return form
        number = number or seen_number or "Sing"
        return match_case(form, match_number(self.nouns.counterpart(base), number))

    # names ----------------------------------------------------------------

    def map_name(self, form: str) -> str | None:
        other = self.names.mapping.get(form.lower())
        if other is None:
            return None
        return match_case(form, other)


# ----------------------------------------------------------------- loading


def _tsv_rows(path, columns: int):
    text = Path(path).read_text(encoding="utf-8")
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.rstrip("\n").split("\t")
        if len(cols) != columns:
            raise LexiconError(f"{path}:{line_no}: expected {columns} tab-separated columns")
        yield line_no, [c.strip() for c in cols]


def load_pronouns(path) -> dict:
    """Rows ``GENDER<TAB>SLOT<TAB>form``; every paradigm must fill all five slots."""
    forms: dict[Gender, dict[CaseSlot, str]] = {}
    for line_no, (gender, slot, form) in _tsv_rows(path, 3):
        try:
            g, s = Gender(gender.upper()), CaseSlot(slot.upper())
        except ValueError:
            raise LexiconError(f"{path}:{line_no}: unknown gender or slot {gender!r}/{slot!r}") from None
        forms.setdefault(g, {})[s] = form.lower()
    if set(forms) != set(Gender):
        raise LexiconError(f"{path}: paradigms required for MASC, FEM and THEY")
    return {g: PronounParadigm(g, f) for g, f in forms.items()}


def load_nouns(path) -> NounPairTable:
    return NounPairTable.from_pairs(cols for _, cols in _tsv_rows(path, 2))


def load_names(path) -> NameTable:
    entries = []
    for line_no, (name, tag) in _tsv_rows(path, 2):
        if tag not in ("M", "F"):
            raise LexiconError(f"{path}:{line_no}: gender tag must be M or F, got {tag!r}")
        entries.append((name, tag))
    return NameTable.from_entries(entries)


def load_lexicon(pronoun_path=None, noun_path=None, name_path=None) -> Lexicon:
    paradigms = load_pronouns(pronoun_path) if pronoun_path else dict(DEFAULT_PARADIGMS)
    nouns = load_nouns(noun_path) if noun_path else NounPairTable.from_pairs([])
    names = load_names(name_path) if name_path else NameTable.from_entries([])
    return Lexicon(nouns, names, paradigms)


LEXICON_ENV = "GECBIAS_LEXICON_DIR"


def load_lexicon_dir(directory=None) -> Lexicon:
    """Load ``pronouns.tsv``/``nouns.tsv``/``names.tsv`` from a directory.

    Falls back to $GECBIAS_LEXICON_DIR, then to the bundled demo lexicon.
    Missing files in a user directory fall back to the bundled ones.
    """
    directory = directory or os.environ.get(LEXICON_ENV)
    bundled = resources.files("gecbias") / "data"
    paths = {}
    for name in ("pronouns.tsv", "nouns.tsv", "names.tsv"):
        candidate = Path(directory) / name if directory else None
        paths[name] = candidate if candidate is not None and candidate.exists() else bundled / name
    return load_lexicon(paths["pronouns.tsv"], paths["nouns.tsv"], paths["names.tsv"])


_DEFAULT = None


def default_lexicon() -> Lexicon:
    global _DEFAULT
    if _DEFAULT is None:
        bundled = resources.files("gecbias") / "data"
        _DEFAULT = load_lexicon(bundled / "pronouns.tsv", bundled / "nouns.tsv", bundled / "names.tsv")
    return _DEFAULT
