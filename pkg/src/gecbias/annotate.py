"""Deterministic, approximate annotator for text that arrives without annotations.

POS tags come from closed-class word lists plus suffix rules, dependencies
from a flat clause heuristic, and coreference from a nearest-preceding
singular-antecedent rule. It exists so the toolkit runs without any model;
real pipelines should supply their own annotations.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, replace

from .corpus import AnnotatedSentence, Token
from .inflect import IRREGULAR_PLURALS, third_singular
from .lexicon import Gender, Lexicon, default_lexicon
from .st_cda import COREF_META


@dataclass(frozen=True)
class HeuristicConfig:
    enable_coref: bool = True
    coref_window_sentences: int = 3

    def __post_init__(self):
        if self.coref_window_sentences < 1:
            raise ValueError("coref_window_sentences must be >= 1")


_PRS = "PronType=Prs"
PRONOUNS = {
    "i": ("i", "Case=Nom|Number=Sing|Person=1"),
    "me": ("i", "Case=Acc|Number=Sing|Person=1"),
    "you": ("you", "Person=2"),
    "we": ("we", "Case=Nom|Number=Plur|Person=1"),
    "us": ("we", "Case=Acc|Number=Plur|Person=1"),
    "he": ("he", "Case=Nom|Gender=Masc|Number=Sing|Person=3"),
    "him": ("he", "Case=Acc|Gender=Masc|Number=Sing|Person=3"),
    "himself": ("he", "Case=Acc|Gender=Masc|Number=Sing|Person=3|Reflex=Yes"),
    "she": ("she", "Case=Nom|Gender=Fem|Number=Sing|Person=3"),
    "herself": ("she", "Case=Acc|Gender=Fem|Number=Sing|Person=3|Reflex=Yes"),
    "hers": ("she", "Gender=Fem|Number=Sing|Person=3|Poss=Yes"),
    "it": ("it", "Number=Sing|Person=3"),
    "itself": ("it", "Number=Sing|Person=3|Reflex=Yes"),
    "they": ("they", "Case=Nom|Number=Plur|Person=3"),
    "them": ("they", "Case=Acc|Number=Plur|Person=3"),
    "themself": ("they", "Case=Acc|Number=Sing|Person=3|Reflex=Yes"),
    "themselves": ("they", "Case=Acc|Number=Plur|Person=3|Reflex=Yes"),
    "theirs": ("they", "Number=Plur|Person=3|Poss=Yes"),
    "myself": ("i", "Number=Sing|Person=1|Reflex=Yes"),
    "mine": ("i", "Number=Sing|Person=1|Poss=Yes"),
    "yours": ("you", "Person=2|Poss=Yes"),
    "ours": ("we", "Number=Plur|Person=1|Poss=Yes"),
    "someone": ("someone", "Number=Sing"),
    "everyone": ("everyone", "Number=Sing"),
    "nobody": ("nobody", "Number=Sing"),
    "something": ("something", "Number=Sing"),
    "everything": ("everything", "Number=Sing"),
    "nothing": ("nothing", "Number=Sing"),
    "who": ("who", "PronType=Rel"),
}
POSS_DETERMINERS = {
    "my": ("i", "Number=Sing|Person=1|Poss=Yes"),
    "your": ("you", "Person=2|Poss=Yes"),
    "our": ("we", "Number=Plur|Person=1|Poss=Yes"),
    "its": ("it", "Number=Sing|Person=3|Poss=Yes"),
    "their": ("they", "Number=Plur|Person=3|Poss=Yes"),
    "his": ("he", "Gender=Masc|Number=Sing|Person=3|Poss=Yes"),
    "her": ("she", "Gender=Fem|Number=Sing|Person=3|Poss=Yes"),
}
DETERMINERS = {
    "a", "an", "the", "this", "that", "these", "those", "some", "any", "every",
    "each", "no", "all", "another", "both", "either", "neither", "many", "much",
    "few", "several", "such", "what", "which", "whose",
}
ADPOSITIONS = {
    "in", "on", "at", "to", "for", "with", "of", "from", "by", "about", "into",
    "over", "under", "after", "before", "between", "through", "during", "without",
    "like", "near", "since", "until", "across", "against", "among", "around",
    "behind", "beyond", "upon", "within", "towards", "toward", "onto", "off", "per",
}
CCONJ = {"and", "or", "but", "nor", "yet", "so"}
SCONJ = {"because", "if", "when", "while", "although", "though", "unless", "whether", "as", "than", "whereas", "once"}
ADVERBS = {
    "very", "too", "also", "just", "always", "never", "often", "sometimes", "still",
    "already", "really", "here", "there", "now", "then", "today", "yesterday",
    "tomorrow", "again", "soon", "ever", "even", "only", "quite", "almost", "home",
    "together", "away", "back", "well", "up", "down", "out", "how", "why", "where",
}

_FIN_PRES_3SG = "Mood=Ind|Number=Sing|Person=3|Tense=Pres|VerbForm=Fin"
_FIN_PRES = "Mood=Ind|Tense=Pres|VerbForm=Fin"
_FIN_PAST = "Mood=Ind|Tense=Past|VerbForm=Fin"
AUXILIARIES = {
    "is": ("be", _FIN_PRES_3SG),
    "'s": ("be", _FIN_PRES_3SG),
    "are": ("be", "Mood=Ind|Number=Plur|Tense=Pres|VerbForm=Fin"),
    "'re": ("be", "Mood=Ind|Number=Plur|Tense=Pres|VerbForm=Fin"),
    "am": ("be", "Mood=Ind|Number=Sing|Person=1|Tense=Pres|VerbForm=Fin"),
    "'m": ("be", "Mood=Ind|Number=Sing|Person=1|Tense=Pres|VerbForm=Fin"),
    "was": ("be", "Mood=Ind|Number=Sing|Person=3|Tense=Past|VerbForm=Fin"),
    "were": ("be", "Mood=Ind|Number=Plur|Tense=Past|VerbForm=Fin"),
    "be": ("be", "VerbForm=Inf"),
    "been": ("be", "Tense=Past|VerbForm=Part"),
    "being": ("be", "VerbForm=Ger"),
    "has": ("have", _FIN_PRES_3SG),
    "have": ("have", _FIN_PRES),
    "'ve": ("have", _FIN_PRES),
    "had": ("have", _FIN_PAST),
    "does": ("do", _FIN_PRES_3SG),
    "do": ("do", _FIN_PRES),
    "did": ("do", _FIN_PAST),
    "will": ("will", "VerbForm=Fin"),
    "'ll": ("will", "VerbForm=Fin"),
    "would": ("would", "VerbForm=Fin"),
    "'d": ("would", "VerbForm=Fin"),
    "can": ("can", "VerbForm=Fin"),
    "could": ("could", "VerbForm=Fin"),
    "shall": ("shall", "VerbForm=Fin"),
    "should": ("should", "VerbForm=Fin"),
    "may": ("may", "VerbForm=Fin"),
    "might": ("might", "VerbForm=Fin"),
    "must": ("must", "VerbForm=Fin"),
    "isn't": ("be", _FIN_PRES_3SG),
    "wasn't": ("be", "Mood=Ind|Number=Sing|Person=3|Tense=Past|VerbForm=Fin"),
    "hasn't": ("have", _FIN_PRES_3SG),
    "doesn't": ("do", _FIN_PRES_3SG),
}
VERB_LEMMAS = {
    "go", "run", "walk", "spend", "come", "make", "take", "give", "get", "see",
    "know", "think", "want", "like", "love", "hate", "need", "use", "work", "play",
    "live", "read", "write", "say", "tell", "ask", "help", "try", "call", "feel",
    "leave", "keep", "bring", "begin", "start", "show", "hear", "lose", "pay",
    "meet", "include", "continue", "learn", "change", "lead", "understand", "watch",
    "follow", "stop", "create", "speak", "allow", "add", "grow", "open", "win",
    "offer", "remember", "consider", "appear", "buy", "wait", "serve", "die",
    "send", "expect", "build", "stay", "fall", "cut", "reach", "kill", "remain",
    "suggest", "raise", "pass", "sell", "require", "report", "decide", "pull",
    "study", "cry", "miss", "teach", "eat", "drink", "sleep", "sing", "dance",
    "drive", "carry", "wash", "fix", "finish", "travel", "visit", "cook", "clean",
    "hurt", "put", "sit", "stand", "look", "find", "become", "believe", "hope",
    "enjoy", "prefer", "move", "talk", "answer", "agree", "fly", "swim", "catch",
    "belong", "operate", "develop", "pick", "leave", "wear", "laugh", "smile",
    "worry", "try", "marry", "apply", "reply", "push", "touch", "teach", "relax",
}
_VERB_ORDER = tuple(sorted(VERB_LEMMAS))
IRREGULAR_PAST = {
    "went": "go", "ran": "run", "spent": "spend", "came": "come", "made": "make",
    "took": "take", "gave": "give", "got": "get", "saw": "see", "knew": "know",
    "thought": "think", "said": "say", "told": "tell", "felt": "feel", "left": "leave",
    "kept": "keep", "brought": "bring", "began": "begin", "heard": "hear", "lost": "lose",
    "paid": "pay", "met": "meet", "led": "lead", "understood": "understand", "spoke": "speak",
    "grew": "grow", "won": "win", "bought": "buy", "sent": "send", "built": "build",
    "fell": "fall", "sold": "sell", "taught": "teach", "ate": "eat", "drank": "drink",
    "slept": "sleep", "sang": "sing", "drove": "drive", "sat": "sit", "stood": "stand",
    "found": "find", "became": "become", "flew": "fly", "swam": "swim", "caught": "catch",
    "wore": "wear", "wrote": "write", "read": "read", "put": "put", "cut": "cut", "hurt": "hurt",
}
ADJECTIVES = {
    "good", "bad", "new", "old", "big", "small", "happy", "sad", "red", "blue", "long",
    "short", "great", "little", "young", "best", "better", "same", "different", "favourite",
    "favorite", "nice", "kind", "busy", "tired", "late", "early", "easy", "hard", "important",
    "beautiful", "funny", "clever", "smart", "strong", "tall", "rich", "poor", "arid",
}
ANIMATE_NOUNS = {
    "person", "friend", "teacher", "student", "doctor", "nurse", "child", "kid", "baby",
    "parent", "neighbour", "neighbor", "colleague", "boss", "manager", "worker", "engineer",
    "lawyer", "artist", "writer", "author", "singer", "player", "driver", "customer",
    "client", "patient", "partner", "cousin", "classmate", "roommate", "linguist",
    "scientist", "professor", "officer", "leader", "member", "guest", "owner", "user",
    "employee", "director", "president", "chef", "cook", "pilot", "farmer", "judge",
    "athlete", "coach", "sibling", "spouse", "relative", "stranger", "tourist", "visitor",
}
TEMPORAL = {"yesterday", "today", "tomorrow", "now", "then", "again", "soon", "later", "too", "also", "back"}

THIRD_PERSON = {
    "he", "him", "his", "himself", "she", "her", "hers", "herself",
    "they", "them", "their", "theirs", "themself", "themselves",
}


def _feats(text: str) -> dict:
    if not text:
        return {}
    out = {}
    for item in text.split("|"):
        k, _, v = item.partition("=")
        out[k] = v
    return out


def _is_punct(form: str) -> bool:
    return all(c in string.punctuation or not c.isalnum() for c in form)


NUMBER_WORDS = {
    "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    "eleven", "twelve", "twenty", "hundred", "thousand", "million",
}


def _is_number(form: str) -> bool:
    return form.replace(",", "").replace(".", "").isdigit() or form.lower() in NUMBER_WORDS


def _verb_analysis(low: str):
    """(lemma, feats) when ``low`` looks like a form of a known verb."""
    if low in IRREGULAR_PAST:
        return IRREGULAR_PAST[low], _feats(_FIN_PAST)
    if low in VERB_LEMMAS:
        return low, _feats("VerbForm=Fin")
    for lemma in _VERB_ORDER:
        if third_singular(lemma) == low:
            return lemma, _feats(_FIN_PRES_3SG)
    for lemma in _VERB_ORDER:
        ed = lemma + "d" if lemma.endswith("e") else (lemma[:-1] + "ied" if lemma.endswith("y") and lemma[-2:-1] not in "aeiou" else lemma + "ed")
        if ed == low:
            return lemma, _feats(_FIN_PAST)
        ing = (lemma[:-1] if lemma.endswith("e") and lemma != "be" else lemma) + "ing"
        if ing == low:
            return lemma, _feats("VerbForm=Ger")
    return None


def _noun_number(low: str) -> tuple[str, str]:
    for sing, plur in IRREGULAR_PLURALS.items():
        if plur == low and sing != plur:
            return sing, "Plur"
    if low.endswith("men") and len(low) > 3:
        return low[:-3] + "man", "Plur"
    if low.endswith("ies") and len(low) > 4:
        return low[:-3] + "y", "Plur"
    if low.endswith("s") and not low.endswith(("ss", "us", "is")) and len(low) > 3:
        return low[:-1], "Plur"
    return low, "Sing"


def _tag(forms: list[str], lexicon: Lexicon) -> list[tuple[str, str, dict]]:
    """(lemma, upos, feats) per token."""
    tagged: list[tuple[str, str, dict]] = []
    for pos, form in enumerate(forms):
        low = form.lower()
        nxt = forms[pos + 1].lower() if pos + 1 < len(forms) else ""
        if _is_punct(form):
            tagged.append((form, "PUNCT", {}))
        elif _is_number(form):
            tagged.append((form, "NUM", {}))
        elif low == "her":
            if nxt and not _is_punct(nxt) and nxt not in ADPOSITIONS and nxt not in DETERMINERS \
                    and nxt not in TEMPORAL and nxt not in CCONJ and nxt not in SCONJ and nxt not in AUXILIARIES \
                    and nxt not in PRONOUNS and nxt not in POSS_DETERMINERS:
                tagged.append(("she", "PRON", _feats("Gender=Fem|Number=Sing|Person=3|Poss=Yes|" + _PRS)))
            else:
                tagged.append(("she", "PRON", _feats("Case=Acc|Gender=Fem|Number=Sing|Person=3|" + _PRS)))
        elif low in POSS_DETERMINERS:
            lemma, feats = POSS_DETERMINERS[low]
            tagged.append((lemma, "PRON", _feats(feats + "|" + _PRS)))
        elif low in PRONOUNS:
            lemma, feats = PRONOUNS[low]
            tagged.append((lemma, "PRON", _feats(feats)))
        elif low in AUXILIARIES:
            lemma, feats = AUXILIARIES[low]
            tagged.append((lemma, "AUX", _feats(feats)))
        elif low == "that" and (nxt in PRONOUNS or nxt in POSS_DETERMINERS or (pos + 1 < len(forms) and forms[pos + 1][:1].isupper())):
            tagged.append((low, "SCONJ", {}))
        elif low in DETERMINERS:
            tagged.append((low, "DET", {}))
        elif low in ADPOSITIONS:
            tagged.append((low, "ADP", {}))
        elif low in CCONJ:
            tagged.append((low, "CCONJ", {}))
        elif low in SCONJ:
            tagged.append((low, "SCONJ", {}))
        elif low in ("not", "n't", "to"):
            tagged.append((low, "PART", {}))
        elif form[:1].isupper() and (pos > 0 or lexicon.names.known(form)):
            tagged.append((form, "PROPN", _feats("Number=Sing")))
        elif low in ADVERBS or (low.endswith("ly") and len(low) > 4):
            tagged.append((low, "ADV", {}))
        elif low in ADJECTIVES:
            tagged.append((low, "ADJ", _feats("Degree=Pos")))
        else:
            verb = _verb_analysis(low)
            prev = tagged[-1] if tagged else None
            noun_context = prev is not None and prev[1] in ("DET", "ADJ") or (
                prev is not None and prev[1] == "PRON" and prev[2].get("Poss") == "Yes"
            )
            if verb is not None and not noun_context:
                tagged.append((verb[0], "VERB", verb[1]))
            else:
                lemma, number = _noun_number(low)
                tagged.append((lemma, "NOUN", _feats("Number=" + number)))
    return tagged


def _split_bare_clauses(clause: list[int], tagged) -> list[list[int]]:
    """Split "said she likes ..." style clauses lacking a complementizer.

    A new clause starts at a nominal that directly precedes a finite verb or
    auxiliary, once the current clause already has a predicate.
    """
    parts: list[list[int]] = []
    cur: list[int] = []
    has_pred = False
    for k in clause:
        upos, feats = tagged[k][1], tagged[k][2]
        if upos in ("VERB", "AUX") and feats.get("VerbForm") == "Fin":
            prev = cur[-1] if cur else None
            if (
                has_pred
                and prev is not None
                and len(cur) > 1
                and tagged[prev][1] in ("NOUN", "PROPN", "PRON")
                and tagged[prev][2].get("Poss") != "Yes"
            ):
                # keep determiners and adjectives with their noun
                cut = len(cur) - 1
                while cut > 1 and (
                    tagged[cur[cut - 1]][1] in ("DET", "ADJ", "NUM")
                    or tagged[cur[cut - 1]][2].get("Poss") == "Yes"
                ):
                    cut -= 1
                parts.append(cur[:cut])
                cur = cur[cut:]
            has_pred = True
        elif upos in ("VERB", "AUX"):
            has_pred = True
        cur.append(k)
    parts.append(cur)
    return parts


def _dependencies(tagged) -> list[tuple[int, str]]:
    """(head, deprel) per token, 1-based heads; always a tree rooted at one token."""
    n = len(tagged)
    upos = [t[1] for t in tagged]
    heads = [0] * n
    rels = ["dep"] * n

    # clauses: split at punctuation and conjunctions
    clauses: list[list[int]] = []
    cur: list[int] = []
    for k in range(n):
        if upos[k] in ("PUNCT", "CCONJ", "SCONJ") and cur:
            clauses.append(cur)
            cur = []
        cur.append(k)
    if cur:
        clauses.append(cur)
    clauses = [part for clause in clauses for part in _split_bare_clauses(clause, tagged)]

    preds: dict[int, int] = {}
    for c_idx, clause in enumerate(clauses):
        verbs = [k for k in clause if upos[k] == "VERB"]
        auxes = [k for k in clause if upos[k] == "AUX"]
        if verbs:
            preds[c_idx] = verbs[0]
        elif auxes:
            preds[c_idx] = auxes[0]
    if preds:
        root = preds[min(preds)]
    else:
        nominal = [k for k in range(n) if upos[k] in ("NOUN", "PROPN", "PRON")]
        root = nominal[0] if nominal else 0
    heads[root] = -1
    rels[root] = "root"

    def next_nominal(k: int, clause: list[int]) -> int | None:
        for q in clause:
            if q > k and upos[q] in ("NOUN", "PROPN"):
                return q
            if q > k and upos[q] in ("VERB", "AUX", "ADP"):
                return None
        return None

    for c_idx, clause in enumerate(clauses):
        pred = preds.get(c_idx)
        anchor = pred if pred is not None else root
        if pred is not None and pred != root:
            heads[pred] = root
            rels[pred] = "conj"
        for k in clause:
            if k == root or k == pred:
                continue
            u = upos[k]
            if u == "AUX" and pred is not None and upos[pred] == "VERB" and k < pred:
                heads[k], rels[k] = pred, "aux"
            elif u in ("DET", "ADJ", "NUM") or (u == "PRON" and tagged[k][2].get("Poss") == "Yes"):
                noun = next_nominal(k, clause)
                if noun is not None:
                    rel = {"DET": "det", "ADJ": "amod", "NUM": "nummod"}.get(u, "nmod:poss")
                    heads[k], rels[k] = noun, rel
                else:
                    heads[k], rels[k] = anchor, "obj" if u == "PRON" else "dep"
            elif u == "ADP":
                noun = next_nominal(k, clause)
                heads[k], rels[k] = (noun, "case") if noun is not None else (anchor, "dep")
            elif u in ("NOUN", "PROPN", "PRON"):
                if pred is not None and k < pred and not any(upos[q] in ("NOUN", "PROPN", "PRON") and k < q < pred for q in clause):
                    heads[k], rels[k] = pred, "nsubj"
                else:
                    before = k > 0 and upos[k - 1] == "ADP"
                    heads[k], rels[k] = anchor, "obl" if before else "obj"
            elif u == "PUNCT":
                heads[k], rels[k] = root, "punct"
            elif u in ("CCONJ", "SCONJ"):
                heads[k], rels[k] = anchor, "cc" if u == "CCONJ" else "mark"
            elif u == "ADV" or u == "PART":
                heads[k], rels[k] = anchor, "advmod"
            else:
                heads[k], rels[k] = anchor, "dep"
            if heads[k] == k:
                heads[k] = root if root != k else anchor
    # A noun head may itself hang off another noun only through det/amod chains,
    # which never point back to modifiers, so the structure stays acyclic.
    return [(0 if h == -1 else h + 1, r) for h, r in zip(heads, rels)]


def _pronoun_gender(low: str) -> Gender | None:
    if low in ("he", "him", "his", "himself"):
        return Gender.MASC
    if low in ("she", "her", "hers", "herself"):
        return Gender.FEM
    if low in THIRD_PERSON:
        return Gender.THEY
    return None


def _compatible(antecedent: Token, gender: Gender, lexicon: Lexicon) -> bool:
    if antecedent.upos == "PROPN":
        g = lexicon.names.gender_of(antecedent.form)
        if g is None:
            return True
        return gender is Gender.THEY or g is gender
    noun_gender = lexicon.nouns.gender_of(antecedent.lemma)
    if noun_gender is not None:
        return gender is Gender.THEY or noun_gender is gender
    return antecedent.lemma.lower() in ANIMATE_NOUNS


def _build(forms: list[str], sent_id: str, lexicon: Lexicon) -> AnnotatedSentence:
    tagged = _tag(forms, lexicon)
    deps = _dependencies(tagged)
    tokens = [
        Token(i, form, lemma, upos, feats, head, rel)
        for i, (form, (lemma, upos, feats), (head, rel)) in enumerate(zip(forms, tagged, deps), start=1)
    ]
    return AnnotatedSentence(sent_id, tuple(tokens))


def _link_coref(doc: list[AnnotatedSentence], config: HeuristicConfig, lexicon: Lexicon) -> list[AnnotatedSentence]:
    corefs: list[list[int | None]] = [[None] * len(s) for s in doc]
    next_id = 0
    for s_pos, sent in enumerate(doc):
        for tok in sent.tokens:
            gender = _pronoun_gender(tok.form.lower())
            if gender is None or tok.upos != "PRON":
                continue
            found = None
            for back in range(s_pos, max(-1, s_pos - config.coref_window_sentences), -1):
                cands = doc[back].tokens if back != s_pos else sent.tokens[: tok.index - 1]
                for cand in reversed(cands):
                    if cand.upos in ("NOUN", "PROPN") and cand.feat("Number") == "Sing" and _compatible(cand, gender, lexicon):
                        found = (back, cand.index)
                        break
                if found:
                    break
            if found is None:
                continue
            back, idx = found
            cid = corefs[back][idx - 1]
            if cid is None:
                cid = next_id
                next_id += 1
                corefs[back][idx - 1] = cid
            corefs[s_pos][tok.index - 1] = cid
    out = []
    for sent, ids in zip(doc, corefs):
        tokens = tuple(replace(t, coref=c) for t, c in zip(sent.tokens, ids))
        # Declares that coreference was resolved even when no cluster was found.
        out.append(replace(sent, tokens=tokens, meta={**sent.meta, COREF_META: "heuristic"}))
    return out


def link_coreference(sentences, config: HeuristicConfig | None = None, lexicon: Lexicon | None = None) -> list[AnnotatedSentence]:
    """Add heuristic coreference to already tagged sentences, keeping their tags."""
    return _link_coref(list(sentences), config or HeuristicConfig(), lexicon or default_lexicon())


def heuristic_annotate(tokens, config: HeuristicConfig | None = None, sent_id: str = "1", lexicon: Lexicon | None = None) -> AnnotatedSentence:
    forms = list(tokens)
    if not forms:
        raise ValueError("heuristic_annotate needs at least one token")
    return annotate_document([forms], config, [sent_id], lexicon)[0]


def annotate_document(sentences, config: HeuristicConfig | None = None, ids=None, lexicon: Lexicon | None = None) -> list[AnnotatedSentence]:
    """Annotate several token lists; coreference may link across ``coref_window_sentences``."""
    config = config or HeuristicConfig()
    lexicon = lexicon or default_lexicon()
    sentences = [list(s) for s in sentences]
    ids = list(ids) if ids is not None else [str(k) for k in range(1, len(sentences) + 1)]
    doc = [_build(forms, sid, lexicon) for forms, sid in zip(sentences, ids)]
    if config.enable_coref:
        doc = _link_coref(doc, config, lexicon)
    return doc
