"""Slow reference implementations used as test oracles."""

import re
from functools import lru_cache

from gecbias.parallel import OpKind

RANK = {OpKind.MATCH: 0, OpKind.SUB: 1, OpKind.DEL: 2, OpKind.INS: 3}


def oracle_alignment(a, b):
    """Enumerate every optimal path; pick the one preferred from the end."""

    @lru_cache(maxsize=None)
    def paths(i, j):
        # all (cost, ops) for a[:i] vs b[:j] with minimal cost
        if i == 0 and j == 0:
            return 0, [()]
        options = []
        if i and j:
            kind = OpKind.MATCH if a[i - 1] == b[j - 1] else OpKind.SUB
            c, ps = paths(i - 1, j - 1)
            options.append((c + (kind is OpKind.SUB), [p + ((kind, i - 1, j - 1),) for p in ps]))
        if i:
            c, ps = paths(i - 1, j)
            options.append((c + 1, [p + ((OpKind.DEL, i - 1, None),) for p in ps]))
        if j:
            c, ps = paths(i, j - 1)
            options.append((c + 1, [p + ((OpKind.INS, None, j - 1),) for p in ps]))
        best = min(c for c, _ in options)
        return best, [p for c, ps in options if c == best for p in ps]

    cost, all_paths = paths(len(a), len(b))
    chosen = min(all_paths, key=lambda p: [RANK[op[0]] for op in reversed(p)])
    return cost, chosen


def oracle_spans(a, b):
    """(start, end, correction) per maximal run of non-MATCH ops on the oracle path."""
    _, ops = oracle_alignment(tuple(a), tuple(b))
    spans, run, pos = [], None, 0
    for kind, i, j in list(ops) + [(OpKind.MATCH, None, None)]:
        if kind is OpKind.MATCH:
            if run is not None:
                spans.append((run[0], pos, " ".join(run[1])))
                run = None
        else:
            if run is None:
                run = (pos, [])
            if j is not None:
                run[1].append(b[j])
        if i is not None:
            pos += 1
    return spans


def edit_distance(a, b):
    """Plain recursive Levenshtein distance."""

    @lru_cache(maxsize=None)
    def d(i, j):
        if i == 0 or j == 0:
            return i + j
        return min(d(i - 1, j) + 1, d(i, j - 1) + 1, d(i - 1, j - 1) + (a[i - 1] != b[j - 1]))

    return d(len(a), len(b))


SINGULAR_VERB_FORMS = {"is", "was", "has", "does", "'s", "isn't", "wasn't", "hasn't", "doesn't"}


def looks_third_singular(form, lemma):
    """Regex view of a third-person-singular present form of ``lemma``."""
    form, lemma = form.lower(), lemma.lower()
    if form in SINGULAR_VERB_FORMS:
        return True
    if form == lemma or lemma in ("_", ""):
        return False
    pattern = rf"{re.escape(lemma)}(s|es)"
    if lemma.endswith("y"):
        pattern += rf"|{re.escape(lemma[:-1])}ies"
    return re.fullmatch(pattern, form) is not None


def subject_verbs(sentence, subject_index):
    """Finite verbs governed by a subject, found by walking the tree directly.

    The head of the subject, its aux/cop dependents, and conjoined predicates
    that have no subject of their own.
    """
    tokens = {t.index: t for t in sentence.tokens}
    children = {}
    for t in sentence.tokens:
        children.setdefault(t.head, []).append(t)
    found = []
    stack = [tokens[subject_index].head]
    while stack:
        pred = stack.pop()
        if pred == 0:
            continue
        found.append(tokens[pred])
        for child in children.get(pred, []):
            if child.deprel in ("aux", "cop", "aux:pass"):
                found.append(child)
            elif child.deprel == "conj" and not any(g.deprel.startswith("nsubj") for g in children.get(child.index, [])):
                stack.append(child.index)
    return [t for t in found if t.feats.get("VerbForm") == "Fin"]
