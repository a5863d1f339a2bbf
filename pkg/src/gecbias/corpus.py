"""Data model plus readers/writers for annotated sentences, parallel pairs and M2.

Annotated sentences use a 10-column CoNLL-U layout. Coreference cluster ids
ride in the MISC column as ``Coref=<int>``. Parallel corpora are CoNLL-U
blocks carrying ``# pair_id = ...`` and ``# side = source|target`` comments.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable

NOOP_LABEL = "noop"
NONE_FIELD = "-NONE-"


class ParseError(ValueError):
    """Malformed input. ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvariantError(ValueError):
    """A structure violates one of its documented invariants."""


@dataclass(frozen=True)
class Token:
    index: int
    form: str
    lemma: str = "_"
    upos: str = "_"
    feats: dict = field(default_factory=dict)
    head: int = 0
    deprel: str = "_"
    coref: int | None = None
    xpos: str = "_"
    deps: str = "_"
    misc: dict = field(default_factory=dict)

    def feat(self, key: str, default: str | None = None) -> str | None:
        return self.feats.get(key, default)

    def with_form(self, form: str, lemma: str | None = None) -> "Token":
        return replace(self, form=form, lemma=self.lemma if lemma is None else lemma)


@dataclass(frozen=True)
class AnnotatedSentence:
    id: str
    tokens: tuple
    # "# key = value" comments other than sent_id, in file order; value None
    # for free-form comments.
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.tokens, tuple):
            object.__setattr__(self, "tokens", tuple(self.tokens))

    def __len__(self) -> int:
        return len(self.tokens)

    def __getitem__(self, index: int) -> Token:
        """1-based token access, mirroring ``Token.index``."""
        if index < 1 or index > len(self.tokens):
            raise IndexError(index)
        return self.tokens[index - 1]

    @property
    def forms(self) -> list[str]:
        return [t.form for t in self.tokens]

    @property
    def text(self) -> str:
        return " ".join(self.forms)

    def children(self, index: int) -> list[Token]:
        return [t for t in self.tokens if t.head == index]

    @property
    def root(self) -> Token | None:
        roots = [t for t in self.tokens if t.head == 0]
        return roots[0] if len(roots) == 1 else None

    def clusters(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for t in self.tokens:
            if t.coref is not None:
                out.setdefault(t.coref, []).append(t.index)
        return out

    def validate(self) -> None:
        """Raise InvariantError unless indices, heads and the tree shape are sane."""
        n = len(self.tokens)
        if n == 0:
            raise InvariantError(f"sentence {self.id!r} has no tokens")
        for pos, t in enumerate(self.tokens, start=1):
            if t.index != pos:
                raise InvariantError(f"sentence {self.id!r}: token index {t.index} at position {pos}")
            if not 0 <= t.head <= n:
                raise InvariantError(f"sentence {self.id!r}: head {t.head} of token {pos} out of range")
            if t.head == t.index:
                raise InvariantError(f"sentence {self.id!r}: token {pos} heads itself")
            if t.coref is not None and t.coref < 0:
                raise InvariantError(f"sentence {self.id!r}: negative coref id on token {pos}")
        roots = [t.index for t in self.tokens if t.head == 0]
        if len(roots) != 1:
            raise InvariantError(f"sentence {self.id!r}: expected one root, found {len(roots)}")
        for t in self.tokens:
            seen = set()
            cur = t.index
            while cur != 0:
                if cur in seen:
                    raise InvariantError(f"sentence {self.id!r}: cycle through token {cur}")
                seen.add(cur)
                cur = self.tokens[cur - 1].head


@dataclass(frozen=True)
class ParallelPair:
    id: str
    source: AnnotatedSentence
    target: AnnotatedSentence

    def __post_init__(self):
        if not self.id:
            raise InvariantError("parallel pair id must be nonempty")
        if not len(self.source) or not len(self.target):
            raise InvariantError(f"pair {self.id!r}: both sides must be nonempty")


@dataclass(frozen=True)
class Edit:
    """One correction edit over original token offsets.

    ``label`` is the raw M2 type field (``R:VERB:SVA``, ``noop``...). Deletions
    carry an empty correction; noops carry ``-NONE-`` and span ``-1 -1``.
    """

    start: int
    end: int
    correction: str
    label: str = "OTHER"
    required: str = "REQUIRED"
    comment: str = NONE_FIELD
    annotator: int = 0

    @property
    def op(self) -> str:
        """M, R, U or NOOP, derived from the span and correction."""
        if self.start < 0 or self.label.lower() == NOOP_LABEL:
            return "NOOP"
        if self.start == self.end:
            return "M"
        return "U" if self.correction == "" else "R"

    @property
    def category(self) -> str:
        if self.op == "NOOP":
            return NOOP_LABEL
        head, sep, rest = self.label.partition(":")
        if sep and head in ("M", "R", "U"):
            return rest
        return self.label

    @property
    def key(self) -> tuple[int, int, str]:
        return (self.start, self.end, self.correction)


def make_noop(annotator: int = 0) -> Edit:
    return Edit(-1, -1, NONE_FIELD, NOOP_LABEL, "REQUIRED", NONE_FIELD, annotator)


@dataclass(frozen=True)
class M2Record:
    original_tokens: tuple
    # Flat, file-ordered; use by_annotator() for the grouped view.
    edits: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "original_tokens", tuple(self.original_tokens))
        object.__setattr__(self, "edits", tuple(self.edits))

    def by_annotator(self) -> dict[int, list[Edit]]:
        groups: dict[int, list[Edit]] = {}
        for e in self.edits:
            groups.setdefault(e.annotator, []).append(e)
        return dict(sorted(groups.items()))

    def validate(self) -> None:
        n = len(self.original_tokens)
        for annotator, edits in self.by_annotator().items():
            last_end = 0
            last_start = -1
            for e in edits:
                if e.op == "NOOP":
                    continue
                if not (0 <= e.start <= e.end <= n):
                    raise InvariantError(f"edit span [{e.start},{e.end}) outside [0,{n}]")
                if e.start < last_start or e.start < last_end:
                    raise InvariantError(
                        f"annotator {annotator}: edits unsorted or overlapping at [{e.start},{e.end})"
                    )
                last_start, last_end = e.start, e.end


# --------------------------------------------------------------------- CoNLL-U


def _parse_kv(field_text: str, line_no: int, what: str) -> dict:
    if field_text == "_" or field_text == "":
        return {}
    out = {}
    for item in field_text.split("|"):
        key, sep, value = item.partition("=")
        if not sep:
            # Bare MISC flags like SpaceAfter-less tags; keep them verbatim.
            out[key] = None
            continue
        out[key] = value
    return out


def _format_kv(mapping: dict) -> str:
    if not mapping:
        return "_"
    return "|".join(k if v is None else f"{k}={v}" for k, v in mapping.items())


def _parse_token(line: str, line_no: int) -> Token | None:
    cols = line.split("\t")
    if len(cols) != 10:
        raise ParseError(f"expected 10 tab-separated columns, found {len(cols)}: {line!r}", line_no)
    idx_text = cols[0]
    if "-" in idx_text or "." in idx_text:
        # multiword ranges and empty nodes are not part of the token layer
        return None
    try:
        index = int(idx_text)
    except ValueError:
        raise ParseError(f"non-integer token id {idx_text!r}", line_no) from None
    try:
        head = int(cols[6])
    except ValueError:
        raise ParseError(f"non-integer head {cols[6]!r}", line_no) from None
    misc = _parse_kv(cols[9], line_no, "MISC")
    coref = None
    if "Coref" in misc:
        raw = misc.pop("Coref")
        try:
            coref = int(raw)
        except (TypeError, ValueError):
            raise ParseError(f"non-integer Coref value {raw!r}", line_no) from None
        if coref < 0:
            raise ParseError(f"negative Coref value {coref}", line_no)
    return Token(
        index=index,
        form=cols[1],
        lemma=cols[2],
        upos=cols[3],
        xpos=cols[4],
        feats=_parse_kv(cols[5], line_no, "FEATS"),
        head=head,
        deprel=cols[7],
        deps=cols[8],
        misc=misc,
        coref=coref,
    )


def _blocks(text: str) -> Iterable[list[tuple[int, str]]]:
    block: list[tuple[int, str]] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if line.strip() == "":
            if block:
                yield block
                block = []
            continue
        block.append((line_no, line))
    if block:
        yield block


def parse_conllu(text: str) -> list[AnnotatedSentence]:
    sentences = []
    for number, block in enumerate(_blocks(text), start=1):
        sent_id = None
        meta: dict = {}
        tokens = []
        for line_no, line in block:
            if line.startswith("#"):
                body = line[1:].strip()
                key, sep, value = body.partition("=")
                if sep:
                    key, value = key.strip(), value.strip()
                    if key == "sent_id":
                        sent_id = value
                    else:
                        meta[key] = value
                else:
                    meta[body] = None
                continue
            tok = _parse_token(line, line_no)
            if tok is not None:
                tokens.append(tok)
        if not tokens:
            raise ParseError("sentence block without tokens", block[0][0])
        sentences.append(AnnotatedSentence(sent_id if sent_id is not None else str(number), tuple(tokens), meta))
    return sentences


def format_token(t: Token) -> str:
    misc = dict(t.misc)
    if t.coref is not None:
        misc["Coref"] = str(t.coref)
    return "\t".join(
        [
            str(t.index),
            t.form,
            t.lemma,
            t.upos,
            t.xpos,
            _format_kv(t.feats),
            str(t.head),
            t.deprel,
            t.deps,
            _format_kv(misc),
        ]
    )


def emit_conllu(sentences: Iterable[AnnotatedSentence]) -> str:
    chunks = []
    for s in sentences:
        lines = [f"# sent_id = {s.id}"]
        for key, value in s.meta.items():
            lines.append(f"# {key}" if value is None else f"# {key} = {value}")
        lines.extend(format_token(t) for t in s.tokens)
        chunks.append("\n".join(lines) + "\n\n")
    return "".join(chunks)


def sentence_from_forms(forms: Iterable[str], sent_id: str = "1") -> AnnotatedSentence:
    """Bare sentence (no annotations) from pre-tokenized forms; heads are flat."""
    forms = list(forms)
    tokens = [Token(i, f, head=0 if i == 1 else 1, deprel="root" if i == 1 else "dep") for i, f in enumerate(forms, 1)]
    return AnnotatedSentence(sent_id, tuple(tokens))


# -------------------------------------------------------------------- parallel


def parse_parallel(text: str) -> list[ParallelPair]:
    """Group side-tagged CoNLL-U blocks into pairs, ordered by first appearance."""
    order: list[str] = []
    sides: dict[str, dict[str, AnnotatedSentence]] = {}
    for sent in parse_conllu(text):
        pair_id = sent.meta.get("pair_id")
        side = sent.meta.get("side")
        if not pair_id:
            raise ParseError(f"sentence {sent.id!r} lacks '# pair_id'")
        if side not in ("source", "target"):
            raise ParseError(f"sentence {sent.id!r} has side {side!r}; expected source or target")
        if pair_id not in sides:
            order.append(pair_id)
            sides[pair_id] = {}
        if side in sides[pair_id]:
            raise ParseError(f"duplicate {side} side for pair {pair_id!r}")
        sides[pair_id][side] = sent
    unpaired = [pid for pid in order if len(sides[pid]) != 2]
    if unpaired:
        raise ParseError("unpaired: " + ", ".join(unpaired))
    return [ParallelPair(pid, sides[pid]["source"], sides[pid]["target"]) for pid in order]


def _tag_side(sent: AnnotatedSentence, pair_id: str, side: str) -> AnnotatedSentence:
    meta = {"pair_id": pair_id, "side": side}
    meta.update({k: v for k, v in sent.meta.items() if k not in meta})
    return replace(sent, meta=meta)


def emit_parallel(pairs: Iterable[ParallelPair]) -> str:
    sentences = []
    for p in pairs:
        sentences.append(_tag_side(p.source, p.id, "source"))
        sentences.append(_tag_side(p.target, p.id, "target"))
    return emit_conllu(sentences)


# -------------------------------------------------------------------------- M2


def _parse_edit_line(line: str, line_no: int) -> Edit:
    fields = line[2:].split("|||")
    if len(fields) != 6:
        raise ParseError(f"expected 6 '|||'-separated fields in edit line, found {len(fields)}", line_no)
    span = fields[0].split()
    if len(span) != 2:
        raise ParseError(f"bad edit span {fields[0]!r}", line_no)
    try:
        start, end = int(span[0]), int(span[1])
        annotator = int(fields[5])
    except ValueError:
        raise ParseError(f"non-integer span or annotator in {line!r}", line_no) from None
    if end < start:
        raise ParseError(f"edit span end {end} < start {start}", line_no)
    return Edit(start, end, fields[2], fields[1], fields[3], fields[4], annotator)


def parse_m2(text: str) -> list[M2Record]:
    records = []
    current_tokens = None
    current_edits: list[Edit] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if line.startswith("S ") or line == "S":
            if current_tokens is not None:
                records.append(M2Record(current_tokens, current_edits))
            current_tokens = line[2:].split(" ") if len(line) > 2 else []
            current_edits = []
        elif line.startswith("A "):
            if current_tokens is None:
                raise ParseError("edit line before any sentence line", line_no)
            current_edits.append(_parse_edit_line(line, line_no))
        elif line.strip() == "":
            if current_tokens is not None:
                records.append(M2Record(current_tokens, current_edits))
                current_tokens = None
                current_edits = []
        else:
            raise ParseError(f"unrecognised M2 line {line!r}", line_no)
    if current_tokens is not None:
        records.append(M2Record(current_tokens, current_edits))
    return records


def format_edit(e: Edit) -> str:
    return f"A {e.start} {e.end}|||{e.label}|||{e.correction}|||{e.required}|||{e.comment}|||{e.annotator}"


def emit_m2(records: Iterable[M2Record]) -> str:
    chunks = []
    for r in records:
        lines = ["S " + " ".join(r.original_tokens)]
        lines.extend(format_edit(e) for e in r.edits)
        chunks.append("\n".join(lines) + "\n\n")
    return "".join(chunks)
