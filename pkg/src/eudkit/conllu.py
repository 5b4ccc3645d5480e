"""CoNLL-U documents with empty nodes, multiword tokens and enhanced DEPS.

Parsing is strict: anything that would not survive a byte-exact round trip
through :func:`serialize_conllu` is rejected with an :class:`EUDError`.
FEATS and DEPS are the only columns that are canonicalised (sorted) on read.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from functools import cached_property, total_ordering
from typing import Iterable, NamedTuple, Optional, Sequence

from .errors import EUDError

ID, FORM, LEMMA, UPOS, XPOS, FEATS, HEAD, DEPREL, DEPS, MISC = range(10)

_SURFACE_RE = re.compile(r"^(0|[1-9][0-9]*)$")
_EMPTY_RE = re.compile(r"^(0|[1-9][0-9]*)\.([1-9][0-9]*)$")
_RANGE_RE = re.compile(r"^([1-9][0-9]*)-([1-9][0-9]*)$")


@total_ordering
@dataclass(frozen=True)
class NodeId:
    """Identity of a CoNLL-U line.

    Surface word ``i`` is ``NodeId(i)``, empty node ``i.k`` is
    ``NodeId(i, k)`` and multiword range ``i-j`` is ``NodeId(i, last=j)``.
    ``NodeId(0)`` is the artificial root and only ever appears as a head.
    """

    index: int
    sub: int = 0
    last: int = 0

    @classmethod
    def parse(cls, text: str) -> "NodeId":
        m = _SURFACE_RE.match(text)
        if m:
            return cls(int(m.group(1)))
        m = _EMPTY_RE.match(text)
        if m:
            return cls(int(m.group(1)), int(m.group(2)))
        m = _RANGE_RE.match(text)
        if m:
            first, last = int(m.group(1)), int(m.group(2))
            if first >= last:
                raise ValueError(f"range {text!r} must have first < last")
            return cls(first, last=last)
        raise ValueError(f"unparsable id {text!r}")

    @property
    def is_root(self) -> bool:
        return self.index == 0 and self.sub == 0 and self.last == 0

    @property
    def is_surface(self) -> bool:
        return self.index > 0 and self.sub == 0 and self.last == 0

    @property
    def is_empty(self) -> bool:
        return self.sub > 0

    @property
    def is_range(self) -> bool:
        return self.last > 0

    def sort_key(self) -> tuple[int, int]:
        # a range line precedes the first word it covers
        return (self.index, -1 if self.last else self.sub)

    def __lt__(self, other):
        if not isinstance(other, NodeId):
            return NotImplemented
        return self.sort_key() < other.sort_key()

    def __str__(self):
        if self.last:
            return f"{self.index}-{self.last}"
        if self.sub:
            return f"{self.index}.{self.sub}"
        return str(self.index)

    def __repr__(self):
        return f"NodeId({self})"


ROOT = NodeId(0)


def feats_key(item: tuple[str, str]) -> tuple[str, str]:
    return (item[0].lower(), item[0])


def deps_key(item: tuple[NodeId, str]) -> tuple[tuple[int, int], str]:
    return (item[0].sort_key(), item[1])


def sort_deps(deps: Iterable[tuple[NodeId, str]]) -> tuple[tuple[NodeId, str], ...]:
    """Canonical DEPS order: by head, then label; duplicates dropped."""
    return tuple(sorted(set(deps), key=deps_key))


@dataclass(frozen=True)
class Token:
    """One CoNLL-U line. Absent (``_``) string columns are stored as ``""``."""

    id: NodeId
    form: str = ""
    lemma: str = ""
    upos: str = ""
    xpos: str = ""
    feats: tuple[tuple[str, str], ...] = ()
    head: Optional[NodeId] = None
    deprel: str = ""
    deps: tuple[tuple[NodeId, str], ...] = ()
    misc: str = ""

    def feat(self, name: str) -> Optional[str]:
        for key, value in self.feats:
            if key == name:
                return value
        return None

    def with_deps(self, deps: Iterable[tuple[NodeId, str]]) -> "Token":
        return replace(self, deps=sort_deps(deps))


class Diagnostic(NamedTuple):
    code: str
    node: Optional[NodeId]
    message: str = ""


@dataclass(frozen=True)
class Sentence:
    comments: tuple[str, ...] = ()
    tokens: tuple[Token, ...] = ()

    @cached_property
    def _by_id(self) -> dict[NodeId, Token]:
        return {t.id: t for t in self.tokens}

    @property
    def words(self) -> list[Token]:
        """Surface (syntactic) words, excluding ranges and empty nodes."""
        return [t for t in self.tokens if t.id.is_surface]

    @property
    def empty_nodes(self) -> list[Token]:
        return [t for t in self.tokens if t.id.is_empty]

    @property
    def word_count(self) -> int:
        return sum(1 for t in self.tokens if t.id.is_surface)

    def node_ids(self) -> list[NodeId]:
        """Graph nodes: surface words and empty nodes (not ranges, not root)."""
        return [t.id for t in self.tokens if not t.id.is_range]

    def get(self, node: NodeId) -> Optional[Token]:
        return self._by_id.get(node)

    def __contains__(self, node: NodeId) -> bool:
        return node in self._by_id

    def with_tokens(self, tokens: Iterable[Token]) -> "Sentence":
        return Sentence(self.comments, tuple(sorted(tokens, key=lambda t: t.id.sort_key())))

    @property
    def text(self) -> Optional[str]:
        for c in self.comments:
            if c.startswith("# text = "):
                return c[len("# text = "):]
        return None


@dataclass(frozen=True)
class Document:
    sentences: tuple[Sentence, ...] = field(default_factory=tuple)

    def __len__(self):
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)


# ---------------------------------------------------------------------------
# validation


def validate_sentence(s: Sentence) -> list[Diagnostic]:
    """Check every Sentence/Token invariant; an empty list means valid."""
    diags: list[Diagnostic] = []
    if not s.tokens:
        return [Diagnostic("NO_TOKENS", None, "sentence has no token lines")]

    seen: set[NodeId] = set()
    expected = 1
    prev_key = None
    for tok in s.tokens:
        nid = tok.id
        if nid in seen:
            diags.append(Diagnostic("DUPLICATE_ID", nid, f"id {nid} repeated"))
        seen.add(nid)
        if nid.is_root:
            diags.append(Diagnostic("BAD_ID", nid, "0 is not a valid token id"))
            continue
        contiguous = True
        if nid.is_surface:
            contiguous = nid.index == expected
            if not contiguous:
                diags.append(Diagnostic("NONCONTIGUOUS_IDS", nid, f"expected word {expected}, found {nid}"))
            expected = nid.index + 1
        key = nid.sort_key()
        if prev_key is not None and key <= prev_key:
            if contiguous:
                diags.append(Diagnostic("MISPLACED_NODE", nid, f"{nid} out of order"))
        else:
            prev_key = key

    n = s.word_count
    words = {NodeId(i) for i in range(1, n + 1)}
    empties = {t.id for t in s.tokens if t.id.is_empty}
    heads_ok = words | empties | {ROOT}

    for tok in s.tokens:
        nid = tok.id
        if nid.is_range:
            if nid.last > n:
                diags.append(Diagnostic("INVALID_RANGE", nid, f"range {nid} exceeds {n} words"))
            if tok.head is not None or tok.deprel or tok.deps:
                diags.append(Diagnostic("RANGE_HAS_SYNTAX", nid, "multiword range must have _ in HEAD, DEPREL, DEPS"))
            continue
        if nid.is_empty:
            if nid.index > n:
                diags.append(Diagnostic("DANGLING_EMPTY_NODE", nid, f"base {nid.index} exceeds {n} words"))
            if tok.head is not None or tok.deprel:
                diags.append(Diagnostic("EMPTY_NODE_HAS_HEAD", nid, "empty node must have _ in HEAD and DEPREL"))
        if tok.head is not None:
            if not (tok.head.is_surface or tok.head.is_root):
                diags.append(Diagnostic("HEAD_NOT_SURFACE", nid, f"HEAD {tok.head} is not a word or 0"))
            elif tok.head not in heads_ok:
                diags.append(Diagnostic("DANGLING_HEAD", nid, f"HEAD {tok.head} does not exist"))
            elif tok.head == nid:
                diags.append(Diagnostic("SELF_LOOP", nid, "token heads itself"))
        if list(tok.feats) != sorted(tok.feats, key=feats_key):
            diags.append(Diagnostic("UNSORTED_FEATS", nid, "FEATS not sorted"))
        if len({k for k, _ in tok.feats}) != len(tok.feats):
            diags.append(Diagnostic("DUPLICATE_FEATS", nid, "repeated feature name"))
        if list(tok.deps) != sorted(tok.deps, key=deps_key):
            diags.append(Diagnostic("UNSORTED_DEPS", nid, "DEPS not sorted"))
        if len(set(tok.deps)) != len(tok.deps):
            diags.append(Diagnostic("DUPLICATE_DEPS", nid, "repeated head:label pair"))
        for head, label in tok.deps:
            if not label:
                diags.append(Diagnostic("EMPTY_LABEL", nid, f"empty label for head {head}"))
            if head not in heads_ok:
                diags.append(Diagnostic("DANGLING_HEAD", nid, f"DEPS head {head} does not exist"))
            elif head == nid:
                diags.append(Diagnostic("SELF_LOOP", nid, "enhanced edge to itself"))
    return diags


# ---------------------------------------------------------------------------
# parsing


def _field(value: str) -> str:
    return "" if value == "_" else value


def _parse_feats(value: str) -> tuple[tuple[str, str], ...]:
    if value == "_":
        return ()
    items = []
    for part in value.split("|"):
        name, sep, val = part.partition("=")
        if not sep or not name or not val:
            raise ValueError(f"malformed feature {part!r}")
        items.append((name, val))
    if len({k for k, _ in items}) != len(items):
        raise ValueError(f"repeated feature name in {value!r}")
    return tuple(sorted(items, key=feats_key))


def _parse_deps(value: str) -> tuple[tuple[NodeId, str], ...]:
    if value == "_":
        return ()
    items = []
    for part in value.split("|"):
        head, sep, label = part.partition(":")
        if not sep or not label:
            raise ValueError(f"malformed DEPS entry {part!r}")
        nid = NodeId.parse(head)
        if nid.is_range:
            raise ValueError(f"DEPS head {head!r} is a range")
        items.append((nid, label))
    if len(set(items)) != len(items):
        raise EUDError("DUPLICATE_DEPS", f"repeated entry in {value!r}")
    return tuple(sorted(items, key=deps_key))


def _parse_token(line: str) -> Token:
    cols = line.split("\t")
    if len(cols) != 10:
        raise EUDError("COLUMN_COUNT", f"expected 10 tab-separated columns, found {len(cols)}")
    for i, c in enumerate(cols):
        if c == "":
            raise EUDError("EMPTY_FIELD", f"column {i + 1} is empty")
        # FORM, LEMMA and MISC may hold inner spaces; no column may be padded
        if c != c.strip() or (i not in (FORM, LEMMA, MISC) and any(ch.isspace() for ch in c)):
            raise EUDError("WHITESPACE", f"column {i + 1} has stray whitespace")
    try:
        nid = NodeId.parse(cols[ID])
    except ValueError as exc:
        raise EUDError("BAD_ID", str(exc)) from None
    try:
        head = None if cols[HEAD] == "_" else NodeId.parse(cols[HEAD])
    except ValueError as exc:
        raise EUDError("BAD_HEAD", str(exc), node=nid) from None
    try:
        feats = _parse_feats(cols[FEATS])
    except ValueError as exc:
        raise EUDError("BAD_FEATS", str(exc), node=nid) from None
    try:
        deps = _parse_deps(cols[DEPS])
    except EUDError as exc:
        raise EUDError(exc.code, exc.message, node=nid) from None
    except ValueError as exc:
        raise EUDError("BAD_DEPS", str(exc), node=nid) from None
    return Token(
        id=nid,
        form=_field(cols[FORM]),
        lemma=_field(cols[LEMMA]),
        upos=_field(cols[UPOS]),
        xpos=_field(cols[XPOS]),
        feats=feats,
        head=head,
        deprel=_field(cols[DEPREL]),
        deps=deps,
        misc=_field(cols[MISC]),
    )


def parse_conllu(text: str) -> Document:
    """Parse CoNLL-U text; raises :class:`EUDError` on the first problem."""
    if "\r" in text:
        raise EUDError("LINE_ENDING", "CR characters are not accepted; use LF line endings")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()

    sentences: list[Sentence] = []
    comments: list[str] = []
    tokens: list[Token] = []
    token_lines: dict[NodeId, int] = {}
    start = None

    def finish(lineno):
        ordinal = len(sentences) + 1
        if not tokens:
            raise EUDError("NO_TOKENS", "comment block without tokens", sentence=ordinal, line=start)
        sent = Sentence(tuple(comments), tuple(tokens))
        problems = validate_sentence(sent)
        if problems:
            d = problems[0]
            raise EUDError(d.code, d.message, sentence=ordinal, line=token_lines.get(d.node, lineno), node=d.node)
        sentences.append(sent)

    for lineno, line in enumerate(lines, start=1):
        ordinal = len(sentences) + 1
        if line == "":
            if start is None:
                raise EUDError("EXTRA_BLANK_LINE", "unexpected blank line", sentence=ordinal, line=lineno)
            finish(lineno)
            comments, tokens, token_lines, start = [], [], {}, None
            continue
        if start is None:
            start = lineno
        if line.startswith("#"):
            if tokens:
                raise EUDError("COMMENT_AFTER_TOKENS", "comment inside token block", sentence=ordinal, line=lineno)
            comments.append(line)
            continue
        if line.strip() == "":
            raise EUDError("WHITESPACE", "whitespace-only line", sentence=ordinal, line=lineno)
        try:
            tok = _parse_token(line)
        except EUDError as exc:
            raise exc.located(sentence=ordinal, line=lineno) from None
        token_lines.setdefault(tok.id, lineno)
        tokens.append(tok)
    if start is not None:
        finish(len(lines))
    return Document(tuple(sentences))


def read_conllu(path) -> Document:
    with open(path, encoding="utf-8", newline="") as f:
        return parse_conllu(f.read())


# ---------------------------------------------------------------------------
# serialisation


def _out(value: str) -> str:
    return value if value else "_"


def format_token(tok: Token) -> str:
    feats = "|".join(f"{k}={v}" for k, v in tok.feats) or "_"
    deps = "|".join(f"{h}:{label}" for h, label in sort_deps(tok.deps)) or "_"
    return "\t".join([
        str(tok.id),
        _out(tok.form),
        _out(tok.lemma),
        _out(tok.upos),
        _out(tok.xpos),
        feats,
        "_" if tok.head is None else str(tok.head),
        _out(tok.deprel),
        deps,
        _out(tok.misc),
    ])


def serialize_sentence(s: Sentence) -> str:
    lines = list(s.comments) + [format_token(t) for t in s.tokens]
    return "\n".join(lines) + "\n\n"


def serialize_conllu(doc: Document | Sequence[Sentence]) -> str:
    sentences = doc.sentences if isinstance(doc, Document) else doc
    return "".join(serialize_sentence(s) for s in sentences)


def write_conllu(path, doc: Document) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(serialize_conllu(doc))
