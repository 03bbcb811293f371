"""Surface parser for Megalodon-style proof scripts.

Recognizes just enough structure for supervision work: section markers,
definitions, theorems (``Lemma`` is accepted as a synonym), axioms, their
exact line spans, and whether a proof still contains an ``admit.``. Nothing
here understands tactics or types; proof bodies are opaque text.

Comment syntax is ``(** ... **)`` with no nesting: the first ``**)`` closes.
A statement runs to the first line that ends with ``.`` outside comments; a
theorem's proof runs to the first line whose last token is ``Qed.`` or
``admit.``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

ITEM_KEYWORDS = {
    "Definition": "Definition",
    "Theorem": "Theorem",
    "Lemma": "Theorem",  # informal synonym
    "Axiom": "Axiom",
    "Section": "SectionBegin",
    "End": "SectionEnd",
}

# Declaration-like lines that are skipped, not parsed as items.
OPAQUE_KEYWORDS = {"Let", "Variable"}

TERMINATORS = ("Qed.", "admit.")

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_SECTION_TAG = re.compile(r"§(\d{2})(?!\d)")


class ParseError(Exception):
    """Base class for surface-parse failures."""


class UnterminatedComment(ParseError):
    def __init__(self, line: int):
        super().__init__(f"comment opened on line {line} is never closed")
        self.line = line


class MissingTerminator(ParseError):
    def __init__(self, name: str, detail: str = ""):
        msg = f"item {name!r} has no terminator"
        super().__init__(msg + (f": {detail}" if detail else ""))
        self.name = name


class DuplicateName(ParseError):
    def __init__(self, name: str):
        super().__init__(f"name {name!r} declared twice")
        self.name = name


class MarkerNotFound(ParseError):
    def __init__(self, marker: str):
        super().__init__(f"no line starts with {marker!r}")
        self.marker = marker


class ItemKind(str, Enum):
    SECTION_BEGIN = "SectionBegin"
    SECTION_END = "SectionEnd"
    DEFINITION = "Definition"
    THEOREM = "Theorem"
    AXIOM = "Axiom"


@dataclass(frozen=True)
class ProofItem:
    """One parsed top-level item with its exact (1-based, inclusive) span.

    statement_text and proof_text hold the original file lines, comments
    included; proof_text is empty for everything but theorems.
    """

    kind: ItemKind
    name: str
    statement_text: str
    proof_text: str
    line_start: int
    line_end: int
    direct_admit: bool
    section_tag: int | None = None


@dataclass(frozen=True)
class EditRegionPolicy:
    """Edit boundary: the first line starting with ``boundary_marker``.

    Lines strictly before ``boundary_line`` are read-only for the agent.
    """

    boundary_marker: str
    boundary_line: int

    @classmethod
    def resolve(cls, text: str, marker: str) -> "EditRegionPolicy":
        return cls(boundary_marker=marker, boundary_line=resolve_boundary(text, marker))


def _comment_spans(text: str) -> list[tuple[int, int]]:
    """Half-open (start, end) offsets of every comment, first ``**)`` closes."""
    spans = []
    i = 0
    n = len(text)
    while True:
        i = text.find("(**", i)
        if i < 0:
            return spans
        close = text.find("**)", i + 3)
        if close < 0:
            raise UnterminatedComment(text.count("\n", 0, i) + 1)
        spans.append((i, close + 3))
        i = close + 3


def strip_comments(text: str) -> str:
    """Remove every comment span entirely, newlines inside included; all
    other bytes are preserved."""
    spans = _comment_spans(text)
    out = []
    prev = 0
    for start, end in spans:
        out.append(text[prev:start])
        prev = end
    out.append(text[prev:])
    return "".join(out)


def mask_comments(text: str) -> str:
    """Blank out comments while keeping every newline, so offsets and line
    numbers still refer to the original text."""
    chars = list(text)
    for start, end in _comment_spans(text):
        for k in range(start, end):
            if chars[k] != "\n":
                chars[k] = " "
    return "".join(chars)


def resolve_boundary(text: str, marker: str) -> int:
    """1-based number of the first line starting with marker."""
    if not marker:
        raise ValueError("marker must be non-empty")
    for i, line in enumerate(text.split("\n")):
        if line.startswith(marker):
            return i + 1
    raise MarkerNotFound(marker)


def count_content_lines(span_text: str) -> int:
    """Lines of the span still carrying non-whitespace after comment removal.

    Comments that straddle the span edges are tolerated: an unclosed opener
    blanks the rest of the span, a closer without an opener blanks the front.
    """
    chars = list(span_text)
    n = len(chars)
    first_open = span_text.find("(**")
    first_close = span_text.find("**)")
    i = 0
    if 0 <= first_close and (first_open < 0 or first_close < first_open):
        # span starts inside a comment
        for k in range(first_close + 3):
            if chars[k] != "\n":
                chars[k] = " "
        i = first_close + 3
    while i < n:
        if span_text.startswith("(**", i):
            close = span_text.find("**)", i + 3)
            end = n if close < 0 else close + 3
            for k in range(i, end):
                if chars[k] != "\n":
                    chars[k] = " "
            i = end
        else:
            i += 1
    return sum(1 for line in "".join(chars).split("\n") if line.strip())


def _section_tags(text: str) -> list[tuple[int, int]]:
    """(offset, section) for every in-range §NN marker inside a comment."""
    tags = []
    for start, end in _comment_spans(text):
        for m in _SECTION_TAG.finditer(text, start, end):
            value = int(m.group(1))
            if 12 <= value <= 50:
                tags.append((m.start(), value))
    return tags


def _last_token(masked_line: str) -> str:
    parts = masked_line.split()
    return parts[-1] if parts else ""


def _ends_statement(masked_line: str) -> bool:
    return masked_line.rstrip().endswith(".")


def parse_items(text: str) -> list[ProofItem]:
    """Parse a whole file into items in file order.

    Raises UnterminatedComment, MissingTerminator or DuplicateName; any line
    that does not open a recognized item is left uncovered by the spans.
    """
    masked = mask_comments(text)
    original_lines = text.split("\n")
    masked_lines = masked.split("\n")
    tags = _section_tags(text)
    line_offsets = [0]
    for line in original_lines[:-1]:
        line_offsets.append(line_offsets[-1] + len(line) + 1)

    items: list[ProofItem] = []
    seen_names: set[str] = set()
    i = 0
    n = len(original_lines)
    while i < n:
        tokens = masked_lines[i].split()
        keyword = tokens[0] if tokens else ""
        if keyword in OPAQUE_KEYWORDS:
            while i < n and not _ends_statement(masked_lines[i]):
                nxt = masked_lines[i + 1].split() if i + 1 < n else []
                if nxt and nxt[0] in ITEM_KEYWORDS:
                    break
                i += 1
            i += 1
            continue
        if keyword not in ITEM_KEYWORDS:
            i += 1
            continue

        kind = ItemKind(ITEM_KEYWORDS[keyword])
        rest = masked_lines[i].split(None, 1)[1] if len(tokens) > 1 else ""
        m = _IDENT.match(rest.lstrip())
        if not m:
            raise ParseError(f"line {i + 1}: {keyword} without a name")
        name = m.group(0)

        stmt_end = i
        while stmt_end < n and not _ends_statement(masked_lines[stmt_end]):
            stmt_end += 1
        if stmt_end >= n:
            raise MissingTerminator(name, "statement never ends with '.'")

        proof_text = ""
        item_end = stmt_end
        if kind is ItemKind.THEOREM:
            item_end = stmt_end + 1
            while True:
                if item_end >= n:
                    raise MissingTerminator(name)
                line_tokens = masked_lines[item_end].split()
                if line_tokens and line_tokens[0] in ITEM_KEYWORDS:
                    raise MissingTerminator(name)
                if _last_token(masked_lines[item_end]) in TERMINATORS:
                    break
                item_end += 1
            proof_text = "\n".join(original_lines[stmt_end + 1 : item_end + 1])

        statement_text = "\n".join(original_lines[i : stmt_end + 1])
        if kind is ItemKind.AXIOM:
            admit = True
        elif kind is ItemKind.THEOREM:
            masked_proof = "\n".join(masked_lines[stmt_end + 1 : item_end + 1])
            admit = any(tok == "admit." for tok in masked_proof.split())
        else:
            admit = False

        if kind in (ItemKind.DEFINITION, ItemKind.THEOREM, ItemKind.AXIOM):
            if name in seen_names:
                raise DuplicateName(name)
            seen_names.add(name)

        start_offset = line_offsets[i]
        tag = None
        for off, value in tags:
            if off < start_offset:
                tag = value
            else:
                break

        items.append(
            ProofItem(
                kind=kind,
                name=name,
                statement_text=statement_text,
                proof_text=proof_text,
                line_start=i + 1,
                line_end=item_end + 1,
                direct_admit=admit,
                section_tag=tag,
            )
        )
        i = item_end + 1
    return items
