"""Token alphabet, composition rules, and payload rendering.

Payloads are built as sequences of tokens from a catalog. A small set of
deny-list rules constrains which token may directly follow another, and a
rendered-length cap bounds the search space. Catalogs are immutable after
loading; every operation here is a pure function of its inputs.

Rules are deny-lists keyed on the immediately preceding token only;
allow-lists (required successors) are a possible extension, not
implemented.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class TokenKind(Enum):
    HTML_LITERAL = "html-literal"
    HTML_TAG_NAME = "html-tag-name"
    EVENT_HANDLER_ATTRIBUTE = "event-handler-attribute"
    OTHER_HTML = "other-html"
    JS_FRAGMENT = "js-fragment"
    URI_FRAGMENT = "uri-fragment"
    PAYLOAD_SENTINEL = "payload-sentinel"


_KIND_BY_NAME = {k.value: k for k in TokenKind}


class CatalogError(ValueError):
    """Raised for malformed or invalid catalog definitions."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.column = column


@dataclass(frozen=True, slots=True)
class Token:
    id: int
    text: str
    kind: TokenKind

    def __post_init__(self):
        if not self.text:
            raise CatalogError(f"token {self.id}: empty text")
        for ch in self.text:
            if not 0x20 <= ord(ch) <= 0x7E:
                raise CatalogError(
                    f"token {self.id}: non-printable-ASCII character {ch!r} in text"
                )


@dataclass(frozen=True, slots=True)
class CompositionRule:
    """Deny-list rule: after `predecessor`, the listed successors are illegal.

    Both sides may name a token id (int) or a kind (TokenKind). Rules only
    look at the immediately preceding token of a prefix.
    """

    predecessor: int | TokenKind
    forbidden: frozenset[int | TokenKind]

    def forbids(self, prev: Token, succ: Token) -> bool:
        if isinstance(self.predecessor, int):
            if prev.id != self.predecessor:
                return False
        elif prev.kind is not self.predecessor:
            return False
        return succ.id in self.forbidden or succ.kind in self.forbidden


@dataclass(frozen=True)
class TokenCatalog:
    tokens: tuple[Token, ...]
    rules: tuple[CompositionRule, ...] = ()
    max_render_length: int = 400
    # successor token lists keyed by predecessor id, ascending-id order
    _successors: dict[int, tuple[Token, ...]] = field(
        default_factory=dict, repr=False, compare=False
    )
    _max_successor_len: dict[int, int] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        ids = [t.id for t in self.tokens]
        if len(set(ids)) != len(ids):
            dup = sorted(i for i in set(ids) if ids.count(i) > 1)
            raise CatalogError(f"duplicate token id(s): {dup}")
        if not any(t.kind is TokenKind.PAYLOAD_SENTINEL for t in self.tokens):
            raise CatalogError("catalog has no payload-sentinel token")
        known = set(ids)
        for rule in self.rules:
            for ref in [rule.predecessor, *rule.forbidden]:
                if isinstance(ref, int) and ref not in known:
                    raise CatalogError(f"rule references unknown token id {ref}")
        if self.max_render_length < 1:
            raise CatalogError(f"max-render-length must be positive, got {self.max_render_length}")
        ordered = tuple(sorted(self.tokens, key=lambda t: t.id))
        object.__setattr__(self, "tokens", ordered)
        self._build_successor_index()
        self._check_reachability()

    def _build_successor_index(self):
        for prev in self.tokens:
            succ = tuple(
                t
                for t in self.tokens
                if not any(r.forbids(prev, t) for r in self.rules)
            )
            self._successors[prev.id] = succ
            self._max_successor_len[prev.id] = max((len(t.text) for t in succ), default=0)

    def _check_reachability(self):
        # Deny-lists never constrain the empty prefix, so a token is
        # unreachable only if its own text exceeds the length cap.
        for t in self.tokens:
            if len(t.text) > self.max_render_length:
                raise CatalogError(
                    f"token {t.id} ({t.text!r}) is unreachable: text longer than "
                    f"max-render-length {self.max_render_length}"
                )

    @property
    def sentinel(self) -> Token:
        for t in self.tokens:
            if t.kind is TokenKind.PAYLOAD_SENTINEL:
                return t
        raise CatalogError("catalog has no payload-sentinel token")  # pragma: no cover

    def by_id(self, token_id: int) -> Token:
        for t in self.tokens:
            if t.id == token_id:
                return t
        raise KeyError(token_id)

    def legal_moves(self, prefix: tuple[Token, ...] | list[Token]) -> list[Token]:
        return legal_moves(self, prefix)

    def render(self, prefix) -> str:
        return render(prefix)


def legal_moves(catalog: TokenCatalog, prefix) -> list[Token]:
    """Tokens that may legally extend `prefix`, in ascending-id order.

    A move is legal when no composition rule forbids it after the prefix's
    last token and the rendered length stays within the catalog cap. An
    empty result marks a terminal prefix.
    """
    used = sum(len(t.text) for t in prefix)
    budget = catalog.max_render_length - used
    if budget <= 0:
        return []
    if prefix:
        candidates = catalog._successors[prefix[-1].id]
        if catalog._max_successor_len[prefix[-1].id] <= budget:
            return list(candidates)
    else:
        candidates = catalog.tokens
    return [t for t in candidates if len(t.text) <= budget]


def render(prefix) -> str:
    """Concatenate token texts in order; the empty prefix renders to ""."""
    return "".join(t.text for t in prefix)


def _parse_quoted(text: str, line_no: int) -> tuple[str, str]:
    """Parse a leading double-quoted string, returning (value, rest)."""
    if not text.startswith('"'):
        raise CatalogError("expected quoted text", line_no, column=None)
    out = []
    i = 1
    while i < len(text):
        ch = text[i]
        if ch == "\\":
            if i + 1 >= len(text) or text[i + 1] not in '\\"':
                raise CatalogError("bad escape in quoted text", line_no, i + 1)
            out.append(text[i + 1])
            i += 2
        elif ch == '"':
            return "".join(out), text[i + 1 :]
        else:
            out.append(ch)
            i += 1
    raise CatalogError("unterminated quoted text", line_no, len(text))


def _parse_ref(ref: str, line_no: int) -> int | TokenKind:
    if ref in _KIND_BY_NAME:
        return _KIND_BY_NAME[ref]
    try:
        return int(ref)
    except ValueError:
        raise CatalogError(f"unknown token id or kind {ref!r}", line_no) from None


def load_catalog(source: str) -> TokenCatalog:
    """Parse the line-oriented catalog format into a validated catalog.

    Format, one declaration per line:
        token <id> <kind> <quoted-text>
        forbid after=<id|kind> succ=<id|kind>[,<id|kind>...]
        maxlen <chars>
    Lines starting with `#` and blank lines are ignored.
    """
    tokens: list[Token] = []
    rules: list[CompositionRule] = []
    max_len = 400
    for line_no, raw in enumerate(source.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "token":
            parts = rest.split(None, 2)
            if len(parts) != 3:
                raise CatalogError("token line needs: token <id> <kind> <quoted-text>", line_no)
            id_s, kind_s, quoted = parts
            try:
                token_id = int(id_s)
            except ValueError:
                raise CatalogError(f"bad token id {id_s!r}", line_no) from None
            if kind_s not in _KIND_BY_NAME:
                raise CatalogError(f"unknown token kind {kind_s!r}", line_no)
            text, tail = _parse_quoted(quoted, line_no)
            if tail.strip():
                raise CatalogError(f"trailing junk after token text: {tail.strip()!r}", line_no)
            try:
                tokens.append(Token(token_id, text, _KIND_BY_NAME[kind_s]))
            except CatalogError as exc:
                raise CatalogError(str(exc), line_no) from None
        elif head == "forbid":
            fields = dict(
                part.split("=", 1) for part in rest.split() if "=" in part
            )
            if set(fields) != {"after", "succ"}:
                raise CatalogError("forbid line needs: forbid after=<ref> succ=<ref>[,...]", line_no)
            pred = _parse_ref(fields["after"], line_no)
            succ = frozenset(_parse_ref(r, line_no) for r in fields["succ"].split(","))
            rules.append(CompositionRule(pred, succ))
        elif head == "maxlen":
            try:
                max_len = int(rest)
            except ValueError:
                raise CatalogError(f"bad maxlen {rest!r}", line_no) from None
        else:
            raise CatalogError(f"unknown directive {head!r}", line_no)
    if not tokens:
        raise CatalogError("catalog defines no tokens")
    return TokenCatalog(tokens=tuple(tokens), rules=tuple(rules), max_render_length=max_len)
