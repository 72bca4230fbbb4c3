"""Simulated injection-context testbed.

Each context composes a payload into a document template at a single
placeholder and asks: does the marker call end up in an executing
position? Execution happens through exactly three vehicles:

  (a) an inline `<script>` element (no src attribute, properly closed)
      whose body passes the permissive JS check with the marker call in
      an executing position;
  (b) an auto-firing event handler attribute whose value passes the same
      check: onerror on img/script elements that carry a src (no
      simulated resource ever loads), onload on svg, body, and iframe;
  (c) a `javascript:` URI in a navigable position: iframe src, anchor
      href (the simulated user clicks every anchor), or a direct
      location assignment.

Two template forms carry value semantics instead of source injection: a
bare placeholder on the right of a location assignment (the payload
arrives as a runtime string and is interpreted as a URI only) and a bare
placeholder assigned to innerHTML (parsed as a fragment in which script
elements never execute but event handlers and javascript: URIs do).
A non-javascript: URI reaching a location assignment navigates away.

Evaluation is pure; the only mutable state is the call counter used for
budget accounting.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from enum import Enum
import re

from .htmlscan import first_attr, tokenize
from .jscheck import scan_js

SENTINEL_NAME = "xss"
SENTINEL_CALL = "xss()"
PLACEHOLDER = "{{INJ}}"

# attributes interpreted as URIs, and the subset that executes javascript:
URI_ATTRS = frozenset({"src", "href"})
_NAVIGABLE = frozenset({("iframe", "src"), ("a", "href")})
# (element, handler) pairs that fire without user interaction; the bool
# says whether a src attribute must be present (unloadable resource)
_AUTO_FIRE = {
    ("img", "onerror"): True,
    ("script", "onerror"): True,
    ("svg", "onload"): False,
    ("body", "onload"): False,
    ("iframe", "onload"): False,
}

_LOCATION_VALUE_RE = re.compile(
    r"(?:document\.|window\.)?location(?:\.href)?\s*=\s*" + re.escape(PLACEHOLDER)
)
_INNERHTML_VALUE_RE = re.compile(r"\.innerHTML\s*=\s*" + re.escape(PLACEHOLDER))


class Channel(Enum):
    HTML_BODY = "html-body"
    HTML_ATTR_DQUOTE = "html-attr-dquote"
    HTML_ATTR_SQUOTE = "html-attr-squote"
    HTML_ATTR_UNQUOTED = "html-attr-unquoted"
    URI_ATTR = "uri-attr"
    EVENT_HANDLER_ATTR = "event-handler-attr"
    JS_DQUOTE_STRING = "js-dquote-string"
    JS_SQUOTE_STRING = "js-squote-string"
    JS_CODE = "js-code"
    JS_LINE_COMMENT = "js-line-comment"
    JS_BLOCK_COMMENT = "js-block-comment"
    HTML_COMMENT = "html-comment"
    RAW_TEXT_ELEMENT = "raw-text-element"
    INNERHTML_SINK = "innerHTML-sink"


_CHANNEL_BY_NAME = {c.value: c for c in Channel}


class ContextError(ValueError):
    """Raised for malformed or inconsistent context definitions."""


class Reason(Enum):
    SENTINEL_REACHED = "sentinel-reached"
    SYNTAX_ERROR = "syntax-error"
    SENTINEL_INERT = "sentinel-inert"
    NAVIGATION_AWAY = "navigation-away"
    NOT_REACHED = "not-reached"


@dataclass(frozen=True, slots=True)
class EvalOutcome:
    executed: bool
    reason: Reason
    trace: tuple[str, ...] | None = None


@dataclass(frozen=True, slots=True)
class ScoreVector:
    bits: tuple[int, ...]

    @property
    def count(self) -> int:
        return sum(self.bits)

    def __or__(self, other: "ScoreVector") -> "ScoreVector":
        if len(self.bits) != len(other.bits):
            raise ValueError("score vector length mismatch")
        return ScoreVector(tuple(a | b for a, b in zip(self.bits, other.bits)))

    def __len__(self) -> int:
        return len(self.bits)

    def __getitem__(self, i: int) -> int:
        return self.bits[i]

    def to01(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    @classmethod
    def from01(cls, s: str) -> "ScoreVector":
        return cls(tuple(1 if c == "1" else 0 for c in s))

    @classmethod
    def zeros(cls, n: int) -> "ScoreVector":
        return cls((0,) * n)


@dataclass(frozen=True)
class InjectionContext:
    id: int
    name: str
    channel: Channel
    template: str
    notes: str = ""
    # derived at load time
    mode: str = field(default="source", compare=False)  # source | uri-value | innerhtml-value
    prefix: str = field(default="", compare=False)
    suffix: str = field(default="", compare=False)

    def __post_init__(self):
        if self.template.count(PLACEHOLDER) != 1:
            raise ContextError(
                f"context {self.id} ({self.name}): template must contain "
                f"{PLACEHOLDER} exactly once"
            )
        if SENTINEL_CALL in self.template:
            raise ContextError(
                f"context {self.id} ({self.name}): template must not contain "
                f"the sentinel call"
            )
        pre, _, suf = self.template.partition(PLACEHOLDER)
        mode = "source"
        if "<" not in self.template:
            # a template without markup is a standalone script resource;
            # payload text never reaches an HTML parser there
            mode = "jsfile"
        elif self.channel is Channel.URI_ATTR and _LOCATION_VALUE_RE.search(self.template):
            mode = "uri-value"
        elif self.channel is Channel.INNERHTML_SINK:
            if not _INNERHTML_VALUE_RE.search(self.template):
                raise ContextError(
                    f"context {self.id} ({self.name}): innerHTML-sink template "
                    f"must assign the bare placeholder to .innerHTML"
                )
            mode = "innerhtml-value"
        object.__setattr__(self, "prefix", pre)
        object.__setattr__(self, "suffix", suf)
        object.__setattr__(self, "mode", mode)
        _validate_channel(self)


def _marker_slot(ctx: InjectionContext) -> tuple:
    """Describe the syntactic position of the placeholder in the template."""
    template = ctx.template
    idx = template.index(PLACEHOLDER)
    if "<" not in template:
        # a template without markup is a standalone script resource
        return ("jsfile", scan_js(template[:idx]).end_mode)
    for ev in tokenize(template):
        kind = ev[0]
        if kind == "text" and ev[1] <= idx < ev[2]:
            return ("text",)
        if kind == "comment" and ev[1] <= idx < ev[2]:
            return ("comment",)
        if kind == "rawtext":
            _, name, bstart, bend, _closed = ev
            if bstart <= idx < bend:
                if name == "script":
                    return ("script", scan_js(template[bstart:idx]).end_mode)
                return ("rawtext", name)
        if kind == "start":
            for an, av, vstart in ev[2]:
                if vstart <= idx < vstart + len(av):
                    q = template[vstart - 1] if vstart > 0 else ""
                    quote = q if q in "\"'" else ""
                    return ("attr", ev[1], an, quote)
    raise ContextError(
        f"context {ctx.id} ({ctx.name}): cannot locate placeholder in template"
    )


def _validate_channel(ctx: InjectionContext) -> None:
    ch = ctx.channel
    if ctx.mode == "uri-value":
        return
    if ctx.mode == "innerhtml-value":
        return
    slot = _marker_slot(ctx)
    ok = False
    if ch is Channel.HTML_BODY:
        ok = slot == ("text",)
    elif ch is Channel.HTML_COMMENT:
        ok = slot == ("comment",)
    elif ch is Channel.RAW_TEXT_ELEMENT:
        ok = slot[0] == "rawtext"
    elif ch in (Channel.HTML_ATTR_DQUOTE, Channel.HTML_ATTR_SQUOTE, Channel.HTML_ATTR_UNQUOTED):
        want = {"html-attr-dquote": '"', "html-attr-squote": "'", "html-attr-unquoted": ""}[ch.value]
        ok = (
            slot[0] == "attr"
            and slot[3] == want
            and slot[2] not in URI_ATTRS
            and not slot[2].startswith("on")
        )
    elif ch is Channel.URI_ATTR:
        ok = slot[0] == "attr" and slot[2] in URI_ATTRS
    elif ch is Channel.EVENT_HANDLER_ATTR:
        ok = slot[0] == "attr" and slot[2].startswith("on")
    elif ch is Channel.JS_DQUOTE_STRING:
        ok = slot[0] in ("script", "jsfile") and slot[1] == "string-dq"
    elif ch is Channel.JS_SQUOTE_STRING:
        ok = slot[0] in ("script", "jsfile") and slot[1] == "string-sq"
    elif ch is Channel.JS_CODE:
        ok = slot[0] in ("script", "jsfile") and slot[1] in ("code", "template")
    elif ch is Channel.JS_LINE_COMMENT:
        ok = slot[0] in ("script", "jsfile") and slot[1] == "line-comment"
    elif ch is Channel.JS_BLOCK_COMMENT:
        ok = slot[0] in ("script", "jsfile") and slot[1] == "block-comment"
    elif ch is Channel.INNERHTML_SINK:
        ok = False  # handled by mode above
    if not ok:
        raise ContextError(
            f"context {ctx.id} ({ctx.name}): channel {ch.value} does not match "
            f"the placeholder position {slot!r}"
        )


def _judge_js(code: str, pos: int, state: "_Walk") -> None:
    res = scan_js(code, SENTINEL_NAME)
    if res.executes:
        if state.first_hit is None:
            state.first_hit = pos
        state.executed = True
    elif res.fatal and SENTINEL_CALL in code:
        state.saw_syntax_error = True
    if state.trace is not None:
        state.trace.append(
            f"{pos}\tjs-region\texecutes={res.executes}\tfatal={res.fatal}"
        )


@dataclass
class _Walk:
    executed: bool = False
    saw_syntax_error: bool = False
    navigated: bool = False
    first_hit: int | None = None
    trace: list[str] | None = None


def _judge_uri(value: str, pos: int, state: _Walk) -> None:
    v = value.strip()
    if v[:11].lower() == "javascript:":
        _judge_js(v[11:], pos, state)
    elif state.trace is not None:
        state.trace.append(f"{pos}\turi\tnon-executable")


def _walk_events(doc: str, events: list, allow_script: bool, state: _Walk) -> None:
    pending_raw: tuple | None = None
    for ev in events:
        kind = ev[0]
        if kind == "start":
            _, name, attrs, _selfclosing, pos = ev
            if state.trace is not None:
                state.trace.append(f"{pos}\tstart-tag\t{name}")
            if len(attrs) > 1:  # duplicate attributes are dropped, first wins
                seen: set[str] = set()
                attrs = [a for a in attrs if a[0] not in seen and not seen.add(a[0])]
            has_src = first_attr(attrs, "src") is not None
            for an, av, vstart in attrs:
                needs_src = _AUTO_FIRE.get((name, an))
                if needs_src is not None and (has_src or not needs_src):
                    _judge_js(av, vstart, state)
                if (name, an) in _NAVIGABLE and an in URI_ATTRS:
                    _judge_uri(av, vstart, state)
            pending_raw = (name, has_src)
        elif kind == "rawtext":
            _, name, bstart, bend, closed = ev
            if state.trace is not None:
                state.trace.append(f"{bstart}\trawtext\t{name}\tclosed={closed}")
            if name == "script" and allow_script and closed:
                if pending_raw is None or not pending_raw[1]:
                    _judge_js(doc[bstart:bend], bstart, state)
            pending_raw = None
        elif state.trace is not None:
            if kind == "end":
                state.trace.append(f"{ev[2]}\tend-tag\t{ev[1]}")
            else:
                state.trace.append(f"{ev[1]}\t{kind}\t")


def evaluate_context(
    ctx: InjectionContext, payload: str, trace: bool = False
) -> EvalOutcome:
    """Evaluate one payload in one context. Pure and deterministic."""
    state = _Walk(trace=[] if trace else None)
    sentinel_present = SENTINEL_CALL in payload

    if ctx.mode == "uri-value":
        v = payload.strip()
        if not v:
            return _outcome(state, sentinel_present)
        if v[:11].lower() == "javascript:":
            _judge_js(v[11:], 0, state)
        else:
            state.navigated = True
        return _outcome(state, sentinel_present)

    if not sentinel_present:
        # nothing the simulator recognises as a payload can run
        return EvalOutcome(False, Reason.NOT_REACHED, tuple(state.trace) if trace else None)

    if ctx.mode == "innerhtml-value":
        _walk_events(payload, tokenize(payload), allow_script=False, state=state)
        return _outcome(state, sentinel_present)

    if ctx.mode == "jsfile":
        _judge_js(ctx.prefix + payload + ctx.suffix, 0, state)
        return _outcome(state, sentinel_present)

    doc = ctx.prefix + payload + ctx.suffix
    _walk_events(doc, tokenize(doc), allow_script=True, state=state)
    return _outcome(state, sentinel_present)


def _outcome(state: _Walk, sentinel_present: bool) -> EvalOutcome:
    trace = tuple(state.trace) if state.trace is not None else None
    if state.executed:
        return EvalOutcome(True, Reason.SENTINEL_REACHED, trace)
    if state.saw_syntax_error:
        return EvalOutcome(False, Reason.SYNTAX_ERROR, trace)
    if state.navigated:
        return EvalOutcome(False, Reason.NAVIGATION_AWAY, trace)
    if sentinel_present:
        return EvalOutcome(False, Reason.SENTINEL_INERT, trace)
    return EvalOutcome(False, Reason.NOT_REACHED, trace)


def evaluate(
    contexts: list[InjectionContext], payload: str, counter: "CallCounter | None" = None
) -> ScoreVector:
    """Score a payload against every context; one budgeted call in total."""
    if counter is not None:
        counter.increment()
    return ScoreVector(
        tuple(1 if evaluate_context(c, payload).executed else 0 for c in contexts)
    )


class CallCounter:
    """Thread-safe testbed call counter for budget accounting."""

    __slots__ = ("_count", "_lock")

    def __init__(self):
        self._count = 0
        self._lock = threading.Lock()

    def increment(self) -> None:
        with self._lock:
            self._count += 1

    @property
    def count(self) -> int:
        return self._count


class Testbed:
    """A context list plus its evaluation-call counter."""

    def __init__(self, contexts: list[InjectionContext]):
        self.contexts = list(contexts)
        self.counter = CallCounter()
        self._by_id = {c.id: c for c in self.contexts}

    def __len__(self) -> int:
        return len(self.contexts)

    def evaluate(self, payload: str) -> ScoreVector:
        return evaluate(self.contexts, payload, self.counter)

    def evaluate_subset(self, payload: str, ids: list[int]) -> ScoreVector:
        """Score against a context subset; still one budgeted call."""
        self.counter.increment()
        by_id = self._by_id
        return ScoreVector(
            tuple(1 if evaluate_context(by_id[i], payload).executed else 0 for i in ids)
        )

    @property
    def calls(self) -> int:
        return self.counter.count


def load_contexts(source: str) -> list[InjectionContext]:
    """Parse the block-oriented context file format.

    Each block is a header `context <id> <name> <channel>` followed by
    template lines indented with two spaces (stripped on load). Blocks end
    at the first non-indented line; `#` starts a comment outside blocks.
    """
    contexts: list[InjectionContext] = []
    lines = source.splitlines()
    i = 0
    while i < len(lines):
        line = lines[i]
        if not line.strip() or line.lstrip().startswith("#"):
            i += 1
            continue
        parts = line.split()
        if parts[0] != "context" or len(parts) < 4:
            raise ContextError(f"line {i + 1}: expected `context <id> <name> <channel>`")
        try:
            cid = int(parts[1])
        except ValueError:
            raise ContextError(f"line {i + 1}: bad context id {parts[1]!r}") from None
        name = parts[2]
        channel_s = parts[3]
        if channel_s not in _CHANNEL_BY_NAME:
            raise ContextError(f"line {i + 1}: unknown channel {channel_s!r}")
        notes = " ".join(parts[4:])
        i += 1
        template_lines = []
        while i < len(lines) and lines[i].startswith("  "):
            template_lines.append(lines[i][2:])
            i += 1
        if not template_lines:
            raise ContextError(f"context {cid} ({name}): empty template")
        contexts.append(
            InjectionContext(
                id=cid,
                name=name,
                channel=_CHANNEL_BY_NAME[channel_s],
                template="\n".join(template_lines),
                notes=notes,
            )
        )
    if not contexts:
        raise ContextError("context file defines no contexts")
    ids = [c.id for c in contexts]
    if ids != list(range(len(contexts))):
        raise ContextError(f"context ids must be exactly 0..{len(contexts) - 1} in order, got {ids}")
    return contexts


def mutually_exclusive(
    contexts: list[InjectionContext],
    i: int,
    j: int,
    catalog=None,
    max_depth: int = 3,
) -> bool:
    """True iff no token sequence up to `max_depth` solves both contexts.

    Exhaustive bounded search over a reduced catalog; diagnostic use only.
    """
    from .defaults import reduced_catalog

    if catalog is None:
        catalog = reduced_catalog()
    by_id = {c.id: c for c in contexts}
    pair = [by_id[i], by_id[j]]

    def solves_both(payload: str) -> bool:
        return all(evaluate_context(c, payload).executed for c in pair)

    stack: list[tuple[tuple, str]] = [((), "")]
    while stack:
        prefix_tokens, rendered = stack.pop()
        if prefix_tokens and solves_both(rendered):
            return False
        if len(prefix_tokens) >= max_depth:
            continue
        for t in catalog.legal_moves(list(prefix_tokens)):
            stack.append((prefix_tokens + (t,), rendered + t.text))
    return True
