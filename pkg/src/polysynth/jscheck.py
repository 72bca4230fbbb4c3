"""Permissive syntax check for JavaScript regions.

This is not a parser. It scans a script region (inline script body, event
handler value, or javascript: URI body) tracking just enough structure to
decide two things:

  * whether the marker call (the payload sentinel) occurs in an executing
    position: outside strings, template text, and comments, and not nested
    inside a function body, and
  * whether the region dies of a fatal syntax error before anything runs.

Fatal means: a closing bracket that matches nothing (underflow/mismatch),
brackets left open at region end, or a `:` in a position where neither a
label, a ternary, an object literal, nor a switch case can explain it.
The colon rule is what makes a `javascript:` scheme legal as a label in
statement position but fatal on the right side of an assignment.
Everything else (odd operators, stray keywords, unterminated strings and
comments) is deliberately tolerated.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

SPECIAL_RE = re.compile(r'["\'`/(){}\[\]:;?]')
WORD_TAIL_RE = re.compile(r"([A-Za-z0-9_$]+)$")
TWO_WORDS_RE = re.compile(r"([A-Za-z0-9_$]+)\s+([A-Za-z0-9_$]+)$")
CASE_RE = re.compile(r"\b(?:case|default)\b")

_OPENER_FOR = {")": "(", "]": "[", "}": "{"}

# words after which `{` opens an object literal rather than a block
_OBJECT_WORDS = frozenset({"return", "typeof", "in", "of", "new", "void", "instanceof"})
_BLOCK_WORDS = frozenset({"do", "else", "try", "finally"})
_CONTROL_WORDS = frozenset({"if", "for", "while", "switch", "catch", "with"})

# chars after which `{` is an object literal
_OBJECT_PREFIX_CHARS = frozenset("=([,:?&|+-*/%!~^<>")
# chars after which `word :` is a label
_LABEL_PREFIX_CHARS = frozenset(";{}):")


@dataclass(slots=True)
class JsScanResult:
    sentinel_pos: int | None
    error_pos: int | None
    open_at_end: bool
    end_mode: str  # code | string-dq | string-sq | template | line-comment | block-comment

    @property
    def fatal(self) -> bool:
        return self.error_pos is not None or self.open_at_end

    @property
    def executes(self) -> bool:
        return self.sentinel_pos is not None and not self.fatal


def _skip_string(code: str, pos: int, quote: str) -> tuple[int, bool]:
    """Scan past a string body starting at `pos` (after the opening quote).

    Returns (index after the closing quote, terminated). Backslash escapes
    are honoured; an unterminated string runs to the region end.
    """
    i = pos
    while True:
        j = code.find(quote, i)
        if j < 0:
            return len(code), False
        bs = 0
        k = j - 1
        while k >= pos - 1 and code[k] == "\\":
            bs += 1
            k -= 1
        if bs % 2 == 0:
            return j + 1, True
        i = j + 1


def _scan_template_text(code: str, pos: int) -> tuple[int, str]:
    """Scan template-literal text from `pos`.

    Returns (new position, event) with event one of 'interp' (stopped after
    `${`), 'closed' (after the closing backtick), 'eof'.
    """
    n = len(code)
    while pos < n:
        jt = code.find("`", pos)
        ji = code.find("${", pos)
        if ji != -1 and (jt == -1 or ji < jt):
            stop, kind = ji, "interp"
        elif jt != -1:
            stop, kind = jt, "closed"
        else:
            return n, "eof"
        bs = 0
        k = stop - 1
        while k >= pos and code[k] == "\\":
            bs += 1
            k -= 1
        if bs % 2:
            pos = stop + 1
            continue
        return (stop + 2, "interp") if kind == "interp" else (stop + 1, "closed")
    return n, "eof"


def scan_js(code: str, sentinel_name: str = "xss") -> JsScanResult:
    n = len(code)
    pos = 0
    # each stack entry: (opener char, tag); tag in {'paren-control',
    # 'paren-function', 'paren-plain', 'bracket', 'block', 'object',
    # 'function', 'template'}
    stack: list[tuple[str, str]] = []
    pending_q: list[int] = [0]  # pending ternary `?`s per nesting level
    func_depth = 0
    pending_case = False
    sentinel_pos: int | None = None
    error_pos: int | None = None
    end_mode = "code"

    # last significant token before the current position
    last_char = ""  # final char of the last significant token; '' at region start
    last_word = ""  # the token itself when it was a word
    word_prev = ""  # significant char preceding that word
    prev_word = ""  # word right before last_word (`function foo (`)
    last_arrow = False  # last significant token ended with `=>`
    last_paren_tag = ""  # tag of the most recently closed paren group

    def consume_gap(gap: str) -> None:
        nonlocal last_char, last_word, word_prev, prev_word, pending_case, last_arrow
        s = gap.rstrip()
        if not s:
            return
        if CASE_RE.search(s):
            pending_case = True
        m = WORD_TAIL_RE.search(s)
        if m:
            before = s[: m.start()].rstrip()
            m2 = TWO_WORDS_RE.search(s)
            prev_word = m2.group(1) if m2 else ""
            word_prev = before[-1] if before else last_char
            last_word = m.group(1)
            last_char = last_word[-1]
            last_arrow = False
        else:
            last_word = ""
            prev_word = ""
            last_char = s[-1]
            last_arrow = s.endswith("=>")

    def set_last(ch: str) -> None:
        nonlocal last_char, last_word, prev_word, last_arrow
        last_char = ch
        last_word = ""
        prev_word = ""
        last_arrow = False

    while pos < n:
        m = SPECIAL_RE.search(code, pos)
        if m is None:
            consume_gap(code[pos:])
            break
        start = m.start()
        consume_gap(code[pos:start])
        ch = code[start]
        pos = start + 1

        if ch in "\"'":
            pos, terminated = _skip_string(code, pos, ch)
            if not terminated:
                end_mode = "string-dq" if ch == '"' else "string-sq"
            set_last(ch)
        elif ch == "`":
            pos, event = _scan_template_text(code, pos)
            if event == "interp":
                stack.append(("{", "template"))
                pending_q.append(0)
                set_last("{")
            elif event == "closed":
                set_last("`")
            else:
                end_mode = "template"
        elif ch == "/":
            nxt = code[pos] if pos < n else ""
            if nxt == "/":
                j = code.find("\n", pos + 1)
                if j < 0:
                    end_mode = "line-comment"
                    pos = n
                else:
                    pos = j + 1
            elif nxt == "*":
                j = code.find("*/", pos + 1)
                if j < 0:
                    end_mode = "block-comment"
                    pos = n
                else:
                    pos = j + 2
            else:
                set_last("/")
        elif ch == "(":
            if last_word in _CONTROL_WORDS:
                tag = "paren-control"
            elif last_word == "function" or prev_word == "function":
                tag = "paren-function"
            else:
                if sentinel_pos is None and last_word == sentinel_name and func_depth == 0:
                    sentinel_pos = start
                tag = "paren-plain"
            stack.append(("(", tag))
            pending_q.append(0)
            set_last("(")
        elif ch == "[":
            stack.append(("[", "bracket"))
            pending_q.append(0)
            set_last("[")
        elif ch == "{":
            if last_arrow:
                tag = "function"
            elif last_char == ")":
                tag = "function" if last_paren_tag == "paren-function" else "block"
            elif last_word:
                if last_word in _OBJECT_WORDS:
                    tag = "object"
                else:
                    tag = "block"  # includes _BLOCK_WORDS and bare identifiers
            elif last_char in _OBJECT_PREFIX_CHARS:
                tag = "object"
            else:
                tag = "block"
            if tag == "function":
                func_depth += 1
            stack.append(("{", tag))
            pending_q.append(0)
            pending_case = False
            set_last("{")
        elif ch in ")]}":
            if not stack or stack[-1][0] != _OPENER_FOR[ch]:
                if error_pos is None:
                    error_pos = start
                set_last(ch)  # keep scanning permissively without popping
                continue
            _, tag = stack.pop()
            pending_q.pop()
            if tag == "function":
                func_depth -= 1
            if ch == ")":
                last_paren_tag = tag
            if ch == "}" and tag == "template":
                pos, event = _scan_template_text(code, pos)
                if event == "interp":
                    stack.append(("{", "template"))
                    pending_q.append(0)
                    set_last("{")
                elif event == "closed":
                    set_last("`")
                else:
                    end_mode = "template"
            else:
                set_last(ch)
        elif ch == "?":
            nxt = code[pos] if pos < n else ""
            if nxt not in ".?":
                pending_q[-1] += 1
            set_last("?")
        elif ch == ";":
            pending_case = False
            set_last(";")
        elif ch == ":":
            if pending_q[-1] > 0:
                pending_q[-1] -= 1
            elif stack and stack[-1][1] in ("object", "bracket"):
                pass
            elif pending_case:
                pending_case = False
            elif last_word and (word_prev in _LABEL_PREFIX_CHARS or word_prev == ""):
                pass  # label
            else:
                if error_pos is None:
                    error_pos = start
            set_last(":")

    return JsScanResult(
        sentinel_pos=sentinel_pos,
        error_pos=error_pos,
        open_at_end=bool(stack),
        end_mode=end_mode,
    )
