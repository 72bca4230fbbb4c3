"""Reduced WHATWG-style HTML tokenizer.

Covers the states needed to decide payload break-out and break-in: data,
tag open/name, attribute name/value in all three quoting styles,
self-closing, comments (including the abrupt `<!-->` forms and `--!>`),
and raw text for script/textarea/title with appropriate-end-tag matching.
There is no tree construction; the event stream is enough for the
evaluator. Elements left open at EOF stay unclosed, and an unclosed raw
text region never counts as a complete element.

Events are plain tuples, positions index into the scanned string:

    ("text", start, end)
    ("comment", start, end, closed)
    ("start", name, attrs, self_closing, tag_start)
    ("end", name, tag_start)
    ("rawtext", name, body_start, body_end, closed)

`attrs` is a list of (lowercase name, value, value_start). Duplicate
attribute names are kept in order; consumers take the first, as browsers
do. A "rawtext" event always directly follows the "start" event of its
element.
"""

from __future__ import annotations

RAWTEXT_ELEMENTS = ("script", "textarea", "title")
_WS = " \t\n\r\f"

Event = tuple


def first_attr(attrs: list[tuple[str, str, int]], name: str) -> str | None:
    for an, av, _ in attrs:
        if an == name:
            return av
    return None


def _parse_start_tag(doc: str, doc_l: str, lt: int) -> tuple[Event, int] | None:
    """Parse a start tag at `lt`; returns (event, next_index) or None at EOF-in-tag."""
    n = len(doc)
    m = lt + 1
    while m < n and (doc[m].isalnum() or doc[m] == "-"):
        m += 1
    name = doc_l[lt + 1 : m]
    attrs: list[tuple[str, str, int]] = []
    i = m
    while True:
        while i < n and doc[i] in _WS:
            i += 1
        if i >= n:
            return None
        c = doc[i]
        if c == ">":
            return ("start", name, attrs, False, lt), i + 1
        if c == "/":
            if i + 1 < n and doc[i + 1] == ">":
                return ("start", name, attrs, True, lt), i + 2
            i += 1
            continue
        s = i
        while i < n and doc[i] not in _WS and doc[i] not in "=/>":
            i += 1
        aname = doc_l[s:i]
        while i < n and doc[i] in _WS:
            i += 1
        if i < n and doc[i] == "=":
            i += 1
            while i < n and doc[i] in _WS:
                i += 1
            if i >= n:
                return None
            q = doc[i]
            if q in "\"'":
                vstart = i + 1
                e = doc.find(q, vstart)
                if e < 0:
                    return None
                attrs.append((aname, doc[vstart:e], vstart))
                i = e + 1
            else:
                vstart = i
                while i < n and doc[i] not in _WS and doc[i] != ">":
                    i += 1
                attrs.append((aname, doc[vstart:i], vstart))
        elif aname:
            attrs.append((aname, "", s))


def _scan_rawtext(doc: str, doc_l: str, name: str, start: int) -> tuple[Event, int]:
    """Scan raw text content of `name` until its appropriate end tag."""
    n = len(doc)
    needle = "</" + name
    k = start
    while True:
        f = doc_l.find(needle, k)
        if f < 0:
            return ("rawtext", name, start, n, False), n
        after = f + len(needle)
        if after >= n:
            return ("rawtext", name, start, n, False), n
        if doc[after] in _WS or doc[after] in "/>":
            gt = doc.find(">", after)
            if gt < 0:
                return ("rawtext", name, start, f, False), n
            return ("rawtext", name, start, f, True), gt + 1
        k = after


def tokenize(doc: str) -> list[Event]:
    doc_l = doc.lower()
    n = len(doc)
    out: list[Event] = []
    i = 0
    while i < n:
        lt = doc.find("<", i)
        if lt < 0:
            out.append(("text", i, n))
            break
        if lt > i:
            out.append(("text", i, lt))
        j = lt + 1
        if j >= n:
            out.append(("text", lt, n))
            break
        c = doc[j]
        if c == "/":
            k = j + 1
            if k < n and doc[k].isalpha():
                m = k
                while m < n and (doc[m].isalnum() or doc[m] == "-"):
                    m += 1
                gt = doc.find(">", m)
                if gt < 0:
                    break  # EOF in tag: dropped
                out.append(("end", doc_l[k:m], lt))
                i = gt + 1
            elif k < n and doc[k] == ">":
                i = k + 1  # `</>` is skipped entirely
            else:
                gt = doc.find(">", k)  # bogus comment
                if gt < 0:
                    out.append(("comment", k, n, False))
                    break
                out.append(("comment", k, gt, True))
                i = gt + 1
        elif c == "!":
            if doc.startswith("<!--", lt):
                cs = lt + 4
                if doc.startswith(">", cs):
                    out.append(("comment", cs, cs, True))
                    i = cs + 1
                    continue
                if doc.startswith("->", cs):
                    out.append(("comment", cs, cs, True))
                    i = cs + 2
                    continue
                e1 = doc.find("-->", cs)
                e2 = doc.find("--!>", cs)
                if e1 < 0 and e2 < 0:
                    out.append(("comment", cs, n, False))
                    break
                if e2 != -1 and (e1 == -1 or e2 < e1):
                    out.append(("comment", cs, e2, True))
                    i = e2 + 4
                else:
                    out.append(("comment", cs, e1, True))
                    i = e1 + 3
            else:
                gt = doc.find(">", j + 1)
                if gt < 0:
                    out.append(("comment", j + 1, n, False))
                    break
                out.append(("comment", j + 1, gt, True))
                i = gt + 1
        elif c == "?":
            gt = doc.find(">", j + 1)
            if gt < 0:
                out.append(("comment", j + 1, n, False))
                break
            out.append(("comment", j + 1, gt, True))
            i = gt + 1
        elif c.isalpha():
            parsed = _parse_start_tag(doc, doc_l, lt)
            if parsed is None:
                break  # EOF in tag: dropped
            event, i = parsed
            out.append(event)
            name = event[1]
            if name in RAWTEXT_ELEMENTS:
                raw, i = _scan_rawtext(doc, doc_l, name, i)
                out.append(raw)
        else:
            out.append(("text", lt, j))
            i = j
    return out
