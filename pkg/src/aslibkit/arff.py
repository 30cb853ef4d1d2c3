"""Dense ARFF subset: numeric, string and nominal attributes.

Missing cells are ``None`` in memory and ``?`` on disk. Sparse rows and
date/relational attributes are rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import FormatError

_NUMERIC = {"numeric", "real", "integer"}
_SPECIAL = set(" ,'\"%{}?\t\\\r\n")


@dataclass(frozen=True)
class Attribute:
    name: str
    kind: str  # "numeric" | "string" | "nominal"
    values: tuple[str, ...] = ()


@dataclass(frozen=True)
class ArffTable:
    relation: str
    attributes: tuple[Attribute, ...]
    rows: tuple[tuple, ...]
    lines: tuple[int, ...] = field(default=(), compare=False, repr=False)

    def column_index(self, name: str) -> int:
        for n, a in enumerate(self.attributes):
            if a.name == name:
                return n
        raise KeyError(name)

    def find_column(self, *names: str) -> int | None:
        lowered = {a.name.lower(): n for n, a in enumerate(self.attributes)}
        for name in names:
            if name.lower() in lowered:
                return lowered[name.lower()]
        return None

    def line_of(self, row: int) -> int | None:
        if self.lines and row < len(self.lines):
            return self.lines[row]
        return None

    def count_missing(self) -> int:
        return sum(v is None for row in self.rows for v in row)


# --------------------------------------------------------------------------- tokenising


def _split_fields(text: str, lineno: int, sep: str = ",") -> list[tuple[str, bool]]:
    """Split ``text`` on ``sep`` outside quotes. Returns (token, was_quoted) pairs."""
    out: list[tuple[str, bool]] = []
    i, n = 0, len(text)
    while True:
        while i < n and text[i] in " \t":
            i += 1
        if i < n and text[i] in "'\"":
            quote = text[i]
            i += 1
            buf = []
            while True:
                if i >= n:
                    raise FormatError("SYNTAX", "unterminated quoted value", line=lineno)
                ch = text[i]
                if ch == "\\" and i + 1 < n:
                    buf.append(text[i + 1])
                    i += 2
                    continue
                if ch == quote:
                    i += 1
                    break
                buf.append(ch)
                i += 1
            out.append(("".join(buf), True))
            while i < n and text[i] in " \t":
                i += 1
            if i < n and text[i] != sep:
                raise FormatError("SYNTAX", f"unexpected character {text[i]!r} after quoted value", line=lineno)
        else:
            j = text.find(sep, i)
            if j < 0:
                j = n
            out.append((text[i:j].strip(), False))
            i = j
        if i >= n:
            break
        i += 1  # skip separator
        if i >= n:
            out.append(("", False))
            break
    return out


def _read_name(rest: str, lineno: int) -> tuple[str, str]:
    """Read a possibly quoted name from the front of ``rest``."""
    rest = rest.lstrip()
    if not rest:
        raise FormatError("SYNTAX", "missing name", line=lineno)
    if rest[0] in "'\"":
        quote = rest[0]
        i, buf = 1, []
        while i < len(rest):
            ch = rest[i]
            if ch == "\\" and i + 1 < len(rest):
                buf.append(rest[i + 1])
                i += 2
                continue
            if ch == quote:
                return "".join(buf), rest[i + 1:].strip()
            buf.append(ch)
            i += 1
        raise FormatError("SYNTAX", "unterminated quoted name", line=lineno)
    parts = rest.split(None, 1)
    return parts[0], (parts[1].strip() if len(parts) > 1 else "")


def _parse_type(spec: str, lineno: int) -> tuple[str, tuple[str, ...]]:
    if spec.startswith("{"):
        if not spec.endswith("}"):
            raise FormatError("SYNTAX", f"unterminated nominal value set {spec!r}", line=lineno)
        inner = spec[1:-1]
        if not inner.strip():
            return "nominal", ()
        values = tuple(tok for tok, _ in _split_fields(inner, lineno))
        return "nominal", values
    low = spec.lower()
    if low in _NUMERIC:
        return "numeric", ()
    if low == "string":
        return "string", ()
    raise FormatError("SYNTAX", f"unsupported attribute type {spec!r}", line=lineno)


def parse_arff(text: str | bytes) -> ArffTable:
    """Parse ARFF text into a fully materialised :class:`ArffTable`."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FormatError("SYNTAX", f"input is not UTF-8: {exc}") from None
    if text.startswith("﻿"):
        text = text[1:]
    relation = None
    attributes: list[Attribute] = []
    rows: list[tuple] = []
    lines: list[int] = []
    in_data = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if not in_data:
            if not line.startswith("@"):
                raise FormatError("SYNTAX", f"expected a directive, got {line[:40]!r}", line=lineno)
            parts = line.split(None, 1)
            directive = parts[0].lower()
            rest = parts[1] if len(parts) > 1 else ""
            if directive == "@relation":
                name, _ = _read_name(rest, lineno)
                relation = name
            elif directive == "@attribute":
                if relation is None:
                    raise FormatError("SYNTAX", "@attribute before @relation", line=lineno)
                name, type_spec = _read_name(rest, lineno)
                if not type_spec:
                    raise FormatError("SYNTAX", f"attribute {name!r} has no type", line=lineno)
                kind, values = _parse_type(type_spec, lineno)
                attributes.append(Attribute(name, kind, values))
            elif directive == "@data":
                if relation is None:
                    raise FormatError("SYNTAX", "@data before @relation", line=lineno)
                in_data = True
            else:
                raise FormatError("SYNTAX", f"unknown directive {parts[0]!r}", line=lineno)
            continue
        if line.startswith("{"):
            raise FormatError("SYNTAX", "sparse rows are not supported", line=lineno)
        cells = _split_fields(line, lineno)
        if len(cells) != len(attributes):
            raise FormatError("ARITY", f"row has {len(cells)} values, expected {len(attributes)}", line=lineno)
        row = []
        for (tok, quoted), attr in zip(cells, attributes):
            if tok == "?" and not quoted:
                row.append(None)
            elif attr.kind == "numeric":
                try:
                    row.append(float(tok))
                except ValueError:
                    raise FormatError("DOMAIN", f"{tok!r} is not numeric (attribute {attr.name!r})", line=lineno) from None
            elif attr.kind == "nominal":
                if tok not in attr.values:
                    raise FormatError("DOMAIN", f"{tok!r} not in value set of {attr.name!r}", line=lineno)
                row.append(tok)
            else:
                row.append(tok)
        rows.append(tuple(row))
        lines.append(lineno)
    if relation is None:
        raise FormatError("SYNTAX", "missing @relation")
    if not in_data:
        raise FormatError("SYNTAX", "missing @data")
    return ArffTable(relation, tuple(attributes), tuple(rows), tuple(lines))


# --------------------------------------------------------------------------- writing


def format_number(x: float) -> str:
    """Shortest decimal text that parses back to exactly ``x``."""
    x = float(x)
    if math.isfinite(x) and x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def quote(text: str) -> str:
    if text and not any(ch in _SPECIAL for ch in text):
        return text
    return "'" + text.replace("\\", "\\\\").replace("'", "\\'") + "'"


def serialize_arff(table: ArffTable) -> str:
    out = [f"@RELATION {quote(table.relation)}", ""]
    for a in table.attributes:
        if a.kind == "numeric":
            t = "NUMERIC"
        elif a.kind == "string":
            t = "STRING"
        else:
            t = "{" + ",".join(quote(v) for v in a.values) + "}"
        out.append(f"@ATTRIBUTE {quote(a.name)} {t}")
    out.append("")
    out.append("@DATA")
    for row in table.rows:
        if len(row) != len(table.attributes):
            raise FormatError("ARITY", f"row has {len(row)} values, expected {len(table.attributes)}")
        cells = []
        for v, a in zip(row, table.attributes):
            if v is None:
                cells.append("?")
            elif a.kind == "numeric":
                cells.append(format_number(v))
            else:
                cells.append(quote(str(v)))
        out.append(",".join(cells))
    return "\n".join(out) + "\n"
