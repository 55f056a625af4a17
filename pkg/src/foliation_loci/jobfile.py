"""Declarative job files.

Grammar (one entry per line or separated by ``;``, ``#`` starts a comment)::

    entry  := name ":" value | name "{" entry* "}"
    value  := "[" value ("," value)* "]" | "[" "]" | text

Lists may span lines.  Scalars are kept as stripped strings and interpreted
by the subcommand.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .algebra import Ideal, fraction_field, parse_poly, parse_rational, poly_ring
from .connection import ConnectionMatrix
from .errors import ParseError
from .foliation import AffineChart, Foliation, from_connection, make_foliation
from .gauss_manin import DeRhamForm, HyperellipticFamily

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def _strip_comments(text: str) -> str:
    return "\n".join(line.split("#", 1)[0] for line in text.splitlines())


class _Parser:
    def __init__(self, text: str):
        self.s = _strip_comments(text)
        self.pos = 0

    def error(self, msg):
        line = self.s.count("\n", 0, self.pos) + 1
        raise ParseError(f"line {line}: {msg}")

    def skip(self, newlines=True):
        seps = " \t\r\n;" if newlines else " \t\r"
        while self.pos < len(self.s) and self.s[self.pos] in seps:
            self.pos += 1

    def block(self, closing: str | None) -> dict:
        out: dict = {}
        while True:
            self.skip()
            if self.pos >= len(self.s):
                if closing:
                    self.error(f"missing '{closing}'")
                return out
            if closing and self.s[self.pos] == closing:
                self.pos += 1
                return out
            m = _NAME.match(self.s, self.pos)
            if not m:
                self.error(f"expected a name, found {self.s[self.pos]!r}")
            name = m.group(0)
            self.pos = m.end()
            self.skip(newlines=False)
            if name in out:
                self.error(f"duplicate entry {name!r}")
            if self.s.startswith("{", self.pos):
                self.pos += 1
                out[name] = self.block("}")
            elif self.s.startswith(":", self.pos):
                self.pos += 1
                self.skip(newlines=False)
                out[name] = self.value()
            else:
                self.error(f"expected ':' or '{{' after {name!r}")

    def value(self):
        if self.s.startswith("[", self.pos):
            self.pos += 1
            items = []
            while True:
                self._ws()
                if self.s.startswith("]", self.pos):
                    self.pos += 1
                    return items
                items.append(self.value())
                self._ws()
                if self.s.startswith(",", self.pos):
                    self.pos += 1
                elif not self.s.startswith("]", self.pos):
                    self.error("expected ',' or ']' in list")
        start = self.pos
        depth = 0
        while self.pos < len(self.s):
            c = self.s[self.pos]
            if c == "(":
                depth += 1
            elif c == ")":
                depth -= 1
            elif depth == 0 and c in ",]\n;}":
                break
            self.pos += 1
        text = self.s[start:self.pos].strip()
        if not text:
            self.error("empty value")
        return text

    def _ws(self):
        while self.pos < len(self.s) and self.s[self.pos] in " \t\r\n":
            self.pos += 1


def parse_job_text(text: str) -> dict:
    return _Parser(text).block(None)


PARAMETERS = {"k", "mu", "prec", "subset_cap", "lambda", "order"}


@dataclass
class JobFile:
    entries: dict

    @classmethod
    def parse(cls, text: str) -> "JobFile":
        return cls(parse_job_text(text))

    @classmethod
    def load(cls, path: str) -> "JobFile":
        try:
            with open(path, encoding="utf-8") as fh:
                return cls.parse(fh.read())
        except OSError as exc:
            raise ParseError(f"cannot read job file: {exc}") from exc

    def require(self, required, optional=()):
        have = set(self.entries)
        missing = [b for b in required if b not in have]
        if missing:
            raise ParseError(f"missing job entries: {', '.join(missing)}")
        extra = sorted(have - set(required) - set(optional) - PARAMETERS)
        if extra:
            raise ParseError(f"entries not used by this subcommand: {', '.join(extra)}")

    def _block(self, name) -> dict:
        b = self.entries.get(name)
        if not isinstance(b, dict):
            raise ParseError(f"{name!r} must be a block")
        return b

    def _list(self, value, what) -> list:
        if not isinstance(value, list):
            raise ParseError(f"{what} must be a list")
        return value

    def param(self, name, default=None):
        v = self.entries.get(name, default)
        if isinstance(v, (list, dict)):
            raise ParseError(f"{name!r} must be a scalar")
        return v

    # ---------------------------------------------------------------- objects

    def chart(self) -> AffineChart:
        b = self._block("chart")
        unknown = set(b) - {"vars", "ideal", "invert"}
        if unknown:
            raise ParseError(f"unknown chart entries: {', '.join(sorted(unknown))}")
        names = self._list(b.get("vars", []), "chart vars")
        if not names or len(set(names)) != len(names):
            raise ParseError("chart vars must be a nonempty list of distinct names")
        for n in names:
            if not isinstance(n, str) or not _NAME.fullmatch(n):
                raise ParseError(f"bad variable name {n!r}")
        ring = poly_ring(tuple(names))
        ideal = [parse_poly(t, ring) for t in self._list(b.get("ideal", []), "chart ideal")]
        inv = [parse_poly(t, ring) for t in self._list(b.get("invert", []), "chart invert")]
        return AffineChart.build(names, ideal, inv)

    def foliation(self, check: bool = True) -> Foliation:
        chart = self.chart()
        rows = self._list(self.entries["fields"], "fields")
        K = chart.field
        fields = []
        for row in rows:
            row = self._list(row, "each field")
            if len(row) != len(chart.variables):
                raise ParseError(f"field has {len(row)} components, chart has {len(chart.variables)} variables")
            fields.append([parse_rational(t, K) for t in row])
        if not fields:
            raise ParseError("at least one field is required")
        return make_foliation(chart, fields, check=check)

    def connection_foliation(self) -> Foliation:
        b = self._block("connection")
        base = self._list(b.get("base", []), "connection base")
        group = b.get("group", "g")
        K = fraction_field(tuple(base))
        mats = []
        for v in base:
            rows = self._list(b.get(v), f"connection matrix for {v}")
            mats.append([[parse_rational(t, K) for t in self._list(r, "matrix row")] for r in rows])
        inv = [parse_poly(t, K.ring) for t in self._list(b.get("invert", []), "connection invert")]
        return from_connection(ConnectionMatrix(tuple(base), tuple(mats), tuple(inv)), group)

    def variety(self, chart: AffineChart) -> Ideal:
        b = self._block("variety")
        gens = [parse_poly(t, chart.ring) for t in self._list(b.get("ideal", []), "variety ideal")]
        return Ideal.of(gens, chart.ring) if gens else Ideal(chart.ring, ())

    def params(self) -> list:
        ps = self._list(self.entries.get("params", []), "params")
        return [str(p) for p in ps]

    def polys(self, chart: AffineChart) -> list:
        return [parse_poly(t, chart.ring) for t in self._list(self.entries["polys"], "polys")]

    def point(self) -> list | None:
        if "point" not in self.entries:
            return None
        return [parse_fraction(t) for t in self._list(self.entries["point"], "point")]

    def family(self) -> HyperellipticFamily:
        b = self._block("family")
        if "f" not in b:
            raise ParseError("family block needs f")
        base = self._list(b.get("base", []), "family base")
        return HyperellipticFamily.parse(b["f"], base, b.get("x", "x"))

    def form(self, fam: HyperellipticFamily) -> DeRhamForm:
        if "form" not in self.entries:
            return DeRhamForm.monomial(fam, 0)
        b = self._block("form")
        num = parse_poly(b.get("num", "1"), fam.ring)
        try:
            pole = int(b.get("pole", "1"))
        except ValueError as exc:
            raise ParseError("form pole must be an integer") from exc
        return DeRhamForm.from_poly(num, fam, pole)


def parse_fraction(text) -> Fraction:
    if not isinstance(text, str) or not re.fullmatch(r"\s*-?\d+(/\d+)?\s*", text):
        raise ParseError(f"expected a rational number, got {text!r}")
    return Fraction(text.strip())
