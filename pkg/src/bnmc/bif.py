"""Reader and writer for the BIF interchange format.

Supported subset: `network`, `variable` blocks with `type discrete`, and
`probability` blocks given either as a single `table` row or as per-row
`(parent values) p1, ..., pk;` entries. `property` strings are kept as
opaque metadata on the surrounding block. Comments follow C conventions
(`//` and `/* ... */`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .errors import BifParseError
from .network import BayesianNetwork, Cpt, Variable, network_from_cpts, validate

_PUNCT = set("{}()[]|,;")


@dataclass
class _Token:
    text: str
    line: int
    col: int


@dataclass
class VariableBlock:
    name: str
    values: tuple[str, ...]
    properties: tuple[str, ...] = ()


@dataclass
class ProbabilityBlock:
    owner: str
    parents: tuple[str, ...]
    table: tuple[float, ...] | None = None
    entries: tuple[tuple[tuple[str, ...], tuple[float, ...]], ...] = ()
    properties: tuple[str, ...] = ()


@dataclass
class BifDocument:
    """Parsed structure of a BIF file, before network assembly."""

    name: str
    variables: list[VariableBlock] = field(default_factory=list)
    probabilities: list[ProbabilityBlock] = field(default_factory=list)
    properties: tuple[str, ...] = ()


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
        elif ch.isspace():
            i, col = i + 1, col + 1
        elif text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
        elif text.startswith("/*", i):
            end = text.find("*/", i + 2)
            if end < 0:
                raise BifParseError("unterminated block comment", line, col)
            skipped = text[i : end + 2]
            line += skipped.count("\n")
            col = len(skipped) - skipped.rfind("\n") if "\n" in skipped else col + len(skipped)
            i = end + 2
        elif ch in _PUNCT:
            tokens.append(_Token(ch, line, col))
            i, col = i + 1, col + 1
        else:
            start = i
            while i < n and not text[i].isspace() and text[i] not in _PUNCT:
                i += 1
            tokens.append(_Token(text[start:i], line, col))
            col += i - start
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def _error(self, message: str) -> BifParseError:
        if self.pos < len(self.tokens):
            tok = self.tokens[self.pos]
            return BifParseError(message, tok.line, tok.col)
        return BifParseError(message + " (at end of input)")

    def peek(self) -> str | None:
        return self.tokens[self.pos].text if self.pos < len(self.tokens) else None

    def next(self) -> _Token:
        if self.pos >= len(self.tokens):
            raise BifParseError("unexpected end of input")
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.next()
        if tok.text != text:
            raise BifParseError(f"expected {text!r}, got {tok.text!r}", tok.line, tok.col)
        return tok

    def _number(self) -> float:
        tok = self.next()
        try:
            return float(tok.text)
        except ValueError:
            raise BifParseError(f"expected a number, got {tok.text!r}", tok.line, tok.col)

    def _number_list(self) -> tuple[float, ...]:
        out = [self._number()]
        while self.peek() != ";":
            if self.peek() == ",":
                self.next()
            out.append(self._number())
        self.expect(";")
        return tuple(out)

    def _property(self) -> str:
        # `property` already consumed; keep the raw remainder up to `;`.
        parts = []
        while self.peek() not in (";", None):
            parts.append(self.next().text)
        self.expect(";")
        return " ".join(parts)

    def document(self) -> BifDocument:
        self.expect("network")
        name_parts = []
        while self.peek() != "{":
            name_parts.append(self.next().text)
        self.expect("{")
        net_props = []
        while self.peek() != "}":
            tok = self.next()
            if tok.text != "property":
                raise BifParseError(
                    f"unexpected {tok.text!r} in network block", tok.line, tok.col
                )
            net_props.append(self._property())
        self.expect("}")
        doc = BifDocument(name=" ".join(name_parts) or "unnamed", properties=tuple(net_props))
        while self.peek() is not None:
            tok = self.next()
            if tok.text == "variable":
                doc.variables.append(self._variable_block())
            elif tok.text == "probability":
                doc.probabilities.append(self._probability_block())
            else:
                raise BifParseError(
                    f"expected 'variable' or 'probability', got {tok.text!r}",
                    tok.line,
                    tok.col,
                )
        return doc

    def _variable_block(self) -> VariableBlock:
        name = self.next().text
        self.expect("{")
        values: tuple[str, ...] | None = None
        props = []
        while self.peek() != "}":
            tok = self.next()
            if tok.text == "type":
                self.expect("discrete")
                self.expect("[")
                count = int(self._number())
                self.expect("]")
                self.expect("{")
                labels = []
                while self.peek() != "}":
                    if self.peek() == ",":
                        self.next()
                        continue
                    labels.append(self.next().text)
                self.expect("}")
                self.expect(";")
                if len(labels) != count:
                    raise BifParseError(
                        f"variable {name}: declared {count} values, listed {len(labels)}",
                        tok.line,
                        tok.col,
                    )
                values = tuple(labels)
            elif tok.text == "property":
                props.append(self._property())
            else:
                raise BifParseError(
                    f"variable {name}: unsupported item {tok.text!r}", tok.line, tok.col
                )
        self.expect("}")
        if values is None:
            raise BifParseError(f"variable {name}: missing 'type discrete' declaration")
        return VariableBlock(name=name, values=values, properties=tuple(props))

    def _probability_block(self) -> ProbabilityBlock:
        self.expect("(")
        owner = self.next().text
        parents: list[str] = []
        if self.peek() == "|":
            self.next()
            while self.peek() != ")":
                if self.peek() == ",":
                    self.next()
                    continue
                parents.append(self.next().text)
        self.expect(")")
        self.expect("{")
        table = None
        entries = []
        props = []
        while self.peek() != "}":
            tok = self.next()
            if tok.text == "table":
                if table is not None:
                    raise BifParseError(
                        f"probability block {owner}: duplicate table row", tok.line, tok.col
                    )
                table = self._number_list()
            elif tok.text == "(":
                labels = []
                while self.peek() != ")":
                    if self.peek() == ",":
                        self.next()
                        continue
                    labels.append(self.next().text)
                self.expect(")")
                entries.append((tuple(labels), self._number_list()))
            elif tok.text == "property":
                props.append(self._property())
            else:
                raise BifParseError(
                    f"probability block {owner}: unsupported item {tok.text!r}",
                    tok.line,
                    tok.col,
                )
        self.expect("}")
        return ProbabilityBlock(
            owner=owner,
            parents=tuple(parents),
            table=table,
            entries=tuple(entries),
            properties=tuple(props),
        )


def parse_bif_document(text: str | bytes) -> BifDocument:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    return _Parser(text).document()


def document_to_network(doc: BifDocument) -> BayesianNetwork:
    by_name: dict[str, Variable] = {}
    variables = []
    for i, block in enumerate(doc.variables):
        if block.name in by_name:
            raise BifParseError(f"variable {block.name} declared twice")
        var = Variable(id=i, name=block.name, domain=block.values)
        by_name[block.name] = var
        variables.append(var)

    cpts: dict[int, Cpt] = {}
    for block in doc.probabilities:
        if block.owner not in by_name:
            raise BifParseError(
                f"probability block references undeclared variable {block.owner!r}"
            )
        owner = by_name[block.owner]
        declared_parents = []
        for p in block.parents:
            if p not in by_name:
                raise BifParseError(
                    f"probability block {block.owner}: undeclared parent {p!r}"
                )
            declared_parents.append(by_name[p])
        if owner.id in cpts:
            raise BifParseError(f"duplicate probability block for {block.owner}")

        canonical = sorted(declared_parents, key=lambda v: v.id)
        reorder = [declared_parents.index(v) for v in canonical]
        rows: dict[tuple[int, ...], tuple[float, ...]] = {}

        def add_row(declared_key: tuple[int, ...], probs: tuple[float, ...]) -> None:
            key = tuple(declared_key[i] for i in reorder)
            if key in rows:
                raise BifParseError(
                    f"probability block {block.owner}: duplicate row for parents "
                    f"{tuple(canonical[i].name for i in range(len(key)))} = {key}"
                )
            if len(probs) != len(owner.domain):
                raise BifParseError(
                    f"probability block {block.owner}: row has {len(probs)} entries, "
                    f"domain has {len(owner.domain)}"
                )
            rows[key] = probs

        if block.table is not None:
            if block.entries:
                raise BifParseError(
                    f"probability block {block.owner}: mixes table and entry rows"
                )
            if declared_parents:
                # Table rows enumerate parent values in row-major declared order.
                sizes = [len(p.domain) for p in declared_parents]
                total = 1
                for s in sizes:
                    total *= s
                if len(block.table) != total * len(owner.domain):
                    raise BifParseError(
                        f"probability block {block.owner}: table length "
                        f"{len(block.table)} != {total * len(owner.domain)}"
                    )
                for flat in range(total):
                    idx, rem = [], flat
                    for s in reversed(sizes):
                        idx.append(rem % s)
                        rem //= s
                    declared_key = tuple(reversed(idx))
                    start = flat * len(owner.domain)
                    add_row(declared_key, tuple(block.table[start : start + len(owner.domain)]))
            else:
                add_row((), block.table)
        else:
            if not block.entries and declared_parents:
                raise BifParseError(f"probability block {block.owner}: no rows")
            if not declared_parents and not block.entries:
                raise BifParseError(f"probability block {block.owner}: no table row")
            for labels, probs in block.entries:
                if len(labels) != len(declared_parents):
                    raise BifParseError(
                        f"probability block {block.owner}: row names {len(labels)} "
                        f"parent values, expected {len(declared_parents)}"
                    )
                declared_key = []
                for label, parent in zip(labels, declared_parents):
                    if label not in parent.domain:
                        raise BifParseError(
                            f"probability block {block.owner}: value {label!r} not in "
                            f"domain of parent {parent.name}"
                        )
                    declared_key.append(parent.domain.index(label))
                add_row(tuple(declared_key), probs)

        expected = set(product(*(range(len(v.domain)) for v in canonical)))
        missing = expected - set(rows)
        if missing:
            key = sorted(missing)[0]
            raise BifParseError(
                f"probability block {block.owner}: missing row for parents "
                f"{tuple(v.name for v in canonical)} = {key}"
            )
        cpts[owner.id] = Cpt(
            owner=owner.id, parents=tuple(v.id for v in canonical), rows=rows
        )

    for var in variables:
        if var.id not in cpts:
            raise BifParseError(f"no probability block for variable {var.name}")
    return network_from_cpts(doc.name, variables, [cpts[i] for i in range(len(variables))])


def parse_bif(text: str | bytes) -> BayesianNetwork:
    """Parse BIF text into a validated network."""
    bn = document_to_network(parse_bif_document(text))
    problems = validate(bn)
    if problems:
        raise BifParseError("invalid network: " + "; ".join(problems))
    return bn


def _fmt(p: float) -> str:
    # repr round-trips binary64 exactly and stays readable.
    return repr(float(p))


def write_bif(bn: BayesianNetwork) -> str:
    """Serialize so that parse_bif(write_bif(bn)) is structurally equal to bn."""
    lines = [f"network {bn.name} {{", "}"]
    for v in bn.variables:
        lines.append(f"variable {v.name} {{")
        labels = ", ".join(v.domain)
        lines.append(f"  type discrete [ {len(v.domain)} ] {{ {labels} }};")
        lines.append("}")
    for cpt in bn.cpts:
        v = bn.variables[cpt.owner]
        if not cpt.parents:
            lines.append(f"probability ( {v.name} ) {{")
            lines.append(f"  table {', '.join(_fmt(p) for p in cpt.rows[()])};")
        else:
            parent_names = ", ".join(bn.variables[p].name for p in cpt.parents)
            lines.append(f"probability ( {v.name} | {parent_names} ) {{")
            for key in sorted(cpt.rows):
                labels = ", ".join(
                    bn.variables[p].domain[k] for p, k in zip(cpt.parents, key)
                )
                lines.append(
                    f"  ({labels}) {', '.join(_fmt(p) for p in cpt.rows[key])};"
                )
        lines.append("}")
    return "\n".join(lines) + "\n"
