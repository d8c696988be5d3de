"""Vtrees and probabilistic sentential decision diagrams.

Only validation and evaluation of structures loaded from the repo's text
formats are supported; compiling a network or formula into a PSDD is out of
scope. See docs/formats.md for the file grammar.

A diagram is immutable after parsing. Assignment probability follows the
recursive decision semantics (the unique satisfied prime selects the
element); term probability is one bottom-up pass with per-call memo tables,
visiting each node at most once.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Mapping

from .errors import (
    EnumerationCapError,
    MalformedQueryError,
    PsddError,
    PsddParseError,
)
from .symbolic import SymbolicBn, bits_of_assignment

THETA_SUM_TOLERANCE = 1e-9
PARTITION_ENUM_LIMIT = 20


# -- vtrees ---------------------------------------------------------------------


@dataclass(frozen=True)
class VtreeNode:
    id: int
    var: str | None = None  # leaves only
    left: int | None = None  # internal only
    right: int | None = None

    @property
    def is_leaf(self) -> bool:
        return self.var is not None


@dataclass(frozen=True)
class Vtree:
    nodes: Mapping[int, VtreeNode]
    root: int

    def variables_under(self, node_id: int) -> frozenset[str]:
        node = self.nodes[node_id]
        if node.is_leaf:
            return frozenset((node.var,))
        return self.variables_under(node.left) | self.variables_under(node.right)

    def descendants(self, node_id: int) -> frozenset[int]:
        node = self.nodes[node_id]
        if node.is_leaf:
            return frozenset((node_id,))
        return (
            frozenset((node_id,))
            | self.descendants(node.left)
            | self.descendants(node.right)
        )

    @property
    def variables(self) -> frozenset[str]:
        return self.variables_under(self.root)


def parse_vtree(text: str) -> Vtree:
    """Load the line-oriented vtree format (`L id var` / `I id left right`)."""
    nodes: dict[int, VtreeNode] = {}
    referenced: set[int] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        try:
            if parts[0] == "L" and len(parts) == 3:
                node = VtreeNode(id=int(parts[1]), var=parts[2])
            elif parts[0] == "I" and len(parts) == 4:
                node = VtreeNode(
                    id=int(parts[1]), left=int(parts[2]), right=int(parts[3])
                )
            else:
                raise ValueError
        except ValueError:
            raise PsddParseError(f"vtree line {lineno}: cannot parse {raw!r}")
        if node.id in nodes:
            raise PsddParseError(f"vtree line {lineno}: duplicate id {node.id}")
        nodes[node.id] = node
        if not node.is_leaf:
            referenced.update((node.left, node.right))
    if not nodes:
        raise PsddParseError("empty vtree")
    for node in nodes.values():
        if not node.is_leaf:
            for child in (node.left, node.right):
                if child not in nodes:
                    raise PsddParseError(f"vtree node {node.id} references missing id {child}")
    roots = set(nodes) - referenced
    if len(roots) != 1:
        raise PsddParseError(f"vtree must have exactly one root, found {sorted(roots)}")
    if len(referenced) != sum(2 for n in nodes.values() if not n.is_leaf):
        raise PsddParseError("vtree node referenced by more than one parent")
    root = roots.pop()
    # With unique references and a single root, reachable nodes form a tree;
    # anything unreachable is disconnected junk (possibly cyclic).
    reachable: set[int] = set()
    stack = [root]
    while stack:
        nid = stack.pop()
        if nid in reachable:
            continue
        reachable.add(nid)
        node = nodes[nid]
        if not node.is_leaf:
            stack.extend((node.left, node.right))
    if reachable != set(nodes):
        stray = sorted(set(nodes) - reachable)
        raise PsddParseError(f"vtree nodes {stray} are not reachable from the root")
    vtree = Vtree(nodes=nodes, root=root)
    labels = [n.var for n in nodes.values() if n.is_leaf]
    if len(set(labels)) != len(labels):
        raise PsddParseError("vtree leaf labels must be unique")
    return vtree


# -- PSDD nodes -------------------------------------------------------------------

LITERAL = "literal"
BOTTOM = "bottom"
TOP = "top"
DECISION = "decision"


@dataclass(frozen=True)
class PsddNode:
    id: int
    vtree_id: int
    kind: str
    var: str | None = None  # literal / top
    negated: bool = False  # literal
    theta: float | None = None  # top
    elements: tuple[tuple[int, int, float], ...] = ()  # decision


@dataclass(frozen=True)
class Psdd:
    vtree: Vtree
    nodes: Mapping[int, PsddNode]
    root: int

    __hash__ = None

    @property
    def variables(self) -> frozenset[str]:
        return self.vtree.variables

    def node_count(self) -> int:
        seen: set[int] = set()
        stack = [self.root]
        while stack:
            nid = stack.pop()
            if nid in seen:
                continue
            seen.add(nid)
            node = self.nodes[nid]
            for prime, sub, _ in node.elements:
                stack.append(prime)
                stack.append(sub)
        return len(seen)


@dataclass(frozen=True)
class StructureFlags:
    """Diagnosed canonical-form properties; evaluation does not require them."""

    compressed: bool
    trimmed: bool


def structure_flags(p: Psdd) -> StructureFlags:
    compressed = True
    trimmed = True
    for node in p.nodes.values():
        if node.kind != DECISION:
            continue
        subs = [sub for _, sub, _ in node.elements]
        if len(set(subs)) != len(subs):
            compressed = False
        primes = [p.nodes[pr] for pr, _, _ in node.elements]
        if len(node.elements) == 1 and primes[0].kind == TOP:
            trimmed = False
        if len(node.elements) == 2:
            sub_kinds = sorted(p.nodes[s].kind for _, s, _ in node.elements)
            if sub_kinds == sorted((TOP, BOTTOM)):
                trimmed = False
    return StructureFlags(compressed=compressed, trimmed=trimmed)


def parse_psdd(vtree_text: str, psdd_text: str) -> Psdd:
    """Load and validate a vtree/PSDD file pair."""
    vtree = parse_vtree(vtree_text)
    nodes: dict[int, PsddNode] = {}
    last_id: int | None = None
    referenced: set[int] = set()

    def check_vtree_id(lineno: int, vid: int) -> VtreeNode:
        if vid not in vtree.nodes:
            raise PsddParseError(f"psdd line {lineno}: unknown vtree id {vid}")
        return vtree.nodes[vid]

    for lineno, raw in enumerate(psdd_text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        kind = parts[0]
        try:
            if kind == "L" and len(parts) == 4:
                nid, vid, lit = int(parts[1]), int(parts[2]), parts[3]
                leaf = check_vtree_id(lineno, vid)
                negated = lit.startswith("!")
                var = lit[1:] if negated else lit
                if not leaf.is_leaf or leaf.var != var:
                    raise PsddParseError(
                        f"psdd line {lineno}: literal {lit!r} does not match vtree "
                        f"node {vid}"
                    )
                node = PsddNode(id=nid, vtree_id=vid, kind=LITERAL, var=var, negated=negated)
            elif kind == "B" and len(parts) == 3:
                nid, vid = int(parts[1]), int(parts[2])
                leaf = check_vtree_id(lineno, vid)
                if not leaf.is_leaf:
                    raise PsddParseError(
                        f"psdd line {lineno}: bottom terminal must sit at a vtree leaf"
                    )
                node = PsddNode(id=nid, vtree_id=vid, kind=BOTTOM)
            elif kind == "T" and len(parts) == 4:
                nid, vid, theta = int(parts[1]), int(parts[2]), float(parts[3])
                leaf = check_vtree_id(lineno, vid)
                if not leaf.is_leaf:
                    raise PsddParseError(
                        f"psdd line {lineno}: parameterized terminal must sit at a "
                        "vtree leaf"
                    )
                if not 0.0 < theta < 1.0:
                    raise PsddParseError(
                        f"psdd line {lineno}: terminal parameter {theta!r} outside (0, 1)"
                    )
                node = PsddNode(id=nid, vtree_id=vid, kind=TOP, var=leaf.var, theta=theta)
            elif kind == "D" and len(parts) >= 4:
                nid, vid, k = int(parts[1]), int(parts[2]), int(parts[3])
                inner = check_vtree_id(lineno, vid)
                if inner.is_leaf:
                    raise PsddParseError(
                        f"psdd line {lineno}: decision node must sit at an internal "
                        "vtree node"
                    )
                if len(parts) != 4 + 3 * k:
                    raise PsddParseError(
                        f"psdd line {lineno}: expected {3 * k} element fields"
                    )
                elements = []
                left_ids = vtree.descendants(inner.left)
                right_ids = vtree.descendants(inner.right)
                for j in range(k):
                    prime = int(parts[4 + 3 * j])
                    sub = int(parts[5 + 3 * j])
                    theta = float(parts[6 + 3 * j])
                    for child, side, ids in (
                        (prime, "prime", left_ids),
                        (sub, "sub", right_ids),
                    ):
                        if child not in nodes:
                            raise PsddParseError(
                                f"psdd line {lineno}: dangling id {child}"
                            )
                        if nodes[child].vtree_id not in ids:
                            raise PsddParseError(
                                f"psdd line {lineno}: {side} {child} does not respect "
                                f"the {side} subtree of vtree node {vid}"
                            )
                        referenced.add(child)
                    if not 0.0 <= theta <= 1.0:  # also rejects NaN
                        raise PsddParseError(
                            f"psdd line {lineno}: element parameter {theta!r} outside "
                            "[0, 1]"
                        )
                    zero_sub = nodes[sub].kind == BOTTOM
                    if zero_sub != (theta == 0.0):
                        raise PsddParseError(
                            f"psdd line {lineno}: parameter must be 0 exactly when "
                            "the sub is bottom"
                        )
                    elements.append((prime, sub, theta))
                total = sum(t for _, _, t in elements)
                if abs(total - 1.0) > THETA_SUM_TOLERANCE:
                    raise PsddParseError(
                        f"psdd line {lineno}: element parameters sum to {total!r}"
                    )
                node = PsddNode(
                    id=nid, vtree_id=vid, kind=DECISION, elements=tuple(elements)
                )
            else:
                raise PsddParseError(f"psdd line {lineno}: cannot parse {raw!r}")
        except PsddParseError:
            raise
        except ValueError:
            raise PsddParseError(f"psdd line {lineno}: cannot parse {raw!r}")
        if node.id in nodes:
            raise PsddParseError(f"psdd line {lineno}: duplicate node id {node.id}")
        nodes[node.id] = node
        last_id = node.id
    if last_id is None:
        raise PsddParseError("empty psdd")
    root = nodes[last_id]
    if root.vtree_id != vtree.root:
        raise PsddParseError(
            f"root node {root.id} respects vtree node {root.vtree_id}, "
            f"not the vtree root {vtree.root}"
        )
    return Psdd(vtree=vtree, nodes=nodes, root=last_id)


# -- semantics ----------------------------------------------------------------------


def _satisfies(p: Psdd, node_id: int, assignment: Mapping[str, int], memo: dict) -> bool:
    """Boolean abstraction of a node under a (sufficiently bound) assignment."""
    hit = memo.get(node_id)
    if hit is not None:
        return hit
    node = p.nodes[node_id]
    if node.kind == TOP:
        result = True
    elif node.kind == BOTTOM:
        result = False
    elif node.kind == LITERAL:
        result = assignment[node.var] == (0 if node.negated else 1)
    else:
        result = any(
            _satisfies(p, prime, assignment, memo)
            and _satisfies(p, sub, assignment, memo)
            for prime, sub, _ in node.elements
        )
    memo[node_id] = result
    return result


def _check_bits(binding: Mapping[str, int]) -> None:
    for name, value in binding.items():
        if value not in (0, 1):
            raise MalformedQueryError(f"{name} must be bound to 0 or 1, got {value!r}")


def prob_assignment(p: Psdd, full: Mapping[str, int]) -> float:
    """Probability of one full assignment over the vtree variables."""
    missing = sorted(p.variables - set(full))
    if missing:
        raise MalformedQueryError(f"assignment must bind every variable; missing {missing}")
    _check_bits(full)
    sat_memo: dict[int, bool] = {}
    value_memo: dict[int, float] = {}

    def value(node_id: int) -> float:
        hit = value_memo.get(node_id)
        if hit is not None:
            return hit
        node = p.nodes[node_id]
        if node.kind == TOP:
            result = node.theta if full[node.var] else 1.0 - node.theta
        elif node.kind == BOTTOM:
            result = 0.0
        elif node.kind == LITERAL:
            result = 1.0 if full[node.var] == (0 if node.negated else 1) else 0.0
        else:
            matches = [
                (prime, sub, theta)
                for prime, sub, theta in node.elements
                if _satisfies(p, prime, full, sat_memo)
            ]
            if not matches:
                raise PsddError(
                    f"no prime of decision node {node_id} is satisfied; "
                    "the primes do not form a partition"
                )
            if len(matches) > 1:
                raise PsddError(
                    f"multiple primes of decision node {node_id} are satisfied; "
                    "the primes do not form a partition"
                )
            prime, sub, theta = matches[0]
            result = theta * value(prime) * value(sub)
        value_memo[node_id] = result
        return result

    return value(p.root)


@dataclass(frozen=True)
class TermResult:
    value: float
    nodes_visited: int


def prob_term_detailed(p: Psdd, partial: Mapping[str, int]) -> TermResult:
    """Marginal probability of a conjunction, one bottom-up memoized pass."""
    unknown = sorted(set(partial) - p.variables)
    if unknown:
        raise MalformedQueryError(f"unknown variables in term: {unknown}")
    _check_bits(partial)
    memo: dict[int, float] = {}

    def mass(node_id: int) -> float:
        hit = memo.get(node_id)
        if hit is not None:
            return hit
        node = p.nodes[node_id]
        if node.kind == TOP:
            bound = partial.get(node.var)
            result = 1.0 if bound is None else (node.theta if bound else 1.0 - node.theta)
        elif node.kind == BOTTOM:
            result = 0.0
        elif node.kind == LITERAL:
            bound = partial.get(node.var)
            wanted = 0 if node.negated else 1
            result = 1.0 if bound is None or bound == wanted else 0.0
        else:
            result = sum(
                theta * mass(prime) * mass(sub)
                for prime, sub, theta in node.elements
                if theta != 0.0
            )
        memo[node_id] = result
        return result

    value = mass(p.root)
    return TermResult(value=value, nodes_visited=len(memo))


def prob_term(p: Psdd, partial: Mapping[str, int]) -> float:
    return prob_term_detailed(p, partial).value


# -- validation ---------------------------------------------------------------------


@dataclass(frozen=True)
class PartitionVerdict:
    node_id: int
    consistent: bool
    exclusive: bool
    exhaustive: bool

    @property
    def ok(self) -> bool:
        return self.consistent and self.exclusive and self.exhaustive


@dataclass(frozen=True)
class PartitionReport:
    verdicts: tuple[PartitionVerdict, ...]

    @property
    def ok(self) -> bool:
        return all(v.ok for v in self.verdicts)


def validate_partition(p: Psdd, limit: int = PARTITION_ENUM_LIMIT) -> PartitionReport:
    """Check the partition property of every decision node by enumeration."""
    verdicts = []
    for node_id in sorted(p.nodes):
        node = p.nodes[node_id]
        if node.kind != DECISION:
            continue
        inner = p.vtree.nodes[node.vtree_id]
        left_vars = sorted(p.vtree.variables_under(inner.left))
        if len(left_vars) > limit:
            raise EnumerationCapError(
                f"decision node {node_id} has {len(left_vars)} left variables, "
                f"above the enumeration limit of {limit}"
            )
        seen_any = [False] * len(node.elements)
        exclusive = True
        exhaustive = True
        for bits in product((0, 1), repeat=len(left_vars)):
            assignment = dict(zip(left_vars, bits))
            memo: dict[int, bool] = {}
            hits = [
                j
                for j, (prime, _, _) in enumerate(node.elements)
                if _satisfies(p, prime, assignment, memo)
            ]
            for j in hits:
                seen_any[j] = True
            if len(hits) > 1:
                exclusive = False
            if not hits:
                exhaustive = False
        verdicts.append(
            PartitionVerdict(
                node_id=node_id,
                consistent=all(seen_any),
                exclusive=exclusive,
                exhaustive=exhaustive,
            )
        )
    return PartitionReport(verdicts=tuple(verdicts))


def compare_with_bn(
    p: Psdd, sym: SymbolicBn, mapping: Mapping[int, str]
) -> float:
    """Max |difference| between the PSDD and a compiled joint over all assignments.

    `mapping` sends each network variable id to the PSDD variable carrying
    its truth value; every network variable must be binary.
    """
    bn = sym.network
    unmapped = [v.name for v in bn.variables if v.id not in mapping]
    if unmapped:
        raise MalformedQueryError(f"mapping incomplete; missing {unmapped}")
    for v in bn.variables:
        if len(v.domain) != 2:
            raise MalformedQueryError(
                f"variable {v.name} is not binary; no PSDD correspondence"
            )
    if set(mapping.values()) != set(p.variables):
        raise MalformedQueryError(
            "mapping must cover exactly the PSDD variables"
        )
    n = len(bn.variables)
    if n > PARTITION_ENUM_LIMIT:
        raise EnumerationCapError(f"{n} variables exceed the comparison limit")
    worst = 0.0
    for values in product((0, 1), repeat=n):
        assignment = dict(enumerate(values))
        psdd_assignment = {mapping[i]: v for i, v in assignment.items()}
        lhs = prob_assignment(p, psdd_assignment)
        rhs = sym.manager.evaluate(sym.joint, bits_of_assignment(sym, assignment))
        worst = max(worst, abs(lhs - rhs))
    return worst
