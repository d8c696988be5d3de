"""Hash-consed multi-terminal binary decision diagrams.

One manager owns a fixed total variable order and every node created under
it. Node references are plain integers, valid only within their manager.
Reduction (no duplicate structure, no node with identical children) is
enforced at creation time, so two references in one manager are equal
exactly when their functions agree on every evaluation.

Terminal values are keyed by their exact bit pattern; the only merging is
the collapse of -0.0 into 0.0, which is the same real number. Intermediate
results (partial sums) may exceed 1; range restrictions on distributions
are the caller's concern.

Node creation and the operations that populate caches must be serialized
per manager; finished references may be read concurrently.
"""

from __future__ import annotations

import math
import struct
from typing import Callable, Iterable, Mapping, Sequence

NodeRef = int

_OPS: dict[str, Callable[[float, float], float]] = {
    "+": lambda a, b: a + b,
    "*": lambda a, b: a * b,
    "min": min,
    "max": max,
}
_OP_ALIASES = {"×": "*", "x": "*"}


class MtbddManager:
    def __init__(self, variables: Sequence[str]):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise ValueError("variable labels must be unique")
        self._vars = variables
        self._level = {v: i for i, v in enumerate(variables)}
        self._leaf_level = len(variables)
        # Node store: terminals are (leaf_level, value), inner nodes
        # (level, lo, hi). Freed slots are recycled after collect().
        self._nodes: list[tuple | None] = []
        self._free: list[int] = []
        self._terminals: dict[bytes, int] = {}
        self._unique: dict[tuple[int, int, int], int] = {}
        self._apply_memo: dict[tuple, int] = {}
        self._restrict_memo: dict[tuple, int] = {}

    # -- introspection -----------------------------------------------------

    @property
    def variables(self) -> tuple[str, ...]:
        return self._vars

    def level(self, var: str) -> int:
        try:
            return self._level[var]
        except KeyError:
            raise ValueError(f"unknown variable {var!r}") from None

    def _entry(self, ref: NodeRef) -> tuple:
        if not isinstance(ref, int) or not 0 <= ref < len(self._nodes):
            raise ValueError(f"invalid node reference {ref!r}")
        entry = self._nodes[ref]
        if entry is None:
            raise ValueError(f"node reference {ref} was collected")
        return entry

    def is_terminal(self, ref: NodeRef) -> bool:
        return len(self._entry(ref)) == 2

    def terminal_value(self, ref: NodeRef) -> float:
        entry = self._entry(ref)
        if len(entry) != 2:
            raise ValueError(f"node {ref} is not a terminal")
        return entry[1]

    def top_var(self, ref: NodeRef) -> str | None:
        entry = self._entry(ref)
        return None if len(entry) == 2 else self._vars[entry[0]]

    def cofactors(self, ref: NodeRef) -> tuple[NodeRef, NodeRef]:
        entry = self._entry(ref)
        if len(entry) == 2:
            raise ValueError(f"node {ref} is a terminal")
        return entry[1], entry[2]

    def _level_of(self, ref: NodeRef) -> int:
        return self._entry(ref)[0]

    @property
    def live_nodes(self) -> int:
        return len(self._nodes) - len(self._free)

    # -- construction ------------------------------------------------------

    def _alloc(self, entry: tuple) -> NodeRef:
        if self._free:
            ref = self._free.pop()
            self._nodes[ref] = entry
            return ref
        self._nodes.append(entry)
        return len(self._nodes) - 1

    def terminal(self, value: float) -> NodeRef:
        value = float(value)
        if math.isnan(value) or math.isinf(value) or value < 0.0:
            raise ValueError(f"terminal value must be finite and nonnegative: {value!r}")
        if value == 0.0:
            value = 0.0  # collapse -0.0
        key = struct.pack("<d", value)
        ref = self._terminals.get(key)
        if ref is None:
            ref = self._alloc((self._leaf_level, value))
            self._terminals[key] = ref
        return ref

    def node(self, var: str, lo: NodeRef, hi: NodeRef) -> NodeRef:
        return self._mk(self.level(var), lo, hi)

    def _mk(self, level: int, lo: NodeRef, hi: NodeRef) -> NodeRef:
        if level >= self._level_of(lo) or level >= self._level_of(hi):
            raise ValueError(
                f"variable {self._vars[level]!r} must precede both children "
                "in the order"
            )
        if lo == hi:
            return lo
        key = (level, lo, hi)
        ref = self._unique.get(key)
        if ref is None:
            ref = self._alloc(key)
            self._unique[key] = ref
        return ref

    # -- operations ----------------------------------------------------------

    def apply(self, op: str, a: NodeRef, b: NodeRef) -> NodeRef:
        op = _OP_ALIASES.get(op, op)
        fn = _OPS.get(op)
        if fn is None:
            raise ValueError(f"unsupported operator {op!r}; use one of {sorted(_OPS)}")
        self._entry(a), self._entry(b)
        return self._apply(op, fn, a, b)

    def _apply(self, op: str, fn, a: NodeRef, b: NodeRef) -> NodeRef:
        ea, eb = self._nodes[a], self._nodes[b]
        if len(ea) == 2 and len(eb) == 2:
            return self.terminal(fn(ea[1], eb[1]))
        key = (op, a, b) if a <= b else (op, b, a)  # all supported ops commute
        hit = self._apply_memo.get(key)
        if hit is not None:
            return hit
        la, lb = ea[0], eb[0]
        level = min(la, lb)
        a0, a1 = (ea[1], ea[2]) if la == level else (a, a)
        b0, b1 = (eb[1], eb[2]) if lb == level else (b, b)
        result = self._mk(
            level, self._apply(op, fn, a0, b0), self._apply(op, fn, a1, b1)
        )
        self._apply_memo[key] = result
        return result

    def restrict(self, a: NodeRef, var: str, value: int) -> NodeRef:
        """Cofactor: fix one variable to 0 or 1."""
        target = self.level(var)
        if value not in (0, 1):
            raise ValueError("restriction value must be 0 or 1")
        self._entry(a)
        return self._restrict(a, target, value)

    def _restrict(self, a: NodeRef, target: int, value: int) -> NodeRef:
        entry = self._nodes[a]
        level = entry[0]
        if level > target:  # includes terminals; target variable cannot occur
            return a
        if level == target:
            return entry[1 + value]
        key = (a, target, value)
        hit = self._restrict_memo.get(key)
        if hit is not None:
            return hit
        result = self._mk(
            level,
            self._restrict(entry[1], target, value),
            self._restrict(entry[2], target, value),
        )
        self._restrict_memo[key] = result
        return result

    def sum_abstract(self, a: NodeRef, variables: Iterable[str]) -> NodeRef:
        """Sum the function over all valuations of the given variables."""
        levels = sorted({self.level(v) for v in variables}, reverse=True)
        self._entry(a)
        result = a
        for level in levels:  # bottom-up keeps intermediate diagrams small
            result = self._apply(
                "+",
                _OPS["+"],
                self._restrict(result, level, 0),
                self._restrict(result, level, 1),
            )
        return result

    def evaluate(self, a: NodeRef, evaluation: Mapping[str, int]) -> float:
        """Terminal value reached by branching along a total evaluation."""
        missing = [v for v in self._vars if v not in evaluation]
        if missing:
            raise ValueError(f"evaluation must bind every variable; missing {missing}")
        entry = self._entry(a)
        while len(entry) != 2:
            bit = evaluation[self._vars[entry[0]]]
            if bit not in (0, 1):
                raise ValueError(f"evaluation values must be 0 or 1, got {bit!r}")
            entry = self._nodes[entry[1 + bit]]
        return entry[1]

    def node_count(self, a: NodeRef) -> int:
        """Distinct reachable nodes, terminals included."""
        self._entry(a)
        seen = set()
        stack = [a]
        while stack:
            ref = stack.pop()
            if ref in seen:
                continue
            seen.add(ref)
            entry = self._nodes[ref]
            if len(entry) == 3:
                stack.append(entry[1])
                stack.append(entry[2])
        return len(seen)

    # -- maintenance ---------------------------------------------------------

    def clear_caches(self) -> None:
        """Drop operation memo tables; never changes any result reference."""
        self._apply_memo.clear()
        self._restrict_memo.clear()

    def collect(self, roots: Iterable[NodeRef]) -> int:
        """Reclaim nodes unreachable from `roots`; returns the number freed.

        References not reachable from the given roots become invalid. The
        default usage pattern is grow-only; collection is an explicit
        opt-in for long-lived managers.
        """
        keep = set()
        stack = [r for r in roots]
        for r in stack:
            self._entry(r)
        while stack:
            ref = stack.pop()
            if ref in keep:
                continue
            keep.add(ref)
            entry = self._nodes[ref]
            if len(entry) == 3:
                stack.append(entry[1])
                stack.append(entry[2])
        freed = 0
        for ref, entry in enumerate(self._nodes):
            if entry is None or ref in keep:
                continue
            if len(entry) == 2:
                del self._terminals[struct.pack("<d", entry[1])]
            else:
                del self._unique[entry]
            self._nodes[ref] = None
            self._free.append(ref)
            freed += 1
        self.clear_caches()  # memo entries may mention freed refs
        return freed

    # -- export ----------------------------------------------------------------

    def to_dot(self, a: NodeRef, name: str = "mtbdd") -> str:
        """Graphviz rendering with deterministic first-visit node naming."""
        self._entry(a)
        order: list[NodeRef] = []
        seen: set[NodeRef] = set()

        def visit(ref: NodeRef) -> None:
            if ref in seen:
                return
            seen.add(ref)
            order.append(ref)
            entry = self._nodes[ref]
            if len(entry) == 3:
                visit(entry[1])
                visit(entry[2])

        visit(a)
        names = {ref: f"n{i}" for i, ref in enumerate(order)}
        lines = [f"digraph {name} {{"]
        for ref in order:
            entry = self._nodes[ref]
            if len(entry) == 2:
                lines.append(f'  {names[ref]} [shape=box, label="{entry[1]!r}"];')
            else:
                lines.append(
                    f'  {names[ref]} [shape=circle, label="{self._vars[entry[0]]}"];'
                )
        for ref in order:
            entry = self._nodes[ref]
            if len(entry) == 3:
                lines.append(f"  {names[ref]} -> {names[entry[1]]} [style=dashed];")
                lines.append(f"  {names[ref]} -> {names[entry[2]]};")
        lines.append("}")
        return "\n".join(lines) + "\n"
