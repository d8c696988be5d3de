"""Discrete Bayesian networks: variables, CPTs, joint probability, statistics.

A network is immutable after construction; `validate` reports invariant
violations as data instead of raising, so corpus bugs surface explicitly
rather than being silently repaired.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping

from .errors import CycleError, MalformedQueryError

ROW_SUM_TOLERANCE = 1e-9

# Partial assignment: variable id -> domain value index.
Assignment = Mapping[int, int]


@dataclass(frozen=True)
class Variable:
    id: int
    name: str
    domain: tuple[str, ...]


@dataclass(frozen=True, eq=True)
class Cpt:
    """Conditional probability table of one variable.

    `parents` is in canonical ascending-id order; `rows` has one probability
    vector over the owner's domain per element of the Cartesian product of
    the parent domains, keyed by parent value indices in `parents` order.
    """

    owner: int
    parents: tuple[int, ...]
    rows: dict[tuple[int, ...], tuple[float, ...]]

    __hash__ = None  # rows is a dict; Cpt is compared, never hashed


@dataclass(frozen=True, eq=True)
class BayesianNetwork:
    name: str
    variables: tuple[Variable, ...]
    edges: frozenset[tuple[int, int]]
    cpts: tuple[Cpt, ...]

    __hash__ = None

    def variable(self, var_id: int) -> Variable:
        if not 0 <= var_id < len(self.variables):
            raise MalformedQueryError(f"unknown variable id {var_id}")
        return self.variables[var_id]

    def by_name(self, name: str) -> Variable:
        for v in self.variables:
            if v.name == name:
                return v
        raise MalformedQueryError(f"unknown variable name {name!r}")

    def parents(self, var_id: int) -> tuple[int, ...]:
        return self.cpts[self.variable(var_id).id].parents

    def children(self, var_id: int) -> tuple[int, ...]:
        self.variable(var_id)
        return tuple(sorted(c for p, c in self.edges if p == var_id))

    def domain_size(self, var_id: int) -> int:
        return len(self.variable(var_id).domain)


@dataclass(frozen=True)
class NetworkStats:
    vertex_count: int
    edge_count: int
    max_in_degree: int
    max_domain_size: int
    avg_markov_blanket: Fraction
    parameter_count: int


def network_from_cpts(
    name: str, variables: Iterable[Variable], cpts: Iterable[Cpt]
) -> BayesianNetwork:
    """Assemble a network whose edge set is derived from the CPT parents."""
    variables = tuple(variables)
    cpts = tuple(sorted(cpts, key=lambda c: c.owner))
    edges = frozenset((p, c.owner) for c in cpts for p in c.parents)
    return BayesianNetwork(name=name, variables=variables, edges=edges, cpts=cpts)


def validate(bn: BayesianNetwork) -> list[str]:
    """Check every structural invariant; returns one message per violation."""
    out: list[str] = []
    ids = [v.id for v in bn.variables]
    if ids != list(range(len(ids))):
        out.append(f"variable ids must be dense 0..{len(ids) - 1}, got {ids}")
        return out  # downstream checks index by id

    for v in bn.variables:
        if len(v.domain) < 1:
            out.append(f"variable {v.name}: empty domain")
        if len(set(v.domain)) != len(v.domain):
            out.append(f"variable {v.name}: duplicate domain labels")
    names = [v.name for v in bn.variables]
    if len(set(names)) != len(names):
        out.append("duplicate variable names")

    known = set(ids)
    for p, c in sorted(bn.edges):
        if p not in known or c not in known:
            out.append(f"edge ({p}, {c}) references an unknown variable")

    if len(bn.cpts) != len(bn.variables):
        out.append(f"expected {len(bn.variables)} CPTs, got {len(bn.cpts)}")
        return out
    owners = [c.owner for c in bn.cpts]
    if owners != ids:
        out.append("CPTs must be ordered by owner id, exactly one per variable")
        return out

    try:
        topological_order(bn)
    except CycleError as exc:
        out.append(str(exc))

    for cpt in bn.cpts:
        v = bn.variables[cpt.owner]
        declared = tuple(sorted(p for p, c in bn.edges if c == cpt.owner))
        if cpt.parents != declared:
            out.append(
                f"variable {v.name}: CPT parents {cpt.parents} != in-edges {declared}"
            )
            continue
        expected_keys = set(
            product(*(range(len(bn.variables[p].domain)) for p in cpt.parents))
        )
        got_keys = set(cpt.rows)
        for key in sorted(expected_keys - got_keys):
            out.append(f"variable {v.name}: missing CPT row for parents {key}")
        for key in sorted(got_keys - expected_keys):
            out.append(f"variable {v.name}: unexpected CPT row for parents {key}")
        for key in sorted(got_keys & expected_keys):
            row = cpt.rows[key]
            if len(row) != len(v.domain):
                out.append(
                    f"variable {v.name}, row {key}: {len(row)} entries for "
                    f"domain size {len(v.domain)}"
                )
                continue
            if any(not 0.0 <= p <= 1.0 for p in row):  # also catches NaN
                out.append(f"variable {v.name}, row {key}: entry outside [0, 1]")
            total = sum(row)
            if not abs(total - 1.0) <= ROW_SUM_TOLERANCE:
                out.append(
                    f"variable {v.name}, row {key}: probabilities sum to {total!r}"
                )
    return out


def topological_order(bn: BayesianNetwork) -> list[int]:
    """Kahn's algorithm; ties broken by ascending variable id."""
    indegree = {v.id: 0 for v in bn.variables}
    children: dict[int, list[int]] = {v.id: [] for v in bn.variables}
    for p, c in bn.edges:
        indegree[c] += 1
        children[p].append(c)
    ready = [i for i, d in sorted(indegree.items()) if d == 0]
    heapq.heapify(ready)
    order: list[int] = []
    while ready:
        v = heapq.heappop(ready)
        order.append(v)
        for c in sorted(children[v]):
            indegree[c] -= 1
            if indegree[c] == 0:
                heapq.heappush(ready, c)
    if len(order) != len(bn.variables):
        stuck = {i for i, d in indegree.items() if d > 0}
        child = min(stuck)
        parent = min(p for p, c in bn.edges if c == child and p in stuck)
        raise CycleError(parent, child)
    return order


def check_assignment(bn: BayesianNetwork, assignment: Assignment) -> None:
    """Raise MalformedQueryError unless every binding is within range."""
    for var_id, value in assignment.items():
        v = bn.variable(var_id)
        if not 0 <= value < len(v.domain):
            raise MalformedQueryError(
                f"value index {value} out of range for {v.name} "
                f"(domain size {len(v.domain)})"
            )


def joint_probability(bn: BayesianNetwork, full: Assignment) -> float:
    """Product of CPT entries along the full assignment."""
    check_assignment(bn, full)
    missing = [v.name for v in bn.variables if v.id not in full]
    if missing:
        raise MalformedQueryError(f"full assignment required; missing {missing}")
    p = 1.0
    for cpt in bn.cpts:
        key = tuple(full[q] for q in cpt.parents)
        p *= cpt.rows[key][full[cpt.owner]]
    return p


def markov_blanket(bn: BayesianNetwork, var_id: int) -> set[int]:
    """Parents, children, and co-parents of shared children, minus the vertex."""
    bn.variable(var_id)
    parents = {p for p, c in bn.edges if c == var_id}
    children = {c for p, c in bn.edges if p == var_id}
    spouses = {p for p, c in bn.edges if c in children}
    return (parents | children | spouses) - {var_id}


def stats(bn: BayesianNetwork) -> NetworkStats:
    n = len(bn.variables)
    in_degrees = {v.id: 0 for v in bn.variables}
    for _, c in bn.edges:
        in_degrees[c] += 1
    blanket_total = sum(len(markov_blanket(bn, v.id)) for v in bn.variables)
    # Free parameters: one row per parent combination, |D|-1 per row.
    params = 0
    for cpt in bn.cpts:
        rows = 1
        for p in cpt.parents:
            rows *= len(bn.variables[p].domain)
        params += rows * (len(bn.variables[cpt.owner].domain) - 1)
    return NetworkStats(
        vertex_count=n,
        edge_count=len(bn.edges),
        max_in_degree=max(in_degrees.values(), default=0),
        max_domain_size=max((len(v.domain) for v in bn.variables), default=0),
        avg_markov_blanket=Fraction(blanket_total, n) if n else Fraction(0),
        parameter_count=params,
    )


def subnetwork(bn: BayesianNetwork, keep: Iterable[int]) -> BayesianNetwork:
    """Restrict to a parent-closed subset of variables, reindexing ids densely."""
    keep_ids = sorted(set(keep))
    for i in keep_ids:
        bn.variable(i)
        for p in bn.parents(i):
            if p not in keep_ids:
                raise ValueError(
                    f"subset not closed under parents: {bn.variables[i].name} "
                    f"needs {bn.variables[p].name}"
                )
    remap = {old: new for new, old in enumerate(keep_ids)}
    variables = tuple(
        Variable(id=remap[i], name=bn.variables[i].name, domain=bn.variables[i].domain)
        for i in keep_ids
    )
    cpts = tuple(
        Cpt(
            owner=remap[i],
            parents=tuple(remap[p] for p in bn.cpts[i].parents),
            rows=dict(bn.cpts[i].rows),
        )
        for i in keep_ids
    )
    return network_from_cpts(bn.name, variables, cpts)


def full_assignments(bn: BayesianNetwork) -> Iterable[dict[int, int]]:
    """All full assignments in deterministic variable-index order."""
    sizes = [len(v.domain) for v in bn.variables]
    for values in product(*(range(s) for s in sizes)):
        yield dict(enumerate(values))
