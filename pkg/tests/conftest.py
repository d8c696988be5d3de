import random
from itertools import product

import pytest

from bnmc import fixtures
from bnmc.network import BayesianNetwork, Cpt, Variable, network_from_cpts


@pytest.fixture
def student_mood() -> BayesianNetwork:
    return fixtures.student_mood()


@pytest.fixture
def student_mood_dpg() -> BayesianNetwork:
    return fixtures.student_mood_dpg()


@pytest.fixture
def student_mood_psdd():
    return fixtures.student_mood_psdd()


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240901)


def single_var_bn(p: float = 0.5, name: str = "one", var: str = "x") -> BayesianNetwork:
    v = Variable(id=0, name=var, domain=("0", "1"))
    cpt = Cpt(owner=0, parents=(), rows={(): (1.0 - p, p)})
    return network_from_cpts(name, [v], [cpt])


def chain_bn(n: int, seed: int = 1, name: str = "chain") -> BayesianNetwork:
    """Binary chain v0 -> v1 -> ... -> v{n-1} with seeded generic CPTs."""
    rng = random.Random(seed)
    variables = [Variable(id=i, name=f"v{i}", domain=("0", "1")) for i in range(n)]
    cpts = [Cpt(owner=0, parents=(), rows={(): _row(rng)})]
    for i in range(1, n):
        cpts.append(
            Cpt(owner=i, parents=(i - 1,), rows={(0,): _row(rng), (1,): _row(rng)})
        )
    return network_from_cpts(name, variables, cpts)


def _row(rng: random.Random) -> tuple[float, float]:
    p = rng.uniform(0.05, 0.95)
    return (1.0 - p, p)


def enumerate_mass(bn: BayesianNetwork, binding: dict[int, int]) -> float:
    """Independent brute-force mass of a partial assignment, for oracles."""
    total = 0.0
    sizes = [len(v.domain) for v in bn.variables]
    for values in product(*(range(s) for s in sizes)):
        if any(values[i] != d for i, d in binding.items()):
            continue
        p = 1.0
        for cpt in bn.cpts:
            key = tuple(values[q] for q in cpt.parents)
            p *= cpt.rows[key][values[cpt.owner]]
        total += p
    return total
