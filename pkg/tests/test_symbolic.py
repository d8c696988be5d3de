import random
from itertools import product

import pytest

from bnmc.errors import BitWidthError, IllConditionedQueryError
from bnmc.gen import random_network, random_query
from bnmc.network import (
    Cpt,
    Variable,
    joint_probability,
    network_from_cpts,
    topological_order,
)
from bnmc.oracle import oracle_infer
from bnmc.reach import ReachQuery
from bnmc.symbolic import (
    BitEncoding,
    bench_evidence,
    bits_of_assignment,
    compile_network,
    infer,
)


def three_valued_bn():
    v = Variable(id=0, name="w", domain=("a", "b", "c"))
    return network_from_cpts(
        "tri", [v], [Cpt(owner=0, parents=(), rows={(): (0.2, 0.3, 0.5)})]
    )


def test_encoding_widths():
    bn = three_valued_bn()
    enc = BitEncoding.from_network(bn, (0,))
    assert enc.bits[0] == ("w[0]", "w[1]")
    assert enc.pattern(0, 2) == (1, 0)
    assert enc.decode(0, (1, 0)) == 2
    assert enc.decode(0, (1, 1)) is None


def test_compile_joint_quoted_path_value(student_mood_dpg):
    sym = compile_network(student_mood_dpg)
    e = bits_of_assignment(sym, {0: 1, 1: 1, 2: 1})
    assert sym.manager.evaluate(sym.joint, e) == pytest.approx(0.114, abs=1e-12)


def test_compile_independent_pair_matches_product():
    a = Variable(id=0, name="a", domain=("0", "1"))
    b = Variable(id=1, name="b", domain=("0", "1"))
    bn = network_from_cpts(
        "pair",
        [a, b],
        [
            Cpt(owner=0, parents=(), rows={(): (0.25, 0.75)}),
            Cpt(owner=1, parents=(), rows={(): (0.4, 0.6)}),
        ],
    )
    sym = compile_network(bn)
    for va, vb in product(range(2), repeat=2):
        e = bits_of_assignment(sym, {0: va, 1: vb})
        expected = joint_probability(bn, {0: va, 1: vb})
        assert sym.manager.evaluate(sym.joint, e) == pytest.approx(expected, abs=1e-15)


def test_invalid_bit_pattern_is_zero():
    sym = compile_network(three_valued_bn())
    assert sym.manager.evaluate(sym.joint, {"w[0]": 1, "w[1]": 1}) == 0.0


def test_joint_normalizes_with_invalid_patterns():
    rng = random.Random(23)
    for _ in range(10):
        bn = random_network(rng, max_vars=4, max_domain=4)
        sym = compile_network(bn)
        total = sym.manager.sum_abstract(sym.joint, sym.manager.variables)
        assert sym.manager.terminal_value(total) == pytest.approx(1.0, abs=1e-9)


def test_infer_quoted_conditional(student_mood):
    sym = compile_network(student_mood)
    q = ReachQuery(evidence={1: 1}, hypothesis={0: 0, 2: 0, 3: 0})
    assert infer(sym, q) == pytest.approx(0.27, abs=1e-9)


def test_infer_full_hypothesis_no_evidence(student_mood):
    sym = compile_network(student_mood)
    q = ReachQuery(hypothesis={0: 0, 1: 1, 2: 0, 3: 0})
    assert infer(sym, q) == pytest.approx(0.081, abs=1e-12)


def test_infer_ill_conditioned():
    a = Variable(id=0, name="a", domain=("0", "1"))
    bn = network_from_cpts(
        "point", [a], [Cpt(owner=0, parents=(), rows={(): (1.0, 0.0)})]
    )
    sym = compile_network(bn)
    with pytest.raises(IllConditionedQueryError):
        infer(sym, ReachQuery(evidence={0: 1}))


def test_infer_matches_oracle_on_random_networks():
    rng = random.Random(31)
    for _ in range(20):
        bn = random_network(rng, max_vars=6, max_domain=4, zero_entry_prob=0.15)
        sym = compile_network(bn)
        for _ in range(5):
            q = random_query(rng, bn)
            try:
                expected = oracle_infer(bn, q)
            except IllConditionedQueryError:
                with pytest.raises(IllConditionedQueryError):
                    infer(sym, q)
                continue
            assert infer(sym, q) == pytest.approx(expected, abs=1e-9)


def test_compile_enumerate_equivalence():
    rng = random.Random(41)
    for _ in range(10):
        bn = random_network(rng, max_vars=5, max_domain=4)
        sym = compile_network(bn)
        assert len(sym.manager.variables) <= 16
        for values in product(*(range(len(v.domain)) for v in bn.variables)):
            assignment = dict(enumerate(values))
            lhs = sym.manager.evaluate(sym.joint, bits_of_assignment(sym, assignment))
            assert lhs == pytest.approx(
                joint_probability(bn, assignment), abs=1e-12
            )


def test_joint_node_count_sane(student_mood):
    # Terminal-inclusive count can never exceed the full decision tree.
    sym = compile_network(student_mood)
    bits = len(sym.manager.variables)
    assert sym.manager.node_count(sym.joint) <= 2 ** (bits + 1) - 1


def test_dpg_joint_not_larger_than_explicit_tree(student_mood_dpg):
    sym = compile_network(student_mood_dpg)
    assert sym.manager.node_count(sym.joint) <= 15


def test_repetitive_structure_shares_subgraphs():
    # Ten i.i.d. biased coins: the joint depends only on the number of ones.
    # Exact-bits terminal hashing keeps rounding near-duplicates apart, so
    # the collapse is to ~n^2 nodes rather than n+1 terminals, still far
    # below the 2^(n+1)-1 node decision tree.
    n = 10
    variables = [Variable(id=i, name=f"c{i}", domain=("0", "1")) for i in range(n)]
    cpts = [Cpt(owner=i, parents=(), rows={(): (0.7, 0.3)}) for i in range(n)]
    bn = network_from_cpts("coins", variables, cpts)
    sym = compile_network(bn)
    assert sym.manager.node_count(sym.joint) <= 250
    total = sym.manager.sum_abstract(sym.joint, sym.manager.variables)
    assert sym.manager.terminal_value(total) == pytest.approx(1.0, abs=1e-9)


def test_compile_respects_topological_bit_order(student_mood):
    sym = compile_network(student_mood)
    order = topological_order(student_mood)
    expected = [f"{student_mood.variables[i].name}[0]" for i in order]
    assert list(sym.manager.variables) == expected


def test_custom_bit_order_changes_layout_not_results():
    rng = random.Random(61)
    bn = random_network(rng, n_vars=4, max_domain=3, name="interleaved")
    default = compile_network(bn)
    reversed_bits = compile_network(bn, bit_order=tuple(reversed(default.encoding.order)))
    assert list(reversed_bits.manager.variables) == list(reversed(default.encoding.order))
    for values in product(*(range(len(v.domain)) for v in bn.variables)):
        assignment = dict(enumerate(values))
        a = default.manager.evaluate(default.joint, bits_of_assignment(default, assignment))
        b = reversed_bits.manager.evaluate(
            reversed_bits.joint, bits_of_assignment(reversed_bits, assignment)
        )
        assert a == pytest.approx(b, abs=1e-12)
    q = random_query(rng, bn)
    try:
        lhs = infer(default, q)
        assert infer(reversed_bits, q) == pytest.approx(lhs, abs=1e-12)
    except IllConditionedQueryError:
        with pytest.raises(IllConditionedQueryError):
            infer(reversed_bits, q)


def test_custom_bit_order_must_be_permutation(student_mood):
    with pytest.raises(ValueError, match="permutation"):
        compile_network(student_mood, bit_order=("Dif[0]",))


def test_bit_budget_overflow():
    variables = [Variable(id=i, name=f"v{i}", domain=("0", "1")) for i in range(63)]
    cpts = [Cpt(owner=i, parents=(), rows={(): (0.5, 0.5)}) for i in range(63)]
    bn = network_from_cpts("wide", variables, cpts)
    with pytest.raises(BitWidthError):
        compile_network(bn)


# -- evidence-strategy bench -------------------------------------------------------


def test_bench_zero_evidence_is_marginal(student_mood):
    sym = compile_network(student_mood)
    record = bench_evidence(sym, "first", 0, seed=5)
    assert not record.ill_conditioned
    assert 0.0 <= record.result <= 1.0
    assert record.evidence_count == 0
    assert record.network == "student_mood"


def test_bench_last_strategy_near_full_evidence(student_mood):
    sym = compile_network(student_mood)
    record = bench_evidence(sym, "last", 3, seed=11)
    assert record.ill_conditioned or 0.0 <= record.result <= 1.0


def test_bench_deterministic_given_seed(student_mood):
    sym = compile_network(student_mood)
    a = bench_evidence(sym, "random", 2, seed=99)
    b = bench_evidence(sym, "random", 2, seed=99)
    assert (a.result, a.ill_conditioned) == (b.result, b.ill_conditioned)
    assert a.csv_row()[:4] == b.csv_row()[:4]


def test_bench_rejects_full_evidence(student_mood):
    sym = compile_network(student_mood)
    with pytest.raises(ValueError, match="hypothesis"):
        bench_evidence(sym, "first", 4, seed=0)
    with pytest.raises(ValueError, match="out of range"):
        bench_evidence(sym, "first", 9, seed=0)
    with pytest.raises(ValueError, match="strategy"):
        bench_evidence(sym, "sideways", 1, seed=0)


def test_bench_long_chain_records_timings_per_row():
    from conftest import chain_bn

    sym = compile_network(chain_bn(16))
    for strategy in ("first", "last"):
        for count in (1, 4, 8):
            record = bench_evidence(sym, strategy, count, seed=2)
            assert record.query_time_ns > 0
            assert record.ill_conditioned or 0.0 <= record.result <= 1.0


def test_bench_first_and_last_select_prefix_suffix():
    bn = random_network(random.Random(55), n_vars=6, min_domain=2, max_domain=2)
    sym = compile_network(bn)
    # Reconstruct the selection with the documented RNG contract.
    record = bench_evidence(sym, "first", 2, seed=123)
    rng = random.Random(123)
    expected_evidence = {
        var_id: rng.randrange(2) for var_id in sym.order[:2]
    }
    rest = [v for v in sym.order if v not in expected_evidence]
    hyp_var = rng.choice(rest)
    hypothesis = {hyp_var: rng.randrange(2)}
    expected = infer(sym, ReachQuery(evidence=expected_evidence, hypothesis=hypothesis))
    assert record.result == pytest.approx(expected, abs=1e-15)
