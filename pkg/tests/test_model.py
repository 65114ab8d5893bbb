import json
from collections import Counter

import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

import brute
from treemono.builtins import BUILTIN_NAMES, bounded3, builtin_model, double_half3, needweight3, random_model
from treemono.errors import (
    ClassNotInTable,
    ConfigError,
    DepthInsufficient,
    HarmonicityError,
    SplitterSumError,
    WrongDegree,
)
from treemono.model import (
    RootData,
    build_model,
    check_harmonic,
    check_level_sizes,
    compress,
    compress_model,
    dump_model_file,
    extend,
    level_values,
    linear_2reg,
    load_model_file,
    perturb_value,
    root_level,
    states_equivalent,
)
from treemono.splitters import CustomSplit, DoubleHalf, EqualSplit, PerturbedSplit, RandomSplit, TableSplit
from treemono.tree import TreeConfig

Q = mpq


def test_equal_split_children():
    assert EqualSplit()(3, Q(-1, 2), 0) == (Q(-3, 4), Q(-3, 4))


def test_double_half_children():
    assert sorted(DoubleHalf()(3, 2, 1)) == [1, 4]


def test_double_half_needs_degree_three():
    with pytest.raises(WrongDegree):
        DoubleHalf()(4, 2, 1)


@given(st.integers(0, 10 ** 6), st.fractions(max_denominator=9), st.fractions(max_denominator=9))
def test_random_split_sums(seed, u, up):
    u, up = Q(u.numerator, u.denominator), Q(up.numerator, up.denominator)
    kids = RandomSplit(seed)(4, u, up)
    assert len(kids) == 3
    assert sum(kids) == 4 * u - up


def test_random_split_is_a_function_of_the_class():
    s = RandomSplit(11)
    assert s(5, Q(1, 3), Q(2)) == s(5, Q(1, 3), Q(2))
    assert RandomSplit(11)(5, Q(1, 3), Q(2)) != RandomSplit(12)(5, Q(1, 3), Q(2))


def test_table_split_missing_class():
    table = TableSplit({(Q(1), Q(0)): (Q(3, 2), Q(3, 2))})
    assert table(3, 1, 0) == (Q(3, 2), Q(3, 2))
    with pytest.raises(ClassNotInTable):
        table(3, 2, 0)


def test_root_children_must_average():
    with pytest.raises(HarmonicityError):
        RootData(0, (1, 1, 0))


def test_bounded_level_two():
    m = bounded3(2, compressed=False)
    assert level_values(m, 2) == sorted([Q(3, 2)] * 2 + [Q(-3, 2)] * 2 + [Q(0)] * 2)


def test_needweight_level_two():
    m = needweight3(2, compressed=False)
    assert level_values(m, 2) == sorted([Q(3, 2)] * 2 + [Q(-3, 4)] * 4)


def test_depth_zero_is_root_only():
    m = build_model(TreeConfig(4), RootData(1, (1, 2, 0, 1)), EqualSplit(), 0)
    assert m.depth == 0 and m.values(0) == Counter({Q(1): 1})
    with pytest.raises(DepthInsufficient):
        check_harmonic(m)


@pytest.mark.parametrize("factory,K", [(bounded3, 4), (double_half3, 5), (needweight3, 6)])
@pytest.mark.parametrize("compressed", [False, True])
def test_builtins_are_harmonic(factory, K, compressed):
    m = factory(K, compressed=compressed)
    assert check_harmonic(m).ok
    assert check_level_sizes(m)


def test_perturbed_value_fails_at_level_zero():
    m = perturb_value(bounded3(4, compressed=False), 1, 0, 1)
    verdict = check_harmonic(m)
    assert not verdict.ok
    assert verdict.level == 0 and verdict.check == "child_sum"


def test_perturbed_splitter_raises_on_build():
    with pytest.raises(SplitterSumError) as info:
        build_model(TreeConfig(3), RootData(0, (1, -1, 0)), PerturbedSplit(EqualSplit()), 3)
    assert info.value.level == 1


def test_compressed_rejects_address_rules():
    rule = CustomSplit(lambda addr, u, up: [(3 * u - up) / 2] * 2)
    with pytest.raises(ConfigError):
        build_model(TreeConfig(3), RootData(0, (1, -1, 0)), rule, 2, compressed=True)
    assert check_harmonic(build_model(TreeConfig(3), RootData(0, (1, -1, 0)), rule, 3)).ok


@pytest.mark.parametrize("a,b,k,vals", [(1, 0, 3, [-3, 3]), (0, 5, 4, [5, 5]), (2, 1, 2, [-3, 5])])
def test_linear_family_levels(a, b, k, vals):
    assert level_values(linear_2reg(a, b, k), k) == vals


def test_linear_family_needs_d2():
    with pytest.raises(WrongDegree):
        linear_2reg(1, 0, 3, d=3)


def test_compress_bounded_level_two():
    m = bounded3(2, compressed=False)
    c = compress(m.level(2), m.level(1), 3)
    assert c.classes == {(Q(3, 2), Q(1)): 2, (Q(-3, 2), Q(-1)): 2, (Q(0), Q(0)): 2}
    assert states_equivalent(m.level(2), c)


def test_distinct_values_have_multiplicity_one():
    m = random_model(4, 5, 3, compressed=False)
    c = compress(m.level(1))
    assert set(c.classes.values()) == {1}


def test_double_half_class_count_is_linear():
    m = double_half3(12, compressed=False)
    for l in range(1, 13):
        assert m.level(l).size == 3 * 2 ** (l - 1)
        assert len(m.level(l).class_counts()) <= 2 * l + 1


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_representations_agree(name):
    kw = {"d": 4} if name in ("random", "constant") else {}
    e = builtin_model(name, 8, compressed=False, seed=3, c=2, **kw)
    c = builtin_model(name, 8, compressed=True, seed=3, c=2, **kw)
    for k in range(9):
        assert states_equivalent(e.level(k), c.level(k))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(0, 10 ** 6), st.integers(1, 4), st.booleans())
def test_compress_commutes_with_extend(d, seed, k, tied):
    m = random_model(d, seed, k + 1, compressed=False, tied=tied)
    cm = compress_model(random_model(d, seed, k, compressed=False, tied=tied))
    cfg = TreeConfig(d)
    grown = extend(cfg, cm.level(k), m.splitter, m.root)
    assert states_equivalent(m.level(k + 1), grown)
    assert grown.blocks == compress(m.level(k + 1), m.level(k), d).blocks


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(0, 10 ** 6), st.booleans())
def test_sum_constraint_holds(d, seed, compressed):
    m = random_model(d, seed, 4, compressed=compressed)
    for k in range(1, 4):
        for (u, up), kids, _ in m.sibling_blocks(k):
            assert sum(kids) == d * u - up


def test_random_model_matches_bruteforce_mean_value():
    m = random_model(4, 9, 4, compressed=False)
    values = brute.from_model(m)
    assert len(values) == 1 + 4 + 12 + 36 + 108
    assert brute.neighbour_sums_ok(values, 4, 4)


def test_root_level_shapes():
    root = RootData(0, (1, -1))
    assert root_level(root).values == [0]
    assert root_level(root, True).classes == {(Q(0), None): 1}


def test_model_file_roundtrip(tmp_path):
    m = random_model(3, 4, 5)
    path = tmp_path / "m.json"
    dump_model_file(m, path)
    again = load_model_file(path)
    assert again.depth == 5
    for k in range(6):
        assert again.values(k) == m.values(k)
    spec = json.loads(path.read_text())
    assert spec["splitter"]["kind"] == "random"


def test_model_file_table(tmp_path):
    path = tmp_path / "t.json"
    path.write_text(json.dumps({
        "d": 3, "K": 1,
        "root": {"u0": "0", "children": ["1", "-1", "0"]},
        "splitter": {"kind": "table", "table": []},
    }))
    assert load_model_file(path).depth == 1
    with pytest.raises(ClassNotInTable):
        load_model_file(path, K=2)


def test_model_file_missing_key(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"d": 3, "root": {"u0": 0, "children": [0, 0, 0]}}))
    with pytest.raises(ConfigError):
        load_model_file(path)
