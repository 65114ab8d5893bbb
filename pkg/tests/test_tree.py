import pytest
from hypothesis import given, strategies as st

from treemono.errors import ConfigError, NoEdgeAtRoot, RootHasNoParent
from treemono.tree import (
    ROOT,
    TreeConfig,
    address_of,
    children,
    edge_level,
    index_of,
    is_valid,
    iter_level,
    level,
    level_size,
    parent,
)


@pytest.mark.parametrize("d,k,size", [(3, 0, 1), (3, 2, 6), (2, 7, 2), (4, 3, 36)])
def test_level_size(d, k, size):
    assert level_size(TreeConfig(d), k) == size


@pytest.mark.parametrize("addr,up", [((1, 0), (1,)), ((2,), ()), ((0, 1, 1), (0, 1))])
def test_parent(addr, up):
    assert parent(addr) == up


def test_root_has_no_parent():
    with pytest.raises(RootHasNoParent):
        parent(ROOT)


@pytest.mark.parametrize("d,addr,kids", [
    (3, (), [(0,), (1,), (2,)]),
    (3, (0,), [(0, 0), (0, 1)]),
    (2, (0, 0), [(0, 0, 0)]),
])
def test_children(d, addr, kids):
    assert children(TreeConfig(d), addr) == kids


@pytest.mark.parametrize("addr,dist", [((1,), 0), ((1, 0), 1), ((0, 1, 1), 2)])
def test_edge_level(addr, dist):
    assert edge_level(TreeConfig(3), addr) == dist


def test_edge_level_rejects_root():
    with pytest.raises(NoEdgeAtRoot):
        edge_level(TreeConfig(3), ROOT)


@pytest.mark.parametrize("d", [1, 0, -3])
def test_bad_degree(d):
    with pytest.raises(ConfigError):
        TreeConfig(d)


def test_validity():
    cfg = TreeConfig(3)
    assert is_valid(cfg, (2, 1))
    assert not is_valid(cfg, (3,))
    assert not is_valid(cfg, (0, 2))


@given(st.integers(2, 6), st.integers(1, 6))
def test_level_recursion(d, k):
    cfg = TreeConfig(d)
    expected = d if k == 1 else (d - 1) * level_size(cfg, k - 1)
    assert level_size(cfg, k) == expected


@given(st.integers(2, 5), st.integers(0, 4), st.data())
def test_address_index_roundtrip(d, k, data):
    cfg = TreeConfig(d)
    i = data.draw(st.integers(0, level_size(cfg, k) - 1))
    addr = address_of(cfg, k, i)
    assert level(addr) == k
    assert is_valid(cfg, addr)
    assert index_of(cfg, addr) == i


@pytest.mark.parametrize("d,k", [(2, 4), (3, 3), (5, 2)])
def test_iter_level_is_address_ordered(d, k):
    cfg = TreeConfig(d)
    addrs = list(iter_level(cfg, k))
    assert addrs == sorted(addrs)
    assert len(addrs) == len(set(addrs)) == level_size(cfg, k)
    for a in addrs[1:] if k else []:
        assert edge_level(cfg, a) == k - 1
