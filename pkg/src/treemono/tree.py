"""Addressing and level combinatorics of the rooted infinite d-regular tree.

A vertex is addressed by the path of child indices leading to it from the
root.  The root has ``d`` child slots, every other vertex ``d - 1``, so the
address of a level-k vertex also fixes its position in the level's
address-ordered listing (see :func:`index_of` / :func:`address_of`).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

from .errors import ConfigError, NoEdgeAtRoot, RootHasNoParent

VertexAddress = Tuple[int, ...]

ROOT: VertexAddress = ()


@dataclass(frozen=True)
class TreeConfig:
    d: int

    def __post_init__(self):
        if isinstance(self.d, bool) or not isinstance(self.d, int) or self.d < 2:
            raise ConfigError(f"degree must be an integer >= 2, got {self.d!r}")

    def branching(self, k: int) -> int:
        """Number of children of a level-k vertex."""
        return self.d if k == 0 else self.d - 1


def level_size(cfg: TreeConfig, k: int) -> int:
    """|V_k|: 1 for the root, d*(d-1)**(k-1) otherwise."""
    if k < 0:
        raise ValueError(f"level must be non-negative, got {k}")
    if k == 0:
        return 1
    return cfg.d * (cfg.d - 1) ** (k - 1)


def level(addr: VertexAddress) -> int:
    return len(addr)


def is_valid(cfg: TreeConfig, addr: VertexAddress) -> bool:
    return all(0 <= i < cfg.branching(depth) for depth, i in enumerate(addr))


def parent(addr: VertexAddress) -> VertexAddress:
    if not addr:
        raise RootHasNoParent("the root has no parent")
    return tuple(addr[:-1])


def children(cfg: TreeConfig, addr: VertexAddress) -> list[VertexAddress]:
    addr = tuple(addr)
    return [addr + (i,) for i in range(cfg.branching(len(addr)))]


def edge_level(cfg: TreeConfig, child_addr: VertexAddress) -> int:
    """Distance from the root to the edge (parent(child), child)."""
    if not child_addr:
        raise NoEdgeAtRoot("the root is not the lower endpoint of any edge")
    return len(child_addr) - 1


def index_of(cfg: TreeConfig, addr: VertexAddress) -> int:
    """Position of ``addr`` within the address-ordered listing of its level."""
    index = 0
    for depth, i in enumerate(addr):
        b = cfg.branching(depth)
        if not 0 <= i < b:
            raise ConfigError(f"invalid address {addr!r} for d={cfg.d}")
        index = index * b + i
    return index


def address_of(cfg: TreeConfig, k: int, index: int) -> VertexAddress:
    """Inverse of :func:`index_of` for a level-k position."""
    if not 0 <= index < level_size(cfg, k):
        raise IndexError(f"level {k} has no vertex {index}")
    path = []
    for depth in range(k - 1, -1, -1):
        b = cfg.branching(depth)
        index, i = divmod(index, b)
        path.append(i)
    return tuple(reversed(path))


def iter_level(cfg: TreeConfig, k: int):
    """Addresses of V_k in index order (only sensible for small levels)."""
    for index in range(level_size(cfg, k)):
        yield address_of(cfg, k, index)
