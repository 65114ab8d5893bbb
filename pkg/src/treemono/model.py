"""Harmonic functions on the truncated tree, built level by level.

A level is held either *enumerated* (one entry per vertex, address order)
or *compressed* (multiplicity of each distinct ``(value, parent_value)``
class).  Enumeration is the ground truth; compression is what makes deep
runs affordable and is validated against it.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Mapping

from gmpy2 import mpq

from .errors import (
    ConfigError,
    DepthInsufficient,
    HarmonicityError,
    SplitterSumError,
    WrongDegree,
)
from .scalar import format_rational, to_rational
from .splitters import EqualSplit, Splitter, splitter_from_dict
from .tree import TreeConfig, address_of, level_size

Class = tuple  # (value, parent_value); parent_value is None at the root


@dataclass(frozen=True)
class RootData:
    u0: object
    children: tuple

    def __post_init__(self):
        u0 = to_rational(self.u0)
        kids = tuple(to_rational(c) for c in self.children)
        object.__setattr__(self, "u0", u0)
        object.__setattr__(self, "children", kids)
        if not kids:
            raise ConfigError("root needs at least two children")
        if sum(kids, mpq(0)) != len(kids) * u0:
            raise HarmonicityError(
                f"root children sum to {sum(kids, mpq(0))}, expected {len(kids)}*{u0}"
            )

    def to_dict(self) -> dict:
        return {"u0": format_rational(self.u0), "children": [format_rational(c) for c in self.children]}


@dataclass(frozen=True, eq=False)
class EnumeratedLevel:
    """Vertices of one level in address order.

    Vertex ``i`` of level ``k >= 2`` is child number ``i % (d-1)`` of vertex
    ``i // (d-1)`` of level ``k-1``; on level 1 the parent is always the root.
    """

    k: int
    values: list
    parent_values: list

    @property
    def size(self) -> int:
        return len(self.values)

    def block_of(self, i: int, d: int) -> int:
        return 0 if self.k <= 1 else i // (d - 1)

    def records(self, d: int):
        for i, (v, pv) in enumerate(zip(self.values, self.parent_values)):
            yield v, pv, self.block_of(i, d)

    def weighted_classes(self) -> Iterator[tuple]:
        for v, pv in zip(self.values, self.parent_values):
            yield v, pv, 1

    def class_counts(self) -> Counter:
        return Counter(zip(self.values, self.parent_values))


@dataclass(frozen=True, eq=False)
class CompressedLevel:
    """Multiplicity of every (value, parent_value) class of one level.

    ``blocks`` maps each class of the previous level to the child tuple its
    vertices received; it carries the sibling structure.
    """

    k: int
    classes: dict
    blocks: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return sum(self.classes.values())

    def weighted_classes(self) -> Iterator[tuple]:
        for (v, pv), m in self.classes.items():
            yield v, pv, m

    def class_counts(self) -> Counter:
        return Counter(self.classes)


LevelState = EnumeratedLevel | CompressedLevel


def root_level(root: RootData, compressed: bool = False) -> LevelState:
    if compressed:
        return CompressedLevel(0, {(root.u0, None): 1})
    return EnumeratedLevel(0, [root.u0], [None])


def _checked(splitter, d, k, u, up, address=None):
    kids = tuple(splitter(d, u, up, address))
    if len(kids) != d - 1:
        raise HarmonicityError(f"splitter returned {len(kids)} children, expected {d - 1}")
    expected = d * u - up
    if sum(kids, mpq(0)) != expected:
        raise SplitterSumError(k, u, up, kids, expected)
    return kids


def extend(cfg: TreeConfig, state: LevelState, splitter: Splitter, root: RootData | None = None) -> LevelState:
    """Level k+1 from level k.  Level 0 takes its children from ``root``."""
    d = cfg.d
    k = state.k
    if k == 0:
        if root is None:
            raise ConfigError("extending the root level needs the RootData")
        if len(root.children) != d:
            raise ConfigError(f"root has {len(root.children)} children, d={d}")
        kids = root.children
        if isinstance(state, CompressedLevel):
            (u0, _), = state.classes
            classes = Counter((c, u0) for c in kids)
            return CompressedLevel(1, dict(classes), {(u0, None): kids})
        u0 = state.values[0]
        return EnumeratedLevel(1, list(kids), [u0] * d)

    if isinstance(state, CompressedLevel):
        if not splitter.homogeneous:
            raise ConfigError(f"{splitter.kind} splitter is address dependent; use enumerated levels")
        classes: dict = {}
        blocks = {}
        for (u, up), m in state.classes.items():
            kids = _checked(splitter, d, k, u, up)
            blocks[(u, up)] = kids
            for c in kids:
                key = (c, u)
                classes[key] = classes.get(key, 0) + m
        return CompressedLevel(k + 1, classes, blocks)

    out_values: list = []
    out_parents: list = []
    b = d - 1
    if splitter.homogeneous:
        cache: dict = {}
        for u, up in zip(state.values, state.parent_values):
            kids = cache.get((u, up))
            if kids is None:
                kids = cache[(u, up)] = _checked(splitter, d, k, u, up)
            out_values.extend(kids)
            out_parents.extend((u,) * b)
    else:
        for i, (u, up) in enumerate(zip(state.values, state.parent_values)):
            kids = _checked(splitter, d, k, u, up, address_of(cfg, k, i))
            out_values.extend(kids)
            out_parents.extend((u,) * b)
    return EnumeratedLevel(k + 1, out_values, out_parents)


@dataclass(frozen=True, eq=False)
class HarmonicModel:
    cfg: TreeConfig
    root: RootData
    splitter: Splitter
    ladder: tuple
    name: str = "custom"
    # per-model memo of level sums; keys are (quantity, p, level, mode)
    _memo: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def d(self) -> int:
        return self.cfg.d

    @property
    def depth(self) -> int:
        return len(self.ladder) - 1

    @property
    def compressed(self) -> bool:
        return isinstance(self.ladder[0], CompressedLevel)

    def level(self, k: int) -> LevelState:
        if k < 0:
            raise ValueError(f"level must be non-negative, got {k}")
        if k > self.depth:
            raise DepthInsufficient(f"model depth {self.depth} < requested level {k}")
        return self.ladder[k]

    def require_depth(self, k: int):
        if k > self.depth:
            raise DepthInsufficient(f"model depth {self.depth} < required depth {k}")

    def weighted_classes(self, k: int):
        return self.level(k).weighted_classes()

    def values(self, k: int) -> Counter:
        """Multiset of the values on level k."""
        out: Counter = Counter()
        for v, _, m in self.weighted_classes(k):
            out[v] += m
        return out

    def sibling_blocks(self, k: int) -> Iterator[tuple]:
        """Yield ``((u, u_p), children, multiplicity)`` for the vertices of level k."""
        child = self.level(k + 1)
        here = self.level(k)
        if isinstance(child, CompressedLevel):
            for cls, kids in child.blocks.items():
                yield cls, kids, here.classes[cls]
            return
        b = self.cfg.branching(k)
        vals = child.values
        for j, (u, up) in enumerate(zip(here.values, here.parent_values)):
            yield (u, up), tuple(vals[j * b:(j + 1) * b]), 1

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "root": self.root.to_dict(),
            "splitter": self.splitter.to_dict(),
            "K": self.depth,
        }


def build_model(cfg: TreeConfig, root: RootData, splitter: Splitter, K: int,
                compressed: bool = False, name: str = "custom") -> HarmonicModel:
    if K < 0:
        raise ConfigError(f"depth must be non-negative, got {K}")
    if len(root.children) != cfg.d:
        raise ConfigError(f"root has {len(root.children)} children, d={cfg.d}")
    ladder = [root_level(root, compressed)]
    for _ in range(K):
        ladder.append(extend(cfg, ladder[-1], splitter, root))
    return HarmonicModel(cfg, root, splitter, tuple(ladder), name)


@dataclass(frozen=True)
class HarmonicVerdict:
    ok: bool
    level: int | None = None
    cls: tuple | None = None
    check: str | None = None
    message: str = ""

    def __bool__(self):
        return self.ok


def check_harmonic(model: HarmonicModel) -> HarmonicVerdict:
    """Neighbour sum = d * value at every vertex of levels 0..K-1, plus ladder
    consistency (every recorded parent value matches the actual parent)."""
    d = model.d
    if model.depth < 1:
        raise DepthInsufficient("harmonicity needs at least one level below the root")
    for k in range(model.depth):
        for (u, up), kids, _ in model.sibling_blocks(k):
            total = sum(kids, mpq(0)) + (up if k > 0 else 0)
            if total != d * u:
                return HarmonicVerdict(
                    False, k, (u, up), "child_sum",
                    f"neighbours of level-{k} class (u={u}, u_parent={up}) sum to {total}, expected {d * u}",
                )
        bad = _inconsistent_parent(model, k)
        if bad is not None:
            return HarmonicVerdict(False, k + 1, bad, "parent_link",
                                   f"level-{k + 1} class {bad} does not match its parent on level {k}")
    return HarmonicVerdict(True)


def _inconsistent_parent(model: HarmonicModel, k: int):
    child = model.level(k + 1)
    if isinstance(child, CompressedLevel):
        expected: Counter = Counter()
        for (u, _), kids, m in model.sibling_blocks(k):
            for c in kids:
                expected[(c, u)] += m
        if expected != Counter(child.classes):
            diff = (expected - Counter(child.classes)) or (Counter(child.classes) - expected)
            return next(iter(diff))
        return None
    here = model.level(k)
    b = model.cfg.branching(k)
    for i, (v, pv) in enumerate(zip(child.values, child.parent_values)):
        if pv != here.values[i // b if k > 0 else 0]:
            return (v, pv)
    return None


def compress(state: EnumeratedLevel, previous: EnumeratedLevel | None = None, d: int | None = None) -> CompressedLevel:
    """Group identical (value, parent_value) pairs.  With ``previous`` (and d)
    the sibling blocks are reconstructed too."""
    classes = dict(state.class_counts())
    blocks = {}
    if previous is not None:
        if d is None:
            raise ConfigError("compressing sibling blocks needs d")
        b = d if previous.k == 0 else d - 1
        for j, (u, up) in enumerate(zip(previous.values, previous.parent_values)):
            kids = tuple(state.values[j * b:(j + 1) * b])
            seen = blocks.setdefault((u, up), kids)
            if seen != kids:
                raise ConfigError(f"class {(u, up)} has differing children; level is not value-homogeneous")
    return CompressedLevel(state.k, classes, blocks)


def states_equivalent(enumerated: EnumeratedLevel, compressed: CompressedLevel) -> bool:
    return enumerated.k == compressed.k and enumerated.class_counts() == Counter(compressed.classes)


def compress_model(model: HarmonicModel) -> HarmonicModel:
    if model.compressed:
        return model
    ladder = [compress(model.ladder[0])]
    for k in range(1, len(model.ladder)):
        ladder.append(compress(model.ladder[k], model.ladder[k - 1], model.d))
    return HarmonicModel(model.cfg, model.root, model.splitter, tuple(ladder), model.name)


def linear_2reg(a, b, K: int, d: int = 2, compressed: bool = False) -> HarmonicModel:
    """The harmonic function u(j) = a*j + b, u(-j) = -a*j + b on the 2-regular tree."""
    if d != 2:
        raise WrongDegree(f"the linear family lives on the 2-regular tree, got d={d}")
    a, b = to_rational(a), to_rational(b)
    root = RootData(b, (b + a, b - a))
    return build_model(TreeConfig(2), root, EqualSplit(), K, compressed, name="linear2")


def model_spec_from_dict(spec: Mapping):
    """Parse a model-definition mapping into (cfg, root, splitter, K)."""
    try:
        cfg = TreeConfig(int(spec["d"]))
        r = spec["root"]
        root = RootData(r["u0"], tuple(r["children"]))
        splitter = splitter_from_dict(spec["splitter"])
        K = int(spec["K"])
    except KeyError as exc:
        raise ConfigError(f"model definition is missing {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad model definition: {exc}") from exc
    return cfg, root, splitter, K


def load_model_file(path, compressed: bool | None = None, K: int | None = None) -> HarmonicModel:
    try:
        spec = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read model file {path}: {exc}") from exc
    cfg, root, splitter, depth = model_spec_from_dict(spec)
    if compressed is None:
        compressed = splitter.homogeneous
    return build_model(cfg, root, splitter, depth if K is None else K, compressed,
                       name=spec.get("name", Path(path).stem))


def dump_model_file(model: HarmonicModel, path) -> None:
    Path(path).write_text(json.dumps(model.to_dict(), indent=2) + "\n", encoding="utf-8")


def perturb_value(model: HarmonicModel, k: int, index: int = 0, delta=1) -> HarmonicModel:
    """Copy of an enumerated model with one level-k value shifted by ``delta``.

    The children's recorded parent values are left alone, as a hand edit would.
    """
    if model.compressed:
        raise ConfigError("perturbation needs an enumerated model")
    old = model.level(k)
    values = list(old.values)
    values[index] += to_rational(delta)
    ladder = list(model.ladder)
    ladder[k] = EnumeratedLevel(k, values, list(old.parent_values))
    return HarmonicModel(model.cfg, model.root, model.splitter, tuple(ladder), model.name)


def level_values(model: HarmonicModel, k: int) -> list:
    """Sorted list of the level-k values, with repetition (small models only)."""
    out = []
    for v, m in sorted(model.values(k).items()):
        out.extend([v] * m)
    return out


def check_level_sizes(model: HarmonicModel) -> bool:
    return all(model.level(k).size == level_size(model.cfg, k) for k in range(model.depth + 1))
