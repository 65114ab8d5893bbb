"""Named model configurations used by the oracles, the CLI and the tests."""
from __future__ import annotations

from gmpy2 import mpq

from .errors import ConfigError
from .model import HarmonicModel, RootData, build_model, linear_2reg
from .scalar import to_rational
from .splitters import DoubleHalf, EqualSplit, RandomSplit, class_rng
from .tree import TreeConfig

BUILTIN_NAMES = ("bounded3", "needweight3", "double_half3", "linear2", "constant", "random")

BOUNDED3_ROOT = RootData(0, (1, -1, 0))
NEEDWEIGHT3_ROOT = RootData(0, (1, mpq(-1, 2), mpq(-1, 2)))
DOUBLE_HALF3_ROOT = RootData(1, (2, mpq(1, 2), mpq(1, 2)))


def bounded3(K: int, compressed: bool = True) -> HarmonicModel:
    """Bounded example on T_3: zero on one branch, +-a_k on the other two."""
    return build_model(TreeConfig(3), BOUNDED3_ROOT, EqualSplit(), K, compressed, name="bounded3")


def needweight3(K: int, compressed: bool = True) -> HarmonicModel:
    """Finite-energy example on T_3: root 0, children 1, -1/2, -1/2."""
    return build_model(TreeConfig(3), NEEDWEIGHT3_ROOT, EqualSplit(), K, compressed, name="needweight3")


def double_half3(K: int, compressed: bool = True) -> HarmonicModel:
    """Unbounded example on T_3: every vertex sees {2u, u/2, u/2}."""
    return build_model(TreeConfig(3), DOUBLE_HALF3_ROOT, DoubleHalf(), K, compressed, name="double_half3")


def constant(d: int, c, K: int, compressed: bool = True) -> HarmonicModel:
    c = to_rational(c)
    return build_model(TreeConfig(d), RootData(c, (c,) * d), EqualSplit(), K, compressed, name="constant")


def random_root(d: int, seed: int, magnitude: int = 9, denominator: int = 4) -> RootData:
    """Seeded root data: u0 and d-1 children sampled, the last child forced."""
    rng = class_rng(seed, "root", d)
    sampler = RandomSplit(seed, magnitude, denominator)
    u0 = sampler.sample(rng)
    free = [sampler.sample(rng) for _ in range(d - 1)]
    return RootData(u0, tuple(free) + (d * u0 - sum(free, mpq(0)),))


def random_model(d: int, seed: int, K: int, *, magnitude: int = 9, denominator: int = 4,
                 tied: bool = False, compressed: bool = True) -> HarmonicModel:
    root = random_root(d, seed, magnitude, denominator)
    splitter = RandomSplit(seed, magnitude, denominator, tied=tied)
    return build_model(TreeConfig(d), root, splitter, K, compressed, name="random")


def builtin_model(name: str, K: int, *, d: int | None = None, a=1, b=0, c=0, seed: int = 0,
                  tied: bool = False, compressed: bool = True) -> HarmonicModel:
    """Build a named model.  ``d`` must match the family where it is fixed."""
    fixed = {"bounded3": 3, "needweight3": 3, "double_half3": 3, "linear2": 2}
    if name in fixed:
        if d is not None and d != fixed[name]:
            raise ConfigError(f"{name} lives on the {fixed[name]}-regular tree, got d={d}")
        if name == "bounded3":
            return bounded3(K, compressed)
        if name == "needweight3":
            return needweight3(K, compressed)
        if name == "double_half3":
            return double_half3(K, compressed)
        return linear_2reg(a, b, K, compressed=compressed)
    if name == "constant":
        return constant(3 if d is None else d, c, K, compressed)
    if name == "random":
        return random_model(3 if d is None else d, seed, K, tied=tied, compressed=compressed)
    raise ConfigError(f"unknown built-in model {name!r}; choose from {', '.join(BUILTIN_NAMES)}")
