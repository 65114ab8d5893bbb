"""Rules that assign the children's values of a non-root vertex.

Harmonicity at a vertex v with parent v_p and children c_1..c_{d-1} says

    c_1 + ... + c_{d-1} = d*u(v) - u(v_p)

so a splitter is free to choose d-2 of the children and the last one is
forced.  Value-homogeneous splitters see only (u(v), u(v_p)); that is what
makes class compression of a level possible.
"""
from __future__ import annotations

import hashlib
import random
from typing import Callable, Mapping, Sequence

from gmpy2 import mpq

from .errors import ClassNotInTable, ConfigError, HarmonicityError, WrongDegree
from .scalar import to_rational
from .tree import VertexAddress


class Splitter:
    kind: str = "abstract"
    homogeneous: bool = True

    def __call__(self, d: int, value, parent_value, address: VertexAddress | None = None):
        raise NotImplementedError

    def to_dict(self) -> dict:
        return {"kind": self.kind}


class EqualSplit(Splitter):
    """All d-1 children get (d*u - u_p)/(d-1)."""

    kind = "equal_split"

    def __call__(self, d, value, parent_value, address=None):
        child = (d * value - parent_value) / (d - 1)
        return (child,) * (d - 1)

    def __repr__(self):
        return "EqualSplit()"


class DoubleHalf(Splitter):
    """Every vertex has neighbours {2u, u/2, u/2}; the children are whatever
    is left once the parent's value is removed.  Only meaningful for d = 3."""

    kind = "double_half"

    def __call__(self, d, value, parent_value, address=None):
        if d != 3:
            raise WrongDegree(f"double_half needs d=3, got d={d}")
        neighbours = [2 * value, value / 2, value / 2]
        try:
            neighbours.remove(parent_value)
        except ValueError:
            raise HarmonicityError(
                f"parent value {parent_value} is not in the double/half neighbour set of {value}"
            ) from None
        return tuple(neighbours)

    def __repr__(self):
        return "DoubleHalf()"


def class_rng(seed: int, value, parent_value) -> random.Random:
    # blake2b rather than hash(): stable across processes and PYTHONHASHSEED
    key = f"{seed}|{value}|{parent_value}".encode()
    digest = hashlib.blake2b(key, digest_size=16).digest()
    return random.Random(int.from_bytes(digest, "big"))


class RandomSplit(Splitter):
    """Seeded random children: d-2 sampled rationals n/q with |n| <= magnitude,
    1 <= q <= denominator, the last child forced by harmonicity.

    The generator is keyed on (seed, u, u_p), so the rule is value-homogeneous
    and fully deterministic.  With ``tied=True`` one sample is drawn and shared
    by the d-2 free children, which keeps at most two distinct children per
    vertex (class counts then grow like 2**k instead of (d-1)**k).
    """

    kind = "random"

    def __init__(self, seed: int = 0, magnitude: int = 9, denominator: int = 4, tied: bool = False):
        if magnitude < 0 or denominator < 1:
            raise ConfigError("random splitter needs magnitude >= 0 and denominator >= 1")
        self.seed = int(seed)
        self.magnitude = int(magnitude)
        self.denominator = int(denominator)
        self.tied = bool(tied)

    def sample(self, rng: random.Random):
        return mpq(rng.randint(-self.magnitude, self.magnitude), rng.randint(1, self.denominator))

    def __call__(self, d, value, parent_value, address=None):
        rng = class_rng(self.seed, value, parent_value)
        if self.tied:
            free = [self.sample(rng)] * (d - 2) if d > 2 else []
        else:
            free = [self.sample(rng) for _ in range(d - 2)]
        forced = d * value - parent_value - sum(free, mpq(0))
        return tuple(free) + (forced,)

    def to_dict(self):
        return {
            "kind": self.kind,
            "seed": self.seed,
            "magnitude": self.magnitude,
            "denominator": self.denominator,
            "tied": self.tied,
        }

    def __repr__(self):
        return (f"RandomSplit(seed={self.seed}, magnitude={self.magnitude}, "
                f"denominator={self.denominator}, tied={self.tied})")


class TableSplit(Splitter):
    """Explicit map (u, u_p) -> children."""

    kind = "table"

    def __init__(self, table: Mapping):
        self.table = {
            (to_rational(u), to_rational(up)): tuple(to_rational(c) for c in kids)
            for (u, up), kids in table.items()
        }

    def __call__(self, d, value, parent_value, address=None):
        try:
            return self.table[(value, parent_value)]
        except KeyError:
            raise ClassNotInTable(f"no table entry for class (u={value}, u_parent={parent_value})") from None

    def to_dict(self):
        return {
            "kind": self.kind,
            "table": [
                {"value": str(u), "parent": str(up), "children": [str(c) for c in kids]}
                for (u, up), kids in self.table.items()
            ],
        }

    def __repr__(self):
        return f"TableSplit({len(self.table)} classes)"


class CustomSplit(Splitter):
    """Address-dependent rule ``rule(address, u, u_p) -> children``.

    Not value-homogeneous, so models using it can only be enumerated.
    """

    kind = "custom"
    homogeneous = False

    def __init__(self, rule: Callable[[VertexAddress, object, object], Sequence]):
        self.rule = rule

    def __call__(self, d, value, parent_value, address=None):
        return tuple(to_rational(c) for c in self.rule(address, value, parent_value))

    def to_dict(self):
        raise ConfigError("custom splitters cannot be serialized")

    def __repr__(self):
        return f"CustomSplit({self.rule!r})"


class PerturbedSplit(Splitter):
    """Test hook: wraps another splitter and adds ``delta`` to the first child
    of the vertex at ``target``.  Used to exercise the failure paths."""

    kind = "perturbed"
    homogeneous = False

    def __init__(self, base: Splitter, target: VertexAddress = (0,), delta=1):
        self.base = base
        self.target = tuple(target)
        self.delta = to_rational(delta)

    def __call__(self, d, value, parent_value, address=None):
        kids = list(self.base(d, value, parent_value, address))
        if address is not None and tuple(address) == self.target:
            kids[0] += self.delta
        return tuple(kids)

    def __repr__(self):
        return f"PerturbedSplit({self.base!r}, target={self.target})"

    def to_dict(self):
        raise ConfigError("perturbed splitters cannot be serialized")


def splitter_from_dict(spec: Mapping) -> Splitter:
    kind = spec.get("kind")
    if kind == "equal_split":
        return EqualSplit()
    if kind == "double_half":
        return DoubleHalf()
    if kind == "random":
        return RandomSplit(
            seed=spec.get("seed", 0),
            magnitude=spec.get("magnitude", 9),
            denominator=spec.get("denominator", 4),
            tied=spec.get("tied", False),
        )
    if kind == "table":
        entries = spec.get("table")
        if entries is None:
            raise ConfigError("table splitter needs a 'table' entry")
        if isinstance(entries, Mapping):
            raise ConfigError("table must be a list of {value, parent, children} records")
        return TableSplit({(e["value"], e["parent"]): e["children"] for e in entries})
    raise ConfigError(f"unknown splitter kind {kind!r}")
