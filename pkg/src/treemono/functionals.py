"""Level aggregates and the monotone functionals built from them.

Notation for a model u on the d-regular tree, exponent p:

    D_k  sum of |u(a) - u(b)|**p over the edges between V_k and V_{k+1}
    H_k  sum of |u(v)|**p over V_k
    C_k  sum of u(v) * u(parent(v)) over V_k              (p = 2, k >= 1)
    R_k  sum over v in V_k of sum_{i<j} (u(c_i) - u(c_j))**2  (p = 2)
    N_k  H_{k+1} - (d-1) H_k

and the functionals

    G(k) = (1/k) sum_{l<k} (d-1)**((p-1) l) D_l                 k >= 1
    F(l) = (d-1)**((p-1) l) D_l                                 l >= 0
    W(k) = sum_{j<k} (d-1)**j D_j - (d-2)/2 * H_k / (d-1)**(k-1)   d >= 3
    W(k) = (1/k) sum_{j<k} D_j - H_k / (2 k**2)                  d == 2
    N(k) = H_{k+1} / (d-1) - H_k                                k >= 0
"""
from __future__ import annotations

from contextlib import nullcontext
from dataclasses import dataclass, field
from itertools import repeat
from operator import sub

from gmpy2 import mpfr, mpq

from .errors import ConfigError, WrongDegree
from .model import EnumeratedLevel, HarmonicModel
from .scalar import EXACT, NumberMode

ZERO = mpq(0)


def _memo(model: HarmonicModel, key, compute):
    try:
        return model._memo[key]
    except KeyError:
        value = model._memo[key] = compute()
        return value


def _power_sum(pairs, p, mode: NumberMode):
    """sum m * |x|**p over (x, m) pairs."""
    if mode.exact:
        return sum((m * abs(x) ** p for x, m in pairs), ZERO)
    with mode.context():
        return sum((m * abs(mpfr(x)) ** p for x, m in pairs), mpfr(0))


def _flat_power_sum(xs, p, mode: NumberMode):
    # map/pow keeps the per-vertex loop in C for the big enumerated levels
    if mode.exact:
        return sum(map(pow, map(abs, xs), repeat(p)), ZERO)
    with mode.context():
        return sum((abs(mpfr(x)) ** p for x in xs), mpfr(0))


# exponents whose enumerated level sums are computed together in one pass
_BATCH = (1, 2, 3)


def _batched_sums(model, name, k, xs, p, mode):
    """Enumerated exact-mode sums for every exponent in _BATCH from one pass
    over ``xs``; all are memoized, the one for ``p`` is returned."""
    absx = list(map(abs, xs))
    for q in _BATCH:
        total = sum(absx, ZERO) if q == 1 else sum(map(pow, absx, repeat(q)), ZERO)
        model._memo[_key(name, q, k, mode)] = total
    return model._memo[_key(name, p, k, mode)]


def _ctx(mode: NumberMode):
    return nullcontext() if mode.exact else mode.context()


def _key(name, p, k, mode):
    return (name, p, k, mode.kind, mode.precision)


def edge_energy(model: HarmonicModel, p, k: int, mode: NumberMode = EXACT):
    """D_k: |grad u|**p summed over the edges from V_k to V_{k+1}."""
    p = mode.exponent(p)
    model.require_depth(k + 1)

    def compute():
        child = model.level(k + 1)
        if isinstance(child, EnumeratedLevel):
            if mode.exact and p in _BATCH:
                return _batched_sums(model, "D", k, map(sub, child.values, child.parent_values), p, mode)
            return _flat_power_sum(map(sub, child.values, child.parent_values), p, mode)
        return _power_sum(((v - pv, m) for v, pv, m in child.weighted_classes()), p, mode)

    return _memo(model, _key("D", p, k, mode), compute)


def height(model: HarmonicModel, p, k: int, mode: NumberMode = EXACT):
    """H_k: |u|**p summed over V_k."""
    p = mode.exponent(p)
    model.require_depth(k)

    def compute():
        here = model.level(k)
        if isinstance(here, EnumeratedLevel):
            return _flat_power_sum(here.values, p, mode)
        return _power_sum(((v, m) for v, _, m in here.weighted_classes()), p, mode)

    return _memo(model, _key("H", p, k, mode), compute)


def cross_term(model: HarmonicModel, k: int):
    """C_k = sum over V_k of u(v) u(v_p), k >= 1."""
    if k < 1:
        raise ValueError("the cross term starts at level 1")
    model.require_depth(k)
    return _memo(model, ("C", 2, k), lambda: sum(
        (m * v * pv for v, pv, m in model.weighted_classes(k)), ZERO))


def sibling_spread(model: HarmonicModel, k: int):
    """R_k = sum over v in V_k of the squared pairwise differences of v's children.

    At k = 0 this runs over the d children of the root.
    """
    model.require_depth(k + 1)

    def compute():
        total = ZERO
        for _, kids, m in model.sibling_blocks(k):
            s = ZERO
            for i in range(len(kids)):
                ci = kids[i]
                for j in range(i + 1, len(kids)):
                    diff = ci - kids[j]
                    s += diff * diff
            total += m * s
        return total

    return _memo(model, ("R", 2, k), compute)


def height_increment(model: HarmonicModel, p, k: int, mode: NumberMode = EXACT):
    """N_k = H_{k+1} - (d-1) H_k (unnormalized Almgren increment)."""
    with _ctx(mode):
        return height(model, p, k + 1, mode) - (model.d - 1) * height(model, p, k, mode)


@dataclass(frozen=True)
class LevelAggregates:
    k: int
    p: object
    D: object
    H: object
    N: object
    C: object = None
    R: object = None


def aggregates(model: HarmonicModel, p, k: int, mode: NumberMode = EXACT) -> LevelAggregates:
    model.require_depth(k + 1)
    p = mode.exponent(p)
    C = R = None
    if p == 2 and mode.exact:
        C = cross_term(model, k) if k >= 1 else None
        R = sibling_spread(model, k)
    return LevelAggregates(
        k=k, p=p,
        D=edge_energy(model, p, k, mode),
        H=height(model, p, k, mode),
        N=height_increment(model, p, k, mode),
        C=C, R=R,
    )


def _weight(base: int, exponent, mode: NumberMode):
    if mode.exact:
        return mpq(base) ** exponent
    with mode.context():
        return mpfr(base) ** exponent


def F_level(model: HarmonicModel, p, level: int, mode: NumberMode = EXACT):
    """Single-level weighted energy (d-1)**((p-1) l) * D_l."""
    if level < 0:
        raise ValueError("level must be non-negative")
    q = mode.exponent(p)
    with _ctx(mode):
        return _weight(model.d - 1, (q - 1) * level, mode) * edge_energy(model, q, level, mode)


def dirichlet_G(model: HarmonicModel, p, k: int, mode: NumberMode = EXACT):
    """Weighted Dirichlet energy of the edges within distance k, averaged by 1/k."""
    if k < 1:
        raise ValueError("G is defined for k >= 1")
    model.require_depth(k)
    with _ctx(mode):
        return sum((F_level(model, p, l, mode) for l in range(k)), ZERO) / k


def unweighted_energy(model: HarmonicModel, p, k: int, mode: NumberMode = EXACT):
    """sum_{j<k} D_j, the plain Dirichlet energy of the ball."""
    model.require_depth(k)
    with _ctx(mode):
        return sum((edge_energy(model, p, j, mode) for j in range(k)), ZERO)


def weiss_W(model: HarmonicModel, k: int):
    d = model.d
    if d < 3:
        raise WrongDegree("weiss_W needs d >= 3; use weiss_W2 on the 2-regular tree")
    if k < 1:
        raise ValueError("W is defined for k >= 1")
    model.require_depth(k)
    energy = sum((mpq(d - 1) ** j * edge_energy(model, 2, j) for j in range(k)), ZERO)
    return energy - mpq(d - 2, 2) * height(model, 2, k) / mpq(d - 1) ** (k - 1)


def weiss_W2(model: HarmonicModel, k: int):
    if model.d != 2:
        raise WrongDegree(f"weiss_W2 is the 2-regular functional, got d={model.d}")
    if k < 1:
        raise ValueError("W is defined for k >= 1")
    model.require_depth(k)
    return unweighted_energy(model, 2, k) / k - height(model, 2, k) / (2 * k * k)


def weiss(model: HarmonicModel, k: int):
    return weiss_W2(model, k) if model.d == 2 else weiss_W(model, k)


def almgren_N(model: HarmonicModel, p, k: int, mode: NumberMode = EXACT):
    if k < 0:
        raise ValueError("N is defined for k >= 0")
    model.require_depth(k + 1)
    with _ctx(mode):
        return height(model, p, k + 1, mode) / (model.d - 1) - height(model, p, k, mode)


@dataclass
class FunctionalSeries:
    name: str
    p: object
    start: int
    values: list
    mode: NumberMode = field(default=EXACT)
    verdict: "MonotonicityVerdict | None" = None

    @property
    def indices(self) -> range:
        return range(self.start, self.start + len(self.values))

    def items(self):
        return zip(self.indices, self.values)


# name -> (first index, last index as a function of k_max)
SERIES_RANGES = {
    "G": (1, lambda K: K),
    "E": (1, lambda K: K),
    "W": (1, lambda K: K),
    "F": (0, lambda K: K - 1),
    "N": (0, lambda K: K - 1),
    "D": (0, lambda K: K - 1),
    "H": (0, lambda K: K),
    "C": (1, lambda K: K),
    "R": (0, lambda K: K - 1),
    "Nk": (0, lambda K: K - 1),
}
AGGREGATE_NAMES = ("D", "H", "C", "R", "Nk")


def series(model: HarmonicModel, name: str, p, k_max: int, mode: NumberMode = EXACT) -> FunctionalSeries:
    """Values of one functional for every admissible index up to the model depth ``k_max``."""
    if name not in SERIES_RANGES:
        raise ConfigError(f"unknown functional {name!r}")
    model.require_depth(k_max)
    first, last = SERIES_RANGES[name]
    if name == "W":
        p = 2
    q = mode.exponent(p)
    if name in ("W", "C", "R") and not mode.exact:
        raise ConfigError(f"{name} is only evaluated in exact mode")
    values = []
    with _ctx(mode):
        values = _series_values(model, name, q, first, last(k_max), mode)
    return FunctionalSeries(name, q, first, values, mode)


def _series_values(model, name, q, first, last, mode):
    values = []
    if name in ("G", "E"):
        running = ZERO
        for k in range(first, last + 1):
            l = k - 1
            running = running + (F_level(model, q, l, mode) if name == "G" else edge_energy(model, q, l, mode))
            values.append(running / k if name == "G" else running)
    else:
        fn = {
            "W": lambda k: weiss(model, k),
            "F": lambda k: F_level(model, q, k, mode),
            "N": lambda k: almgren_N(model, q, k, mode),
            "D": lambda k: edge_energy(model, q, k, mode),
            "H": lambda k: height(model, q, k, mode),
            "C": lambda k: cross_term(model, k),
            "R": lambda k: sibling_spread(model, k),
            "Nk": lambda k: height_increment(model, q, k, mode),
        }[name]
        values = [fn(k) for k in range(first, last + 1)]
    return values


@dataclass(frozen=True)
class MonotonicityVerdict:
    ok: bool
    index: int | None = None
    deficit: object = None
    strict: bool = False
    float_verified: bool = False

    def __bool__(self):
        return self.ok

    @property
    def label(self) -> str:
        if not self.ok:
            return f"violation at index {self.index} (deficit {self.deficit})"
        word = "strictly increasing" if self.strict else "non-decreasing"
        return f"{word} (float-verified)" if self.float_verified else word


def monotonicity_report(s: FunctionalSeries) -> MonotonicityVerdict:
    """Non-decreasing check; in float mode drops smaller than rtol*scale are ignored."""
    if len(s.values) < 2:
        raise ValueError("a monotonicity verdict needs at least two values")
    exact = s.mode.exact
    strict = True
    for (_, prev), (k, cur) in zip(s.items(), list(s.items())[1:]):
        drop = prev - cur
        if exact:
            bad = drop > 0
        else:
            scale = max(abs(prev), abs(cur))
            bad = drop > s.mode.rtol * scale
        if bad:
            verdict = MonotonicityVerdict(False, k, drop, False, not exact)
            s.verdict = verdict
            return verdict
        if not cur > prev:
            strict = False
    verdict = MonotonicityVerdict(True, None, None, strict, not exact)
    s.verdict = verdict
    return verdict


def stepwise_dirichlet_violation(model: HarmonicModel, p, k_max: int | None = None):
    """Per-vertex edge inequality sum_i |c_i - b|**p >= |b - b_p|**p / (d-1)**(p-1).

    Returns None when it holds at every non-root vertex of levels 1..k_max,
    else ``(level, class, lhs, rhs)`` for the first failure.
    """
    p = EXACT.exponent(p)
    k_max = model.depth - 1 if k_max is None else k_max
    model.require_depth(k_max + 1)
    scale = mpq(model.d - 1) ** (p - 1)
    for k in range(1, k_max + 1):
        for (b, bp), kids, _ in model.sibling_blocks(k):
            lhs = sum((abs(c - b) ** p for c in kids), ZERO)
            rhs = abs(b - bp) ** p / scale
            if lhs < rhs:
                return k, (b, bp), lhs, rhs
    return None
