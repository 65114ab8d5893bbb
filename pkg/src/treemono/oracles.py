"""Closed-form values for the built-in families, as exact rationals.

``oracle_diff`` evaluates the engine on a model and subtracts the closed
form; for the built-in families every difference must be literally zero.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq

from .builtins import BOUNDED3_ROOT, DOUBLE_HALF3_ROOT, NEEDWEIGHT3_ROOT
from .errors import ConfigError, FamilyMismatch, UnsupportedPower
from .functionals import (
    almgren_N,
    dirichlet_G,
    edge_energy,
    height,
    unweighted_energy,
    weiss,
)
from .model import HarmonicModel, RootData
from .scalar import to_rational

FAMILIES = ("bounded3", "needweight3", "double_half3", "linear2")


def _half_pow(k: int) -> mpq:
    return mpq(1, 2 ** k)


# -- bounded example on T_3 ------------------------------------------------

def bounded3_branch_value(k: int) -> mpq:
    """a_k: a_0 = 0, a_k = 2 - 2**(1-k)."""
    return mpq(0) if k == 0 else 2 - mpq(1, 2 ** (k - 1))


def bounded3(k: int, p: int = 2) -> dict:
    out = {
        "a": bounded3_branch_value(k),
        "H": 2 ** (k + p) * (1 - _half_pow(k)) ** p,
        "N": 2 ** (k + p) * ((1 - _half_pow(k + 1)) ** p - (1 - _half_pow(k)) ** p),
    }
    if k >= 1:
        out["G"] = mpq(2)
        out["W"] = 2 * k - 4 + mpq(8, 2 ** k) - mpq(4, 4 ** k)
        out["W_increment"] = 2 - mpq(4, 2 ** k) + mpq(3, 4 ** k)
    return out


# -- finite-energy example on T_3 -------------------------------------------

def needweight3(k: int) -> dict:
    return {"D": mpq(3, 2 ** (k + 1)), "partial_energy": 3 * (1 - _half_pow(k))}


# -- double/half example on T_3 ---------------------------------------------

def double_half3(l: int, p: int = 2) -> dict:
    """Closed forms for the double/half model.

    Level-typed sums (A, B, H, N) start at l = 1: the root has no parent, so
    it is neither type A nor type B.
    """
    if p not in (2, 3):
        raise UnsupportedPower(f"double_half3 closed forms exist for p in {{2, 3}}, got {p}")
    out: dict = {}
    if p == 2:
        out["U"] = mpq(8) ** l
        out["D_down"] = mpq(1, 2) + 2 * (mpq(8) ** l - 1) / 7
        out["weighted_dirichlet_sum"] = 9 * mpq(8) ** l / 7 + mpq(3, 14)
        if l >= 1:
            k = l
            out["G"] = (9 * (mpq(8) ** k - 1) / 49 + mpq(3 * k, 14)) / k
            out["W"] = (9 * (mpq(8) ** k - 1) / 49 + mpq(3 * k, 14)
                        - (mpq(3, 7) / 2 ** k + mpq(4) ** k / 14 + mpq(4) ** k) / 2 ** k)
            out["W_increment"] = (9 * mpq(8) ** k / 7 + mpq(3, 14)
                                  + mpq(9, 28 * 4 ** k) - mpq(15 * 2 ** k, 14))
            out["A"] = mpq(3, 7) / 2 ** l + mpq(4) ** l / 14
            out["B"] = mpq(4) ** l
            out["H"] = out["A"] + out["B"]
    elif l >= 1:
        out["A"] = mpq(15, 31) / 4 ** l + mpq(8) ** l / 62
        out["B"] = mpq(8) ** l
        out["H"] = out["A"] + out["B"]
        out["N"] = mpq(-105, 248 * 4 ** l) + 189 * mpq(8) ** l / 62
    return out


# -- linear functions on T_2 -------------------------------------------------

def linear2(a, b, k: int, p: int = 2) -> dict:
    """G, W, N for u(j) = a j + b on the 2-regular tree.

    Valid for k >= 1 only: the N formula sums two vertices per level and so
    double-counts the root (N(0) is really |a+b|**p + |b-a|**p - |b|**p).
    """
    a, b = to_rational(a), to_rational(b)
    if k < 1:
        return {}
    return {
        "G": 2 * abs(a) ** p,
        "W": a * a - b * b / (k * k),
        "N": (abs(a * (k + 1) + b) ** p + abs(-a * (k + 1) + b) ** p)
             - (abs(a * k + b) ** p + abs(-a * k + b) ** p),
    }


# -- engine side -------------------------------------------------------------

def double_half_type_sums(model: HarmonicModel, p: int, l: int) -> tuple:
    """(A_l, B_l): |u|**p over level-l vertices whose parent is 2u (type A)
    or u/2 (type B)."""
    A = B = mpq(0)
    for v, pv, m in model.weighted_classes(l):
        if pv == 2 * v:
            A += m * abs(v) ** p
        elif 2 * pv == v:
            B += m * abs(v) ** p
        else:
            raise FamilyMismatch(f"level-{l} class ({v}, {pv}) is neither type A nor type B")
    return A, B


def double_half_edge_sums(model: HarmonicModel, l: int) -> tuple:
    """(U_l, D_l): 2**l times the squared gradients of the up (child = 2 parent)
    and down (child = parent/2) edges from level l."""
    up = down = mpq(0)
    for v, pv, m in model.weighted_classes(l + 1):
        g = (v - pv) ** 2
        if v == 2 * pv:
            up += m * g
        elif 2 * v == pv:
            down += m * g
        else:
            raise FamilyMismatch(f"edge ({pv}, {v}) is neither up nor down")
    return 2 ** l * up, 2 ** l * down


@dataclass(frozen=True)
class OracleFamily:
    name: str
    p: int = 2
    a: object = None
    b: object = None

    def __post_init__(self):
        if self.name not in FAMILIES:
            raise ConfigError(f"unknown oracle family {self.name!r}")
        if self.name == "linear2":
            object.__setattr__(self, "a", to_rational(1 if self.a is None else self.a))
            object.__setattr__(self, "b", to_rational(0 if self.b is None else self.b))
        if self.name == "double_half3" and self.p not in (2, 3):
            raise UnsupportedPower(f"double_half3 closed forms exist for p in {{2, 3}}, got {self.p}")


def _check_family(model: HarmonicModel, fam: OracleFamily):
    expected = {
        "bounded3": (3, BOUNDED3_ROOT, "equal_split"),
        "needweight3": (3, NEEDWEIGHT3_ROOT, "equal_split"),
        "double_half3": (3, DOUBLE_HALF3_ROOT, "double_half"),
    }
    if fam.name == "linear2":
        target = (2, RootData(fam.b, (fam.b + fam.a, fam.b - fam.a)), "equal_split")
    else:
        target = expected[fam.name]
    d, root, kind = target
    if model.d != d or model.root != root or model.splitter.kind != kind:
        raise FamilyMismatch(
            f"model (d={model.d}, root={model.root}, splitter={model.splitter.kind}) "
            f"is not the {fam.name} configuration"
        )


@dataclass(frozen=True)
class DiffRow:
    k: int
    quantity: str
    engine: object
    oracle: object

    @property
    def diff(self):
        return self.engine - self.oracle


@dataclass
class OracleReport:
    family: OracleFamily
    k_max: int
    rows: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.diff == 0 for r in self.rows)

    def nonzero(self) -> list:
        return [r for r in self.rows if r.diff != 0]


def _engine_values(model: HarmonicModel, fam: OracleFamily, k: int, wanted) -> dict:
    p = fam.p
    out = {}
    for q in wanted:
        if q == "G":
            out[q] = dirichlet_G(model, p, k)
        elif q == "W":
            out[q] = weiss(model, k)
        elif q == "W_increment":
            out[q] = weiss(model, k + 1) - weiss(model, k)
        elif q == "N":
            out[q] = almgren_N(model, p, k)
        elif q == "H":
            out[q] = height(model, p, k)
        elif q == "a":
            out[q] = max(model.values(k))
        elif q == "D":
            out[q] = edge_energy(model, 2, k)
        elif q == "partial_energy":
            out[q] = unweighted_energy(model, 2, k)
        elif q == "weighted_dirichlet_sum":
            out[q] = 2 ** k * edge_energy(model, 2, k)
        elif q in ("U", "D_down"):
            up, down = double_half_edge_sums(model, k)
            out[q] = up if q == "U" else down
        elif q in ("A", "B"):
            A, B = double_half_type_sums(model, p, k)
            out[q] = A if q == "A" else B
        else:
            raise KeyError(q)
    return out


def oracle_values(fam: OracleFamily, k: int) -> dict:
    if fam.name == "bounded3":
        return bounded3(k, fam.p)
    if fam.name == "needweight3":
        return needweight3(k)
    if fam.name == "double_half3":
        return double_half3(k, fam.p)
    return linear2(fam.a, fam.b, k, fam.p)


def required_depth(fam: OracleFamily, k_max: int) -> int:
    """Model depth needed to evaluate every quantity up to k_max."""
    return k_max + 1


def oracle_diff(model: HarmonicModel, fam: OracleFamily, k_max: int, k_min: int = 0) -> OracleReport:
    """Engine minus closed form for every quantity the family defines, k_min <= k <= k_max."""
    _check_family(model, fam)
    model.require_depth(required_depth(fam, k_max))
    report = OracleReport(fam, k_max)
    for k in range(k_min, k_max + 1):
        expected = oracle_values(fam, k)
        engine = _engine_values(model, fam, k, expected)
        for q in sorted(expected):
            report.rows.append(DiffRow(k, q, engine[q], expected[q]))
    return report
