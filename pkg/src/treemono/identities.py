"""Exact checks of the algebraic identities and inequalities behind the
monotonicity theorems.

Every check is a theorem for harmonic u, so a failure means the model is not
harmonic or the engine is wrong.  Model checks use p = 2 aggregates unless
they say otherwise; the scalar checks run on seeded random rationals.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from gmpy2 import mpq

from .functionals import cross_term, edge_energy, height, height_increment, sibling_spread
from .model import HarmonicModel

ZERO = mpq(0)

PASS, FAIL, SKIP = "pass", "fail", "skip"


@dataclass
class CheckResult:
    name: str
    status: str
    checked: int = 0
    witness: dict | None = None
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.status != FAIL

    def to_dict(self) -> dict:
        out = {"check": self.name, "status": self.status, "checked": self.checked}
        if self.witness is not None:
            out["witness"] = {k: str(v) for k, v in self.witness.items()}
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class SuiteReport:
    results: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def failures(self) -> list:
        return [r for r in self.results if not r.ok]

    def __getitem__(self, name) -> CheckResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"ok": self.ok, "checks": [r.to_dict() for r in self.results]}


class _Check:
    """Accumulates one named check; keeps only the first failure."""

    def __init__(self, name):
        self.name = name
        self.count = 0
        self.witness = None

    def __call__(self, ok: bool, **witness):
        self.count += 1
        if not ok and self.witness is None:
            self.witness = witness

    def result(self) -> CheckResult:
        return CheckResult(self.name, FAIL if self.witness else PASS, self.count, self.witness)


def _rationals(rng: random.Random, n: int, magnitude: int = 20, denominator: int = 7):
    return [mpq(rng.randint(-magnitude, magnitude), rng.randint(1, denominator)) for _ in range(n)]


def scalar_checks(d: int, p_values=(1, 2, 3), samples: int = 1000, seed: int = 0) -> list[CheckResult]:
    """Model-free identities on ``samples`` seeded random rational tuples.

    sum_of_squares_split:  sum A_j**2 = (sum A_j)**2/(d-1) + sum_{i<j}(A_i-A_j)**2/(d-1)
    convexity_split:       |(dA-B)/(d-1)|**p >= d/(d-1) |A|**p - |B|**p/(d-1)
    two_point_convexity:   |c+e|**p + |c-e|**p >= 2|c|**p
    """
    rng = random.Random(f"scalar|{seed}|{d}")
    n = d - 1
    split = _Check("sum_of_squares_split")
    jensen = _Check("convexity_split")
    two_point = _Check("two_point_convexity")
    for _ in range(samples):
        A = _rationals(rng, n)
        lhs = sum((a * a for a in A), ZERO)
        pairs = sum(((A[i] - A[j]) ** 2 for i in range(n) for j in range(i + 1, n)), ZERO)
        rhs = sum(A, ZERO) ** 2 / n + pairs / n
        split(lhs == rhs, A=A, lhs=lhs, rhs=rhs)

        a, b, c, e = _rationals(rng, 4)
        for p in p_values:
            left = abs((d * a - b) / (d - 1)) ** p
            right = mpq(d, d - 1) * abs(a) ** p - abs(b) ** p / (d - 1)
            jensen(left >= right, p=p, A=a, B=b, lhs=left, rhs=right)
            left = abs(c + e) ** p + abs(c - e) ** p
            two_point(left >= 2 * abs(c) ** p, p=p, c=c, e=e)
    return [split.result(), jensen.result(), two_point.result()]


def model_checks(model: HarmonicModel, k_max: int | None = None, p_values=(1, 2, 3)) -> list[CheckResult]:
    d = model.d
    k_max = model.depth - 1 if k_max is None else k_max
    model.require_depth(k_max + 1)
    w = mpq(d - 1)
    D = [edge_energy(model, 2, k) for k in range(k_max + 1)]
    H = [height(model, 2, k) for k in range(k_max + 2)]
    N = [H[k + 1] - (d - 1) * H[k] for k in range(k_max + 1)]
    C = [None] + [cross_term(model, k) for k in range(1, k_max + 1)]
    R = [sibling_spread(model, k) for k in range(k_max + 1)]
    results = []

    chk = _Check("level_energy_recurrence")
    for k in range(1, k_max + 1):
        chk((d - 1) * D[k] == D[k - 1] + R[k], k=k, D_k=D[k], D_prev=D[k - 1], R_k=R[k])
    results.append(chk.result())

    chk = _Check("weighted_energy_monotone")
    for k in range(1, k_max + 1):
        step = w ** k * D[k] - w ** (k - 1) * D[k - 1]
        chk(step == w ** (k - 1) * R[k] and step >= 0, k=k, step=step)
    results.append(chk.result())

    chk = _Check("cross_term_recurrence")
    for k in range(1, k_max + 1):
        expected = d * H[0] if k == 1 else d * H[k - 1] - C[k - 1]
        chk(C[k] == expected, k=k, C_k=C[k], expected=expected)
    results.append(chk.result())

    chk = _Check("root_energy")
    chk(D[0] == H[1] - d * H[0], D_0=D[0], H_1=H[1], H_0=H[0])
    results.append(chk.result())

    chk = _Check("energy_from_heights")
    for k in range(1, k_max + 1):
        expected = H[k + 1] - (d + 1) * H[k] + 2 * C[k]
        chk(D[k] == expected, k=k, D_k=D[k], expected=expected)
    results.append(chk.result())

    chk = _Check("first_increment")
    if k_max >= 1:
        chk(N[1] == D[1] + 2 * D[0], N_1=N[1], D_1=D[1], D_0=D[0])
    results.append(chk.result())

    chk = _Check("almgren_increment_recurrence")
    for k in range(2, k_max + 1):
        chk(N[k] == D[k] + D[k - 1] + N[k - 1], k=k, N_k=N[k])
    results.append(chk.result())

    chk = _Check("doubling")
    for k in range(k_max + 1):
        for j in range(k + 1):
            chk(D[j] <= w ** (k - j) * D[k], j=j, k=k, D_j=D[j], D_k=D[k])
    results.append(chk.result())

    if d >= 3:
        c_d = 2 + mpq(2, d - 2)
        chk = _Check("increment_bound")
        for k in range(1, k_max + 1):
            chk(N[k] <= c_d * w ** k * D[k], k=k, N_k=N[k], bound=c_d * w ** k * D[k])
        results.append(chk.result())
        chk = _Check("weiss_step")
        for k in range(1, k_max + 1):
            chk(w ** (2 * k) * D[k] >= mpq(d - 2, 2) * N[k], k=k, D_k=D[k], N_k=N[k])
        results.append(chk.result())
    else:
        note = "needs d >= 3"
        results.append(CheckResult("increment_bound", SKIP, note=note))
        results.append(CheckResult("weiss_step", SKIP, note=note))

    chk = _Check("almgren_increment_nonneg")
    for p in p_values:
        for k in range(k_max + 1):
            n = height_increment(model, p, k)
            chk(n >= 0, p=p, k=k, N_k=n)
    results.append(chk.result())

    # At the root the children number d, not d-1, so the increment step
    # N(1) >= N(0) only holds up to H_0/(d-1); constants show it is sharp.
    chk = _Check("almgren_root_step")
    if k_max >= 1:
        for p in p_values:
            h0, h1, h2 = (height(model, p, j) for j in range(3))
            step = h2 / (d - 1) - h1 - (h1 / (d - 1) - h0)
            chk(step >= -h0 / (d - 1), p=p, step=step, H_0=h0)
    results.append(chk.result())

    results.extend(_vertex_checks(model, k_max, p_values))
    return results


def _vertex_checks(model: HarmonicModel, k_max: int, p_values) -> list[CheckResult]:
    """Per-vertex inequalities, one evaluation per class.

    child_power_mean:   sum_j |c_j|**p >= (d-1) |(d u - u_p)/(d-1)|**p
    stepwise_dirichlet: sum_j |c_j - u|**p >= |u - u_p|**p / (d-1)**(p-1)
    """
    d = model.d
    mean = _Check("child_power_mean")
    step = _Check("stepwise_dirichlet")
    for k in range(1, k_max + 1):
        for (u, up), kids, _ in model.sibling_blocks(k):
            for p in p_values:
                lhs = sum((abs(c) ** p for c in kids), ZERO)
                rhs = (d - 1) * abs((d * u - up) / (d - 1)) ** p
                mean(lhs >= rhs, p=p, k=k, u=u, u_parent=up)
                lhs = sum((abs(c - u) ** p for c in kids), ZERO)
                rhs = abs(u - up) ** p / mpq(d - 1) ** (p - 1)
                step(lhs >= rhs, p=p, k=k, u=u, u_parent=up)
    return [mean.result(), step.result()]


def identity_suite(model: HarmonicModel, k_max: int | None = None, p_values=(1, 2, 3),
                   samples: int = 1000, seed: int = 0) -> SuiteReport:
    """All model identities up to ``k_max`` plus the scalar checks."""
    results = model_checks(model, k_max, p_values)
    if samples:
        results.extend(scalar_checks(model.d, p_values, samples, seed))
    return SuiteReport(results)
