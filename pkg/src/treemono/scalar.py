"""Number handling: exact rationals (``mpq``) and high-precision floats (``mpfr``).

Values that come out of the engine are plain gmpy2 numbers; there is no
wrapper class.  A :class:`NumberMode` decides how powers are taken and how
results are rendered.
"""
from __future__ import annotations

from dataclasses import dataclass
from decimal import Context, Decimal, ROUND_HALF_EVEN
from fractions import Fraction
from numbers import Rational
from typing import Union

import gmpy2
from gmpy2 import mpfr, mpq

from .errors import ConfigError, NonIntegralPower

Scalar = Union[type(mpq()), type(mpfr())]

ZERO = mpq(0)
ONE = mpq(1)

DEFAULT_PRECISION = 128
DEFAULT_RTOL = 1e-12


def to_rational(x) -> mpq:
    """Coerce ints, Fractions, mpq and ``"p/q"`` strings to a reduced mpq.

    Floats are rejected: binary floats silently carry representation error.
    """
    if isinstance(x, str):
        text = x.strip()
        try:
            return mpq(text)
        except ValueError:
            try:
                return mpq(Fraction(text))
            except (ValueError, ZeroDivisionError) as exc:
                raise ConfigError(f"not a rational literal: {x!r}") from exc
    if isinstance(x, bool):
        raise ConfigError(f"not a rational: {x!r}")
    if isinstance(x, (int, Rational)) or type(x) is type(ZERO):
        return mpq(x)
    raise ConfigError(f"not an exact rational: {x!r}")


def format_rational(x) -> str:
    """Canonical ``"p/q"`` (or ``"p"`` when q = 1)."""
    return str(mpq(x))


def integral_exponent(p) -> int | None:
    """Return ``p`` as an int if it is integral, else None."""
    if isinstance(p, int) and not isinstance(p, bool):
        return p
    try:
        q = Fraction(p)
    except (TypeError, ValueError):
        return None
    return int(q) if q.denominator == 1 else None


@dataclass(frozen=True)
class NumberMode:
    """Arithmetic mode for functional evaluation.

    ``exact`` keeps everything in mpq and requires integral exponents.
    ``float`` uses mpfr at ``precision`` bits; verdicts are then gated by
    ``rtol``.
    """

    kind: str = "exact"
    precision: int = DEFAULT_PRECISION
    rtol: float = DEFAULT_RTOL

    def __post_init__(self):
        if self.kind not in ("exact", "float"):
            raise ConfigError(f"unknown mode {self.kind!r}")
        if self.precision < 2:
            raise ConfigError("precision must be at least 2 bits")

    @property
    def exact(self) -> bool:
        return self.kind == "exact"

    def exponent(self, p):
        """Validate an exponent p >= 1 for this mode."""
        n = integral_exponent(p)
        if self.exact:
            if n is None:
                raise NonIntegralPower(f"exponent {p!r} is not an integer; use float mode")
            if n < 1:
                raise ConfigError(f"exponent must be >= 1, got {p!r}")
            return n
        if n is not None:
            if n < 1:
                raise ConfigError(f"exponent must be >= 1, got {p!r}")
            return n
        with self.context():
            value = mpfr(str(p)) if isinstance(p, str) else mpfr(p)
        if not value >= 1:
            raise ConfigError(f"exponent must be >= 1, got {p!r}")
        return value

    def context(self):
        return gmpy2.context(gmpy2.get_context(), precision=self.precision)

    def convert(self, x):
        if self.exact:
            return x
        with self.context():
            return mpfr(x)

    def abs_pow(self, x, p):
        """|x|**p; in float mode the result is rounded at ``precision`` bits."""
        if self.exact:
            return abs(x) ** p
        with self.context():
            return abs(mpfr(x)) ** p


EXACT = NumberMode()


def decimal_string(x, digits: int = 15) -> str:
    """Round-half-even decimal rendering at ``digits`` significant digits."""
    q = mpq(x)
    ctx = Context(prec=digits, rounding=ROUND_HALF_EVEN)
    d = ctx.divide(Decimal(int(q.numerator)), Decimal(int(q.denominator)))
    if d == 0:
        return "0"
    # drop the trailing zeros an inexact quotient carries to full precision
    return format(d.normalize(ctx), f".{digits}g")


def exact_string(x) -> str:
    """Authoritative string form: ``p/q`` for rationals, full mpfr digits otherwise."""
    if type(x) is type(ZERO):
        return format_rational(x)
    if isinstance(x, int):
        return str(x)
    return format(x, ".40g") if type(x) is type(mpfr()) else str(x)
