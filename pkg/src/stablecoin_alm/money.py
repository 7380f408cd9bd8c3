"""Decimal helpers for money and fraction arithmetic.

All monetary amounts and risk fractions in this package are ``decimal.Decimal``;
binary floats are confined to the Monte Carlo engine and converted at its
boundary. Display rounding is half-even throughout.
"""

from __future__ import annotations

from decimal import Decimal, InvalidOperation, ROUND_HALF_EVEN

from .errors import DomainError

ZERO = Decimal("0")
ONE = Decimal("1")
CENT = Decimal("0.01")

# Fractions crossing the float boundary (Monte Carlo results) are fixed at
# twelve decimal places so that exposure x fraction products stay exact within
# the default 28-digit decimal context.
FRACTION_PLACES = Decimal("1E-12")


def to_cents(amount: Decimal) -> Decimal:
    """Round a monetary amount half-even to cents."""
    return amount.quantize(CENT, rounding=ROUND_HALF_EVEN)


def to_whole_units(amount: Decimal) -> Decimal:
    """Round a monetary amount half-even to whole currency units."""
    return amount.quantize(ONE, rounding=ROUND_HALF_EVEN)


def fraction_from_float(value: float) -> Decimal:
    """Convert a float fraction to Decimal at the package-wide fraction scale.

    ``repr`` gives the shortest round-tripping representation, so the
    conversion is deterministic for a given float.
    """
    return Decimal(repr(value)).quantize(FRACTION_PLACES, rounding=ROUND_HALF_EVEN)


def parse_decimal(text: str, context: str) -> Decimal:
    """Parse a decimal string, rejecting anything that is not a plain number."""
    if not isinstance(text, str):
        raise DomainError(f"{context}: expected a decimal string, got {type(text).__name__}")
    try:
        value = Decimal(text)
    except InvalidOperation:
        raise DomainError(f"{context}: malformed decimal {text!r}") from None
    if not value.is_finite():
        raise DomainError(f"{context}: non-finite decimal {text!r}")
    return value


def ensure_fraction(value: Decimal, context: str, *, upper: Decimal = ONE) -> Decimal:
    """Require ``0 <= value <= upper`` and return it."""
    if value < ZERO or value > upper:
        raise DomainError(f"{context}: fraction {value} outside [0, {upper}]")
    return value
