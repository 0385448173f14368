"""Univariate polynomials in an infinitesimal eps, ordered as eps -> 0+.

Values like ``10 - eps**4`` are compared by the sign of the lowest-degree
nonzero coefficient of the difference: whatever happens closest to eps = 0
wins.  This is the exact limit ordering, so no concrete "small enough" eps
ever has to be chosen.  Coefficients are exact rationals; there is no
floating point and no rounding.

Polynomials mix freely with ints and Fractions (treated as degree-0
constants), so valuation matrices may contain both plain rationals and
eps-polynomials.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Union

Scalar = Union[int, Fraction]


def _coerce(x) -> "EpsPoly | None":
    if isinstance(x, EpsPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return EpsPoly.constant(x)
    return None


class EpsPoly:
    """A polynomial in eps with Fraction coefficients, in canonical form (no zero coefficients)."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Mapping[int, Scalar] | None = None):
        clean: dict[int, Fraction] = {}
        for deg, c in (coeffs or {}).items():
            if not isinstance(deg, int) or deg < 0:
                raise ValueError(f"degree must be a non-negative integer, got {deg!r}")
            c = Fraction(c)
            if c != 0:
                clean[deg] = c
        self._coeffs = clean

    @classmethod
    def constant(cls, c: Scalar) -> "EpsPoly":
        return cls({0: Fraction(c)})

    @classmethod
    def term(cls, degree: int, coeff: Scalar = 1) -> "EpsPoly":
        return cls({degree: Fraction(coeff)})

    @property
    def coefficients(self) -> dict[int, Fraction]:
        return dict(self._coeffs)

    def is_zero(self) -> bool:
        return not self._coeffs

    def lowest_term(self) -> tuple[int, Fraction] | None:
        """(degree, coefficient) of the lowest-degree nonzero term, or None for 0."""
        if not self._coeffs:
            return None
        deg = min(self._coeffs)
        return deg, self._coeffs[deg]

    def sign(self) -> int:
        """Sign of the polynomial as eps -> 0+ (sign of the lowest-degree coefficient)."""
        low = self.lowest_term()
        if low is None:
            return 0
        return 1 if low[1] > 0 else -1

    def substitute(self, x: Scalar) -> Fraction:
        """Evaluate exactly at a concrete rational eps = x."""
        x = Fraction(x)
        return sum((c * x**d for d, c in self._coeffs.items()), Fraction(0))

    # -- ring operations -------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self._coeffs)
        for deg, c in other._coeffs.items():
            out[deg] = out.get(deg, Fraction(0)) + c
        return EpsPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return EpsPoly({d: -c for d, c in self._coeffs.items()})

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        out: dict[int, Fraction] = {}
        for d1, c1 in self._coeffs.items():
            for d2, c2 in other._coeffs.items():
                d = d1 + d2
                out[d] = out.get(d, Fraction(0)) + c1 * c2
        return EpsPoly(out)

    __rmul__ = __mul__

    # -- total order (as eps -> 0+) --------------------------------------

    def _cmp(self, other) -> int | None:
        other = _coerce(other)
        if other is None:
            return None
        return (self - other).sign()

    def __eq__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c == 0

    def __ne__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c != 0

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c >= 0

    def __hash__(self):
        if len(self._coeffs) == 1 and 0 in self._coeffs:
            return hash(self._coeffs[0])
        if not self._coeffs:
            return hash(Fraction(0))
        return hash(tuple(sorted(self._coeffs.items())))

    def __bool__(self):
        return bool(self._coeffs)

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict[str, str]:
        """Encode as {"degree": "coefficient"}, e.g. {"0": "10", "5": "3"} for 10 + 3*eps^5."""
        return {str(d): str(c) for d, c in sorted(self._coeffs.items())}

    @classmethod
    def from_json(cls, doc: Mapping[str, str]) -> "EpsPoly":
        return cls({int(d): Fraction(str(c)) for d, c in doc.items()})

    def __str__(self):
        if not self._coeffs:
            return "0"
        parts = []
        for d, c in sorted(self._coeffs.items()):
            if d == 0:
                parts.append(str(c))
            elif d == 1:
                parts.append(f"{c}*eps")
            else:
                parts.append(f"{c}*eps^{d}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"EpsPoly({self})"


def eps(degree: int = 1, coeff: Scalar = 1) -> EpsPoly:
    """Shorthand for coeff * eps**degree."""
    return EpsPoly.term(degree, coeff)
