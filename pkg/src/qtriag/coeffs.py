"""Exact coefficient ring for the symbolic engine.

Coefficients are finite sums  sum_k  c_k * s^k  where each c_k is a Gaussian
rational and s is a formal positive unit.  s stands for e^x with x real, so
conjugation fixes s and every s^k is invertible.  The deformation constants
are spelled in this ring:  q = s^8,  e^{4x} = s^4,  q_x = s^{-2}.

No floating point enters here; numeric evaluation at a concrete x happens
only through :meth:`Scalar.evaluate`.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class GaussQ:
    """A Gaussian rational re + im*i with exact Fraction parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @staticmethod
    def of(re, im=0) -> "GaussQ":
        return GaussQ(Fraction(re), Fraction(im))

    def __add__(self, other: "GaussQ") -> "GaussQ":
        return GaussQ(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussQ") -> "GaussQ":
        return GaussQ(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "GaussQ") -> "GaussQ":
        return GaussQ(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __neg__(self) -> "GaussQ":
        return GaussQ(-self.re, -self.im)

    def conj(self) -> "GaussQ":
        return GaussQ(self.re, -self.im)

    def inverse(self) -> "GaussQ":
        norm = self.re * self.re + self.im * self.im
        if norm == 0:
            raise ZeroDivisionError("inverse of zero Gaussian rational")
        return GaussQ(self.re / norm, -self.im / norm)

    def __bool__(self) -> bool:
        return self.re != 0 or self.im != 0

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self) -> str:
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"


GAUSS_ZERO = GaussQ()
GAUSS_ONE = GaussQ(Fraction(1))
GAUSS_I = GaussQ(Fraction(0), Fraction(1))


class Scalar:
    """Laurent polynomial in the formal positive unit s over GaussQ.

    Internally a map s-exponent -> GaussQ with no zero values stored, so
    equality of scalars is equality of the maps.  Instances are immutable.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: dict[int, GaussQ] | None = None):
        clean = {k: v for k, v in (terms or {}).items() if v}
        object.__setattr__(self, "_terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero() -> "Scalar":
        return _ZERO

    @staticmethod
    def one() -> "Scalar":
        return _ONE

    @staticmethod
    def of(re, im=0, spow: int = 0) -> "Scalar":
        return Scalar({spow: GaussQ.of(re, im)})

    @staticmethod
    def s_power(k: int) -> "Scalar":
        return Scalar({k: GAUSS_ONE})

    @staticmethod
    def from_gauss(g: GaussQ, spow: int = 0) -> "Scalar":
        return Scalar({spow: g})

    # -- structure ----------------------------------------------------

    @property
    def terms(self) -> dict[int, GaussQ]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def monomial_parts(self) -> tuple[int, GaussQ]:
        """The (s-exponent, coefficient) of a single-term scalar."""
        if len(self._terms) != 1:
            raise ValueError(f"scalar {self} is not an s-monomial")
        return next(iter(self._terms.items()))

    # -- ring operations ----------------------------------------------

    def __add__(self, other: "Scalar") -> "Scalar":
        out = dict(self._terms)
        for k, v in other._terms.items():
            w = out.get(k, GAUSS_ZERO) + v
            if w:
                out[k] = w
            else:
                out.pop(k, None)
        return Scalar(out)

    def __sub__(self, other: "Scalar") -> "Scalar":
        return self + (-other)

    def __neg__(self) -> "Scalar":
        return Scalar({k: -v for k, v in self._terms.items()})

    def __mul__(self, other: "Scalar") -> "Scalar":
        out: dict[int, GaussQ] = {}
        for k1, v1 in self._terms.items():
            for k2, v2 in other._terms.items():
                k = k1 + k2
                w = out.get(k, GAUSS_ZERO) + v1 * v2
                if w:
                    out[k] = w
                else:
                    out.pop(k, None)
        return Scalar(out)

    def __pow__(self, n: int) -> "Scalar":
        if n < 0:
            return self.inverse() ** (-n)
        acc = _ONE
        for _ in range(n):
            acc = acc * self
        return acc

    def inverse(self) -> "Scalar":
        k, g = self.monomial_parts()
        return Scalar({-k: g.inverse()})

    def __truediv__(self, other: "Scalar") -> "Scalar":
        return self * other.inverse()

    def conj(self) -> "Scalar":
        """Complex conjugate; s is a positive real so exponents are fixed."""
        return Scalar({k: v.conj() for k, v in self._terms.items()})

    def subs_s_power(self, e: int) -> "Scalar":
        """Substitute s -> s^e; e = -1 realizes the x -> -x flip."""
        out: dict[int, GaussQ] = {}
        for k, v in self._terms.items():
            kk = k * e
            w = out.get(kk, GAUSS_ZERO) + v
            if w:
                out[kk] = w
            else:
                out.pop(kk, None)
        return Scalar(out)

    # -- comparison / hashing ------------------------------------------

    def _key(self):
        return tuple(sorted(self._terms.items(), key=lambda kv: kv[0]))

    def __eq__(self, other) -> bool:
        return isinstance(other, Scalar) and self._terms == other._terms

    def __hash__(self) -> int:
        return hash(self._key())

    # -- output ---------------------------------------------------------

    def evaluate(self, x: float) -> complex:
        """Numeric value with s = e^x."""
        return sum(
            (complex(v) * cmath.exp(k * x) for k, v in self._terms.items()),
            complex(0),
        )

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for k in sorted(self._terms):
            g = self._terms[k]
            parts.append(str(g) if k == 0 else f"{g}*s^{k}")
        return "+".join(parts)

    def __repr__(self) -> str:
        return f"Scalar({self})"


_ZERO = Scalar({})
_ONE = Scalar({0: GAUSS_ONE})

#: q = e^{8x}, the commutation constant of the deformed generators.
Q = Scalar.s_power(8)
#: e^{4x}, the conjugation constant of the polar presentation.
E4X = Scalar.s_power(4)
#: q_x = e^{-2x}, the spectral ratio of the modular element.
QX = Scalar.s_power(-2)
