"""Extended-range complex scalars: value = mantissa * 2**exponent.

Radial powers like r_e**(3k) overflow native floats once k is a few
hundred, so every per-mode coefficient and energy is carried as a
complex mantissa with |mantissa| in [1, 2) plus an integer power-of-two
exponent.  Zero is represented as mantissa 0, exponent 0.
"""

from __future__ import annotations

import cmath
import math

__all__ = ["ScaledComplex"]

# Beyond this exponent gap the smaller addend cannot move any of the
# 53 mantissa bits of the larger one.
_ADD_CUTOFF = 128


def _split(z: complex, e: int) -> tuple[complex, int]:
    """Normalize so |mantissa| is in [1, 2), or (0, 0) for zero."""
    mag = abs(z)
    if mag == 0.0:
        return 0j, 0
    if math.isinf(mag) or math.isnan(mag):
        raise ValueError(f"non-finite mantissa {z!r}")
    _, ex = math.frexp(mag)  # mag = f * 2**ex with f in [0.5, 1)
    shift = 1 - ex
    return complex(math.ldexp(z.real, shift), math.ldexp(z.imag, shift)), e + ex - 1


class ScaledComplex:
    __slots__ = ("mantissa", "exponent")

    def __init__(self, value: complex | float | int = 0j, exponent: int = 0):
        if isinstance(value, ScaledComplex):
            m, e = value.mantissa, value.exponent + exponent
        else:
            m, e = _split(complex(value), exponent)
        object.__setattr__(self, "mantissa", m)
        object.__setattr__(self, "exponent", e)

    def __setattr__(self, name, value):
        raise AttributeError("ScaledComplex is immutable")

    # ---- constructors -------------------------------------------------

    @classmethod
    def from_pow(cls, base: float, n: int) -> "ScaledComplex":
        """base**n for real base > 0, by squaring with renormalization."""
        if base <= 0.0:
            raise ValueError("from_pow needs a positive base")
        result = cls(1.0)
        factor = cls(base)
        e = abs(n)
        while e:
            if e & 1:
                result = result * factor
            factor = factor * factor
            e >>= 1
        return result if n >= 0 else cls(1.0) / result

    # ---- conversions ---------------------------------------------------

    def to_complex(self) -> complex:
        """Native complex; overflows to inf and underflows to 0."""
        if self.mantissa == 0:
            return 0j
        if self.exponent > 1100:
            re, im = self.mantissa.real, self.mantissa.imag
            return complex(
                math.copysign(math.inf, re) if re else 0.0,
                math.copysign(math.inf, im) if im else 0.0,
            )
        if self.exponent < -1100:
            return 0j
        return complex(
            math.ldexp(self.mantissa.real, self.exponent),
            math.ldexp(self.mantissa.imag, self.exponent),
        )

    def to_float(self) -> float:
        return self.to_complex().real

    @property
    def real(self) -> "ScaledComplex":
        return ScaledComplex(self.mantissa.real, self.exponent)

    @property
    def imag(self) -> "ScaledComplex":
        return ScaledComplex(self.mantissa.imag, self.exponent)

    @property
    def is_zero(self) -> bool:
        return self.mantissa == 0

    def log2_abs(self) -> float:
        """log2 |value|; -inf for zero."""
        if self.mantissa == 0:
            return -math.inf
        return self.exponent + math.log2(abs(self.mantissa))

    def log_abs(self) -> float:
        return self.log2_abs() * math.log(2.0)

    def phase(self) -> float:
        return cmath.phase(self.mantissa)

    # ---- arithmetic ----------------------------------------------------

    @staticmethod
    def _coerce(other) -> "ScaledComplex":
        if isinstance(other, ScaledComplex):
            return other
        if isinstance(other, (int, float, complex)):
            return ScaledComplex(other)
        return NotImplemented

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ScaledComplex(self.mantissa * o.mantissa, self.exponent + o.exponent)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o.mantissa == 0:
            raise ZeroDivisionError("ScaledComplex division by zero")
        return ScaledComplex(self.mantissa / o.mantissa, self.exponent - o.exponent)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.mantissa == 0:
            return o
        if o.mantissa == 0:
            return self
        hi, lo = (self, o) if self.exponent >= o.exponent else (o, self)
        gap = hi.exponent - lo.exponent
        if gap > _ADD_CUTOFF:
            return hi
        shifted = complex(
            math.ldexp(lo.mantissa.real, -gap), math.ldexp(lo.mantissa.imag, -gap)
        )
        return ScaledComplex(hi.mantissa + shifted, hi.exponent)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __neg__(self):
        return ScaledComplex(-self.mantissa, self.exponent)

    def __abs__(self) -> "ScaledComplex":
        return ScaledComplex(abs(self.mantissa), self.exponent)

    def conjugate(self) -> "ScaledComplex":
        return ScaledComplex(self.mantissa.conjugate(), self.exponent)

    def abs2(self) -> "ScaledComplex":
        """|value|^2 as a real-valued ScaledComplex."""
        m = self.mantissa
        return ScaledComplex(m.real * m.real + m.imag * m.imag, 2 * self.exponent)

    # ---- comparisons (magnitude for complex, signed for real) ----------

    def _signed_key(self) -> tuple[int, float]:
        if self.mantissa.imag != 0:
            raise ValueError("ordering is defined for real-valued ScaledComplex only")
        m = self.mantissa.real
        if m == 0:
            return (0, 0.0)
        sign = 1 if m > 0 else -1
        return (sign, sign * (self.exponent + math.log2(abs(m))))

    def __lt__(self, other):
        o = self._coerce(other)
        return self._signed_key() < o._signed_key()

    def __le__(self, other):
        o = self._coerce(other)
        return self._signed_key() <= o._signed_key()

    def __gt__(self, other):
        o = self._coerce(other)
        return self._signed_key() > o._signed_key()

    def __ge__(self, other):
        o = self._coerce(other)
        return self._signed_key() >= o._signed_key()

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        if o is NotImplemented:
            return NotImplemented
        return self.mantissa == o.mantissa and (
            self.exponent == o.exponent or self.mantissa == 0
        )

    def __hash__(self):
        return hash((self.mantissa, self.exponent if self.mantissa else 0))

    def isclose(self, other, rel_tol: float = 1e-12) -> bool:
        o = self._coerce(other)
        diff = self - o
        if diff.is_zero:
            return True
        ref = max(self.log2_abs(), o.log2_abs())
        return diff.log2_abs() - ref <= math.log2(rel_tol)

    def __repr__(self):
        return f"ScaledComplex({self.mantissa!r}, 2**{self.exponent})"
