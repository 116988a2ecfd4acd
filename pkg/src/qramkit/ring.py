"""Exact arithmetic in the dyadic cyclotomic ring Z[w][1/2], w = exp(i*pi/4).

Every entry of H, T and CNOT lives in this ring, so amplitudes produced by
those gates can be tracked with no rounding at all.  Probabilities are
elements of the real field Q(sqrt 2), represented by :class:`RealQ2`.
"""
from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import total_ordering

_SQRT2 = math.sqrt(2.0)
_OMEGA = cmath.exp(1j * math.pi / 4)


class Dyadic:
    """A rational number ``numerator / 2**exponent`` kept in canonical form."""

    __slots__ = ("numerator", "exponent")

    def __init__(self, numerator: int, exponent: int = 0) -> None:
        if exponent < 0:
            numerator <<= -exponent
            exponent = 0
        if numerator == 0:
            exponent = 0
        else:
            while exponent > 0 and numerator % 2 == 0:
                numerator //= 2
                exponent -= 1
        self.numerator = numerator
        self.exponent = exponent

    @classmethod
    def from_fraction(cls, value: Fraction | int) -> Dyadic:
        value = Fraction(value)
        den = value.denominator
        if den & (den - 1):
            raise ValueError(f"{value} is not dyadic")
        return cls(value.numerator, den.bit_length() - 1)

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.exponent)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = Dyadic(other)
        if not isinstance(other, Dyadic):
            return NotImplemented
        return self.numerator == other.numerator and self.exponent == other.exponent

    def __hash__(self) -> int:
        return hash((self.numerator, self.exponent))

    def __float__(self) -> float:
        return self.numerator / (1 << self.exponent)

    def __repr__(self) -> str:
        if self.exponent == 0:
            return f"Dyadic({self.numerator})"
        return f"Dyadic({self.numerator}, {self.exponent})"

    def __str__(self) -> str:
        return str(self.to_fraction())


def _reduce(a0: int, a1: int, a2: int, a3: int, k: int) -> tuple[int, int, int, int, int]:
    if a0 == 0 and a1 == 0 and a2 == 0 and a3 == 0:
        return 0, 0, 0, 0, 0
    while k > 0 and not ((a0 | a1 | a2 | a3) & 1):
        a0 >>= 1
        a1 >>= 1
        a2 >>= 1
        a3 >>= 1
        k -= 1
    return a0, a1, a2, a3, k


class ExactAmplitude:
    """Element ``(a0 + a1 w + a2 w^2 + a3 w^3) / 2**k`` of Z[w][1/2].

    Stored with a shared power-of-two denominator; the per-coefficient
    :class:`Dyadic` view is exposed through ``c0`` .. ``c3``.
    """

    __slots__ = ("_a", "_k")

    def __init__(self, a0: int = 0, a1: int = 0, a2: int = 0, a3: int = 0, k: int = 0) -> None:
        if k < 0:
            s = -k
            a0, a1, a2, a3, k = a0 << s, a1 << s, a2 << s, a3 << s, 0
        r = _reduce(a0, a1, a2, a3, k)
        self._a = r[:4]
        self._k = r[4]

    @classmethod
    def from_dyadics(cls, c0: Dyadic, c1: Dyadic, c2: Dyadic, c3: Dyadic) -> ExactAmplitude:
        k = max(c.exponent for c in (c0, c1, c2, c3))
        return cls(*(c.numerator << (k - c.exponent) for c in (c0, c1, c2, c3)), k=k)

    @classmethod
    def from_int(cls, n: int) -> ExactAmplitude:
        return cls(n)

    @property
    def coeffs(self) -> tuple[int, int, int, int]:
        return self._a

    @property
    def k(self) -> int:
        return self._k

    @property
    def c0(self) -> Dyadic:
        return Dyadic(self._a[0], self._k)

    @property
    def c1(self) -> Dyadic:
        return Dyadic(self._a[1], self._k)

    @property
    def c2(self) -> Dyadic:
        return Dyadic(self._a[2], self._k)

    @property
    def c3(self) -> Dyadic:
        return Dyadic(self._a[3], self._k)

    def is_zero(self) -> bool:
        return self._a == (0, 0, 0, 0)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def _aligned(self, other: ExactAmplitude) -> tuple[tuple[int, ...], tuple[int, ...], int]:
        k = max(self._k, other._k)
        sa, sb = k - self._k, k - other._k
        return tuple(x << sa for x in self._a), tuple(x << sb for x in other._a), k

    def __add__(self, other: ExactAmplitude | int) -> ExactAmplitude:
        if isinstance(other, int):
            other = ExactAmplitude(other)
        a, b, k = self._aligned(other)
        return ExactAmplitude(a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3], k)

    __radd__ = __add__

    def __neg__(self) -> ExactAmplitude:
        a = self._a
        return ExactAmplitude(-a[0], -a[1], -a[2], -a[3], self._k)

    def __sub__(self, other: ExactAmplitude | int) -> ExactAmplitude:
        if isinstance(other, int):
            other = ExactAmplitude(other)
        return self + (-other)

    def __rsub__(self, other: int) -> ExactAmplitude:
        return ExactAmplitude(other) - self

    def __mul__(self, other: ExactAmplitude | int) -> ExactAmplitude:
        if isinstance(other, int):
            a = self._a
            return ExactAmplitude(a[0] * other, a[1] * other, a[2] * other, a[3] * other, self._k)
        x0, x1, x2, x3 = self._a
        y0, y1, y2, y3 = other._a
        # w^4 = -1 folds the degree 4..6 terms back with a sign flip
        c0 = x0 * y0 - x1 * y3 - x2 * y2 - x3 * y1
        c1 = x0 * y1 + x1 * y0 - x2 * y3 - x3 * y2
        c2 = x0 * y2 + x1 * y1 + x2 * y0 - x3 * y3
        c3 = x0 * y3 + x1 * y2 + x2 * y1 + x3 * y0
        return ExactAmplitude(c0, c1, c2, c3, self._k + other._k)

    __rmul__ = __mul__

    def mul_omega(self, power: int = 1) -> ExactAmplitude:
        a0, a1, a2, a3 = self._a
        for _ in range(power % 8):
            a0, a1, a2, a3 = -a3, a0, a1, a2
        return ExactAmplitude(a0, a1, a2, a3, self._k)

    def conj(self) -> ExactAmplitude:
        a0, a1, a2, a3 = self._a
        return ExactAmplitude(a0, -a3, -a2, -a1, self._k)

    def norm_sq(self) -> RealQ2:
        """``|a|^2`` as an element ``p + q sqrt2`` of the real subring."""
        prod = self * self.conj()
        b0, b1, b2, b3 = prod._a
        if b2 != 0 or b1 != -b3:
            raise ArithmeticError(f"|{self!r}|^2 has a nonzero imaginary part")
        den = 1 << prod._k
        return RealQ2(Fraction(b0, den), Fraction(b1, den))

    def real_part(self) -> RealQ2:
        # Re(w) = Re(-w^3) = sqrt2/2, Re(w^2) = 0
        a0, a1, _, a3 = self._a
        den = 1 << self._k
        return RealQ2(Fraction(a0, den), Fraction(a1 - a3, 2 * den))

    def imag_part(self) -> RealQ2:
        _, a1, a2, a3 = self._a
        den = 1 << self._k
        return RealQ2(Fraction(a2, den), Fraction(a1 + a3, 2 * den))

    def __complex__(self) -> complex:
        a0, a1, a2, a3 = self._a
        v = a0 + a1 * _OMEGA + a2 * 1j + a3 * _OMEGA**3
        return v * math.ldexp(1.0, -self._k)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = ExactAmplitude(other)
        if not isinstance(other, ExactAmplitude):
            return NotImplemented
        return self._a == other._a and self._k == other._k

    def __hash__(self) -> int:
        return hash((self._a, self._k))

    def __repr__(self) -> str:
        return f"ExactAmplitude{self._a + (self._k,)}"

    def __str__(self) -> str:
        names = ("", "w", "w^2", "w^3")
        parts = [f"{c}{('*' + n) if n else ''}" for c, n in zip(self._a, names) if c]
        body = " + ".join(parts) if parts else "0"
        return body if self._k == 0 else f"({body})/2^{self._k}"


ZERO = ExactAmplitude()
ONE = ExactAmplitude(1)
OMEGA = ExactAmplitude(0, 1)
SQRT2 = ExactAmplitude(0, 1, 0, -1)
INV_SQRT2 = ExactAmplitude(0, 1, 0, -1, 1)
HALF = ExactAmplitude(1, k=1)


@total_ordering
class RealQ2:
    """Element ``a + b sqrt2`` of the field Q(sqrt 2) with rational a, b."""

    __slots__ = ("a", "b")

    def __init__(self, a: Fraction | int = 0, b: Fraction | int = 0) -> None:
        self.a = Fraction(a)
        self.b = Fraction(b)

    def __add__(self, other: RealQ2 | int | Fraction) -> RealQ2:
        if not isinstance(other, RealQ2):
            other = RealQ2(other)
        return RealQ2(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self) -> RealQ2:
        return RealQ2(-self.a, -self.b)

    def __sub__(self, other: RealQ2 | int | Fraction) -> RealQ2:
        if not isinstance(other, RealQ2):
            other = RealQ2(other)
        return RealQ2(self.a - other.a, self.b - other.b)

    def __rsub__(self, other: int | Fraction) -> RealQ2:
        return RealQ2(other) - self

    def __mul__(self, other: RealQ2 | int | Fraction) -> RealQ2:
        if not isinstance(other, RealQ2):
            other = RealQ2(other)
        return RealQ2(self.a * other.a + 2 * self.b * other.b, self.a * other.b + self.b * other.a)

    __rmul__ = __mul__

    def __truediv__(self, other: RealQ2 | int | Fraction) -> RealQ2:
        if not isinstance(other, RealQ2):
            other = RealQ2(other)
        den = other.a * other.a - 2 * other.b * other.b
        if den == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt2)")
        num = self * RealQ2(other.a, -other.b)
        return RealQ2(num.a / den, num.b / den)

    def sign(self) -> int:
        """Exact sign of ``a + b sqrt2``."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sa == 0 or sb == 0 or sa == sb:
            return sa if sa != 0 else sb
        # opposite signs: compare a^2 with 2 b^2
        diff = self.a * self.a - 2 * self.b * self.b
        return sa if diff > 0 else (-sa if diff < 0 else 0)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_dyadic(self) -> bool:
        return all(x.denominator & (x.denominator - 1) == 0 for x in (self.a, self.b))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RealQ2(other)
        if not isinstance(other, RealQ2):
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __lt__(self, other: RealQ2 | int | Fraction) -> bool:
        return (self - other).sign() < 0

    def __hash__(self) -> int:
        return hash((self.a, self.b))

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * _SQRT2

    def __abs__(self) -> RealQ2:
        return -self if self.sign() < 0 else self

    def __repr__(self) -> str:
        return f"RealQ2({self.a}, {self.b})"

    def __str__(self) -> str:
        return format_real(self)


def format_real(x: RealQ2) -> str:
    """Render as ``p + q*sqrt(2)`` over a common denominator, e.g. ``(2 + 1*sqrt(2))/4``."""
    if x.b == 0:
        return str(x.a)
    den = x.a.denominator * x.b.denominator // math.gcd(x.a.denominator, x.b.denominator)
    p = x.a.numerator * (den // x.a.denominator)
    q = x.b.numerator * (den // x.b.denominator)
    body = f"{abs(q)}*sqrt(2)"
    if q < 0:
        body = f"-{body}" if p == 0 else body
    if p != 0:
        body = f"{p} {'-' if q < 0 else '+'} {body}"
    if den == 1:
        return body
    return f"({body})/{den}"


def parse_real(text: str) -> RealQ2:
    """Inverse of :func:`format_real`."""
    s = text.strip().replace(" ", "")
    den = 1
    if s.startswith("(") and ")/" in s:
        body, den_s = s[1:].split(")/")
        den = int(den_s)
    elif "sqrt" not in s:
        return RealQ2(Fraction(s))
    else:
        body = s
    p, q = 0, 0
    tokens = body.replace("-", "+-").split("+")
    for tok in tokens:
        if not tok:
            continue
        if tok.endswith("*sqrt(2)"):
            q += int(tok[: -len("*sqrt(2)")])
        else:
            p += int(tok)
    return RealQ2(Fraction(p, den), Fraction(q, den))


def amp_mul(a: ExactAmplitude, b: ExactAmplitude) -> ExactAmplitude:
    return a * b


def amp_norm_sq(a: ExactAmplitude) -> RealQ2:
    return a.norm_sq()


def parse_amplitude(token: str) -> ExactAmplitude | complex:
    """Parse ``1``, ``-1``, ``1/sqrt2``, ``-1/sqrt2``, ``w``, ``0`` or a float literal."""
    t = token.strip()
    table = {
        "1": ONE,
        "-1": -ONE,
        "0": ZERO,
        "1/sqrt2": INV_SQRT2,
        "-1/sqrt2": -INV_SQRT2,
        "w": OMEGA,
        "-w": -OMEGA,
        "i": OMEGA.mul_omega(),
        "-i": -OMEGA.mul_omega(),
    }
    if t in table:
        return table[t]
    return complex(t.replace("i", "j"))


def format_amplitude(a: ExactAmplitude | complex) -> str:
    if isinstance(a, ExactAmplitude):
        for name in ("1", "-1", "1/sqrt2", "-1/sqrt2", "w", "-w", "i", "-i", "0"):
            if parse_amplitude(name) == a:
                return name
        return repr(complex(a))
    return repr(complex(a)).strip("()")
