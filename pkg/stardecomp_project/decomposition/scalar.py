"""
Exact scalars of the ring {(a + b·i + (c + d·i)·√2) / 2^k}.

Every tensor entry of a Clifford+star diagram and every catalog coefficient
lives in this ring, so equality between diagrams can be decided exactly.
"""
from __future__ import annotations

import math

import numpy as np

SQRT2 = math.sqrt(2)

# e^{i p pi/4} for p = 0..7 as (a, b, c, d, k)
_OMEGA = (
    (1, 0, 0, 0, 0),
    (0, 0, 1, 1, 1),
    (0, 1, 0, 0, 0),
    (0, 0, -1, 1, 1),
    (-1, 0, 0, 0, 0),
    (0, 0, -1, -1, 1),
    (0, -1, 0, 0, 0),
    (0, 0, 1, -1, 1),
)


class ExactScalar:
    """
    Canonical element (a + b·i + (c + d·i)·√2) / 2^k.

    The canonical form has k = 0 or at least one odd component, and zero is
    always stored with k = 0, so structural equality is value equality.
    """

    __slots__ = ('a', 'b', 'c', 'd', 'k')

    def __init__(self, a=0, b=0, c=0, d=0, k=0):
        a, b, c, d, k = int(a), int(b), int(c), int(d), int(k)
        if k < 0:
            scale = 1 << -k
            a, b, c, d, k = a * scale, b * scale, c * scale, d * scale, 0
        if not (a or b or c or d):
            k = 0
        else:
            while k > 0 and not (a | b | c | d) & 1:
                a, b, c, d = a >> 1, b >> 1, c >> 1, d >> 1
                k -= 1
        self.a = a
        self.b = b
        self.c = c
        self.d = d
        self.k = k

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def one(cls):
        return cls(1)

    @classmethod
    def from_int(cls, value):
        return cls(value)

    @classmethod
    def i(cls):
        return cls(0, 1)

    @classmethod
    def from_tuple(cls, values):
        """Build from an (a, b, c, d, k) sequence."""
        if len(values) != 5:
            raise ValueError(f"Expected 5 components, got {len(values)}")
        return cls(*values)

    @classmethod
    def omega(cls, eighths):
        """Return e^{i·eighths·π/4}."""
        return cls(*_OMEGA[eighths % 8])

    @classmethod
    def sqrt2_power(cls, n):
        """Return √2^n for any integer n."""
        if n >= 0:
            if n % 2 == 0:
                return cls(1 << (n // 2))
            return cls(0, 0, 1 << (n // 2))
        base = cls.sqrt2_power(-n)
        return cls(base.a, base.b, base.c, base.d, -n)

    @classmethod
    def from_complex(cls, value, max_k=12, tol=1e-9, bound=256):
        """
        Snap a floating-point complex number onto the ring.

        Searches k = 0..max_k and returns the first representation whose real
        and imaginary parts are both within ``tol`` of a + c·√2 and b + d·√2
        (scaled by 2^k) with |c|, |d| <= bound. Returns None when nothing fits.
        """
        value = complex(value)
        for k in range(max_k + 1):
            scale = float(1 << k)
            real = _snap_real(value.real * scale, tol, bound)
            if real is None:
                continue
            imag = _snap_real(value.imag * scale, tol, bound)
            if imag is None:
                continue
            return cls(real[0], imag[0], real[1], imag[1], k)
        return None

    def to_tuple(self):
        return (self.a, self.b, self.c, self.d, self.k)

    @property
    def is_zero(self):
        return not (self.a or self.b or self.c or self.d)

    def __bool__(self):
        return not self.is_zero

    def conjugate(self):
        return ExactScalar(self.a, -self.b, self.c, -self.d, self.k)

    def abs_squared(self):
        """Return |z|² as an exact (real) scalar."""
        return self * self.conjugate()

    def halve(self, times=1):
        return ExactScalar(self.a, self.b, self.c, self.d, self.k + times)

    def __neg__(self):
        return ExactScalar(-self.a, -self.b, -self.c, -self.d, self.k)

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        k = max(self.k, other.k)
        s = 1 << (k - self.k)
        t = 1 << (k - other.k)
        return ExactScalar(
            self.a * s + other.a * t,
            self.b * s + other.b * t,
            self.c * s + other.c * t,
            self.d * s + other.d * t,
            k,
        )

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a1, b1, c1, d1 = self.a, self.b, self.c, self.d
        a2, b2, c2, d2 = other.a, other.b, other.c, other.d
        # (P1 + Q1√2)(P2 + Q2√2) = P1P2 + 2Q1Q2 + (P1Q2 + Q1P2)√2
        return ExactScalar(
            a1 * a2 - b1 * b2 + 2 * (c1 * c2 - d1 * d2),
            a1 * b2 + b1 * a2 + 2 * (c1 * d2 + d1 * c2),
            a1 * c2 - b1 * d2 + c1 * a2 - d1 * b2,
            a1 * d2 + b1 * c2 + c1 * b2 + d1 * a2,
            self.k + other.k,
        )

    __rmul__ = __mul__

    def __pow__(self, exponent):
        if not isinstance(exponent, int) or exponent < 0:
            return NotImplemented
        result = ExactScalar.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.to_tuple() == other.to_tuple()

    def __hash__(self):
        return hash(self.to_tuple())

    def __complex__(self):
        denominator = math.ldexp(1.0, self.k)
        return complex(
            (self.a + self.c * SQRT2) / denominator,
            (self.b + self.d * SQRT2) / denominator,
        )

    def __repr__(self):
        return f"ExactScalar({self.a}, {self.b}, {self.c}, {self.d}, {self.k})"

    def __str__(self):
        parts = []
        for value, unit in ((self.a, ''), (self.b, 'i'), (self.c, '√2'), (self.d, 'i√2')):
            if value:
                magnitude = abs(value)
                body = unit if magnitude == 1 and unit else f"{magnitude}{unit}"
                parts.append(('-' if value < 0 else '+', body))
        if not parts:
            return '0'
        text = ''.join(f" {sign} {body}" for sign, body in parts).strip()
        text = text[2:] if text.startswith('+ ') else '-' + text[2:]
        if self.k:
            return f"({text})/{1 << self.k}"
        return text


def _coerce(value):
    if isinstance(value, ExactScalar):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return ExactScalar(int(value))
    return NotImplemented


def _snap_real(x, tol, bound):
    """Find integers (a, c) with a + c·√2 ≈ x, preferring the smallest |c|."""
    cs = np.arange(-bound, bound + 1)
    cs = cs[np.lexsort((cs < 0, np.abs(cs)))]
    a = np.rint(x - cs * SQRT2)
    err = np.abs(a + cs * SQRT2 - x)
    hits = np.nonzero(err < tol)[0]
    if hits.size == 0:
        return None
    index = hits[0]
    return int(a[index]), int(cs[index])
