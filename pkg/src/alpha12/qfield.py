"""Exact arithmetic in the biquadratic field Q(sqrt2, sqrt3).

Elements are stored as ``a + b*sqrt2 + c*sqrt3 + d*sqrt6`` with rational
coefficients, so zero tests are exact.
"""
from __future__ import annotations

from fractions import Fraction
from math import sqrt
from typing import Iterable, Sequence

import numpy as np

_SQRT2 = sqrt(2.0)
_SQRT3 = sqrt(3.0)
_SQRT6 = sqrt(6.0)


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass a Fraction, int or string")
    return Fraction(x)


class Q23:
    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a=0, b=0, c=0, d=0) -> None:
        self.a = _frac(a)
        self.b = _frac(b)
        self.c = _frac(c)
        self.d = _frac(d)

    @classmethod
    def coerce(cls, x) -> "Q23":
        if isinstance(x, Q23):
            return x
        return cls(x)

    @classmethod
    def sqrt2(cls) -> "Q23":
        return cls(0, 1)

    @classmethod
    def sqrt3(cls) -> "Q23":
        return cls(0, 0, 1)

    @property
    def coeffs(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.a, self.b, self.c, self.d)

    def __repr__(self) -> str:
        return f"Q23({self.a}, {self.b}, {self.c}, {self.d})"

    def __str__(self) -> str:
        parts = []
        for coef, name in zip(self.coeffs, ("", "√2", "√3", "√6")):
            if coef:
                parts.append(f"{coef}{name}" if name else f"{coef}")
        return " + ".join(parts) if parts else "0"

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * _SQRT2 + float(self.c) * _SQRT3 + float(self.d) * _SQRT6

    def __bool__(self) -> bool:
        return bool(self.a or self.b or self.c or self.d)

    def __eq__(self, other) -> bool:
        try:
            o = Q23.coerce(other)
        except TypeError:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __neg__(self) -> "Q23":
        return Q23(-self.a, -self.b, -self.c, -self.d)

    def __add__(self, other) -> "Q23":
        o = Q23.coerce(other)
        return Q23(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    __radd__ = __add__

    def __sub__(self, other) -> "Q23":
        o = Q23.coerce(other)
        return Q23(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def __rsub__(self, other) -> "Q23":
        return Q23.coerce(other) - self

    def __mul__(self, other) -> "Q23":
        o = Q23.coerce(other)
        a1, b1, c1, d1 = self.coeffs
        a2, b2, c2, d2 = o.coeffs
        # sqrt2*sqrt3 = sqrt6, sqrt2*sqrt6 = 2sqrt3, sqrt3*sqrt6 = 3sqrt2
        return Q23(
            a1 * a2 + 2 * b1 * b2 + 3 * c1 * c2 + 6 * d1 * d2,
            a1 * b2 + b1 * a2 + 3 * (c1 * d2 + d1 * c2),
            a1 * c2 + c1 * a2 + 2 * (b1 * d2 + d1 * b2),
            a1 * d2 + d1 * a2 + b1 * c2 + c1 * b2,
        )

    __rmul__ = __mul__

    def conj2(self) -> "Q23":
        """Galois conjugate sqrt2 -> -sqrt2."""
        return Q23(self.a, -self.b, self.c, -self.d)

    def conj3(self) -> "Q23":
        """Galois conjugate sqrt3 -> -sqrt3."""
        return Q23(self.a, self.b, -self.c, -self.d)

    def inverse(self) -> "Q23":
        if not self:
            raise ZeroDivisionError("inverse of zero in Q(sqrt2, sqrt3)")
        # x * conj3(x) lies in Q(sqrt2); multiply again by its sqrt2-conjugate
        n1 = self * self.conj3()
        n2 = n1 * n1.conj2()
        return self.conj3() * n1.conj2() * Q23(1 / n2.a)

    def __truediv__(self, other) -> "Q23":
        return self * Q23.coerce(other).inverse()

    def __rtruediv__(self, other) -> "Q23":
        return Q23.coerce(other) * self.inverse()

    def is_rational(self) -> bool:
        return not (self.b or self.c or self.d)

    def sign(self) -> int:
        """Exact sign of the real number represented."""
        if not self:
            return 0
        # split as p + q*sqrt3 with p, q in Q(sqrt2)
        p = (self.a, self.b)
        q = (self.c, self.d)
        sp, sq = _sign_q2(*p), _sign_q2(*q)
        if sq == 0:
            return sp
        if sp == 0:
            return sq
        if sp == sq:
            return sp
        # p + q sqrt3 has sign of p iff p^2 > 3 q^2
        p2 = (p[0] * p[0] + 2 * p[1] * p[1], 2 * p[0] * p[1])
        q2 = (3 * (q[0] * q[0] + 2 * q[1] * q[1]), 3 * 2 * q[0] * q[1])
        diff = _sign_q2(p2[0] - q2[0], p2[1] - q2[1])
        return sp if diff > 0 else sq


def _sign_q2(a: Fraction, b: Fraction) -> int:
    """Sign of a + b*sqrt2."""
    if b == 0:
        return (a > 0) - (a < 0)
    if a == 0:
        return (b > 0) - (b < 0)
    if (a > 0) == (b > 0):
        return 1 if a > 0 else -1
    # opposite signs: compare a^2 with 2 b^2
    if a * a > 2 * b * b:
        return 1 if a > 0 else -1
    return 1 if b > 0 else -1


ZERO = Q23(0)
ONE = Q23(1)
HALF = Q23(Fraction(1, 2))


def qvec(values: Iterable) -> tuple[Q23, ...]:
    return tuple(Q23.coerce(v) for v in values)


def dot(u: Sequence[Q23], v: Sequence[Q23]) -> Q23:
    if len(u) != len(v):
        raise ValueError("dimension mismatch")
    acc = Q23(0)
    for x, y in zip(u, v):
        if x and y:
            acc = acc + x * y
    return acc


def to_float(v: Sequence[Q23]) -> np.ndarray:
    return np.array([float(x) for x in v])


def is_zero_vector(v: Sequence[Q23]) -> bool:
    return not any(v)


def nullspace(rows: Sequence[Sequence[Q23]], dim: int) -> list[tuple[Q23, ...]]:
    """Exact basis of {x : r.x = 0 for every row r} by Gauss-Jordan elimination."""
    m = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for col in range(dim):
        piv = next((i for i in range(r, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][col].inverse()
        m[r] = [x * inv if x else x for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col]:
                f = m[i][col]
                m[i] = [x - f * y if y else x for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    free = [c for c in range(dim) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Q23(0)] * dim
        vec[fc] = Q23(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -m[i][fc]
        basis.append(tuple(vec))
    return basis


def rank(rows: Sequence[Sequence[Q23]], dim: int) -> int:
    return dim - len(nullspace(rows, dim))


def regular_matrix(x: Q23) -> np.ndarray:
    """4x4 rational matrix of multiplication by ``x`` on the basis (1, √2, √3, √6)."""
    cols = [x * e for e in (Q23(1), Q23(0, 1), Q23(0, 0, 1), Q23(0, 0, 0, 1))]
    return np.array([[col.coeffs[i] for col in cols] for i in range(4)], dtype=object)
