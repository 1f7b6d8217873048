"""Exact-coefficient polynomials over the rationals.

Coefficients are stored sparsely as ``{exponent: Fraction}`` with zeros
dropped, so two polynomials are equal iff their dictionaries are equal.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

__all__ = ["RationalPoly", "MultiPoly", "as_fraction"]


def as_fraction(v) -> Fraction:
    """Exact conversion; strings such as ``"3/7"`` are accepted."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        # floats are exact binary rationals; refuse to guess a decimal
        return Fraction(v)
    return Fraction(v)


class RationalPoly:
    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping[int, object] | Sequence[object] = ()):
        if isinstance(coeffs, Mapping):
            items = coeffs.items()
        else:
            items = enumerate(coeffs)
        c = {}
        for e, v in items:
            if e < 0:
                raise ValueError("exponents must be nonnegative")
            v = as_fraction(v)
            if v:
                c[int(e)] = c.get(int(e), Fraction(0)) + v
        self._c = {e: v for e, v in c.items() if v}

    @classmethod
    def x(cls) -> "RationalPoly":
        return cls({1: 1})

    @classmethod
    def constant(cls, v) -> "RationalPoly":
        return cls({0: v})

    @classmethod
    def from_roots(cls, roots: Iterable[object], lead=1) -> "RationalPoly":
        p = cls.constant(lead)
        for r in roots:
            p = p * cls({0: -as_fraction(r), 1: 1})
        return p

    @property
    def coeffs(self) -> dict[int, Fraction]:
        return dict(self._c)

    def coeff(self, e: int) -> Fraction:
        return self._c.get(e, Fraction(0))

    @property
    def degree(self) -> int:
        """Degree; ``-1`` for the zero polynomial."""
        return max(self._c) if self._c else -1

    def is_zero(self) -> bool:
        return not self._c

    def __eq__(self, other):
        if not isinstance(other, RationalPoly):
            other = RationalPoly.constant(other)
        return self._c == other._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __repr__(self):
        if not self._c:
            return "RationalPoly(0)"
        terms = " + ".join(f"({v})x^{e}" for e, v in sorted(self._c.items()))
        return f"RationalPoly({terms})"

    def _coerce(self, other) -> "RationalPoly":
        return other if isinstance(other, RationalPoly) else RationalPoly.constant(other)

    def __add__(self, other):
        other = self._coerce(other)
        c = dict(self._c)
        for e, v in other._c.items():
            c[e] = c.get(e, Fraction(0)) + v
        return RationalPoly(c)

    __radd__ = __add__

    def __neg__(self):
        return RationalPoly({e: -v for e, v in self._c.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        c: dict[int, Fraction] = {}
        for e1, v1 in self._c.items():
            for e2, v2 in other._c.items():
                c[e1 + e2] = c.get(e1 + e2, Fraction(0)) + v1 * v2
        return RationalPoly(c)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        out, base = RationalPoly.constant(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __call__(self, x):
        """Horner evaluation; exact when ``x`` is a Fraction or int."""
        if not self._c:
            return Fraction(0) if not isinstance(x, float) else 0.0
        acc = 0
        for e in range(self.degree, -1, -1):
            acc = acc * x + self.coeff(e)
        return acc

    def derivative(self) -> "RationalPoly":
        return RationalPoly({e - 1: e * v for e, v in self._c.items() if e})

    def theta(self) -> "RationalPoly":
        """``x f'(x)``; multiplies the coefficient of ``x^a`` by ``a``."""
        return RationalPoly({e: e * v for e, v in self._c.items()})

    def divmod_linear(self, x0) -> tuple["RationalPoly", Fraction]:
        """Synthetic division by ``(x - x0)``: returns quotient and remainder."""
        x0 = as_fraction(x0)
        d = self.degree
        if d < 1:
            return RationalPoly(), self.coeff(0)
        q = [Fraction(0)] * d
        acc = Fraction(0)
        for e in range(d, 0, -1):
            acc = acc * x0 + self.coeff(e)
            q[e - 1] = acc
        rem = acc * x0 + self.coeff(0)
        return RationalPoly(q), rem


class MultiPoly:
    """Polynomial in ``nvars`` variables, ``{exponent tuple: Fraction}``."""

    __slots__ = ("nvars", "_t")

    def __init__(self, nvars: int, terms: Mapping[tuple[int, ...], object] = None):
        if nvars < 1:
            raise ValueError("need at least one variable")
        self.nvars = nvars
        t = {}
        for exps, v in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars or min(exps) < 0:
                raise ValueError(f"bad exponent vector {exps} for {nvars} variables")
            v = as_fraction(v)
            if v:
                t[exps] = t.get(exps, Fraction(0)) + v
        self._t = {e: v for e, v in t.items() if v}

    @classmethod
    def one(cls, nvars: int) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: 1})

    @property
    def terms(self) -> dict[tuple[int, ...], Fraction]:
        return dict(self._t)

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self._t), default=-1)

    def __call__(self, xs: Sequence[object]):
        if len(xs) != self.nvars:
            raise ValueError(f"expected {self.nvars} arguments")
        total = Fraction(0)
        for exps, v in self._t.items():
            term = v
            for x, e in zip(xs, exps):
                if e:
                    term = term * x**e
            total += term
        return total

    def __repr__(self):
        return f"MultiPoly({self.nvars}, {self._t!r})"
