"""Reduced rational functions and the symbolic operations built on them."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Mapping

from .polynomial import Polynomial, poly_gcd
from .variables import Variable, index_of

__all__ = [
    "RationalFunction",
    "PoleCollapseError",
    "EvaluationPoleError",
    "SINGULAR_FLOOR",
    "substitute",
    "partial_derivative",
    "equals",
    "evaluate",
    "as_rf",
]

# |denominator| at or below this value is treated as a pole by ``evaluate``.
SINGULAR_FLOOR = 1e-300


class PoleCollapseError(ZeroDivisionError):
    """A substitution made a denominator identically zero."""


class EvaluationPoleError(ZeroDivisionError):
    """Floating evaluation hit a (numerically) vanishing denominator."""

    def __init__(self, value):
        super().__init__(f"denominator evaluates to {value!r}")
        self.value = value


class RationalFunction:
    """``numerator / denominator`` in lowest terms.

    The denominator is integral, primitive and has a positive leading
    coefficient in the graded lex order; the zero function is ``0/1``.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None, *, reduced: bool = False):
        num = Polynomial.coerce(num)
        den = Polynomial.constant(1) if den is None else Polynomial.coerce(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if not reduced:
            num, den = _reduce(num, den)
        self.num = num
        self.den = den
        self._hash = None

    # construction helpers
    @classmethod
    def coerce(cls, value) -> "RationalFunction":
        if isinstance(value, RationalFunction):
            return value
        if isinstance(value, Polynomial):
            return cls(value, reduced=False) if not value.is_zero() else cls._zero()
        if isinstance(value, Variable):
            return cls(Polynomial.variable(value), Polynomial.constant(1), reduced=True)
        if isinstance(value, (int, Fraction, Rational)):
            return cls(Polynomial.constant(value), Polynomial.constant(1), reduced=True)
        raise TypeError(f"cannot coerce {value!r} to a rational function")

    @classmethod
    def _zero(cls):
        return cls(Polynomial(), Polynomial.constant(1), reduced=True)

    # queries
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def as_polynomial(self) -> Polynomial:
        if not self.den.is_one():
            raise ValueError(f"{self} is not a polynomial")
        return self.num

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_one()

    def variables(self) -> tuple[Variable, ...]:
        idx = self.num.var_indices() | self.den.var_indices()
        return tuple(sorted((Variable(_name(i)) for i in idx), key=lambda v: v.index))

    def check_invariants(self) -> bool:
        if self.den.is_zero():
            return False
        if not poly_gcd(self.num, self.den).is_one():
            return False
        c, _ = self.den.primitive()
        return c == 1 and (not self.num.is_zero() or self.den.is_one())

    # arithmetic
    def __add__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        if o.num.is_zero():
            return self
        if self.num.is_zero():
            return o
        if self.den == o.den:
            return RationalFunction(self.num + o.num, self.den)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, reduced=True)

    def __sub__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        if self.num.is_zero() or o.num.is_zero():
            return RationalFunction._zero()
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        if o.num.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise ValueError("integer exponents only")
        if n < 0:
            return RationalFunction(1) / self ** (-n)
        return RationalFunction(self.num ** n, self.den ** n, reduced=True)

    def __eq__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    # symbolic operations
    def subs(self, bindings: Mapping) -> "RationalFunction":
        return substitute(self, bindings)

    def diff(self, v) -> "RationalFunction":
        return partial_derivative(self, v)

    def evaluate(self, point: Mapping, floor: float = SINGULAR_FLOOR):
        return evaluate(self, point, floor)

    def compile(self, order: Iterable) -> Callable:
        order = tuple(order)
        fn_num = self.num.compile(order)
        if self.den.is_one():
            return fn_num
        fn_den = self.den.compile(order)
        return lambda *a: fn_num(*a) / fn_den(*a)

    def __str__(self) -> str:
        if self.den.is_one():
            return str(self.num)
        num = str(self.num) if self.num.is_monomial() else f"({self.num})"
        den = str(self.den)
        if not (self.den.is_monomial() and len(next(iter(self.den.terms))) == 1):
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self) -> str:
        return f"RationalFunction('{self}')"


def _name(i: int) -> str:
    from .variables import name_of

    return name_of(i)


def _coerce_or_none(value):
    try:
        return RationalFunction.coerce(value)
    except TypeError:
        return None


def as_rf(value) -> RationalFunction:
    return RationalFunction.coerce(value)


def _reduce(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    if num.is_zero():
        return num, Polynomial.constant(1)
    if not den.is_constant():
        g = poly_gcd(num, den)
        if not g.is_one():
            num = num.exact_div(g)
            den = den.exact_div(g)
    c, den = den.primitive()
    if c != 1:
        num = num * (1 / c)
    return num, den


# ------------------------------------------------------------- operations


def substitute(f, bindings: Mapping) -> RationalFunction:
    """Exact simultaneous substitution ``f(v := bindings[v])``.

    Numerator and denominator are brought over the common denominator
    ``prod_v d_v**E_v`` (``E_v`` = the larger degree of ``v``), so only one
    reduction happens at the end.
    """
    f = as_rf(f)
    b: dict[int, RationalFunction] = {}
    for k, val in bindings.items():
        i = k.index if isinstance(k, Variable) else index_of(k)
        b[i] = as_rf(val)
    if not b:
        return f
    for i, val in b.items():
        if val.den.is_zero():
            raise PoleCollapseError(f"binding for {_name(i)} has a zero denominator")
    present = (f.num.var_indices() | f.den.var_indices()) & set(b)
    if not present:
        return f
    top = {i: max(f.num.degree(i), f.den.degree(i)) for i in present}
    cache: dict = {}

    def factor(i: int, e: int) -> Polynomial:
        key = (i, e)
        got = cache.get(key)
        if got is None:
            rf = b[i]
            got = rf.num ** e
            if not rf.den.is_one() and top[i] - e:
                got = got * rf.den ** (top[i] - e)
            cache[key] = got
        return got

    def lift(p: Polynomial) -> Polynomial:
        out = Polynomial()
        for m, c in p.terms.items():
            keep = tuple((i, e) for i, e in m if i not in present)
            term = Polynomial({keep: c})
            seen = set()
            for i, e in m:
                if i in present:
                    term = term * factor(i, e)
                    seen.add(i)
            for i in present - seen:
                term = term * factor(i, 0)
            out = out + term
        return out

    num = lift(f.num)
    den = lift(f.den)
    if den.is_zero():
        raise PoleCollapseError(f"substitution collapses the denominator of {f}")
    return RationalFunction(num, den)


def partial_derivative(f, v) -> RationalFunction:
    f = as_rf(f)
    dn = f.num.diff(v)
    if f.den.is_constant():
        return RationalFunction(dn, f.den)
    dd = f.den.diff(v)
    if dd.is_zero():
        return RationalFunction(dn, f.den)
    return RationalFunction(dn * f.den - f.num * dd, f.den * f.den)


def equals(a, b) -> bool:
    """Symbolic identity: ``a - b`` reduces to zero."""
    return (as_rf(a) - as_rf(b)).is_zero()


def evaluate(f, point: Mapping, floor: float = SINGULAR_FLOOR):
    """Floating evaluation; raises :class:`EvaluationPoleError` at poles."""
    f = as_rf(f)
    order = []
    values = []
    for k, val in point.items():
        order.append(k.index if isinstance(k, Variable) else index_of(k))
        values.append(val)
    num = f.num.compile(order)(*values)
    if f.den.is_one():
        return num
    den = f.den.compile(order)(*values)
    if abs(den) <= floor:
        raise EvaluationPoleError(den)
    return num / den
