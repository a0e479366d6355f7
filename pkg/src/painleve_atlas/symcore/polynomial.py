"""Sparse multivariate polynomials over the rationals.

A monomial is a tuple of ``(variable_index, exponent)`` pairs sorted by
variable index, with positive exponents only.  The empty tuple is the unit
monomial.  Polynomials map monomials to nonzero :class:`~fractions.Fraction`
coefficients and are immutable once built.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Mapping, Union

from .variables import Variable, index_of, name_of

__all__ = [
    "Polynomial",
    "NotDivisibleError",
    "poly_gcd",
    "mono_key",
]

Mono = tuple  # tuple[tuple[int, int], ...]
Coeff = Union[int, Fraction]


class NotDivisibleError(ArithmeticError):
    """Exact division was requested but the divisor does not divide."""


# ---------------------------------------------------------------- monomials


def mono_mul(a: Mono, b: Mono) -> Mono:
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        ai, ae = a[i]
        bi, be = b[j]
        if ai == bi:
            out.append((ai, ae + be))
            i += 1
            j += 1
        elif ai < bi:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def mono_div(a: Mono, b: Mono):
    """``a / b`` as a monomial, or ``None`` when ``b`` does not divide ``a``."""
    if not b:
        return a
    d = dict(a)
    for i, e in b:
        have = d.get(i, 0)
        if have < e:
            return None
        if have == e:
            del d[i]
        else:
            d[i] = have - e
    return tuple(sorted(d.items()))


def mono_gcd(a: Mono, b: Mono) -> Mono:
    db = dict(b)
    return tuple((i, min(e, db[i])) for i, e in a if i in db)


def mono_deg(m: Mono) -> int:
    return sum(e for _, e in m)


def mono_key(m: Mono):
    """Sort key of the graded lexicographic order (larger key = leading)."""
    return (mono_deg(m), tuple((-i, e) for i, e in m))


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    raise TypeError(f"non-rational coefficient {c!r}")


def _index(v) -> int:
    if isinstance(v, Variable):
        return v.index
    if isinstance(v, str):
        return index_of(v)
    if isinstance(v, int):
        return v
    raise TypeError(f"not a variable: {v!r}")


# --------------------------------------------------------------- polynomial


class Polynomial:
    """Immutable sparse polynomial with rational coefficients."""

    __slots__ = ("_terms", "_hash", "_compiled")

    def __init__(self, terms: Mapping[Mono, Coeff] | None = None):
        clean: dict[Mono, Fraction] = {}
        if terms:
            for m, c in terms.items():
                if c:
                    clean[m] = _as_fraction(c)
        self._terms = clean
        self._hash = None
        self._compiled = None

    @classmethod
    def _raw(cls, terms: dict) -> "Polynomial":
        # caller guarantees no zero coefficients and Fraction values
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        p._compiled = None
        return p

    # constructors
    @classmethod
    def constant(cls, c: Coeff) -> "Polynomial":
        return cls({(): c})

    @classmethod
    def variable(cls, v) -> "Polynomial":
        return cls._raw({((_index(v), 1),): Fraction(1)})

    @classmethod
    def monomial(cls, exps: Mapping, c: Coeff = 1) -> "Polynomial":
        m = tuple(sorted((_index(v), e) for v, e in exps.items() if e))
        return cls({m: c})

    @classmethod
    def coerce(cls, value) -> "Polynomial":
        if isinstance(value, Polynomial):
            return value
        if isinstance(value, Variable):
            return cls.variable(value)
        return cls.constant(value)

    # basic queries
    @property
    def terms(self) -> Mapping[Mono, Fraction]:
        return self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and () in self._terms)

    def is_one(self) -> bool:
        return len(self._terms) == 1 and self._terms.get(()) == 1

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def constant_term(self) -> Fraction:
        return self._terms.get((), Fraction(0))

    def var_indices(self) -> set[int]:
        return {i for m in self._terms for i, _ in m}

    def variables(self) -> tuple[Variable, ...]:
        return tuple(Variable(name_of(i)) for i in sorted(self.var_indices()))

    def degree(self, v) -> int:
        """Degree in ``v``; ``-1`` for the zero polynomial."""
        if not self._terms:
            return -1
        i = _index(v)
        return max((e for m in self._terms for j, e in m if j == i), default=0)

    def total_degree(self) -> int:
        if not self._terms:
            return -1
        return max(mono_deg(m) for m in self._terms)

    def sorted_terms(self) -> list[tuple[Mono, Fraction]]:
        return sorted(self._terms.items(), key=lambda mc: mono_key(mc[0]), reverse=True)

    def leading_term(self) -> tuple[Mono, Fraction]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        m = max(self._terms, key=mono_key)
        return m, self._terms[m]

    def leading_coefficient(self) -> Fraction:
        return self.leading_term()[1]

    # arithmetic
    def __add__(self, other):
        if not isinstance(other, Polynomial):
            try:
                other = Polynomial.coerce(other)
            except TypeError:
                return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s = s + c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Polynomial._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            try:
                other = Polynomial.coerce(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            if isinstance(other, (int, Fraction, Rational)):
                c = _as_fraction(other)
                if not c:
                    return Polynomial._raw({})
                return Polynomial._raw({m: a * c for m, a in self._terms.items()})
            try:
                other = Polynomial.coerce(other)
            except TypeError:
                return NotImplemented
        if not self._terms or not other._terms:
            return Polynomial._raw({})
        out: dict = {}
        for ma, ca in self._terms.items():
            for mb, cb in other._terms.items():
                m = mono_mul(ma, mb)
                s = out.get(m)
                out[m] = ca * cb if s is None else s + ca * cb
        return Polynomial._raw({m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial exponent must be a non-negative integer")
        result = Polynomial.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, c: Coeff) -> "Polynomial":
        return self * _as_fraction(c)

    def mul_mono(self, m: Mono, c: Coeff = 1) -> "Polynomial":
        c = _as_fraction(c)
        return Polynomial._raw({mono_mul(k, m): a * c for k, a in self._terms.items()})

    # comparison
    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == ({(): Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    # structure w.r.t. one variable
    def coefficients_in(self, v) -> dict[int, "Polynomial"]:
        """Write ``self = sum_k c_k * v^k``; returns ``{k: c_k}``."""
        i = _index(v)
        groups: dict[int, dict] = {}
        for m, c in self._terms.items():
            e = 0
            rest = m
            for pos, (j, ej) in enumerate(m):
                if j == i:
                    e = ej
                    rest = m[:pos] + m[pos + 1 :]
                    break
            groups.setdefault(e, {})[rest] = c
        return {e: Polynomial._raw(t) for e, t in groups.items()}

    @classmethod
    def from_coefficients(cls, v, coeffs: Mapping[int, "Polynomial"]) -> "Polynomial":
        i = _index(v)
        out = Polynomial._raw({})
        for e, c in coeffs.items():
            out = out + (c.mul_mono(((i, e),)) if e else c)
        return out

    def diff(self, v) -> "Polynomial":
        i = _index(v)
        out: dict = {}
        for m, c in self._terms.items():
            for pos, (j, e) in enumerate(m):
                if j == i:
                    nm = m[:pos] + ((i, e - 1),) + m[pos + 1 :] if e > 1 else m[:pos] + m[pos + 1 :]
                    out[nm] = out.get(nm, 0) + c * e
                    break
        return Polynomial({m: c for m, c in out.items() if c})

    def subs(self, bindings: Mapping) -> "Polynomial":
        """Simultaneous substitution of polynomial values for variables."""
        b = {_index(k): Polynomial.coerce(val) for k, val in bindings.items()}
        if not b:
            return self
        powers: dict[tuple[int, int], Polynomial] = {}

        def pw(i: int, e: int) -> Polynomial:
            key = (i, e)
            if key not in powers:
                powers[key] = b[i] if e == 1 else pw(i, e - 1) * b[i]
            return powers[key]

        out = Polynomial._raw({})
        for m, c in self._terms.items():
            keep = tuple((i, e) for i, e in m if i not in b)
            term = Polynomial._raw({keep: c})
            for i, e in m:
                if i in b:
                    term = term * pw(i, e)
            out = out + term
        return out

    # rational content
    def content(self) -> Fraction:
        """Positive rational gcd of the coefficients (0 for the zero polynomial)."""
        if not self._terms:
            return Fraction(0)
        nums = 0
        dens = 1
        for c in self._terms.values():
            nums = math.gcd(nums, c.numerator)
            dens = math.lcm(dens, c.denominator)
        return Fraction(nums, dens)

    def primitive(self) -> tuple[Fraction, "Polynomial"]:
        """``self = c * p`` with ``p`` integral, content 1, positive leading coefficient."""
        if not self._terms:
            return Fraction(0), self
        c = self.content()
        if self.leading_coefficient() < 0:
            c = -c
        if c == 1:
            return c, self
        inv = 1 / c
        return c, Polynomial._raw({m: a * inv for m, a in self._terms.items()})

    def mono_content(self) -> Mono:
        it = iter(self._terms)
        g = next(it)
        for m in it:
            if not g:
                break
            g = mono_gcd(g, m)
        return g

    # division
    def divmod(self, divisor: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        """Multivariate division by one divisor in the graded lex order.

        The remainder has no term divisible by the divisor's leading term, so
        it is zero exactly when the division is exact.
        """
        if not divisor._terms:
            raise ZeroDivisionError("division by the zero polynomial")
        lm, lc = divisor.leading_term()
        q: dict = {}
        rem: dict = {}
        work = dict(self._terms)
        while work:
            m = max(work, key=mono_key)
            c = work[m]
            qm = mono_div(m, lm)
            if qm is None:
                rem[m] = c
                del work[m]
                continue
            qc = c / lc
            q[qm] = q.get(qm, 0) + qc
            for dm, dc in divisor._terms.items():
                k = mono_mul(qm, dm)
                val = work.get(k, 0) - qc * dc
                if val:
                    work[k] = val
                else:
                    work.pop(k, None)
        return Polynomial({m: c for m, c in q.items() if c}), Polynomial._raw(rem)

    def exact_div(self, divisor: "Polynomial") -> "Polynomial":
        if divisor.is_monomial():
            (dm, dc), = divisor._terms.items()
            out = {}
            for m, c in self._terms.items():
                k = mono_div(m, dm)
                if k is None:
                    raise NotDivisibleError(f"{divisor} does not divide {self}")
                out[k] = c / dc
            return Polynomial._raw(out)
        q, r = self.divmod(divisor)
        if r:
            raise NotDivisibleError(f"{divisor} does not divide {self}")
        return q

    # evaluation
    def compile(self, order: Iterable) -> Callable:
        """Return a float/complex evaluator ``f(*values)`` over ``order``.

        The generated code is a nested Horner scheme, one variable at a time.
        """
        idx = tuple(_index(v) for v in order)
        if self._compiled is None:
            self._compiled = {}
        fn = self._compiled.get(idx)
        if fn is None:
            missing = self.var_indices() - set(idx)
            if missing:
                names = ", ".join(name_of(i) for i in sorted(missing))
                raise KeyError(f"unbound variables: {names}")
            names = {i: f"a{k}" for k, i in enumerate(idx)}
            used = [i for i in idx if i in self.var_indices()]
            src = _horner_src(self._terms, used, names)
            fn = eval(f"lambda {', '.join(names[i] for i in idx) or '*_'}: {src}")
            self._compiled[idx] = fn
        return fn

    # printing
    def __str__(self) -> str:
        return format_polynomial(self)

    def __repr__(self) -> str:
        return f"Polynomial('{self}')"


def _horner_src(terms: Mapping[Mono, Fraction], order: list[int], names: dict) -> str:
    if not terms:
        return "0.0"
    if not order:
        return repr(float(terms.get((), 0)))
    i = order[0]
    groups: dict[int, dict] = {}
    for m, c in terms.items():
        e = 0
        rest = m
        for pos, (j, ej) in enumerate(m):
            if j == i:
                e = ej
                rest = m[:pos] + m[pos + 1 :]
                break
        groups.setdefault(e, {})[rest] = c
    exps = sorted(groups, reverse=True)
    nm = names[i]

    def pw(k: int) -> str:
        return nm if k == 1 else f"{nm}**{k}"

    acc = _horner_src(groups[exps[0]], order[1:], names)
    prev = exps[0]
    for e in exps[1:]:
        acc = f"({acc})*{pw(prev - e)} + ({_horner_src(groups[e], order[1:], names)})"
        prev = e
    if prev:
        acc = f"({acc})*{pw(prev)}"
    return acc


def format_coefficient(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_monomial(m: Mono) -> str:
    return "*".join(name_of(i) if e == 1 else f"{name_of(i)}^{e}" for i, e in m)


def format_polynomial(p: Polynomial) -> str:
    if p.is_zero():
        return "0"
    pieces = []
    for k, (m, c) in enumerate(p.sorted_terms()):
        neg = c < 0
        a = -c if neg else c
        if not m:
            body = format_coefficient(a)
        elif a == 1:
            body = format_monomial(m)
        else:
            body = f"{format_coefficient(a)}*{format_monomial(m)}"
        if k == 0:
            pieces.append(f"-{body}" if neg else body)
        else:
            pieces.append(f" - {body}" if neg else f" + {body}")
    return "".join(pieces)


# ----------------------------------------------------------------------- gcd


def _normalize(p: Polynomial) -> Polynomial:
    return p.primitive()[1]


def _content_in(p: Polynomial, i: int) -> Polynomial:
    g = None
    for c in p.coefficients_in(i).values():
        g = c if g is None else poly_gcd(g, c)
        if g.is_constant():
            return Polynomial.constant(1)
    return g


_PRIME = (1 << 61) - 1


def _image_mod_p(p: Polynomial, i: int, point: dict[int, int]) -> list[int] | None:
    """Dense coefficients in variable ``i`` after specializing the others to
    ``point`` and reducing mod a large prime; ``None`` if a denominator or the
    leading coefficient vanishes there."""
    deg = p.degree(i)
    out = [0] * (deg + 1)
    for m, c in p.terms.items():
        if c.denominator % _PRIME == 0:
            return None
        val = c.numerator * pow(c.denominator, -1, _PRIME)
        k = 0
        for j, e in m:
            if j == i:
                k = e
            else:
                val = val * pow(point[j], e, _PRIME)
        out[k] = (out[k] + val) % _PRIME
    if out[deg] == 0:
        return None
    return out


def _gcd_degree_mod_p(a: list[int], b: list[int]) -> int:
    while b:
        inv = pow(b[-1], -1, _PRIME)
        while len(a) >= len(b) and a:
            f = a[-1] * inv % _PRIME
            shift = len(a) - len(b)
            for k in range(len(b)):
                a[shift + k] = (a[shift + k] - f * b[k]) % _PRIME
            while a and a[-1] == 0:
                a.pop()
        a, b = b, a
    return len(a) - 1


def _coprime_in(a: Polynomial, b: Polynomial, i: int) -> bool:
    """Sound one-sided test: ``True`` proves the gcd has degree 0 in ``i``.

    Specializing the other variables (and reducing mod p) where both leading
    coefficients survive can only raise the degree of the gcd.
    """
    others = sorted((a.var_indices() | b.var_indices()) - {i})
    for trial in range(3):
        point = {j: 1000003 + 7919 * k + 104729 * trial for k, j in enumerate(others)}
        ia, ib = _image_mod_p(a, i, point), _image_mod_p(b, i, point)
        if ia is None or ib is None:
            continue
        return _gcd_degree_mod_p(ia, ib) == 0
    return False


def _prem(a: Polynomial, b: Polynomial, i: int) -> Polynomial:
    """Pseudo-remainder of ``a`` by ``b`` in variable ``i`` (up to a constant)."""
    cb = b.coefficients_in(i)
    db = max(cb)
    lcb = cb[db]
    r = a
    while r:
        cr = r.coefficients_in(i)
        dr = max(cr)
        if dr < db:
            break
        shift = ((i, dr - db),) if dr > db else ()
        r = lcb * r - (cr[dr] * b).mul_mono(shift)
    return r


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Greatest common divisor, normalized to an integral primitive polynomial
    with positive leading coefficient.  ``gcd(0, 0) == 0``.

    Content-and-primitive-part recursion on the registered variable order with
    a primitive pseudo-remainder sequence in the main variable.
    """
    if a.is_zero():
        return _normalize(b)
    if b.is_zero():
        return _normalize(a)
    if a.is_constant() or b.is_constant():
        return Polynomial.constant(1)
    ma, mb = a.mono_content(), b.mono_content()
    g_mono = mono_gcd(ma, mb)
    if a.is_monomial() or b.is_monomial():
        return Polynomial._raw({g_mono: Fraction(1)})
    if ma:
        a = a.exact_div(Polynomial._raw({ma: Fraction(1)}))
    if mb:
        b = b.exact_div(Polynomial._raw({mb: Fraction(1)}))
    mono_part = Polynomial._raw({g_mono: Fraction(1)})
    if a == b:
        return _normalize(mono_part * a)
    va, vb = a.var_indices(), b.var_indices()
    i = min(va | vb)
    if i not in va:
        return _normalize(mono_part * poly_gcd(a, _content_in(b, i)))
    if i not in vb:
        return _normalize(mono_part * poly_gcd(_content_in(a, i), b))
    ca, cb = _content_in(a, i), _content_in(b, i)
    c = poly_gcd(ca, cb)
    pa = _normalize(a if ca.is_one() else a.exact_div(ca))
    pb = _normalize(b if cb.is_one() else b.exact_div(cb))
    if pa.degree(i) < pb.degree(i):
        pa, pb = pb, pa
    # most pairs met while normalizing fractions are coprime; settle those cheaply
    if _coprime_in(pa, pb, i):
        return _normalize(mono_part * c)
    while True:
        r = _prem(pa, pb, i)
        if r.is_zero():
            g = pb
            break
        if r.degree(i) == 0:
            g = Polynomial.constant(1)
            break
        cr = _content_in(r, i)
        # strip the numeric content too, or the integers grow exponentially
        pa, pb = pb, _normalize(r if cr.is_one() else r.exact_div(cr))
    if g.degree(i) > 0:
        cg = _content_in(g, i)
        if not cg.is_one():
            g = g.exact_div(cg)
    return _normalize(mono_part * c * g)
