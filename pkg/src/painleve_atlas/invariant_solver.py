"""Sigma-invariant polynomials on the ``(z, w)`` chart.

With ``xi = w**2`` the involution acts on ``(z, xi)`` as
``tau(z) = 8/xi**3 + 2*t/xi - z``.  Writing ``K(z, w) = F(z, xi) + w*G(z, xi)``,
``K`` is sigma-invariant iff ``F`` is tau-invariant and ``G`` is skew.  The
invariants are generated by ``E = z*(xi^3*z - 2*t*xi^2 - 8)``; skew ones are
``Delta = xi^3*z - t*xi^2 - 4`` times an invariant.  This module computes those
decompositions, pushes them to the ``(x, y)`` chart and uses that to certify
constancy and to scan for Hamiltonians with the shifted invariance rule.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import linsolve
from .atlas import ChartId, sigma, xy_to_zw_map
from .hamiltonian import K_TEXT
from .report import VerificationReport
from .symcore import NotDivisibleError, Polynomial, RationalFunction, as_rf, parse, poly_gcd, substitute, var

__all__ = [
    "ParticularInvariants",
    "InvariantDecomposition",
    "NotInvariantError",
    "DecompositionError",
    "PARTICULAR",
    "even_odd_split",
    "to_xi",
    "from_xi",
    "decompose_even",
    "decompose_odd",
    "decompose",
    "assemble",
    "verify_ED_identities",
    "push_to_xy",
    "Verdict",
    "constancy_certificate",
    "ScanResult",
    "uniqueness_scan",
    "random_decomposition",
    "check_invariants",
]

Z, W, XI, T, X, Y = (var(n) for n in ("z", "w", "xi", "t", "x", "y"))
_ZI, _WI, _XII, _TI, _XIDX = Z.index, W.index, XI.index, T.index, X.index

class NotInvariantError(ValueError):
    def __init__(self, message: str, witness):
        super().__init__(f"{message}: {witness}")
        self.witness = witness

class DecompositionError(ArithmeticError):
    """A division the construction guarantees to be exact left a remainder."""

@dataclass(frozen=True)
class ParticularInvariants:
    E: Polynomial
    Delta: Polynomial
    tau: dict

    def check(self) -> VerificationReport:
        rep = VerificationReport()
        rep.expect_zero("E.tau = E", substitute(self.E, self.tau) - self.E)
        rep.expect_zero("Delta.tau = -Delta", substitute(self.Delta, self.tau) + self.Delta)
        return rep

PARTICULAR = ParticularInvariants(
    E=parse("z*(xi^3*z - 2*t*xi^2 - 8)").as_polynomial(),
    Delta=parse("xi^3*z - t*xi^2 - 4").as_polynomial(),
    tau={Z: parse("8/xi^3 + 2*t/xi - z")},
)

# second factor of E; vanishes on the tau-image of {z = 0}
_E_COFACTOR = parse("xi^3*z - 2*t*xi^2 - 8").as_polynomial()

@dataclass
class InvariantDecomposition:
    """``K = sum f_m(xi) E^m + w * Delta * sum g_n(xi) E^n`` with ``xi = w^2``."""

    even_coeffs: list = field(default_factory=list)
    odd_coeffs: list = field(default_factory=list)

    def __post_init__(self):
        self.even_coeffs = _trim([as_rf(c) for c in self.even_coeffs])
        self.odd_coeffs = _trim([as_rf(c) for c in self.odd_coeffs])

    @property
    def M(self) -> int:
        return len(self.even_coeffs) - 1

    @property
    def N(self) -> int:
        return len(self.odd_coeffs) - 1

    def to_json(self) -> dict:
        return {
            "even": [str(c) for c in self.even_coeffs],
            "odd": [str(c) for c in self.odd_coeffs],
            "M": self.M,
            "N": self.N,
        }

def _trim(coeffs: list) -> list:
    while coeffs and coeffs[-1].is_zero():
        coeffs.pop()
    return coeffs

# ------------------------------------------------------------- splitting

def _reindex(p: Polynomial, src: int, dst: int, ratio: Fraction) -> Polynomial:
    terms = {}
    for m, c in p.terms.items():
        exps = dict(m)
        e = exps.pop(src, 0)
        if e:
            ne = e * ratio
            if ne.denominator != 1:
                raise ValueError(f"odd power of w in {p}")
            exps[dst] = exps.get(dst, 0) + int(ne)
        terms[tuple(sorted(exps.items()))] = c
    return Polynomial(terms)

def to_xi(p: Polynomial) -> Polynomial:
    """``F(z, w^2) -> F(z, xi)``; ``p`` must be even in ``w``."""
    return _reindex(p, _WI, _XII, Fraction(1, 2))

def from_xi(p) -> Polynomial:
    p = as_rf(p).as_polynomial()
    return _reindex(p, _XII, _WI, Fraction(2))

def even_odd_split(K) -> tuple[RationalFunction, RationalFunction]:
    K = as_rf(K)
    flipped = substitute(K, {W: -as_rf(W)})
    return (K + flipped) * Fraction(1, 2), (K - flipped) * Fraction(1, 2)

def _tau_image(p) -> RationalFunction:
    return substitute(p, PARTICULAR.tau)

def decompose_even(F, *, check: bool = True) -> InvariantDecomposition:
    """Coefficients ``f_m(xi)`` with ``F = sum f_m E^m``.

    Each round peels off ``F(0, xi)``; what is left vanishes on ``z = 0`` and on
    its tau-image, so it is divisible by ``E`` exactly.
    """
    F = as_rf(F)
    if not F.is_polynomial():
        raise ValueError("decompose_even expects a polynomial in (z, xi, t)")
    if check:
        res = _tau_image(F) - F
        if not res.is_zero():
            raise NotInvariantError("not tau-invariant", res)
    rest = F.as_polynomial()
    coeffs = []
    while not rest.is_zero():
        f0 = rest.subs({Z: 0})
        coeffs.append(f0)
        rest = rest - f0
        if rest.is_zero():
            break
        try:
            rest = rest.exact_div(Polynomial.variable(Z)).exact_div(_E_COFACTOR)
        except NotDivisibleError as exc:
            raise DecompositionError(f"E does not divide {rest}") from exc
    out = InvariantDecomposition(coeffs, [])
    back = assemble_even(out.even_coeffs)
    if back != F:
        raise DecompositionError(f"reassembly mismatch: {back - F}")
    return out

def decompose_odd(G, *, check: bool = True) -> InvariantDecomposition:
    G = as_rf(G)
    if not G.is_polynomial():
        raise ValueError("decompose_odd expects a polynomial in (z, xi, t)")
    if check:
        res = _tau_image(G) + G
        if not res.is_zero():
            raise NotInvariantError("not skew tau-invariant", res)
    try:
        quotient = G.as_polynomial().exact_div(PARTICULAR.Delta)
    except NotDivisibleError as exc:
        raise DecompositionError(f"Delta does not divide {G}") from exc
    inner = decompose_even(quotient, check=False)
    return InvariantDecomposition([], inner.even_coeffs)

def assemble_even(coeffs) -> RationalFunction:
    E = as_rf(PARTICULAR.E)
    out = as_rf(0)
    power = as_rf(1)
    for c in coeffs:
        out = out + c * power
        power = power * E
    return out

def assemble(decomp: InvariantDecomposition) -> RationalFunction:
    """The ``(z, w)`` polynomial described by ``decomp``."""
    F = assemble_even(decomp.even_coeffs)
    G = as_rf(PARTICULAR.Delta) * assemble_even(decomp.odd_coeffs)
    return as_rf(from_xi(F)) + as_rf(W) * as_rf(from_xi(G))

def decompose(K) -> InvariantDecomposition:
    """Full decomposition of a sigma-invariant polynomial ``K(z, w, t)``."""
    K = as_rf(K)
    if not K.is_polynomial():
        raise ValueError("expected a polynomial in (z, w, t)")
    res = sigma(ChartId.ZW).pullback(K) - K
    if not res.is_zero():
        raise NotInvariantError("not sigma-invariant", res)
    plus, minus = even_odd_split(K)
    F = to_xi(plus.as_polynomial())
    G = to_xi((minus / as_rf(W)).as_polynomial())
    even = decompose_even(F) if not F.is_zero() else InvariantDecomposition()
    odd = decompose_odd(G) if not G.is_zero() else InvariantDecomposition()
    return InvariantDecomposition(even.even_coeffs, odd.odd_coeffs)

# --------------------------------------------------------- (x, y) chart

_E_XY = parse("4*y^2 + 4*y/x + 1/x^2 - (4*x^2 + t)^2/x")
_WDELTA_XY = parse("2*y/x^2 + 1/x^3")

def _in_yw(f) -> RationalFunction:
    """Rewrite a ``(z, w)`` expression in ``(y, w)`` through the pole-chart gluing."""
    return xy_to_zw_map(ChartId.ZW).pullback(f)

def _xy_in_yw(f) -> RationalFunction:
    return substitute(f, {X: as_rf(W) ** -2})

def verify_ED_identities() -> VerificationReport:
    rep = VerificationReport()
    E_zw = as_rf(from_xi(PARTICULAR.E))
    wD_zw = as_rf(W) * as_rf(from_xi(PARTICULAR.Delta))
    rep.expect_zero("E(z,w^2) in (x,y)", _in_yw(E_zw) - _xy_in_yw(_E_XY))
    rep.expect_zero("w*Delta(z,w^2) in (x,y)", _in_yw(wD_zw) - _xy_in_yw(_WDELTA_XY))
    aux = as_rf(W) ** -8 * wD_zw**2 - as_rf(W) ** 2 * (as_rf(T) + 4 * as_rf(W) ** -4) ** 2
    rep.expect_zero("E = w^-8 (w Delta)^2 - w^2 (t + 4 w^-4)^2", E_zw - aux)
    # and the same relation read downstairs
    rep.expect_zero(
        "E = x^4 (w Delta)^2 - (t + 4 x^2)^2 / x  in (x,y)",
        _E_XY - (as_rf(X) ** 4 * _WDELTA_XY**2 - (as_rf(T) + 4 * as_rf(X) ** 2) ** 2 / as_rf(X)),
    )
    return rep

def push_to_xy(decomp: InvariantDecomposition) -> RationalFunction:
    """The ``(x, y)`` form of the invariant described by ``decomp``."""
    at_x = {XI: as_rf(X) ** -1}
    out = as_rf(0)
    power = as_rf(1)
    for c in decomp.even_coeffs:
        out = out + substitute(c, at_x) * power
        power = power * _E_XY
    odd = as_rf(0)
    power = as_rf(1)
    for c in decomp.odd_coeffs:
        odd = odd + substitute(c, at_x) * power
        power = power * _E_XY
    return out + _WDELTA_XY * odd

def negative_x_part(f) -> RationalFunction:
    """Terms of the Laurent polynomial ``f`` (in ``x``) with negative ``x``-power."""
    f = as_rf(f)
    k = f.den.degree(_XIDX)
    if k <= 0:
        return as_rf(0)
    if not (f.den.is_monomial() and f.den.var_indices() == {_XIDX}):
        raise ValueError(f"{f} is not Laurent in x")
    low = {m: c for m, c in f.num.terms.items() if dict(m).get(_XIDX, 0) < k}
    return RationalFunction(Polynomial(low), f.den)

@dataclass(frozen=True)
class Verdict:
    kind: str  # "constant" | "not-sigma-invariant" | "has-poles-in-x"
    witness: str = ""
    pushed: RationalFunction | None = None

    @property
    def constant(self) -> bool:
        return self.kind == "constant"

def constancy_certificate(K) -> Verdict:
    K = as_rf(K)
    res = sigma(ChartId.ZW).pullback(K) - K
    if not res.is_zero():
        return Verdict("not-sigma-invariant", str(res))
    decomp = decompose(K)
    H = push_to_xy(decomp)
    neg = negative_x_part(H)
    if neg.is_zero():
        return Verdict("constant", "", H)
    return Verdict("has-poles-in-x", str(neg), H)

# ---------------------------------------------------------- uniqueness

@dataclass
class ScanResult:
    bounds: tuple[int, int, int]
    mode: str
    feasible: bool
    rank: int
    n_unknowns: int
    n_equations: int
    particular: RationalFunction | None
    homogeneous: list[RationalFunction]

    @property
    def phase_homogeneous(self) -> list[RationalFunction]:
        """Homogeneous solutions that involve ``z`` or ``w``."""
        return [h for h in self.homogeneous if h.num.var_indices() - {_TI}]

    @property
    def t_only_dimension(self) -> int:
        return len(self.homogeneous) - len(self.phase_homogeneous)

    def summary(self) -> dict:
        return {
            "bounds": list(self.bounds),
            "mode": self.mode,
            "feasible": self.feasible,
            "rank": self.rank,
            "unknowns": self.n_unknowns,
            "equations": self.n_equations,
            "particular": None if self.particular is None else str(self.particular),
            "homogeneous": [str(h) for h in self.homogeneous],
            "phase_dimension": len(self.phase_homogeneous),
        }

def _linear_rows(exprs: list[RationalFunction], rhs: RationalFunction, keep):
    """Rows of ``sum c_j exprs[j] = rhs`` after clearing a common monomial
    denominator.  Returns ``(denominator, [(mono, coeffs, rhs_coeff), ...])``
    for the monomials accepted by ``keep(mono, denominator)``."""
    den = rhs.den
    for e in exprs:
        den = den * e.den.exact_div(poly_gcd(den, e.den))
    cols = [e.num * den.exact_div(e.den) for e in exprs]
    rcol = rhs.num * den.exact_div(rhs.den)
    monos = set(rcol.terms)
    for c in cols:
        monos |= set(c.terms)
    rows = [(m, [c.terms.get(m, 0) for c in cols], rcol.terms.get(m, 0)) for m in sorted(monos) if keep(m, den)]
    return den, rows

def _group_over_t(block) -> list[list[RationalFunction]]:
    """Collect ``t``-powers so each phase monomial gives one row over ``Q(t)``."""
    per: dict = {}
    for m, coeffs, r in block:
        exps = dict(m)
        tpow = exps.pop(_TI, 0)
        per.setdefault(tuple(sorted(exps.items())), []).append((tpow, coeffs, r))
    tt = as_rf(T)
    rows = []
    for key in sorted(per):
        items = per[key]
        n = len(items[0][1])
        row = [as_rf(0)] * (n + 1)
        for tpow, coeffs, r in items:
            tp = tt**tpow
            for j, c in enumerate(coeffs):
                if c:
                    row[j] = row[j] + tp * c
            if r:
                row[n] = row[n] + tp * r
        rows.append(row)
    return rows

def uniqueness_scan(
    deg_z: int,
    deg_w: int,
    deg_t: int,
    *,
    mode: str = "rational_t",
    sigma_rhs: str = "shifted",
    require_entire: bool = True,
) -> ScanResult:
    """Exact solve for ``K(z, w)`` within the ``deg_z``/``deg_w`` bounds with
    ``K.sigma - K = 2/w`` (``= 0`` when ``sigma_rhs="invariant"``) and, if
    ``require_entire``, ``K + 1/w`` free of negative powers of ``x`` on ``XY``.

    ``mode="rational_t"``: the unknown coefficients range over ``Q(t)``, so
    ``deg_t`` is not a constraint; the t-only part of the answer shows up as one
    ``Q(t)`` direction.  ``mode="polynomial_t"``: the unknowns are rationals
    multiplying ``z^a w^b t^c`` with ``c <= deg_t``.
    """
    if min(deg_z, deg_w, deg_t) < 0:
        raise ValueError("degree bounds must be non-negative")
    w = as_rf(W)
    over_t = mode == "rational_t"
    if over_t:
        basis = [(a, b, 0) for a in range(deg_z + 1) for b in range(deg_w + 1)]
    elif mode == "polynomial_t":
        basis = [(a, b, c) for a in range(deg_z + 1) for b in range(deg_w + 1) for c in range(deg_t + 1)]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    monos = [as_rf(Polynomial.monomial({Z: a, W: b, T: c})) for a, b, c in basis]
    sig = sigma(ChartId.ZW)
    rhs_sigma = 2 / w if sigma_rhs == "shifted" else as_rf(0)

    blocks = [_linear_rows([sig.pullback(m) - m for m in monos], rhs_sigma, lambda m, d: True)[1]]
    if require_entire:
        # in (y, w) coordinates x = w^-2, so positive net powers of w are poles in x;
        # the 1/w shift only has negative powers and drops out of these rows
        def positive_w(m, den):
            return dict(m).get(_WI, 0) > den.degree(_WI)

        blocks.append(_linear_rows([_in_yw(m) for m in monos], as_rf(0), positive_w)[1])

    if over_t:
        zero, one = as_rf(0), as_rf(1)
        equations = [row for block in blocks for row in _group_over_t(block)]
        pivot_key = lambda a: (len(a.num.terms) + len(a.den.terms), a.num.total_degree())
    else:
        zero, one = Fraction(0), Fraction(1)
        equations = [[Fraction(c) for c in coeffs] + [Fraction(r)] for block in blocks for _, coeffs, r in block]
        pivot_key = None
    sol = linsolve.solve(equations, len(monos), zero, one, pivot_key)
    bounds = (deg_z, deg_w, deg_t)
    if not sol.feasible:
        return ScanResult(bounds, mode, False, sol.rank, len(monos), len(equations), None, [])

    def build(vec) -> RationalFunction:
        out = as_rf(0)
        for c, m in zip(vec, monos):
            if c != 0:
                out = out + as_rf(c) * m
        return out

    return ScanResult(
        bounds, mode, True, sol.rank, len(monos), len(equations),
        build(sol.particular), [build(v) for v in sol.nullspace],
    )

# ------------------------------------------------------------- suites


def random_coefficient(rng, max_deg: int = 4, height: int = 3) -> RationalFunction:
    """Random polynomial in ``(xi, t)`` of total degree ``<= max_deg``."""
    out = Polynomial()
    for a in range(max_deg + 1):
        for b in range(max_deg + 1 - a):
            if rng.random() < 0.35:
                c = rng.randint(-height, height)
                if c:
                    out = out + Polynomial.monomial({XI: a, T: b}, c)
    return as_rf(out)


def random_decomposition(rng, max_M: int = 3, max_N: int = 3, max_deg: int = 4) -> InvariantDecomposition:
    """Random decomposition with nonzero top coefficients on both sides (a side
    may be empty)."""

    def side(top):
        if top < 0:
            return []
        coeffs = [random_coefficient(rng, max_deg) for _ in range(top + 1)]
        while coeffs[-1].is_zero():
            coeffs[-1] = random_coefficient(rng, max_deg)
        return coeffs

    M = rng.randint(-1, max_M)
    N = rng.randint(-1 if M >= 0 else 0, max_N)
    return InvariantDecomposition(side(M), side(N))


def check_invariants(seed: int = 0, cases: int = 20) -> VerificationReport:
    rep = VerificationReport()
    rep.extend(PARTICULAR.check())
    rep.extend(verify_ED_identities())
    E, D, xi = as_rf(PARTICULAR.E), as_rf(PARTICULAR.Delta), as_rf(XI)
    for name, F, want in (("E^2", E**2, [0, 0, 1]), ("xi + 3E", xi + 3 * E, [xi, 3])):
        got = decompose_even(F.as_polynomial()).even_coeffs
        rep.add(f"decompose_even({name})", got == [as_rf(c) for c in want], [str(c) for c in got])
    for name, G, want in (("Delta", D, [1]), ("Delta*E", D * E, [0, 1]), ("Delta*(2xi + E^3)", D * (2 * xi + E**3), [2 * xi, 0, 0, 1])):
        got = decompose_odd(G.as_polynomial()).odd_coeffs
        rep.add(f"decompose_odd({name})", got == [as_rf(c) for c in want], [str(c) for c in got])
    try:
        decompose_even(as_rf(Z).as_polynomial())
        rep.add("decompose_even(z) rejected", False, "accepted")
    except NotInvariantError as exc:
        rep.add("decompose_even(z) rejected", True, exc.witness)
    lyap = push_to_xy(InvariantDecomposition([parse("xi*(t^2 - xi)/4"), parse("1/4")], []))
    rep.expect_zero("Lyapunov push_to_xy", lyap - parse("y^2 - 4*x^3 - 2*t*x + y/x"))
    rep.expect_zero("push_to_xy(N=0, g=1)", push_to_xy(InvariantDecomposition([], [1])) - parse("2*y/x^2 + 1/x^3"))
    for text, kind in (("7", "constant"), ("z*(w^6*z - 2*t*w^4 - 8)", "has-poles-in-x"), (K_TEXT, "not-sigma-invariant")):
        v = constancy_certificate(parse(text))
        rep.add(f"constancy({text})", v.kind == kind, v.kind if v.kind != kind else v.witness[:80])
    scan = uniqueness_scan(2, 8, 1)
    ok = scan.feasible and scan.particular == parse(K_TEXT) and not scan.phase_homogeneous
    rep.add("uniqueness_scan(2,8,1) = K_I + t-only", ok, json.dumps(scan.summary()))
    rep.add("uniqueness_scan(0,0,0) infeasible", not uniqueness_scan(0, 0, 0).feasible, "")
    rng = random.Random(seed)
    for k in range(cases):
        dec = random_decomposition(rng)
        back = decompose(assemble(dec))
        same = back.even_coeffs == dec.even_coeffs and back.odd_coeffs == dec.odd_coeffs
        rep.add(f"round trip[seed={seed},case={k}]", same, dec.to_json())
    return rep

