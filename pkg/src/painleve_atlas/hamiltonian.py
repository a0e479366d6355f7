"""Chart Hamiltonians, their gluing and sigma-shift rules, and chart vector fields."""

from __future__ import annotations

from dataclasses import dataclass

from .atlas import ChartId, RationalMap, sigma, transition
from .report import VerificationReport
from .symcore import RationalFunction, as_rf, parse, var

__all__ = [
    "HamiltonianTriple",
    "ChartVectorField",
    "builtin_triple",
    "gluing_residuals",
    "sigma_shift_residuals",
    "vector_field",
    "pushforward_residual",
    "lyapunov_U",
    "check_hamiltonian",
]

T = var("t")

H_TEXT = "1/2*y^2 - 2*x^3 - t*x"
K_TEXT = "1/8*w^6*z^2 - 1/4*(4 + t*w^4 + w^5)*z + 1/8*w^2*(t + w)^2"
L_TEXT = "1/8*v^6*u^2 + 1/4*(4 + t*v^4 - v^5)*u + 1/8*v^2*(t - v)^2"


@dataclass(frozen=True)
class HamiltonianTriple:
    H: RationalFunction
    K: RationalFunction
    L: RationalFunction

    def __post_init__(self):
        for name in ("H", "K", "L"):
            object.__setattr__(self, name, as_rf(getattr(self, name)))

    @classmethod
    def from_text(cls, H: str, K: str, L: str) -> "HamiltonianTriple":
        return cls(parse(H), parse(K), parse(L))

    def for_chart(self, chart: ChartId) -> RationalFunction:
        return {ChartId.XY: self.H, ChartId.ZW: self.K, ChartId.UV: self.L}[chart]

    def is_polynomial(self) -> bool:
        return all(f.is_polynomial() for f in (self.H, self.K, self.L))


@dataclass(frozen=True)
class ChartVectorField:
    chart: object
    coords: tuple
    dq_dt: RationalFunction
    dp_dt: RationalFunction

    @property
    def components(self) -> tuple[RationalFunction, RationalFunction]:
        return self.dq_dt, self.dp_dt

    def is_polynomial(self) -> bool:
        return self.dq_dt.is_polynomial() and self.dp_dt.is_polynomial()

    def numeric(self):
        order = (*self.coords, T)
        f, g = self.dq_dt.compile(order), self.dp_dt.compile(order)
        return lambda a, b, t: (f(a, b, t), g(a, b, t))


def builtin_triple() -> HamiltonianTriple:
    return HamiltonianTriple.from_text(H_TEXT, K_TEXT, L_TEXT)


def hamiltonian_field(ham, coords, chart=None) -> ChartVectorField:
    """``(dq/dt, dp/dt) = (dH/dp, -dH/dq)`` for coordinates ``(q, p)``."""
    q, p = coords
    ham = as_rf(ham)
    return ChartVectorField(chart, tuple(coords), ham.diff(p), -ham.diff(q))


def vector_field(chart: ChartId, triple: HamiltonianTriple | None = None) -> ChartVectorField:
    triple = triple or builtin_triple()
    return hamiltonian_field(triple.for_chart(chart), chart.coords, chart)


def pushforward_residual(src: ChartVectorField, dst: ChartVectorField, phi: RationalMap):
    """Residual of ``dst o phi = J_phi . src + d_t phi`` for ``phi: src -> dst``.

    Zero exactly when ``dst`` is the pushforward of ``src`` under the
    (time-dependent) map ``phi``.
    """
    (fa, fb), (ga, gb) = phi.jacobian()
    lhs = tuple(phi.pullback(c) for c in dst.components)
    a, b = src.components
    rhs = (fa * a + fb * b + phi.components[0].diff(T), ga * a + gb * b + phi.components[1].diff(T))
    return tuple(l - r for l, r in zip(lhs, rhs))


def gluing_residuals(triple: HamiltonianTriple) -> VerificationReport:
    rep = VerificationReport()
    w, v = as_rf(var("w")), as_rf(var("v"))
    h_zw = transition(ChartId.ZW, ChartId.XY).pullback(triple.H)
    h_uv = transition(ChartId.UV, ChartId.XY).pullback(triple.H)
    k_uv = transition(ChartId.UV, ChartId.ZW).pullback(triple.K)
    rep.expect_zero("H.T_ZW>XY - K = 1/w", h_zw - triple.K - 1 / w)
    rep.expect_zero("H.T_UV>XY - L = -1/v", h_uv - triple.L + 1 / v)
    rep.expect_zero("K.T_UV>ZW - L = -2/v", k_uv - triple.L + 2 / v)
    return rep


def sigma_shift_residuals(triple: HamiltonianTriple) -> VerificationReport:
    rep = VerificationReport()
    w, v = as_rf(var("w")), as_rf(var("v"))
    k_s = sigma(ChartId.ZW).pullback(triple.K)
    l_s = sigma(ChartId.UV).pullback(triple.L)
    rep.expect_zero("K.sigma - K = 2/w", k_s - triple.K - 2 / w)
    rep.expect_zero("L.sigma - L = -2/v", l_s - triple.L + 2 / v)
    return rep


def lyapunov_U() -> RationalFunction:
    """``2H + y/x``, cross-checked against its invariant-decomposition form."""
    from .invariant_solver import InvariantDecomposition, push_to_xy

    U = 2 * parse(H_TEXT) + parse("y/x")
    pushed = push_to_xy(InvariantDecomposition([parse("xi*(t^2 - xi)/4"), parse("1/4")], []))
    if pushed != U:
        raise AssertionError(f"Lyapunov function mismatch: {U - pushed}")
    return U


def check_hamiltonian(triple: HamiltonianTriple | None = None) -> VerificationReport:
    triple = triple or builtin_triple()
    rep = VerificationReport()
    rep.add("triple.polynomial", triple.is_polynomial(), ", ".join(str(f.den) for f in (triple.H, triple.K, triple.L)))
    rep.extend(gluing_residuals(triple))
    rep.extend(sigma_shift_residuals(triple))
    fields = {c: vector_field(c, triple) for c in ChartId}
    for c in (ChartId.ZW, ChartId.UV):
        rep.add(f"field.{c.name}.polynomial", fields[c].is_polynomial(), f"{fields[c].dq_dt.den}, {fields[c].dp_dt.den}")
    for src, dst in ((ChartId.ZW, ChartId.XY), (ChartId.UV, ChartId.XY), (ChartId.ZW, ChartId.UV)):
        for k, r in enumerate(pushforward_residual(fields[src], fields[dst], transition(src, dst))):
            rep.expect_zero(f"field.{src.name}->{dst.name}[{k}]", r)
    for k, r in enumerate(pushforward_residual(fields[ChartId.ZW], fields[ChartId.UV], sigma("cross"))):
        rep.expect_zero(f"field.sigma_cross[{k}]", r)
    dw = fields[ChartId.ZW].dp_dt.subs({var("w"): 0})
    rep.add("field.ZW.dw/dt|w=0 = 1", dw == 1, dw)
    return rep
