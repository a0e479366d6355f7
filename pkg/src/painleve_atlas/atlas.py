"""The three-chart orbifold atlas of Okamoto's space for Painleve I.

Charts are ``XY`` (the original ``(x, y)`` plane) and the two pole charts
``ZW`` and ``UV``.  The pole charts are glued to each other along
``{w != 0} = {v != 0}`` and are identified by the involution ``sigma``; the
``XY`` chart sees their quotient.

Only rational maps are stored.  The inverse of ``ZW -> XY`` would need
``w = +-x**(-1/2)``, so it is stored as a map in ``(y, w)`` with the branch of
``w`` supplied by the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .report import VerificationReport
from .symcore import Polynomial, RationalFunction, Variable, as_rf, parse, substitute, var

__all__ = [
    "ChartId",
    "RationalMap",
    "transition",
    "sigma",
    "xy_to_zw_map",
    "cover_map",
    "identity_map",
    "check_involution",
    "check_symplectic",
    "check_transition_coherence",
    "check_atlas",
    "xy_to_zw",
    "zw_to_xy",
    "uv_to_xy",
    "zw_to_uv",
    "uv_to_zw",
]

T = var("t")


class ChartId(Enum):
    XY = ("x", "y")
    ZW = ("z", "w")
    UV = ("u", "v")

    @property
    def coords(self) -> tuple[Variable, Variable]:
        return var(self.value[0]), var(self.value[1])


@dataclass(frozen=True)
class RationalMap:
    """``source -> target`` given by target coordinates as functions of the
    source coordinates (and ``t``, held constant)."""

    source: object
    target: object
    source_vars: tuple[Variable, Variable]
    target_vars: tuple[Variable, Variable]
    components: tuple[RationalFunction, RationalFunction]
    domain_constraint: Polynomial = field(default_factory=lambda: Polynomial.constant(1))
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(as_rf(c) for c in self.components))

    def bindings(self) -> dict:
        return dict(zip(self.target_vars, self.components))

    def pullback(self, f) -> RationalFunction:
        """``f`` (in target coordinates) rewritten in source coordinates."""
        return substitute(f, self.bindings())

    def compose(self, inner: "RationalMap") -> "RationalMap":
        """``self o inner``; requires ``inner.target_vars == self.source_vars``."""
        if tuple(v.name for v in inner.target_vars) != tuple(v.name for v in self.source_vars):
            raise ValueError(f"cannot compose {self.name or self.source} after {inner.name or inner.target}")
        comps = tuple(inner.pullback(c) for c in self.components)
        dom = inner.domain_constraint
        return RationalMap(
            inner.source,
            self.target,
            inner.source_vars,
            self.target_vars,
            comps,
            dom,
            f"{self.name}o{inner.name}" if self.name and inner.name else "",
        )

    def jacobian(self) -> tuple[tuple[RationalFunction, RationalFunction], ...]:
        a, b = self.source_vars
        return tuple((c.diff(a), c.diff(b)) for c in self.components)

    def jacobian_determinant(self) -> RationalFunction:
        (fa, fb), (ga, gb) = self.jacobian()
        return fa * gb - fb * ga

    def is_identity(self) -> bool:
        return all(as_rf(c) == as_rf(v) for c, v in zip(self.components, self.source_vars))

    def residual_to(self, other: "RationalMap") -> tuple[RationalFunction, RationalFunction]:
        return tuple(a - b for a, b in zip(self.components, other.components))

    def numeric(self):
        """Compile to ``f(a, b, t) -> (c1, c2)`` for floating evaluation."""
        order = (*self.source_vars, T)
        fns = tuple(c.compile(order) for c in self.components)
        return lambda a, b, t: (fns[0](a, b, t), fns[1](a, b, t))


def _map(source: ChartId, target: ChartId, comps: tuple[str, str], dom: str = "1", name: str = "") -> RationalMap:
    return RationalMap(
        source, target, source.coords, target.coords, tuple(parse(c) for c in comps), parse(dom).num, name
    )


# The registered maps.  Each pair of strings gives the target coordinates.
_TRANSITIONS = {
    (ChartId.ZW, ChartId.UV): (("z - 2*t/w^2 - 8/w^6", "w"), "w"),
    (ChartId.UV, ChartId.ZW): (("u + 2*t/v^2 + 8/v^6", "v"), "v"),
    (ChartId.ZW, ChartId.XY): (("1/w^2", "-2/w^3 - t*w/2 - w^2/2 + z*w^3/2"), "w"),
    (ChartId.UV, ChartId.XY): (("1/v^2", "2/v^3 + t*v/2 - v^2/2 + u*v^3/2"), "v"),
}

_SIGMA = {
    ChartId.ZW: ("-z + 2*t/w^2 + 8/w^6", "-w"),
    ChartId.UV: ("-u - 2*t/v^2 - 8/v^6", "-v"),
}


def identity_map(chart: ChartId) -> RationalMap:
    a, b = chart.coords
    return RationalMap(chart, chart, (a, b), (a, b), (as_rf(a), as_rf(b)), name=f"id_{chart.name}")


def transition(source: ChartId, target: ChartId) -> RationalMap:
    """Registered coordinate change between two charts.

    ``XY -> ZW`` / ``XY -> UV`` are returned by :func:`xy_to_zw_map` because
    they need the auxiliary branch coordinate.
    """
    if source == target:
        return identity_map(source)
    key = (source, target)
    if key in _TRANSITIONS:
        comps, dom = _TRANSITIONS[key]
        return _map(source, target, comps, dom, f"{source.name}->{target.name}")
    if source == ChartId.XY:
        return xy_to_zw_map(target)
    raise KeyError(f"no transition {source.name} -> {target.name}")


def xy_to_zw_map(target: ChartId = ChartId.ZW) -> RationalMap:
    """Inverse of the ``ZW -> XY`` (or ``UV -> XY``) gluing on the branch-resolved
    cover: source coordinates are ``(y, w)`` (resp. ``(y, v)``) where the caller
    fixes ``w = s * x**(-1/2)``."""
    if target == ChartId.ZW:
        return RationalMap(
            "XY~w",
            ChartId.ZW,
            (var("y"), var("w")),
            ChartId.ZW.coords,
            (parse("2*(y + 2/w^3 + t*w/2 + w^2/2)/w^3"), parse("w")),
            parse("w").num,
            "XY->ZW",
        )
    if target == ChartId.UV:
        return RationalMap(
            "XY~v",
            ChartId.UV,
            (var("y"), var("v")),
            ChartId.UV.coords,
            (parse("2*(y - 2/v^3 - t*v/2 + v^2/2)/v^3"), parse("v")),
            parse("v").num,
            "XY->UV",
        )
    raise KeyError(target)


def sigma(chart) -> RationalMap:
    """The involution restricted to ``ZW``, ``UV`` or the cross map ``"cross"``
    (``ZW -> UV``, ``(z, w) -> (-z, -w)``; ``"cross_inverse"`` is ``UV -> ZW``)."""
    if chart == ChartId.XY:
        raise ValueError("sigma does not act on the XY chart")
    if chart in _SIGMA:
        return _map(chart, chart, _SIGMA[chart], chart.value[1], f"sigma_{chart.name}")
    if chart == "cross":
        return _map(ChartId.ZW, ChartId.UV, ("-z", "-w"), "1", "sigma_cross")
    if chart == "cross_inverse":
        return _map(ChartId.UV, ChartId.ZW, ("-u", "-v"), "1", "sigma_cross_inv")
    raise ValueError(f"unknown sigma restriction {chart!r}")


def cover_map(chart: ChartId) -> RationalMap:
    """Pole chart -> the double cover ``(r_2, s_2)`` of ``XY`` on which ``sigma``
    is the deck involution ``(r_2, s_2) -> (-r_2, -s_2)``.

    The cover is ``x = s_2**-2``, ``y = -r_2 * s_2**-3``.
    """
    a, b = chart.coords
    y = transition(chart, ChartId.XY).components[1]
    r2 = -y * as_rf(b) ** 3
    return RationalMap(chart, "W", (a, b), (var("r_2"), var("s_2")), (r2, as_rf(b)), name=f"{chart.name}->W")


def _cover_to_xy() -> RationalMap:
    return RationalMap(
        "W",
        ChartId.XY,
        (var("r_2"), var("s_2")),
        ChartId.XY.coords,
        (parse("1/s_2^2"), parse("-r_2/s_2^3")),
        parse("s_2").num,
        "W->XY",
    )


def _deck() -> RationalMap:
    return RationalMap(
        "W", "W", (var("r_2"), var("s_2")), (var("r_2"), var("s_2")),
        (parse("-r_2"), parse("-s_2")), name="sigma_W",
    )


# ----------------------------------------------------------------- checks


def _expect_map(report: VerificationReport, check_id: str, lhs: RationalMap, rhs) -> None:
    rhs_comps = rhs.components if isinstance(rhs, RationalMap) else tuple(as_rf(c) for c in rhs)
    for k, (a, b) in enumerate(zip(lhs.components, rhs_comps)):
        report.expect_zero(f"{check_id}[{k}]", a - b)


def check_involution() -> VerificationReport:
    rep = VerificationReport()
    zw, uv = sigma(ChartId.ZW), sigma(ChartId.UV)
    cross, cross_inv = sigma("cross"), sigma("cross_inverse")
    _expect_map(rep, "sigma_ZW^2=id", zw.compose(zw), identity_map(ChartId.ZW))
    _expect_map(rep, "sigma_UV^2=id", uv.compose(uv), identity_map(ChartId.UV))
    _expect_map(rep, "cross_inv.cross=id", cross_inv.compose(cross), identity_map(ChartId.ZW))
    t_zu = transition(ChartId.ZW, ChartId.UV)
    _expect_map(rep, "T_ZW>UV.sigma_ZW=cross", t_zu.compose(zw), cross)
    _expect_map(rep, "sigma_UV.T_ZW>UV=cross", uv.compose(t_zu), cross)
    return rep


def check_symplectic(m: RationalMap, check_id: str | None = None) -> VerificationReport:
    rep = VerificationReport()
    det = m.jacobian_determinant()
    rep.add(check_id or f"det J({m.name})=1", det == 1, det)
    return rep


def check_transition_coherence() -> VerificationReport:
    """The triangle ``ZW -> UV -> XY`` against ``ZW -> XY``.

    Two identifications of the pole charts are tried: the plain gluing
    ``T_ZW>UV`` and the sigma-twisted one ``sigma_UV o T_ZW>UV``.  Downstairs on
    ``XY`` sigma is invisible, so both close the triangle there; on the double
    cover ``(r_2, s_2)`` the two differ by the deck involution, and exactly one
    must close it.  The check ``coherence.identification`` names it.
    """
    rep = VerificationReport()
    t_zu = transition(ChartId.ZW, ChartId.UV)
    t_ux = transition(ChartId.UV, ChartId.XY)
    t_zx = transition(ChartId.ZW, ChartId.XY)
    twisted = sigma(ChartId.UV).compose(t_zu)
    candidates = {"direct": t_zu, "sigma_twisted": twisted}

    for label, ident in candidates.items():
        _expect_map(rep, f"coherence.xy.{label}", t_ux.compose(ident), t_zx)

    closing = []
    cov_z, cov_u = cover_map(ChartId.ZW), cover_map(ChartId.UV)
    for label, ident in candidates.items():
        res = cov_u.compose(ident).residual_to(cov_z)
        if all(r.is_zero() for r in res):
            closing.append(label)
        rep.add(f"coherence.cover.{label}.residual", True, "; ".join(str(r) for r in res))
    rep.add("coherence.identification", len(closing) == 1, closing[0] if len(closing) == 1 else ",".join(closing) or "none")

    # exact spot check at w = 1, t = 0 and a rational z
    z0 = Fraction(3, 7)
    point = {var("z"): z0, var("w"): 1, T: 0}
    lhs = [substitute(c, point) for c in t_ux.compose(t_zu).components]
    rhs = [substitute(c, point) for c in t_zx.components]
    rep.add("coherence.spot(w=1,t=0)", lhs == rhs, f"{lhs[1]} vs {rhs[1]}")

    # the cover lift descends to the registered XY gluing
    _expect_map(rep, "cover.descends.ZW", _cover_to_xy().compose(cov_z), t_zx)
    _expect_map(rep, "cover.descends.UV", _cover_to_xy().compose(cov_u), t_ux)
    _expect_map(rep, "cover.sigma_is_deck", _deck().compose(cov_z), cov_z.compose(sigma(ChartId.ZW)))
    return rep


def check_inverses() -> VerificationReport:
    rep = VerificationReport()
    t_zu, t_uz = transition(ChartId.ZW, ChartId.UV), transition(ChartId.UV, ChartId.ZW)
    _expect_map(rep, "T_UV>ZW.T_ZW>UV=id", t_uz.compose(t_zu), identity_map(ChartId.ZW))
    _expect_map(rep, "T_ZW>UV.T_UV>ZW=id", t_zu.compose(t_uz), identity_map(ChartId.UV))
    for chart in (ChartId.ZW, ChartId.UV):
        fwd = transition(chart, ChartId.XY)
        inv = xy_to_zw_map(chart)
        # (chart) -> (y, aux) with aux = the chart's second coordinate
        a, b = chart.coords
        lift = RationalMap(chart, inv.source, (a, b), inv.source_vars, (fwd.components[1], as_rf(b)))
        _expect_map(rep, f"inv.fwd=id[{chart.name}]", inv.compose(lift), identity_map(chart))
        back = fwd.compose(inv)
        rep.expect_zero(f"fwd.inv:y[{chart.name}]", back.components[1] - as_rf(var("y")))
        rep.expect_zero(f"fwd.inv:x-branch[{chart.name}]", back.components[0] - as_rf(b) ** -2)
    return rep


def check_atlas() -> VerificationReport:
    rep = VerificationReport()
    rep.extend(check_involution())
    for key in _TRANSITIONS:
        rep.extend(check_symplectic(transition(*key)))
    for chart in (ChartId.ZW, ChartId.UV, "cross"):
        rep.extend(check_symplectic(sigma(chart)))
    rep.extend(check_transition_coherence())
    rep.extend(check_inverses())
    return rep


# -------------------------------------------------------- numeric helpers

_ZW_XY = None
_UV_XY = None
_XY_ZW = None
_XY_UV = None


def _numeric():
    global _ZW_XY, _UV_XY, _XY_ZW, _XY_UV
    if _ZW_XY is None:
        _ZW_XY = transition(ChartId.ZW, ChartId.XY).numeric()
        _UV_XY = transition(ChartId.UV, ChartId.XY).numeric()
        _XY_ZW = xy_to_zw_map(ChartId.ZW).components[0].compile((var("y"), var("w"), T))
        _XY_UV = xy_to_zw_map(ChartId.UV).components[0].compile((var("y"), var("v"), T))


def zw_to_xy(z, w, t):
    _numeric()
    return _ZW_XY(z, w, t)


def uv_to_xy(u, v, t):
    _numeric()
    return _UV_XY(u, v, t)


def xy_to_zw(x, y, t, branch: int):
    """``(x, y) -> (z, w)`` on the sheet ``w = branch * x**(-1/2)`` (``x > 0``)."""
    _numeric()
    if x <= 0:
        raise ValueError("real pole-chart coordinates need x > 0")
    w = branch / math.sqrt(x)
    return _XY_ZW(y, w, t), w


def xy_to_uv(x, y, t, branch: int):
    _numeric()
    if x <= 0:
        raise ValueError("real pole-chart coordinates need x > 0")
    v = branch / math.sqrt(x)
    return _XY_UV(y, v, t), v


def zw_to_uv(z, w, t):
    return z - 2 * t / w**2 - 8 / w**6, w


def uv_to_zw(u, v, t):
    return u + 2 * t / v**2 + 8 / v**6, v
