"""Independent high-precision pole positions for the run from x = y = 0 at t = 0.

The fields come from sympy and the flow from mpmath's Taylor-series solver at
25 digits; chart switches use the gluing written out by hand below.  Nothing
from the package is imported.  Output goes to tests/data/pole_oracle.json.
"""

import json
import sys
import time
from pathlib import Path

import mpmath as mp
import sympy as sp

mp.mp.dps = 25
R = 10

x, y, z, w, t = sp.symbols("x y z w t")
H = y**2 / 2 - 2 * x**3 - t * x
K = w**6 * z**2 / 8 - (4 + t * w**4 + w**5) * z / 4 + w**2 * (t + w) ** 2 / 8
fxy = [sp.lambdify((t, x, y), e, "mpmath") for e in (sp.diff(H, y), -sp.diff(H, x))]
fzw = [sp.lambdify((t, z, w), e, "mpmath") for e in (sp.diff(K, w), -sp.diff(K, z))]


def xy_to_zw(X, Y, T):
    W = -1 / mp.sqrt(X)  # sheet with bounded z while y > 0
    Z = 2 * (Y + 2 / W**3 + T * W / 2 + W**2 / 2) / W**3
    return Z, W


def zw_to_xy(Z, W, T):
    return 1 / W**2, -2 / W**3 - T * W / 2 - W**2 / 2 + Z * W**3 / 2


def run(t_end=10):
    T0, state, chart, poles = mp.mpf(0), (mp.mpf(0), mp.mpf(0)), "XY", []
    while T0 < t_end:
        f = fxy if chart == "XY" else fzw
        sol = mp.odefun(lambda tt, u, f=f: [f[0](tt, *u), f[1](tt, *u)], T0, list(state))
        # march on a grid until the window is left, then refine
        h = mp.mpf(1) / 200
        a = T0
        while True:
            b = min(a + h, t_end)
            u = sol(b)
            leave = (u[0] - R) if chart == "XY" else (u[1] ** 2 - mp.mpf(2) / R)
            if chart == "ZW":
                wa = sol(a)[1]
                if wa * u[1] < 0:
                    poles.append(mp.findroot(lambda s: sol(s)[1], (a, b), solver="anderson"))
            if leave > 0:
                g = (lambda s: sol(s)[0] - R) if chart == "XY" else (lambda s: sol(s)[1] ** 2 - mp.mpf(2) / R)
                ts = mp.findroot(g, (a, b), solver="anderson")
                u = sol(ts)
                state = xy_to_zw(u[0], u[1], ts) if chart == "XY" else zw_to_xy(u[0], u[1], ts)
                chart = "ZW" if chart == "XY" else "XY"
                T0 = ts
                break
            if b >= t_end:
                return poles
            a = b
    return poles


if __name__ == "__main__":
    start = time.time()
    poles = run()
    out = Path(__file__).resolve().parents[1] / "tests" / "data" / "pole_oracle.json"
    out.parent.mkdir(exist_ok=True)
    data = {"x0": 0, "y0": 0, "t_end": 10, "switch_radius": R, "digits": mp.mp.dps,
            "poles": [mp.nstr(p, 20) for p in poles]}
    out.write_text(json.dumps(data, indent=2) + "\n")
    print(json.dumps(data, indent=2), f"{time.time() - start:.1f}s", file=sys.stderr)
