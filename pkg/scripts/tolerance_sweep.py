"""Pole-position error against the eighth-order reference run, for adaptive
tolerances and for fixed step sizes."""

import math

from painleve_atlas.integrator import IntegratorConfig, detect_poles, integrate, reference_config


def pole_error(cfg, ref):
    poles = detect_poles(integrate(0.0, 10.0, 0.0, 0.0, cfg))
    if len(poles) != len(ref):
        return math.inf
    return max(abs(p.t0 - q) for p, q in zip(poles, ref))


def main():
    ref = [p.t0 for p in detect_poles(integrate(0.0, 10.0, 0.0, 0.0, reference_config()))]
    print("adaptive RK45")
    for k in range(6, 13):
        rtol = 10.0**-k
        print(f"  rtol 1e-{k:<3d} error {pole_error(IntegratorConfig(rtol=rtol, atol=rtol * 1e-2), ref):.3e}")
    print("fixed steps")
    prev = None
    for h in (0.02, 0.01, 0.005, 0.0025):
        err = pole_error(IntegratorConfig(rtol=1e3, atol=1e3, max_step=h, first_step=h), ref)
        order = "" if prev is None else f"  observed order {math.log2(prev / err):.2f}"
        print(f"  h {h:<7g} error {err:.3e}{order}")
        prev = err


if __name__ == "__main__":
    main()
