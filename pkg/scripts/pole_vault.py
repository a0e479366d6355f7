"""Integrate Painleve I from rest through its first poles and report each crossing."""

import argparse

from painleve_atlas.integrator import IntegratorConfig, detect_poles, integrate, structure_monitor


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t1", type=float, default=10.0)
    ap.add_argument("--rtol", type=float, default=1e-10)
    ap.add_argument("--branch-policy", default="continuous")
    args = ap.parse_args()

    cfg = IntegratorConfig(rtol=args.rtol, branch_policy=args.branch_policy)
    traj = integrate(0.0, args.t1, 0.0, 0.0, cfg)
    mon = structure_monitor(traj)
    print(f"{len(traj.samples)} samples, {len(traj.switches)} chart switches")
    print(f"{'t0':>22} {'z at pole':>14} {'dw/dt':>10} {'laurent':>10}")
    for p in detect_poles(traj):
        print(f"{p.t0:22.15f} {p.z_at_pole:14.6e} {p.dwdt:10.6f} {p.laurent_residual:10.2e}")
    print(f"energy defect {mon.max_energy_defect:.2e} (unscaled {max(mon.energy_defect_abs):.2e}), "
          f"switch residual {mon.max_switch_residual:.2e}")


if __name__ == "__main__":
    main()
