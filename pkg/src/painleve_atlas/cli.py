"""Command-line front end.

Exit codes: 0 when every check passes, 1 on a check failure, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

from .symcore import ParseError, parse

SUITES = ("all", "atlas", "hamiltonian", "invariants", "blowup")

# defaults per subcommand; a --config file may override any of them
DEFAULTS = {
    "verify": {"suite": "all", "out": None, "seed": 0},
    "decompose": {"out": None},
    "integrate": {
        "t0": 0.0, "t1": 10.0, "x0": 0.0, "y0": 0.0, "rtol": 1e-10, "atol": 1e-12,
        "switch_radius": 10.0, "branch_policy": "continuous", "max_step": 0.05,
        "out": "trajectory.csv", "poles": "poles.json",
    },
    "blowup-audit": {"emit_dot": None, "emit_log": None},
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="painleve-atlas", description=__doc__.splitlines()[0])
    p.add_argument("--config", type=Path, help="JSON file with defaults for the subcommand")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run exact verification suites")
    v.add_argument("--suite", choices=SUITES)
    v.add_argument("--out", type=Path, help="write the JSON report here instead of stdout")
    v.add_argument("--seed", type=int, help="seed for the randomized suites")

    d = sub.add_parser("decompose", help="decompose a sigma-invariant (or tau-invariant) polynomial")
    d.add_argument("input", type=Path, help="file holding one expression; E and Delta may be used")
    d.add_argument("--out", type=Path)

    i = sub.add_parser("integrate", help="integrate Painleve I across poles")
    for name in ("t0", "t1", "x0", "y0", "rtol", "atol", "max_step"):
        i.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float)
    i.add_argument("--switch-radius", dest="switch_radius", type=float)
    i.add_argument("--branch-policy", dest="branch_policy", choices=("continuous", "fixed-plus", "fixed-minus"))
    i.add_argument("--out", type=Path, help="trajectory CSV")
    i.add_argument("--poles", type=Path, help="pole report JSON")

    b = sub.add_parser("blowup-audit", help="replay the construction and emit its log and curve graph")
    b.add_argument("--emit-dot", dest="emit_dot", type=Path)
    b.add_argument("--emit-log", dest="emit_log", type=Path)
    return p


def _load_config(path: Path, command: str) -> dict:
    try:
        text = path.read_text()
    except OSError as exc:
        raise UsageError(str(exc)) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError(f"config {path} must hold a JSON object")
    data = data.get(command, data)
    unknown = set(data) - set(DEFAULTS[command])
    if unknown:
        raise UsageError(f"unknown config keys for {command}: {sorted(unknown)}")
    return data


def resolve_options(args: argparse.Namespace) -> dict:
    opts = dict(DEFAULTS[args.command])
    if args.config is not None:
        opts.update(_load_config(args.config, args.command))
    for key in opts:
        val = getattr(args, key, None)
        if val is not None:
            opts[key] = val
    return opts


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# ---------------------------------------------------------------- commands


def run_suite(name: str, seed: int = 0):
    from .report import VerificationReport

    rep = VerificationReport()
    if name in ("all", "atlas"):
        from .atlas import check_atlas

        rep.extend(check_atlas())
    if name in ("all", "hamiltonian"):
        from .hamiltonian import check_hamiltonian

        rep.extend(check_hamiltonian())
    if name in ("all", "invariants"):
        from .invariant_solver import check_invariants

        rep.extend(check_invariants(seed=seed))
    if name in ("all", "blowup"):
        from .blowup_ledger import check_blowup

        rep.extend(check_blowup())
    return rep


def cmd_verify(opts: dict) -> int:
    if opts["suite"] not in SUITES:
        raise UsageError(f"unknown suite {opts['suite']!r}")
    rep = run_suite(opts["suite"], int(opts["seed"]))
    _emit(rep.to_json() + "\n", opts["out"])
    failed = [c for c in rep if not c.passed]
    print(f"{len(rep) - len(failed)}/{len(rep)} checks passed", file=sys.stderr)
    for c in failed:
        print(f"FAIL {c.check_id}: {c.witness}", file=sys.stderr)
    return 0 if not failed else 1


_MACROS = {
    "E": "(z*(xi^3*z - 2*t*xi^2 - 8))",
    "Delta": "(xi^3*z - t*xi^2 - 4)",
}


def _expand_macros(text: str) -> str:
    return re.sub(r"\b(E|Delta)\b", lambda m: _MACROS[m.group(1)], text)


def cmd_decompose(opts: dict, path: Path) -> int:
    from .invariant_solver import PARTICULAR, NotInvariantError, decompose, decompose_even, decompose_odd
    from .symcore import substitute

    try:
        text = path.read_text()
    except OSError as exc:
        raise UsageError(str(exc)) from None
    try:
        expr = parse(_expand_macros(text.strip()))
    except ParseError as exc:
        raise UsageError(f"{path}: {exc}") from None
    if not expr.is_polynomial():
        print(json.dumps({"error": "not a polynomial", "witness": str(expr.den)}), file=sys.stderr)
        return 1
    names = {v.name for v in expr.variables()}
    try:
        if "w" in names or "xi" not in names:
            result = decompose(expr)
        else:
            # a (z, xi) polynomial: tau-invariant or skew
            F = expr.as_polynomial()
            if substitute(F, PARTICULAR.tau) == -expr and not expr.is_zero():
                result = decompose_odd(F)
            else:
                result = decompose_even(F)
    except NotInvariantError as exc:
        print(json.dumps({"error": "not invariant", "witness": str(exc.witness)}), file=sys.stderr)
        return 1
    _emit(json.dumps(result.to_json(), indent=2) + "\n", opts["out"])
    return 0


def cmd_integrate(opts: dict) -> int:
    from .integrator import (
        IntegrationError, IntegratorConfig, detect_poles, integrate, poles_json, trajectory_csv,
    )

    try:
        cfg = IntegratorConfig(
            rtol=float(opts["rtol"]), atol=float(opts["atol"]), switch_radius=float(opts["switch_radius"]),
            branch_policy=opts["branch_policy"], max_step=float(opts["max_step"]),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    t0, t1 = float(opts["t0"]), float(opts["t1"])
    if t1 < t0:
        raise UsageError("--t1 must not be smaller than --t0")
    try:
        traj = integrate(t0, t1, float(opts["x0"]), float(opts["y0"]), cfg)
        poles = detect_poles(traj)
    except (IntegrationError, ValueError) as exc:
        print(f"integration failed: {exc}", file=sys.stderr)
        return 1
    Path(opts["out"]).write_text(trajectory_csv(traj))
    Path(opts["poles"]).write_text(poles_json(poles))
    print(f"{len(traj.samples)} samples, {len(traj.switches)} chart switches, {len(poles)} poles", file=sys.stderr)
    return 0


def cmd_blowup_audit(opts: dict) -> int:
    from .blowup_ledger import check_e8, curve_graph, log_to_json, run_construction, to_dot

    log = run_construction()
    graph = curve_graph(log)
    rep = log.report
    rep.extend(check_e8(graph))
    if opts["emit_log"] is not None:
        Path(opts["emit_log"]).write_text(log_to_json(log))
    if opts["emit_dot"] is not None:
        Path(opts["emit_dot"]).write_text(to_dot(graph))
    if opts["emit_log"] is None and opts["emit_dot"] is None:
        sys.stdout.write(to_dot(graph))
    failed = [c for c in rep if not c.passed]
    for c in failed:
        print(f"FAIL {c.check_id}: {c.witness}", file=sys.stderr)
    return 0 if not failed else 1


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        opts = resolve_options(args)
        if args.command == "verify":
            return cmd_verify(opts)
        if args.command == "decompose":
            return cmd_decompose(opts, args.input)
        if args.command == "integrate":
            return cmd_integrate(opts)
        return cmd_blowup_audit(opts)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
