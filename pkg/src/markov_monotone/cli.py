"""Command-line entry point.

Exit codes: 0 ok, 1 verification failure, 2 usage or validation error,
3 chain not irreducible, 4 monotonicity conditions violated.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .chain import chain_from_dict, load_chain, read_json, require_ergodic
from .errors import ConditionsViolated, MarkovError, NotIrreducible, ValidationError
from .harness import TrialConfig, run_suite
from .hitting import expected_hitting_times, expected_return_time, hitting_residual
from .montecarlo import simulate_return_time
from .perturbation import (
    ElementaryPerturbation,
    apply_elementary,
    check_theorem_conditions,
    decompose,
)
from .sensitivity import (
    CouplingSpec,
    coupled_derivative_direct,
    fd_feasible,
    finite_difference_check,
)
from .stationary import stationary_linear, stationary_power, stationary_via_return_time

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_REDUCIBLE, EXIT_CONDITIONS = 0, 1, 2, 3, 4


def _round(obj, digits: int):
    if isinstance(obj, (float, np.floating)):
        return float(f"{float(obj):.{digits}g}")
    if isinstance(obj, dict):
        return {k: _round(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v, digits) for v in obj]
    if isinstance(obj, np.ndarray):
        return _round(obj.tolist(), digits)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _fmt(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, float):
        return f"{x:.6g}"
    if isinstance(x, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    return str(x)


class Output:
    """Collects a result document and prints it as JSON or as plain tables."""

    def __init__(self, as_json: bool):
        self.as_json = as_json

    def emit(self, doc: dict, render):
        if self.as_json:
            print(json.dumps(_round(doc, 12), sort_keys=True, allow_nan=False))
        else:
            for line in render(_round(doc, 6)):
                print(line)


def _table(header, rows) -> list[str]:
    cells = [[str(h) for h in header]] + [[_fmt(v) for v in r] for r in rows]
    widths = [max(len(r[k]) for r in cells) for k in range(len(header))]
    return ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]


# --- analyze -----------------------------------------------------------------

def cmd_analyze(args, out: Output) -> int:
    P = load_chain(args.chain)
    report = P.structure
    doc: dict = {"n": P.n, "labels": list(P.labels) if P.labels else None, "structure": report.to_dict()}
    require_ergodic(P)
    pi = stationary_linear(P)
    doc["stationary"] = {
        "linear": pi.tolist(),
        "power": stationary_power(P).tolist() if report.aperiodic else None,
        "return_time": [stationary_via_return_time(P, s) for s in range(P.n)],
    }
    if args.s0 is not None:
        s0 = P.check_state(args.s0)
        prof = expected_hitting_times(P, s0)
        doc["hitting"] = prof.to_dict()
        doc["hitting"]["residual"] = hitting_residual(P, prof)
        doc["reciprocity_residual"] = abs(pi[s0] * prof.return_time - 1.0)

    def render(d):
        st = d["structure"]
        lines = [
            f"states: {d['n']}",
            f"irreducible: {st['irreducible']}  period: {st['period']}  aperiodic: {st['aperiodic']}",
            "",
        ]
        sd = d["stationary"]
        rows = [
            (s, sd["linear"][s], sd["power"][s] if sd["power"] else None, sd["return_time"][s])
            for s in range(d["n"])
        ]
        lines += _table(("state", "pi_linear", "pi_power", "1/return_time"), rows)
        if "hitting" in d:
            h = d["hitting"]
            lines += [
                "",
                f"target s0 = {h['target']}: return time = {_fmt(h['return_time'])}",
                f"hitting times: {_fmt(h['hit'])}",
                f"system residual: {_fmt(h['residual'])}",
                f"|pi(s0) * return_time - 1| = {_fmt(d['reciprocity_residual'])}",
            ]
        return lines

    out.emit(doc, render)
    return EXIT_OK


# --- sensitivity -------------------------------------------------------------

def cmd_sensitivity(args, out: Output) -> int:
    P = load_chain(args.chain)
    spec = CouplingSpec(args.s0, args.donor).check(P)
    require_ergodic(P)
    mu = expected_return_time(P, spec.target)
    d_mu = coupled_derivative_direct(P, spec).d_mu
    fd = [finite_difference_check(P, spec, i) if fd_feasible(P, spec, i) else None for i in range(P.n)]
    doc = {
        "target": spec.target,
        "donor": spec.donor,
        "return_time": mu,
        "d_mu": d_mu.tolist(),
        "fd": fd,
        "d_pi": (-d_mu / mu**2).tolist(),
        "all_negative": bool(np.all(d_mu < 0)),
    }

    def render(d):
        lines = [f"target {d['target']}, donor {d['donor']}, return time {_fmt(d['return_time'])}", ""]
        rows = [(i, d["d_mu"][i], d["fd"][i], d["d_pi"][i]) for i in range(len(d["d_mu"]))]
        lines += _table(("row", "d_mu", "finite_diff", "d_pi"), rows)
        lines += ["", f"all d_mu negative: {d['all_negative']}"]
        return lines

    out.emit(doc, render)
    return EXIT_OK


# --- perturb -----------------------------------------------------------------

def _pi_at(P, s0):
    return float(stationary_linear(P)[s0]) if P.structure.irreducible else None


def cmd_perturb(args, out: Output) -> int:
    P = load_chain(args.chain)
    second = read_json(args.second)
    if isinstance(second, dict) and "matrix" in second:
        return _perturb_pair(P, chain_from_dict(second), args.s0, out)
    if isinstance(second, dict) and "c" in second:
        return _perturb_elementary(P, ElementaryPerturbation.from_dict(second), args.s0, out)
    raise ValidationError(f'{args.second}: expected a chain ("matrix") or a perturbation ("c")')


def _perturb_elementary(P, pert, s0, out) -> int:
    if s0 is not None and s0 != pert.target:
        raise ValidationError(f"--s0 {s0} disagrees with perturbation target {pert.target}")
    s0 = pert.target
    require_ergodic(P)
    P2 = apply_elementary(P, pert)
    require_ergodic(P2)
    before, after = _pi_at(P, s0), _pi_at(P2, s0)
    doc = {
        "mode": "elementary",
        "s0": s0,
        "donor": pert.donor,
        "strict": pert.is_strict(),
        "pi_before": before,
        "pi_after": after,
        "gap": after - before,
        "matrix": P2.entries.tolist(),
    }

    def render(d):
        return [
            f"elementary move into {d['s0']} from donor {d['donor']} (strict: {d['strict']})",
            f"pi(s0) before: {_fmt(d['pi_before'])}",
            f"pi(s0) after:  {_fmt(d['pi_after'])}",
            f"gap: {_fmt(d['gap'])}",
        ]

    out.emit(doc, render)
    return EXIT_OK


def _perturb_pair(P, P2, s0, out) -> int:
    if s0 is None:
        raise ValidationError("--s0 is required when comparing two chains")
    s0 = P.check_state(s0)
    cond = check_theorem_conditions(P, P2, s0)
    if not cond.holds:
        out.emit(
            {"mode": "pair", "s0": s0, "conditions": cond.to_dict()},
            lambda d: ["conditions violated at (row, column, p, p'):"]
            + [f"  {_fmt(v)}" for v in d["conditions"]["violations"]],
        )
        return EXIT_CONDITIONS
    require_ergodic(P)
    require_ergodic(P2)
    steps = []
    current = P
    for pert in decompose(P, P2, s0):
        current = apply_elementary(current, pert)
        steps.append({
            "donor": pert.donor,
            "c": pert.c.tolist(),
            "irreducible": current.structure.irreducible,
            "pi_s0": _pi_at(current, s0),
        })
    before, after = _pi_at(P, s0), _pi_at(P2, s0)
    doc = {
        "mode": "pair",
        "s0": s0,
        "conditions": cond.to_dict(),
        "steps": steps,
        "pi_before": before,
        "pi_after": after,
        "gap": after - before,
    }

    def render(d):
        c = d["conditions"]
        lines = [f"conditions hold, {'strict' if c['strict'] else 'not strict'}, gap = {_fmt(d['gap'])}"]
        lines.append(f"pi(s0) start: {_fmt(d['pi_before'])}")
        for k, st in enumerate(d["steps"]):
            pi = _fmt(st["pi_s0"]) if st["irreducible"] else "reducible"
            lines.append(f"step {k + 1} (donor {st['donor']}): pi(s0) = {pi}")
        lines.append(f"pi(s0) end:   {_fmt(d['pi_after'])}")
        return lines

    out.emit(doc, render)
    return EXIT_OK


# --- verify ------------------------------------------------------------------

def cmd_verify(args, out: Output) -> int:
    config = TrialConfig(
        trials=args.trials,
        n_min=args.n_min,
        n_max=args.n_max,
        min_entry=args.min_entry,
        seed=args.seed,
    )
    report = run_suite(config)

    def render(d):
        lines = [
            f"trials: {d['trials']}",
            f"failures: {len(d['failures'])}",
            f"min gap pi'(s0) - pi(s0): {_fmt(d['min_gap'])}",
            "PASS" if d["pass"] else "FAIL",
        ]
        for f in d["failures"]:
            lines.append(f"  trial {f['trial']['index']}: {f['property']} {json.dumps(f['observed'])}")
        return lines

    out.emit(report.to_dict(), render)
    return EXIT_OK if report.passed else EXIT_VERIFY


# --- simulate ----------------------------------------------------------------

def cmd_simulate(args, out: Output) -> int:
    P = load_chain(args.chain)
    s0 = P.check_state(args.s0)
    est = simulate_return_time(P, s0, args.trajectories, args.seed)
    exact = expected_return_time(P, s0)
    doc = {"s0": s0, **est.to_dict(), "exact": exact, "z": est.z_score(exact)}

    def render(d):
        return [
            f"simulated return time to {d['s0']}: {_fmt(d['mean'])} +/- {_fmt(d['std_error'])} ({d['samples']} trajectories, seed {d['seed']})",
            f"exact: {_fmt(d['exact'])}",
            f"z-score: {_fmt(d['z'])}",
        ]

    out.emit(doc, render)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="markov-monotone",
        description="Exact analysis of finite Markov chains and monotonicity of invariant probabilities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit one JSON document on stdout")

    p = sub.add_parser("analyze", parents=[common], help="structure, stationary distribution, hitting times")
    p.add_argument("chain")
    p.add_argument("--s0", type=int)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sensitivity", parents=[common], help="return-time derivatives for a donor->target move")
    p.add_argument("chain")
    p.add_argument("--s0", type=int, required=True)
    p.add_argument("--donor", type=int, required=True)
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("perturb", parents=[common], help="apply a perturbation or compare two chains")
    p.add_argument("chain")
    p.add_argument("second", help="perturbation JSON or a second chain JSON")
    p.add_argument("--s0", type=int)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("verify", parents=[common], help="randomised verification suite")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--min-entry", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo return time")
    p.add_argument("chain")
    p.add_argument("--s0", type=int, required=True)
    p.add_argument("-n", "--trajectories", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = Output(args.json)
    try:
        return args.func(args, out)
    except NotIrreducible as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REDUCIBLE
    except ConditionsViolated as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONDITIONS
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MarkovError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
