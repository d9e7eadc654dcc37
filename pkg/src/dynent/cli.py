"""Command-line entry point: ``dynent <command> [options]``.

Every command prints a table (or JSON with ``--format json``), optionally
writes the JSON report to ``--out``, and exits with 0 when all internal
checks pass, 1 when a check or the solver fails, and 2 on bad input.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys

from . import __version__
from .channels import (BipartiteChannel, depolarizing_channel, identity_channel, mixture, random_channel,
                       random_separable_channel, swap_channel)
from .config import get_tolerances
from .measures.report import _jsonable
from .sdp import SolverError

COMMANDS = {
    "golden-units": "Robustness of swap channels against K^2 - 1, the closed-form value for unitaries "
                    "with unitary operator-Schmidt factors, the isotropic separability threshold 1/K "
                    "and the maximal overlap of PPT states with the maximally entangled state.",
    "robustness": "Standard and generalized (log-)robustness of a channel, smoothed over a diamond ball "
                  "when --eps > 0.",
    "cost-bounds": "One-shot entanglement cost under separability-preserving superchannels: smoothed "
                   "standard log-robustness as lower bound, the swap-measuring construction as witness "
                   "and the bound plus 2 as upper bound.",
    "distill-bounds": "One-shot distillable entanglement: the hypothesis-testing monotone at --eps and "
                      "twice --eps around the swap channel distilled by the test-and-prepare construction.",
    "catalysis": "Catalytic cost with a returned swap catalyst of dimension --l under superchannels that "
                 "may raise robustness by --delta.",
    "inequalities": "Fidelity/diamond transfer and diamond/Choi trace-norm sandwich on random channel pairs.",
    "monotonicity": "Robustness and hypothesis-testing monotone under sampled free superchannels, and "
                    "log-robustness growth under a superchannel that creates a little entanglement.",
    "twirl": "Twisted twirl: fixes the swap channel, is idempotent, and has a four-dimensional image.",
}

SUMMARIES = {
    "golden-units": "closed-form checks on swap channels and isotropic states",
    "robustness": "standard and generalized robustness of a channel",
    "cost-bounds": "entanglement cost bounds and the simulating superchannel",
    "distill-bounds": "distillable entanglement bounds and the distilling superchannel",
    "catalysis": "catalytic cost bounds with a swap catalyst",
    "inequalities": "distance inequalities on random channel pairs",
    "monotonicity": "monotonicity under sampled free superchannels",
    "twirl": "properties of the twisted twirl",
}

_NEEDS_CHANNEL = {"robustness", "cost-bounds", "distill-bounds", "catalysis"}


class BadInput(ValueError):
    pass


def _dims(text: str, count: int = 4) -> tuple:
    parts = [int(x) for x in re.split(r"[x,]", text) if x]
    if count == 4 and len(parts) == 2:
        parts = parts * 2
    if len(parts) != count or min(parts) < 1:
        raise BadInput(f"expected {count} positive dims, got {text!r}")
    return tuple(parts)


def parse_channel(spec: str) -> BipartiteChannel:
    """Builtin constructor spec or path to a channel JSON file.

    Builtins: ``swap:K`` (also ``swapK``), ``identity:AxB``,
    ``depolarizing:A0xB0xA1xB1:p``, ``random:dims:seed``,
    ``sep-random:dims:seed:terms`` and ``noisy-swap:K:p:seed``
    (``p F^K + (1 - p)`` a random separable channel).
    """
    m = re.fullmatch(r"swap:?(\d+)", spec)
    try:
        if m:
            return swap_channel(int(m.group(1)))
        head, _, rest = spec.partition(":")
        args = rest.split(":") if rest else []
        if head == "identity" and len(args) == 1:
            return identity_channel(*_dims(args[0], 2))
        if head == "depolarizing" and len(args) == 2:
            return depolarizing_channel(_dims(args[0]), float(args[1]))
        if head == "random" and len(args) == 2:
            return random_channel(_dims(args[0]), int(args[1]))
        if head == "sep-random" and len(args) == 3:
            return random_separable_channel(_dims(args[0]), int(args[1]), int(args[2]))
        if head == "noisy-swap" and len(args) == 3:
            k, p, seed = int(args[0]), float(args[1]), int(args[2])
            if not 0 <= p <= 1:
                raise BadInput(f"mixing weight must lie in [0, 1], got {p}")
            return mixture([swap_channel(k), random_separable_channel((k,) * 4, seed, 2)], [p, 1 - p])
    except BadInput:
        raise
    except (ValueError, TypeError) as exc:
        raise BadInput(f"bad channel spec {spec!r}: {exc}") from None
    if os.path.isfile(spec):
        try:
            with open(spec) as fh:
                return BipartiteChannel.from_json(fh.read())
        except (ValueError, KeyError, TypeError) as exc:
            raise BadInput(f"cannot read channel file {spec!r}: {exc}") from None
    raise BadInput(f"unknown channel spec {spec!r} (not a builtin and no such file)")


# -- commands -------------------------------------------------------------------------------
def _bound_rows(rep) -> list:
    rows = [("lower", rep.lower), ("realized", rep.realized), ("upper", rep.upper)]
    rows += [(f"check {k}", v) for k, v in rep.checks.items()]
    return rows


def cmd_golden_units(args):
    from .harness import golden_units
    res = golden_units(args.k or 3, tol=args.tol)
    rows = []
    for r in res["rows"]:
        k = r["k"]
        rows += [(f"R_s(F^{k})", r["standard_robustness"]), (f"R_g(F^{k})", r["generalized_robustness"]),
                 (f"closed form (F^{k})", r["nielsen_robustness"]),
                 (f"isotropic threshold K={k}", r["isotropic_threshold"]),
                 (f"PPT overlap with MES K={k}", r["mes_overlap_ppt"])]
    return res, rows, res["failures"]


def cmd_robustness(args, n):
    from .measures import smoothed_log_robustness
    out, rows = {}, []
    for kind in ("standard", "generalized"):
        rep = smoothed_log_robustness(n, args.eps, kind, tol=args.tol)
        out[kind] = rep.to_dict()
        lr = float(rep.value)
        rows += [(f"{kind} robustness", 2 ** lr - 1), (f"{kind} log-robustness", lr),
                 (f"{kind} bound kind", rep.bound_kind)]
    return out, rows, []


def cmd_cost_bounds(args, n):
    from .harness import cost_bound_harness
    rep = cost_bound_harness(n, args.eps, seed=args.seed, tol=args.tol)
    fails = [k for k, v in rep.checks.items() if not v]
    return rep.to_dict(), _bound_rows(rep) + [("K", rep.details["k"])], fails


def cmd_distill_bounds(args, n):
    from .harness import distill_bound_harness
    rep = distill_bound_harness(n, args.eps, seed=args.seed, tol=args.tol)
    d = rep.details
    rows = [("E_H at eps", d["e_h"]), ("K", d["k"]), ("stated lower", d["stated_lower"]),
            ("rigorous lower", d["rigorous_lower"]), ("stated lower holds", d["stated_lower_holds"])]
    rows += _bound_rows(rep)[1:]
    fails = [k for k, v in rep.checks.items() if not v]
    return rep.to_dict(), rows, fails


def cmd_catalysis(args, n):
    from .harness import catalytic_dilution
    _, rep = catalytic_dilution(n, args.l or 2, args.delta, args.eps, probes=args.samples, seed=args.seed,
                                tol=args.tol)
    d = rep.details
    rows = _bound_rows(rep) + [("K", d["k"]), ("r", d["r"]), ("miss robustness", d["miss_robustness"]),
                               ("miss bound 1/(l^2-1)", d["miss_bound"]), ("eps'", d["epsilon_prime"])]
    fails = [k for k, v in rep.checks.items() if not v]
    return rep.to_dict(), rows, fails


def cmd_inequalities(args):
    from .measures import inequality_suite
    res = inequality_suite(args.pairs, args.seed)
    rows = [(k, v) for k, v in res.items()]
    fails = [f"{res['violations']} violations"] if res["violations"] else []
    return res, rows, fails


def cmd_monotonicity(args):
    from .harness import monotonicity_suite
    res = monotonicity_suite(args.pairs, args.samples, args.seed, epsilon=args.eps or 0.05)
    rows = [(k, v) for k, v in res.items() if k != "failures"]
    return res, rows, res["failures"]


def cmd_twirl(args):
    from .harness import twirl_suite
    res = twirl_suite(args.k or 2, args.samples, args.seed)
    rows = [(k, v) for k, v in res.items() if k != "failures"]
    return res, rows, res["failures"]


HANDLERS = {
    "golden-units": cmd_golden_units, "robustness": cmd_robustness, "cost-bounds": cmd_cost_bounds,
    "distill-bounds": cmd_distill_bounds, "catalysis": cmd_catalysis, "inequalities": cmd_inequalities,
    "monotonicity": cmd_monotonicity, "twirl": cmd_twirl,
}


# -- plumbing -------------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dynent", description="Dynamic entanglement of bipartite channels.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name, text in COMMANDS.items():
        p = sub.add_parser(name, help=SUMMARIES[name], description=text)
        p.add_argument("--channel", help="builtin spec (swap:K, identity:AxB, depolarizing:dims:p, "
                                         "random:dims:seed, sep-random:dims:seed:terms, noisy-swap:K:p:seed) "
                                         "or a channel JSON file")
        p.add_argument("--eps", type=float, default=0.0, help="smoothing radius (default 0)")
        p.add_argument("--delta", type=float, default=1.0, help="allowed robustness growth (catalysis)")
        p.add_argument("--k", type=int, help="swap dimension")
        p.add_argument("--l", type=int, help="catalyst swap dimension")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, help="solver tolerance")
        p.add_argument("--pairs", type=int, default=100, help="random channels or channel pairs")
        p.add_argument("--samples", type=int, default=20, help="random probes or superchannels")
        p.add_argument("--out", help="write the JSON report here")
        p.add_argument("--format", choices=("json", "table"), default="table")
    return parser


def _validate(args):
    if args.command in _NEEDS_CHANNEL and not args.channel:
        raise BadInput(f"{args.command} needs --channel")
    if args.eps < 0 or args.eps > 1:
        raise BadInput("--eps must lie in [0, 1]")
    if args.delta <= 0:
        raise BadInput("--delta must be positive")
    for name in ("k", "l"):
        v = getattr(args, name)
        if v is not None and v < 2:
            raise BadInput(f"--{name} must be at least 2")
    if args.pairs < 1 or args.samples < 0:
        raise BadInput("--pairs must be positive and --samples nonnegative")
    if args.tol is not None and not 0 < args.tol < 1:
        raise BadInput("--tol must lie in (0, 1)")


def _format_value(v) -> str:
    if isinstance(v, float):
        return "inf" if math.isinf(v) else f"{v:.6g}"
    return str(v)


def render_table(rows) -> str:
    width = max((len(str(k)) for k, _ in rows), default=0)
    return "\n".join(f"{str(k).ljust(width)}  {_format_value(v)}" for k, v in rows)


def _emit(payload: dict, rows, args) -> None:
    text = json.dumps(_jsonable(payload), sort_keys=True, indent=2)
    if args is not None and args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    if args is None or args.format == "json":
        print(text)
    else:
        print(render_table(rows))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t = get_tolerances()
    payload = {"command": args.command, "version": __version__,
               "settings": {"channel": args.channel, "epsilon": args.eps, "delta": args.delta, "k": args.k,
                            "l": args.l, "seed": args.seed, "pairs": args.pairs, "samples": args.samples,
                            "solver_tol": args.tol if args.tol is not None else t.solver,
                            "solver_max_iter": t.max_iter}}
    try:
        _validate(args)
        handler = HANDLERS[args.command]
        if args.command in _NEEDS_CHANNEL:
            result, rows, failures = handler(args, parse_channel(args.channel))
        else:
            result, rows, failures = handler(args)
    except BadInput as exc:
        payload.update(status="bad-input", error=str(exc))
        _emit(payload, [("status", "bad-input"), ("error", str(exc))], args)
        return 2
    except (SolverError, RuntimeError, ValueError) as exc:
        payload.update(status="fail", error=f"{type(exc).__name__}: {exc}")
        _emit(payload, [("status", "fail"), ("error", str(exc))], args)
        return 1
    payload.update(status="ok" if not failures else "fail", failures=list(failures), result=result)
    rows = list(rows) + [("status", payload["status"])] + [("failure", f) for f in failures]
    _emit(payload, rows, args)
    return 0 if not failures else 1


if __name__ == "__main__":
    sys.exit(main())
