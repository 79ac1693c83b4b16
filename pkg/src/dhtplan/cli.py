"""Command-line surface.

Subcommands: plan, table, inspect, sfl, select, oc, simulate.

Output is key=value lines by default; ``--format csv`` and ``--format
jsonl`` switch to machine formats.  Exit codes are a stable contract:
0 success/accept, 1 usage or parse error, 2 solver/computation failure,
3 reject verdict, 4 inconclusive.
"""

import argparse
import json
import os
import sys
import types

from .errors import (DhtError, DomainError, NoConvergenceError,
                     NoRecommendationError, StateError)
from .fuzzy_selector import FuzzyRuleBase, SelectorInput, infer
from .inspection_engine import ACCEPTED, REJECTED, InspectionState, build_ladder, observe
from .plan_solvers import TestSpec, solve
from .run_limits import SflQuery, mean_recurrence, sfl_r
from .verification import accept_probability, monte_carlo_accept

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_COMPUTE = 2
EXIT_REJECT = 3
EXIT_INCONCLUSIVE = 4

_METHOD_FLAGS = {"bin": "Bin", "poiss": "Poiss", "norm-n": "Norm_N", "norm-i": "Norm_I"}


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "%.8g" % v
    return str(v)


class _Emitter:
    """Writes records in one of the three output formats."""

    def __init__(self, fmt, schema, out):
        self.fmt = fmt
        self.schema = schema
        self.out = out
        self._csv_header_done = False

    def record(self, fields):
        if self.fmt == "jsonl":
            self.out.write(json.dumps(fields) + "\n")
        elif self.fmt == "csv":
            if not self._csv_header_done:
                self.out.write("# %s.v1\n" % self.schema)
                self.out.write(",".join(fields) + "\n")
                self._csv_header_done = True
            self.out.write(",".join(_fmt(v) for v in fields.values()) + "\n")
        else:
            self.out.write(" ".join("%s=%s" % (k, _fmt(v))
                                    for k, v in fields.items()) + "\n")


def _spec_from_args(args):
    return TestSpec(p0=args.p0, p1=args.p1, alpha_tail=args.alpha,
                    beta_tail=args.beta, epsilon=args.eps, max_n=args.max_n,
                    paper_compat_z=(args.z_mode == "paper"))


def _plan_fields(plan):
    return {
        "method": plan.method,
        "n": plan.n,
        "c": plan.c,
        "t_h": plan.t_h,
        "np0": plan.np0,
        "iterations": plan.iterations,
        "converged": plan.converged,
        "np0_gt5": plan.applicability.np0_gt5,
        "nq0_gt5": plan.applicability.nq0_gt5,
        "p_lt_0.1": plan.applicability.p_lt_0_1,
    }


def cmd_plan(args, out, err):
    try:
        spec = _spec_from_args(args)
    except DomainError as exc:
        err.write("error: %s\n" % exc)
        return EXIT_USAGE
    try:
        plan = solve(spec, _METHOD_FLAGS[args.method])
    except NoConvergenceError as exc:
        err.write("no convergence: %s" % exc)
        if exc.best_gap is not None:
            err.write(" (best gap %.8g)" % exc.best_gap)
        err.write("\n")
        return EXIT_COMPUTE
    except DhtError as exc:
        err.write("error: %s\n" % exc)
        return EXIT_COMPUTE
    _Emitter(args.format, "dhtplan.plan", out).record(_plan_fields(plan))
    return EXIT_OK


def cmd_table(args, out, err):
    if args.step <= 0.0:
        err.write("error: --step must be positive\n")
        return EXIT_USAGE
    levels = [round(args.step * i, 12) for i in range(args.rows + 1)]
    if levels[-1] >= 0.5:
        err.write("error: %d rows at step %g exceed the 0.5 rate ceiling\n"
                  % (args.rows, args.step))
        return EXIT_USAGE
    try:
        ladder = build_ladder(levels, alpha_tail=args.alpha, beta_tail=args.beta,
                              method=_METHOD_FLAGS[args.method], ex=args.ex,
                              epsilon=args.eps,
                              first_method=_METHOD_FLAGS[args.first_method]
                              if args.first_method else None,
                              paper_compat_z=(args.z_mode == "paper"))
    except DhtError as exc:
        err.write("error: %s\n" % exc)
        return EXIT_COMPUTE
    emit = _Emitter(args.format, "dhtplan.table", out)
    for plan, r in zip(ladder.plans, ladder.run_limits):
        emit.record({"n": plan.n, "c": plan.c, "t_h": plan.t_h, "r": r})
    return EXIT_OK


def _read_outcomes(source):
    """Yield (line_number, outcome) from 0/1 tokens, one per line."""
    for i, line in enumerate(source, start=1):
        tok = line.strip()
        if not tok:
            continue
        if tok not in ("0", "1"):
            raise DomainError("malformed token %r at line %d" % (tok, i))
        yield int(tok)


def cmd_inspect(args, out, err):
    try:
        levels = [float(x) for x in args.levels.split(",")]
    except ValueError:
        err.write("error: --levels must be a comma-separated list of rates\n")
        return EXIT_USAGE
    try:
        ladder = build_ladder(levels, alpha_tail=args.alpha, beta_tail=args.beta,
                              method=_METHOD_FLAGS[args.method], ex=args.ex,
                              epsilon=args.eps,
                              first_method=_METHOD_FLAGS[args.first_method]
                              if args.first_method else None,
                              paper_compat_z=(args.z_mode == "paper"))
    except DhtError as exc:
        err.write("error: %s\n" % exc)
        return EXIT_COMPUTE

    emit = _Emitter(args.format, "dhtplan.events", out)
    state = InspectionState()
    close_me = None
    if args.input == "-":
        source = sys.stdin
    else:
        close_me = source = open(args.input)
    try:
        for value in _read_outcomes(source):
            prior = len(state.events)
            try:
                state, _ = observe(state, ladder, value)
            except StateError:
                break
            for e in state.events[prior:]:
                emit.record({"trial": e.trial, "outcome": e.outcome,
                             "level": e.level, "failures": e.failures,
                             "run": e.run, "transition": e.transition})
            if state.terminal:
                break
    except DomainError as exc:
        err.write("error: %s\n" % exc)
        return EXIT_USAGE
    finally:
        if close_me is not None:
            close_me.close()

    verdict = _Emitter(args.format, "dhtplan.verdict", out)
    if state.status == ACCEPTED:
        verdict.record({"status": "accepted", "level": state.accepted_level,
                        "t_h": state.accepted_t_h, "trials": state.trials,
                        "failures": state.failures})
        return EXIT_OK
    if state.status == REJECTED:
        verdict.record({"status": "rejected_beyond_last",
                        "level": state.level_index, "trials": state.trials,
                        "failures": state.failures})
        return EXIT_REJECT
    verdict.record({"status": "inconclusive", "level": state.level_index,
                    "trials": state.trials, "failures": state.failures})
    return EXIT_INCONCLUSIVE


def cmd_sfl(args, out, err):
    try:
        raw, r = sfl_r(SflQuery(p=args.p, ex=args.ex))
    except DomainError as exc:
        err.write("error: %s\n" % exc)
        return EXIT_COMPUTE
    _Emitter(args.format, "dhtplan.sfl", out).record(
        {"p": args.p, "ex": args.ex, "r_raw": raw, "r": r,
         "mean_recurrence": mean_recurrence(args.p, r)})
    return EXIT_OK


def cmd_select(args, out, err):
    base = FuzzyRuleBase() if args.fuzzy_config is None else \
        FuzzyRuleBase.load(args.fuzzy_config)
    inp = SelectorInput(step=args.step, t_h=args.th, t_exec=args.texec,
                        prec_abs=args.prec)
    try:
        score, label, firings = infer(inp, base)
    except NoRecommendationError as exc:
        err.write("no recommendation: %s\n" % exc)
        return EXIT_COMPUTE
    fields = {"score": score, "label": label}
    for idx, s in firings:
        fields["rule_%d" % idx] = s
    _Emitter(args.format, "dhtplan.select", out).record(fields)
    return EXIT_OK


def _parse_grid(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise DomainError("grid must be start:stop:step")
    start, stop, step = (float(x) for x in parts)
    if step <= 0 or stop < start:
        raise DomainError("grid must advance from start to stop")
    pts = []
    k = 0
    while True:
        p = start + k * step
        if p > stop + 1e-12:
            break
        pts.append(min(p, stop))
        k += 1
    return pts


def cmd_oc(args, out, err):
    try:
        grid = _parse_grid(args.grid)
    except DomainError as exc:
        err.write("error: %s\n" % exc)
        return EXIT_USAGE
    if args.c < 1 or args.c > args.n:
        err.write("error: need 1 <= c <= n\n")
        return EXIT_USAGE
    emit = _Emitter("csv" if args.format == "kv" else args.format,
                    "dhtplan.oc", out)
    for p in grid:
        emit.record({"p": p, "accept_prob": accept_probability(args.n, args.c, p)})
    return EXIT_OK


def cmd_simulate(args, out, err):
    plan = types.SimpleNamespace(n=args.n, c=args.c)
    try:
        rate, hw = monte_carlo_accept(plan, args.p, args.reps, args.seed)
    except DomainError as exc:
        err.write("error: %s\n" % exc)
        return EXIT_COMPUTE
    _Emitter(args.format, "dhtplan.simulate", out).record(
        {"n": args.n, "c": args.c, "p": args.p, "reps": args.reps,
         "seed": args.seed, "rate": rate, "half_width": hw})
    return EXIT_OK


def _add_spec_flags(p):
    p.add_argument("--p0", type=float, required=True)
    p.add_argument("--p1", type=float, required=True)
    _add_tail_flags(p)


def _add_tail_flags(p):
    p.add_argument("--alpha", type=float, default=0.05,
                   help="producer-risk tail mass (default 0.05)")
    p.add_argument("--beta", type=float, default=0.05,
                   help="consumer-risk tail mass (default 0.05)")
    p.add_argument("--eps", type=float, default=None,
                   help="solver tolerance (method default when omitted)")
    p.add_argument("--max-n", type=int, default=200_000)
    p.add_argument("--z-mode", choices=("paper", "exact"), default="paper",
                   help="paper: use the 1.64 constant at tail 0.05")


def _add_ladder_flags(p):
    p.add_argument("--method", choices=sorted(_METHOD_FLAGS), default="norm-i")
    p.add_argument("--first-method", choices=sorted(_METHOD_FLAGS), default=None,
                   help="method for the first level pair (default bin when "
                        "the ladder starts at 0)")
    p.add_argument("--ex", type=float, default=1e6,
                   help="run-limit recurrence horizon")


def build_parser():
    ap = argparse.ArgumentParser(prog="dhtplan")
    ap.add_argument("--format", choices=("kv", "csv", "jsonl"), default="kv")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="compute one sampling plan")
    _add_spec_flags(p)
    p.add_argument("--method", choices=sorted(_METHOD_FLAGS), required=True)
    p.set_defaults(fn=cmd_plan)

    p = sub.add_parser("table", help="emit ladder rows (n, c, t_h, r)")
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--rows", type=int, default=8)
    _add_tail_flags(p)
    _add_ladder_flags(p)
    p.set_defaults(fn=cmd_table)

    p = sub.add_parser("inspect", help="run a 0/1 outcome stream through a ladder")
    p.add_argument("--levels", required=True,
                   help="comma-separated increasing rates, e.g. 0,0.03,0.06")
    p.add_argument("--input", default="-", help="token file, or - for stdin")
    _add_tail_flags(p)
    _add_ladder_flags(p)
    p.set_defaults(fn=cmd_inspect)

    p = sub.add_parser("sfl", help="successive-failures limit")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--ex", type=float, default=1e6)
    p.set_defaults(fn=cmd_sfl)

    p = sub.add_parser("select", help="fuzzy method recommendation")
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--th", type=float, required=True)
    p.add_argument("--texec", type=float, required=True)
    p.add_argument("--prec", type=float, required=True)
    p.add_argument("--fuzzy-config", default=None)
    p.set_defaults(fn=cmd_select)

    p = sub.add_parser("oc", help="operating-characteristic curve as CSV")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--grid", default="0:1:0.05", help="start:stop:step")
    p.set_defaults(fn=cmd_oc)

    p = sub.add_parser("simulate", help="Monte Carlo acceptance rate")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--reps", type=int, default=100_000)
    p.add_argument("--seed", type=int,
                   default=int(os.environ.get("DHTPLAN_SEED", "0")))
    p.set_defaults(fn=cmd_simulate)

    return ap


def main(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    return args.fn(args, out, err)


if __name__ == "__main__":
    sys.exit(main())
