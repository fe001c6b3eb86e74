"""Command-line front end.

    pgclc check  --mode {l,u,b} --budget N [--backend B] [--init "x=0,y=1"]
                 [--json] [--no-prune] [--dump-gensets DIR] [--oracle-check]
                 PROGRAM FORMULA
    pgclc refine --mode {l,u,b} --budget N PROGRAM_A PROGRAM_B
    pgclc trace  [--init ...] PROGRAM

Exit codes of ``check``: 0 holds, 10 unknown (never "fails": the procedures
are semi-decisions), 1 usage or parse error, 2 unsupported formula,
3 oracle disagreement.  ``refine`` exits 0 when the bounded refinement
holds and 10 when it does not.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .backend import make_backend, parse_assignment
from .bigstep import det_outcomes
from .errors import BudgetExceeded, ParseError, PgclError, UnsupportedFormula
from .extension import Engine, order_leq
from .logic import Holds, check_fragment, format_formula, parse_formula, semi_decide
from .smallstep import Config, trace_lines
from .syntax import parse_source

EXIT_HOLDS = 0
EXIT_USAGE = 1
EXIT_UNSUPPORTED = 2
EXIT_ORACLE = 3
EXIT_UNKNOWN = 10

ORACLE_MAX_DEPTH = 8


@dataclass
class RunConfig:
    mode: str = "b"
    budget: int = 10
    backend: str | None = None  # inferred from the program header when None
    init: dict = field(default_factory=dict)
    output: str = "text"
    max_genset: int = 200_000
    max_states: int = 100_000
    time_ms: int | None = None
    no_prune: bool = False
    dump_gensets: str | None = None
    oracle_check: bool = False
    gates: str | None = None

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be at least 1")
        if self.max_genset < 1 or self.max_states < 1 or (self.time_ms is not None and self.time_ms < 1):
            raise ValueError("caps must be positive")


class UsageError(PgclError):
    pass


def _load_program(path: str, cfg: RunConfig):
    text = Path(path).read_bytes()
    gates = None
    gate_arity = None
    if cfg.gates:
        from .quantum import GATE_LIBRARY, load_gates

        gates = load_gates(cfg.gates)
        gate_arity = {name: m.shape[0].bit_length() - 1 for name, m in GATE_LIBRARY.items()}
        gate_arity.update({name: g.arity for name, g in gates.items()})
    try:
        src = parse_source(text, gate_arity=gate_arity)
    except ParseError as e:
        e.path = path
        raise
    kind = src.header.kind
    if cfg.backend is not None and cfg.backend != kind:
        raise UsageError(f"{path}: header declares a {kind} program, not {cfg.backend}")
    options = {"gates": gates} if kind == "quantum" and gates else {}
    backend = make_backend(src.header, **options)
    state = backend.initial_state(cfg.init)
    return src, backend, Config(src.program, state)


def _load_formula(arg: str, header):
    if os.path.isfile(arg):
        text = Path(arg).read_text(encoding="utf-8")
        origin = arg
    else:
        text, origin = arg, "<formula>"
    try:
        return parse_formula(text, header)
    except ParseError as e:
        e.path = origin
        raise


def _deadline(cfg: RunConfig):
    ms = cfg.time_ms
    if ms is None and os.environ.get("PGCLC_TIME_MS"):
        ms = int(os.environ["PGCLC_TIME_MS"])
    return None if ms is None else time.monotonic() + ms / 1000


def run_check(program_path: str, formula_path: str, cfg: RunConfig) -> dict:
    """Run the semi-decision procedure and build a JSON-ready report."""
    src, backend, config = _load_program(program_path, cfg)
    phi = _load_formula(formula_path, src.header)
    check_fragment(phi, cfg.mode)
    engine = Engine(backend, prune=not cfg.no_prune, max_genset=cfg.max_genset,
                    max_states=cfg.max_states, deadline=_deadline(cfg))
    depths = []
    dump_dir = Path(cfg.dump_gensets) if cfg.dump_gensets else None
    if dump_dir:
        dump_dir.mkdir(parents=True, exist_ok=True)
    clock = [time.perf_counter()]

    def on_level(n, F):
        now = time.perf_counter()
        st = engine.stats.get((config, n))
        raw = st.raw if st else len(F)
        depths.append({"n": n, "genset_raw": raw, "genset_pruned": len(F),
                       "time_ms": round((now - clock[0]) * 1000, 3)})
        clock[0] = now
        if dump_dir:
            payload = {"depth": n, "raw": raw, "pruned": len(F),
                       "members": F.to_json(backend.state_json)}
            (dump_dir / f"F_{n}.json").write_text(json.dumps(payload, indent=1))

    verdict = semi_decide(config, phi, cfg.mode, cfg.budget, backend,
                          engine=engine, on_level=on_level)
    report = {
        "tool": "pgclc",
        "version": __version__,
        "command": "check",
        "program": program_path,
        "formula": format_formula(phi),
        "mode": cfg.mode,
        "backend": src.header.kind,
        "budget": cfg.budget,
        "prune": not cfg.no_prune,
        "verdict": _verdict_json(verdict),
        "depths": depths,
        "oracle": None,
    }
    if cfg.oracle_check:
        report["oracle"] = _oracle_check(config, backend, cfg, verdict)
    return report


def _verdict_json(v) -> dict:
    if isinstance(v, Holds):
        return {"status": "holds", "depth": v.witness_depth, "reason": None}
    return {"status": "unknown", "depth": v.budget_exhausted_at, "reason": v.reason}


def _oracle_check(config, backend, cfg: RunConfig, verdict) -> dict:
    """Compare the unpruned generating sets with deterministic-scheduler outcomes."""
    top = verdict.witness_depth if isinstance(verdict, Holds) else verdict.budget_exhausted_at
    top = max(1, min(top, cfg.budget, ORACLE_MAX_DEPTH))
    literal = Engine(backend, prune=False, max_genset=cfg.max_genset)
    checked, bad = [], []
    note = None
    for n in range(1, top + 1):
        try:
            agree = literal.gen_set(config, n).members == det_outcomes(
                config, n, backend, cap=cfg.max_genset)
        except BudgetExceeded as e:
            note = f"stopped at depth {n}: {e}"
            break
        checked.append(n)
        if not agree:
            bad.append(n)
    out = {"depths_checked": checked, "agree": not bad, "disagreements": bad}
    if note:
        out["note"] = note
    return out


def run_refine(path_a: str, path_b: str, cfg: RunConfig) -> dict:
    src_a, backend, cfg_a = _load_program(path_a, cfg)
    src_b = parse_source(Path(path_b).read_bytes())
    if src_b.header != src_a.header:
        raise UsageError("refinement needs both programs to share a header")
    engine = Engine(backend, prune=not cfg.no_prune, max_genset=cfg.max_genset,
                    max_states=cfg.max_states, deadline=_deadline(cfg))
    cfg_b = Config(src_b.program, cfg_a.state)
    result = order_leq(engine.gen_set(cfg_a, cfg.budget),
                       engine.gen_set(cfg_b, cfg.budget), cfg.mode)
    return {
        "tool": "pgclc",
        "version": __version__,
        "command": "refine",
        "program_a": path_a,
        "program_b": path_b,
        "mode": cfg.mode,
        "backend": src_a.header.kind,
        "budget": cfg.budget,
        "refines": result,
        "approximation": "depth-bounded",
    }


def render_text(report: dict) -> str:
    if report["command"] == "refine":
        verb = "refines" if report["refines"] else "does not refine"
        return (f"{report['program_a']} {verb} {report['program_b']} "
                f"(mode {report['mode']}, depth-bounded at {report['budget']})")
    v = report["verdict"]
    lines = [f"formula: {report['formula']}  (mode {report['mode']}, "
             f"{report['backend']}, budget {report['budget']})"]
    for d in report["depths"]:
        lines.append(f"  n={d['n']:<3} |F| {d['genset_raw']:>6} -> {d['genset_pruned']:<6} "
                     f"{d['time_ms']:.1f} ms")
    if v["status"] == "holds":
        lines.append(f"HOLDS at depth {v['depth']}")
    else:
        why = f": {v['reason']}" if v["reason"] else ""
        lines.append(f"UNKNOWN after depth {v['depth']}{why}")
    o = report.get("oracle")
    if o is not None:
        state = "agrees" if o["agree"] else f"DISAGREES at {o['disagreements']}"
        lines.append(f"oracle {state} on depths {o['depths_checked']}")
        if o.get("note"):
            lines.append(f"  ({o['note']})")
    return "\n".join(lines)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--mode", choices=["l", "u", "b"], default="b")
    p.add_argument("--budget", type=int, default=10)
    p.add_argument("--backend", choices=["classical", "quantum"])
    p.add_argument("--init", default="", help='initial assignment, e.g. "x=0,y=1"')
    p.add_argument("--json", action="store_true")
    p.add_argument("--no-prune", action="store_true")
    p.add_argument("--gates", help="JSON file with custom gate matrices")
    p.add_argument("--max-genset", type=int, default=200_000)
    p.add_argument("--max-states", type=int, default=100_000)
    p.add_argument("--time-ms", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pgclc", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"pgclc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    check = sub.add_parser("check", help="semi-decide a may/must formula")
    _common(check)
    check.add_argument("--dump-gensets", metavar="DIR")
    check.add_argument("--oracle-check", action="store_true")
    check.add_argument("program")
    check.add_argument("formula", help="formula file, or the formula text itself")
    refine = sub.add_parser("refine", help="bounded refinement check A <= B")
    _common(refine)
    refine.add_argument("program_a")
    refine.add_argument("program_b")
    trace = sub.add_parser("trace", help="print the one-step transitions of a program")
    trace.add_argument("--init", default="")
    trace.add_argument("--gates")
    trace.add_argument("program")
    return parser


def _config(args) -> RunConfig:
    return RunConfig(
        mode=getattr(args, "mode", "b"),
        budget=getattr(args, "budget", 1),
        backend=getattr(args, "backend", None),
        init=parse_assignment(args.init),
        output="json" if getattr(args, "json", False) else "text",
        max_genset=getattr(args, "max_genset", 200_000),
        max_states=getattr(args, "max_states", 100_000),
        time_ms=getattr(args, "time_ms", None),
        no_prune=getattr(args, "no_prune", False),
        dump_gensets=getattr(args, "dump_gensets", None),
        oracle_check=getattr(args, "oracle_check", False),
        gates=getattr(args, "gates", None),
    )


def _format_error(e: ParseError) -> str:
    where = getattr(e, "path", "<input>")
    if e.span is not None:
        return f"{where}: bytes {e.span.start}..{e.span.end}: {e.message}"
    return f"{where}: {e.message}"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        if args.command == "trace":
            _, backend, config = _load_program(args.program, cfg)
            print("\n".join(trace_lines(config, backend)))
            return 0
        if args.command == "check":
            report = run_check(args.program, args.formula, cfg)
            code = EXIT_HOLDS if report["verdict"]["status"] == "holds" else EXIT_UNKNOWN
            if report["oracle"] is not None and not report["oracle"]["agree"]:
                code = EXIT_ORACLE
        else:
            report = run_refine(args.program_a, args.program_b, cfg)
            code = EXIT_HOLDS if report["refines"] else EXIT_UNKNOWN
    except ParseError as e:
        print(f"error: {_format_error(e)}", file=sys.stderr)
        return EXIT_USAGE
    except UnsupportedFormula as e:
        print(f"unsupported formula: {e}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (PgclError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.output == "json":
        print(json.dumps(report, indent=2))
    else:
        print(render_text(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
