"""Command-line entry point.

Exit codes: 0 on success, 1 on usage errors, 2 when processing fails (for
example an unreadable input file or a circuit past the simulator limits).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

from dyncirc import bench, pcm, qasm, qcp, randgen, sim
from dyncirc.catalog import bv_reuse
from dyncirc.circuit import Circuit, compile_shot, count_dynamic_ops

log = logging.getLogger("dyncirc")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


# -- io helpers ------------------------------------------------------------
def _read_circuit(path: str) -> Circuit:
    try:
        data = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise RuntimeError(f"cannot read {path}: {exc.strerror}") from exc
    if path.endswith(".json") or data.lstrip().startswith("{"):
        return qasm.from_json(json.loads(data))
    return qasm.parse(data)


def _render_circuit(circuit: Circuit, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(qasm.to_json(circuit), indent=2) + "\n"
    return qasm.serialize(circuit)


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise RuntimeError(f"cannot write {out}: {exc.strerror}") from exc


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _pass_config(args, n_pcm: int | None = None) -> pcm.PassConfig:
    try:
        return pcm.PassConfig(
            n_pcm=args.n_pcm if n_pcm is None else n_pcm,
            n_max=args.n_max,
            mode=args.mode,
            reset_soundness=args.reset_soundness,
            seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _report_csv(report: pcm.PassReport) -> str:
    cols = ["index", "kind", "qubit", "fired", "reason", "state_size", "group_size",
            "introduced_gates"]
    lines = [",".join(cols)]
    for d in report.decisions:
        row = [getattr(d, c) for c in cols]
        lines.append(",".join("" if v is None else str(v).lower() if isinstance(v, bool)
                              else str(v) for v in row))
    return "\n".join(lines) + "\n"


def _report_dict(report: pcm.PassReport, before: Circuit, after: Circuit) -> dict:
    b, a = count_dynamic_ops(before), count_dynamic_ops(after)
    return {
        **report.to_dict(),
        "before": b._asdict(),
        "after": a._asdict(),
    }


# -- subcommands -----------------------------------------------------------
def cmd_optimize(args) -> None:
    circuit = _read_circuit(args.input)
    out, report = pcm.run_pass(circuit, _pass_config(args))
    log.info("removed %d measurements, %d resets", report.removed_measurements,
             report.removed_resets)
    _emit(_render_circuit(out, args.format), args.output)
    if args.report_file or args.report:
        text = (_report_csv(report) if args.report == "csv"
                else _dump(_report_dict(report, circuit, out)))
        if args.report_file:
            _emit(text, args.report_file)
        else:
            sys.stderr.write(text)


def cmd_analyze(args) -> None:
    circuit = _read_circuit(args.input)
    _pass_config(args)
    result = qcp.run(circuit, args.n_max, args.reset_soundness)
    _emit(_dump(result.to_dict()), args.output)


def cmd_simulate(args) -> None:
    circuit = _read_circuit(args.input)
    if args.shots is not None:
        if args.shots < 1:
            raise UsageError("--shots must be positive")
        dist = sim.sample(circuit, args.shots, args.seed)
        payload = {"method": "sample", "shots": args.shots, "seed": args.seed,
                   "distribution": dist}
    else:
        payload = {"method": "enumerate", "distribution": sim.distribution(circuit)}
    _emit(_dump(payload), args.output)


def cmd_gen(args) -> None:
    if args.count < 1:
        raise UsageError("--count must be at least 1")
    out_dir = Path(args.output or ".")
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise RuntimeError(f"cannot create {out_dir}: {exc.strerror}") from exc
    kwargs = dict(
        n_qubits=args.n_qubits,
        depth=args.depth,
        meas_density=args.meas_density,
        cond_density=args.cond_density,
        reset_density=args.reset_density,
    )
    suite = randgen.generate_suite(args.scale, args.count, args.seed, **kwargs)
    ext = ".json" if args.format == "json" else ".dqasm"
    entries = []
    for i, c in enumerate(suite):
        name = f"circuit_{i:03d}{ext}"
        _emit(_render_circuit(c, args.format), str(out_dir / name))
        counts = count_dynamic_ops(c)
        entries.append({"file": name, "n_qubits": c.n_qubits, "n_clbits": c.n_clbits,
                        "instructions": len(c), **counts._asdict()})
    manifest = {"scale": args.scale, "count": args.count, "seed": args.seed, **kwargs,
                "circuits": entries}
    _emit(_dump(manifest), str(out_dir / "manifest.json"))


def cmd_bench(args) -> None:
    if args.count < 1:
        raise UsageError("--count must be at least 1")
    if any(s < 1 for s in args.scales) or any(n < 1 for n in args.n_pcm_list):
        raise UsageError("scales and n_pcm values must be positive")
    cfg = _pass_config(args, n_pcm=1)
    rows, aggs = bench.run_bench(args.scales, args.n_pcm_list, args.count, args.seed, cfg,
                                 jobs=args.jobs)
    if args.format == "csv":
        text = bench.rows_to_csv(aggs + rows)
    else:
        text = _dump(bench.rows_to_json(rows, aggs))
    _emit(text, args.output)


def cmd_demo_bv(args) -> None:
    secret = args.secret
    if not secret or set(secret) - {"0", "1"}:
        raise UsageError("secret must be a non-empty bitstring")
    before = bv_reuse(secret)
    start = time.perf_counter()
    after, report = pcm.run_pass(before, _pass_config(args, n_pcm=1))
    elapsed = time.perf_counter() - start
    left = count_dynamic_ops(after)
    _, presets = compile_shot(after, args.seed)
    recovered = "".join(str(presets.get(i, "?")) for i in range(len(secret)))
    if left.measurements or left.resets:
        raise RuntimeError(f"dynamic operations remain: {left}")
    if recovered != secret:
        raise RuntimeError(f"presets {recovered} do not match secret {secret}")
    payload = {
        "secret": secret,
        "presets": recovered,
        "pass_time_s": elapsed,
        "before": qasm.serialize(before),
        "after": qasm.serialize(after),
        "report": _report_dict(report, before, after),
    }
    if args.format == "json":
        _emit(_dump(payload), args.output)
    else:
        text = (f"// secret {secret}, recovered {recovered}\n// before\n{payload['before']}"
                f"// after\n{payload['after']}")
        _emit(text, args.output)


# -- parser ----------------------------------------------------------------
def _common(p: argparse.ArgumentParser, *, pass_flags: bool = True) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default=None, help="output path (default stdout)")
    if pass_flags:
        p.add_argument("--n-pcm", type=int, default=1)
        p.add_argument("--n-max", type=int, default=5)
        p.add_argument("--mode", choices=["conservative", "faithful"], default="conservative")
        p.add_argument("--reset-soundness", choices=["strict", "paper"], default="strict",
                       help="strict: propagate a reset only when its output is pure")
        p.add_argument("--paper-faithful-reset", dest="reset_soundness", action="store_const",
                       const="paper", help="alias for --reset-soundness paper")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dyncirc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    p = sub.add_parser("optimize", help="remove measurements and resets")
    p.add_argument("input", help=".dqasm or IR JSON file, '-' for stdin")
    _common(p)
    p.add_argument("--format", choices=["dqasm", "json"], default="dqasm")
    p.add_argument("--report", choices=["json", "csv"], default=None)
    p.add_argument("--report-file", default=None)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("analyze", help="dump constant-propagation states as JSON")
    p.add_argument("input")
    _common(p)
    p.add_argument("--format", choices=["json"], default="json")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="outcome distribution as JSON")
    p.add_argument("input")
    _common(p, pass_flags=False)
    p.add_argument("--format", choices=["json"], default="json")
    how = p.add_mutually_exclusive_group()
    how.add_argument("--shots", type=int, default=None)
    how.add_argument("--enumerate", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gen", help="write a random suite plus manifest.json")
    _common(p, pass_flags=False)
    p.add_argument("--format", choices=["dqasm", "json"], default="dqasm")
    p.add_argument("--scale", type=int, default=1)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--n-qubits", type=int, default=None)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--meas-density", type=float, default=0.05)
    p.add_argument("--cond-density", type=float, default=0.5)
    p.add_argument("--reset-density", type=float, default=0.03)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="sweep scales and n_pcm over generated suites")
    _common(p)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--scales", type=int, nargs="+", default=[1])
    p.add_argument("--n-pcm-list", type=int, nargs="+", default=[1, 2, 4, 8, 16])
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("demo-bv", help="Bernstein-Vazirani with qubit reuse")
    p.add_argument("secret", nargs="?", default="111111")
    _common(p)
    p.add_argument("--format", choices=["dqasm", "json"], default="dqasm")
    p.set_defaults(func=cmd_demo_bv)
    return parser


def main(argv: list[str] | None = None) -> int:
    level = os.environ.get("DYNCIRC_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (qasm.ParseError, ValueError, RuntimeError, KeyError, TypeError,
            json.JSONDecodeError) as exc:
        sys.stderr.write(f"dyncirc: error: {exc}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
