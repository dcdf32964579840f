"""Command-line interface.

Sizes given to ``count``, ``enumerate`` and ``densities`` are natural sizes
(every constructor weighs one).  ``sample --min/--max`` are unit sizes, where
``s`` and ``l`` weigh one, ``a`` two and the leaf ``0`` nothing.

Exit codes: 0 success, 2 sampler ran out of attempts, 3 bad arguments,
4 unparsable term.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from typing import Optional, Sequence

from . import _backend
from .analytic import (NF, PLAIN, PUBLISHED_CONSTANTS, NoSolutionError, TuningResult, dominant_singularity,
                       solve_for_target)
from .enumerator import TermClass, count, count_sequence, density_table, enumerate_terms, enumerate_typed
from .parallel import ParallelConfig, first_solution
from .sampler import NFMode, SampleClass, SamplerConfig, SamplerExhausted, load_thresholds, sample
from .simple_types import display_type, infer_type
from .terms import ParseError, parse_term, print_term

EXIT_OK = 0
EXIT_EXHAUSTED = 2
EXIT_USAGE = 3
EXIT_PARSE = 4

CLASS_NAMES = [c.value for c in TermClass]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage errors with our exit code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _nonneg(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"{v} is negative")
    return v


def _positive(text):
    v = _nonneg(text)
    if v == 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="lambdagen",
        description="Count, enumerate and sample simply-typed de Bruijn lambda terms.",
        epilog="count/enumerate/densities take natural sizes (each constructor weighs 1); "
               "sample --min/--max take unit sizes (s, l weigh 1, a weighs 2, 0 weighs 0).",
    )
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    c = sub.add_parser("count", help="exact number of terms of a natural size")
    c.add_argument("--class", dest="cls", required=True, choices=CLASS_NAMES)
    c.add_argument("--size", type=_nonneg, required=True, help="natural size")
    c.add_argument("--upto", action="store_true", help="print counts for sizes 0..SIZE, comma separated")

    e = sub.add_parser("enumerate", help="list all terms of a natural size in generation order")
    e.add_argument("--class", dest="cls", required=True, choices=CLASS_NAMES)
    e.add_argument("--size", type=_nonneg, required=True, help="natural size")
    e.add_argument("--with-types", action="store_true", help="append ':TYPE' (typable classes)")

    d = sub.add_parser("densities", help="typable counts and plain/typable ratios per size")
    d.add_argument("--upto", type=_positive, required=True, help="largest natural size")
    d.add_argument("--format", choices=("csv", "text"), default="csv")

    t = sub.add_parser("tune", help="calibrate the Boltzmann parameter for an expected size")
    t.add_argument("--class", dest="cls", required=True, choices=(PLAIN, NF))
    t.add_argument("--target-size", type=float, default=120.0, help="expected natural size")
    t.add_argument("--tolerance", type=float, default=1e-6)
    t.add_argument("--emit", choices=("config",), help="write sampler thresholds as key=value lines")
    t.add_argument("--output", help="file for --emit (default: stdout)")

    s = sub.add_parser("sample", help="draw a random closed simply-typed term")
    s.add_argument("--class", dest="cls", default="typed", choices=[c.value for c in SampleClass])
    s.add_argument("--min", type=_nonneg, help="minimum unit size (typed 120, typed-nf 60)")
    s.add_argument("--max", type=_nonneg, help="maximum unit size (typed 150, typed-nf 80)")
    s.add_argument("--max-steps", type=_positive, help="attempt budget per worker (10000000)")
    s.add_argument("--seed", type=_nonneg, default=0)
    s.add_argument("--nf-mode", choices=[m.value for m in NFMode], default=NFMode.FAITHFUL.value)
    s.add_argument("--threads", type=_nonneg, help="race this many workers; 0 uses every CPU")
    s.add_argument("--config", help="thresholds file written by 'tune --emit config'")
    s.add_argument("--json", action="store_true")

    i = sub.add_parser("infer", help="principal type of a closed term")
    i.add_argument("term")
    i.add_argument("--open", action="store_true", help="give free indices fresh types")

    sub.add_parser("selftest", help="check published counts, table rows and sampler constants")
    return p


def _out(line: str = "") -> None:
    sys.stdout.write(line + "\n")


def cmd_count(args) -> int:
    cls = TermClass(args.cls)
    if args.upto:
        _out(",".join(str(v) for v in count_sequence(cls, args.size)))
    else:
        _out(str(count(cls, args.size)))
    return EXIT_OK


def cmd_enumerate(args) -> int:
    cls = TermClass(args.cls)
    if args.with_types and not cls.typed:
        raise UsageError(f"--with-types needs a typable class, not {cls.value}")
    if args.size == 0:
        return EXIT_OK
    units = args.size - 1
    if args.with_types:
        for t, ty in enumerate_typed(cls, units):
            _out(f"{print_term(t)}:{display_type(ty)}")
    else:
        for t in enumerate_terms(cls, units):
            _out(print_term(t))
    return EXIT_OK


def cmd_densities(args) -> int:
    rows = density_table(args.upto)
    header = ["size", "A", "B", "C", "D", "E"]
    if args.format == "csv":
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow(r.formatted())
    else:
        table = [header] + [r.formatted() for r in rows]
        widths = [max(len(row[j]) for row in table) for j in range(len(header))]
        for row in table:
            _out("  ".join(cell.rjust(wd) for cell, wd in zip(row, widths)))
    return EXIT_OK


def config_lines(res: TuningResult) -> list[str]:
    th = res.thresholds
    if res.cls == PLAIN:
        pairs = [("boltzmann_index", th.index), ("boltzmann_lambda", th.abstraction),
                 ("boltzmann_leaf", th.leaf)]
    else:
        pairs = [("boltzmann_nf_lambda", th.abstraction), ("boltzmann_nf_index", th.neutral_index),
                 ("boltzmann_nf_leaf", th.leaf)]
    return [f"{k}={v!r}" for k, v in pairs]


def cmd_tune(args) -> int:
    try:
        res = solve_for_target(args.cls, args.target_size, args.tolerance)
    except NoSolutionError as exc:
        raise UsageError(str(exc)) from None
    if args.emit == "config":
        lines = [f"# class={res.cls} target={res.target!r} x={res.x!r}"] + config_lines(res)
        text = "\n".join(lines) + "\n"
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    _out(f"class={res.cls}")
    _out(f"x={res.x!r}")
    _out(f"rho={res.rho!r}")
    _out(f"expected_size={res.expected_size!r}")
    _out(f"std_dev={res.std_dev!r}")
    for line in config_lines(res):
        _out(line)
    return EXIT_OK


def cmd_sample(args) -> int:
    cls = SampleClass(args.cls)
    thresholds = None
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                thresholds = load_thresholds(fh.read(), cls)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot use config {args.config}: {exc}") from None
    try:
        config = SamplerConfig(cls, args.min, args.max, args.max_steps, args.seed,
                               NFMode(args.nf_mode), thresholds)
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    winner = elapsed_ms = None
    try:
        if args.threads is None:
            res = sample(config)
        else:
            pres = first_solution(ParallelConfig(config, args.threads))
            res, winner, elapsed_ms = pres.result, pres.winner, pres.elapsed * 1000.0
    except SamplerExhausted as exc:
        sys.stderr.write(f"lambdagen: {exc}\n")
        return EXIT_EXHAUSTED

    if args.json:
        doc = {
            "class": cls.value,
            "min_units": config.min_units,
            "max_units": config.max_units,
            "term": print_term(res.term),
            "type": res.type,
            "natural_size": res.natural_size,
            "steps": res.steps,
            "seed": res.seed,
        }
        if winner is not None:
            doc["winner"] = winner
            doc["elapsed_ms"] = elapsed_ms
        _out(json.dumps(doc))
    else:
        _out(f"term={print_term(res.term)}")
        _out(f"type={res.type}")
        _out(f"natural_size={res.natural_size}")
        _out(f"steps={res.steps}")
        _out(f"seed={res.seed}")
        if winner is not None:
            _out(f"winner={winner}")
            _out(f"elapsed_ms={elapsed_ms:.3f}")
    return EXIT_OK


def cmd_infer(args) -> int:
    try:
        t = parse_term(args.term)
    except ParseError as exc:
        sys.stderr.write(f"lambdagen: {exc}\n")
        return EXIT_PARSE
    ty = infer_type(t, open_term=args.open)
    if ty is None:
        _out("untypable")
        return EXIT_OK
    _out(display_type(ty))
    return EXIT_OK


# published values checked by selftest
GOLDEN_COUNTS = {
    TermClass.CLOSED_TYPABLE: [0, 0, 1, 1, 2, 5, 13, 27, 74, 198, 508, 1371, 3809, 10477, 29116, 82419, 233748],
    TermClass.PLAIN_TYPABLE: [0, 1, 2, 3, 8, 17, 42, 106, 287, 747, 2069, 5732, 16012, 45283, 129232, 370761,
                              1069972],
    TermClass.CLOSED_TYPABLE_NF: [0, 0, 1, 1, 2, 3, 7, 11, 25, 52, 110, 241, 537, 1219, 2767, 6439, 14945, 35253,
                                  83214],
    TermClass.PLAIN_NF: [0, 1, 2, 4, 8, 17, 38, 89, 216, 539, 1374, 3562, 9360, 24871, 66706, 180340, 490912],
}
GOLDEN_ROWS = {
    5: ["5", "5", "4.400", "3", "5.666", "0.776"],
    10: ["10", "508", "6.988", "110", "12.490", "0.559"],
    15: ["15", "82419", "10.568", "6439", "28.007", "0.377"],
}


def selftest_items():
    """Yield ``(name, ok, detail)`` for every golden check."""
    for cls, expected in GOLDEN_COUNTS.items():
        got = count_sequence(cls, len(expected) - 1)
        yield f"counts {cls.value} 0..{len(expected) - 1}", got == expected, ""
    rows = {r.size: r.formatted() for r in density_table(15, start=5) if r.size in GOLDEN_ROWS}
    for size, expected in GOLDEN_ROWS.items():
        yield f"density row {size}", rows[size] == expected, ",".join(rows[size])
    plain = solve_for_target(PLAIN, 120.0)
    nf = solve_for_target(NF, 120.0)
    checks = [
        ("x_plain", plain.x, PUBLISHED_CONSTANTS["x_plain"], 1e-10),
        ("boltzmann_index", plain.thresholds.index, PUBLISHED_CONSTANTS["boltzmann_index"], 1e-12),
        ("boltzmann_lambda", plain.thresholds.abstraction, PUBLISHED_CONSTANTS["boltzmann_lambda"], 1e-12),
        ("boltzmann_leaf", plain.thresholds.leaf, PUBLISHED_CONSTANTS["boltzmann_leaf"], 1e-12),
        ("boltzmann_nf_lambda", nf.x, PUBLISHED_CONSTANTS["boltzmann_nf_lambda"], 1e-12),
        ("boltzmann_nf_index", nf.thresholds.neutral_index, PUBLISHED_CONSTANTS["boltzmann_nf_index"], 1e-12),
        ("boltzmann_nf_leaf", nf.thresholds.leaf, PUBLISHED_CONSTANTS["boltzmann_nf_leaf"], 1e-12),
        ("rho_plain", dominant_singularity(PLAIN), 0.29560, 1e-4),
        ("rho_nf", dominant_singularity(NF), 1.0 / 3.0, 1e-9),
    ]
    for name, got, want, tol in checks:
        yield f"constant {name}", abs(got - want) <= tol, f"{got!r} vs {want!r}"


def cmd_selftest(args) -> int:
    failures = 0
    for name, ok, detail in selftest_items():
        failures += not ok
        _out(f"{'PASS' if ok else 'FAIL'} {name}" + (f" ({detail})" if detail else ""))
    _out(f"backend={_backend.backend_name()} failures={failures}")
    return EXIT_OK if failures == 0 else 1


COMMANDS = {
    "count": cmd_count,
    "enumerate": cmd_enumerate,
    "densities": cmd_densities,
    "tune": cmd_tune,
    "sample": cmd_sample,
    "infer": cmd_infer,
    "selftest": cmd_selftest,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"lambdagen: error: {exc}\n")
        return EXIT_USAGE
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
