"""Command-line harness wiring the suites into reproducible, machine-readable runs.

One process, one command per run.  Exit codes: 0 all gated checks pass,
1 gated failure, 2 configuration error.  Outputs land in --out-dir as CSV or
JSON; CSV output is byte-identical across reruns with the same config and
seed (runtimes only appear in JSON).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import family as fm
from . import suites, wigner
from .reporting import (
    OutputRecord,
    read_sweep_csv,
    write_records_csv,
    write_records_json,
    write_sweep_csv,
    write_sweep_json,
)

COMMANDS = ("verify-basis", "verify-wigner", "verify-geometry", "sweep", "report")

DEFAULT_BUDGETS = {"triples": fm.TRIPLE_CAP_DEFAULT, "paths": 10_000_000, "nodes": 20_000}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    k_lo: int = 7
    k_hi: int = 11
    alphas: tuple[float, ...] = (0.25, 0.5, 0.75)
    moments: tuple[int, ...] = (2, 4)
    tolerances: dict = field(default_factory=dict)
    budgets: dict = field(default_factory=lambda: dict(DEFAULT_BUDGETS))
    threads: int = 1
    seed: int = 0
    out_dir: str = "out"
    fmt: str = "csv"
    in_path: str | None = None
    delta: float = 0.05
    dump_threej: int | None = None

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}; choose from {COMMANDS}")
        if not (fm.MIN_K <= self.k_lo <= self.k_hi <= fm.MAX_K):
            raise ConfigError(f"k range must satisfy {fm.MIN_K} <= lo <= hi <= {fm.MAX_K}")
        if not self.alphas or any(not 0.0 < a < 1.0 for a in self.alphas):
            raise ConfigError("alpha values must lie in (0, 1)")
        if any(m < 2 or m % 2 for m in self.moments):
            raise ConfigError("moments must be even integers >= 2")
        if any(t <= 0 for t in self.tolerances.values()):
            raise ConfigError("tolerances must be positive")
        unknown = set(self.budgets) - set(DEFAULT_BUDGETS)
        if unknown:
            raise ConfigError(f"unknown budgets {sorted(unknown)}")
        if any(b <= 0 for b in self.budgets.values()):
            raise ConfigError("budgets must be positive")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.fmt not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if self.delta <= 0:
            raise ConfigError("delta must be positive")
        if self.command == "report" and not self.in_path:
            raise ConfigError("report needs --in <sweep.csv>")


def _parse_k_range(text: str) -> tuple[int, int]:
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return int(lo), int(hi)
        k = int(text)
        return k, k
    except ValueError as err:
        raise ConfigError(f"bad k range {text!r}; use e.g. 7..11") from err


def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError as err:
        raise ConfigError(f"bad float list {text!r}") from err


def _parse_ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as err:
        raise ConfigError(f"bad integer list {text!r}") from err


def _split_dotted(argv: list[str]) -> tuple[list[str], dict, dict]:
    """Pull --tol.<key> and --budget.<name> pairs out of the raw argv."""
    rest: list[str] = []
    tols: dict[str, float] = {}
    budgets: dict[str, int] = {}
    i = 0
    while i < len(argv):
        arg = argv[i]
        matched = False
        for prefix, store, cast in (("--tol.", tols, float), ("--budget.", budgets, int)):
            if arg.startswith(prefix):
                if "=" in arg:
                    key, _, val = arg[len(prefix):].partition("=")
                else:
                    key = arg[len(prefix):]
                    i += 1
                    if i >= len(argv):
                        raise ConfigError(f"flag {arg} needs a value")
                    val = argv[i]
                try:
                    store[key] = cast(val)
                except ValueError as err:
                    raise ConfigError(f"bad value {val!r} for {arg}") from err
                matched = True
                break
        if not matched:
            rest.append(arg)
        i += 1
    return rest, tols, budgets


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minkdeficit",
        description="Verify the zonal-harmonic, 3j, and sphere-graph machinery and "
                    "sweep the Minkowski-deficit construction family.",
    )
    parser.add_argument("positional_command", nargs="?", choices=COMMANDS,
                        metavar="command", help="one of %(choices)s")
    parser.add_argument("--command", choices=COMMANDS, help="alternative to the positional form")
    parser.add_argument("--config", help="JSON config file; explicit flags win")
    parser.add_argument("--k", help="k range for sweeps, e.g. 7..11 or a single k")
    parser.add_argument("--alpha", help="comma-separated alpha list in (0,1)")
    parser.add_argument("--moments", help="comma-separated even Laplacian moments, default 2,4")
    parser.add_argument("--threads", type=int, help="row-level parallelism for sweeps")
    parser.add_argument("--seed", type=int, help="seed for the randomized property suites")
    parser.add_argument("--out-dir", help="output directory (default ./out)")
    parser.add_argument("--format", choices=("csv", "json"), dest="fmt")
    parser.add_argument("--in", dest="in_path", help="sweep CSV consumed by the report command")
    parser.add_argument("--delta", type=float,
                        help="slack in the scaled-3j lower-bound check (default 0.05)")
    parser.add_argument("--dump-threej", type=int, metavar="L",
                        help="with verify-wigner: dump exact 3j rows for degrees <= L")
    return parser


def parse_config(argv: list[str]) -> RunConfig:
    rest, tols, budget_flags = _split_dotted(argv)
    args = _build_parser().parse_args(rest)

    settings: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError(f"cannot read config file: {err}") from err
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
        known = {"command", "k", "alpha", "moments", "tol", "budget", "threads",
                 "seed", "out_dir", "format", "in", "delta", "dump_threej"}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        settings.update(raw)

    command = args.command or args.positional_command or settings.get("command")
    if not command:
        raise ConfigError("no command given; use e.g. 'minkdeficit verify-wigner'")

    k_text = args.k or settings.get("k")
    if isinstance(k_text, (list, tuple)):
        k_lo, k_hi = int(k_text[0]), int(k_text[-1])
    elif k_text is not None:
        k_lo, k_hi = _parse_k_range(str(k_text))
    else:
        k_lo, k_hi = 7, 11

    alpha_val = args.alpha or settings.get("alpha")
    if isinstance(alpha_val, (list, tuple)):
        alphas = tuple(float(a) for a in alpha_val)
    elif alpha_val is not None:
        alphas = _parse_floats(str(alpha_val))
    else:
        alphas = (0.25, 0.5, 0.75)

    moment_val = args.moments or settings.get("moments")
    if isinstance(moment_val, (list, tuple)):
        moments = tuple(int(m) for m in moment_val)
    elif moment_val is not None:
        moments = _parse_ints(str(moment_val))
    else:
        moments = (2, 4)

    tolerances = dict(settings.get("tol", {}))
    tolerances.update(tols)
    budgets = dict(DEFAULT_BUDGETS)
    budgets.update(settings.get("budget", {}))
    budgets.update(budget_flags)

    config = RunConfig(
        command=command,
        k_lo=k_lo,
        k_hi=k_hi,
        alphas=alphas,
        moments=moments,
        tolerances=tolerances,
        budgets=budgets,
        threads=args.threads if args.threads is not None else int(settings.get("threads", 1)),
        seed=args.seed if args.seed is not None else int(settings.get("seed", 0)),
        out_dir=args.out_dir or settings.get("out_dir", "out"),
        fmt=args.fmt or settings.get("format", "csv"),
        in_path=args.in_path or settings.get("in"),
        delta=args.delta if args.delta is not None else float(settings.get("delta", 0.05)),
        dump_threej=(args.dump_threej if args.dump_threej is not None
                     else settings.get("dump_threej")),
    )
    config.validate()
    return config


def _print_records(records: list[OutputRecord]) -> None:
    for rec in records:
        if rec.status == "info":
            print(f"[{rec.suite}] {rec.check_id}: INFO  {rec.measured}  {rec.expected}")
        else:
            print(f"[{rec.suite}] {rec.check_id}: {rec.status.upper()}  "
                  f"measured={rec.measured}  expected={rec.expected}")


def run(config: RunConfig) -> int:
    config.validate()
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    rows = None
    if config.command == "verify-basis":
        records = suites.verify_basis(config.tolerances, config.seed)
    elif config.command == "verify-wigner":
        records = suites.verify_wigner(config.tolerances, config.seed,
                                       path_budget=config.budgets["paths"],
                                       delta=config.delta)
        if config.dump_threej is not None:
            dump = out_dir / "threej_table.csv"
            count = wigner.write_threej_csv(dump, max_degree=config.dump_threej)
            records.append(OutputRecord("wigner", "threej-table-dump", "info",
                                        f"{count} rows", str(dump), None, 0.0))
    elif config.command == "verify-geometry":
        records = suites.verify_geometry(config.tolerances, config.seed)
    elif config.command == "sweep":
        rows, records = suites.run_sweep(
            range(config.k_lo, config.k_hi + 1), config.alphas,
            moments=config.moments, tolerances=config.tolerances,
            triple_budget=config.budgets["triples"],
            node_budget=config.budgets["nodes"],
            threads=config.threads)
        if rows:
            if config.fmt == "csv":
                write_sweep_csv(out_dir / "sweep.csv", rows)
            else:
                write_sweep_json(out_dir / "sweep.json", rows)
    else:  # report
        try:
            data = read_sweep_csv(config.in_path)
        except OSError as err:
            raise ConfigError(f"cannot read sweep input: {err}") from err
        if not data:
            raise ConfigError(f"no sweep rows in {config.in_path}")
        records = suites.run_report(data, config.tolerances)

    stem = "sweep_checks" if config.command == "sweep" else config.command.replace("-", "_")
    if config.fmt == "csv":
        write_records_csv(out_dir / f"{stem}.csv", records)
    else:
        write_records_json(out_dir / f"{stem}.json", records)

    _print_records(records)
    gated = [r for r in records if r.status != "info"]
    failed = [r for r in gated if r.status == "fail"]
    print(f"{config.command}: {len(gated) - len(failed)}/{len(gated)} gated checks passed"
          + (f", {len(failed)} FAILED" if failed else ""))
    return 1 if failed else 0


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        config = parse_config(argv)
        return run(config)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
