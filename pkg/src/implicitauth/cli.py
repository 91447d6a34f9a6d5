"""Command-line front end.

Subcommands::

    gen     --profile P --from TS --to TS --seed N --out LOG
    attack  --log LOG --spec S --seed N --out LOG
    replay  --log LOG --contacts C [--config CFG] [--attack-start TS] --out CSV [--metrics JSON]
    sweep   --log LOG --contacts C [--config CFG] --grid G [--attack-start TS] --out CSV

Exit status: 0 success, 1 usage error, 2 data or validation error. Outputs
are written only after the whole computation succeeded.
"""

from __future__ import annotations

import argparse
import calendar
import json
import logging
import os
import sys
import tempfile
from datetime import datetime
from pathlib import Path

from . import events as ev
from .config import ConfigError, load_config
from .decision import format_decision_csv
from .evaluation import format_sweep_csv, replay, sweep
from .kernels import BACKEND
from .simulate import attack_from_dict, generate_legitimate, inject_attack, profile_phases

log = logging.getLogger("implicitauth")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _timestamp(text: str) -> int:
    """Epoch seconds, or an ISO-8601 date/time (UTC when no offset is given)."""
    try:
        return int(text)
    except ValueError:
        pass
    try:
        dt = datetime.fromisoformat(text.replace("Z", "+00:00"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a timestamp: {text!r}") from None
    if dt.tzinfo is None:
        return calendar.timegm(dt.timetuple())
    return int(dt.timestamp())


def _json_arg(text: str) -> dict:
    """Inline JSON object, or the path of a file holding one."""
    try:
        if text.lstrip().startswith("{"):
            data = json.loads(text)
        else:
            data = json.loads(Path(text).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {text[:60]!r}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{text[:60]!r}: expected a JSON object")
    return data


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def cmd_gen(args) -> None:
    phases = profile_phases(_json_arg(args.profile))
    events = generate_legitimate(phases, args.start, args.end, seed=args.seed)
    _write(args.out, ev.format_log(events))
    log.info("wrote %d events to %s", len(events), args.out)


def cmd_attack(args) -> None:
    events = ev.read_log(args.log)
    spec = attack_from_dict(_json_arg(args.spec), rng_seed=args.seed)
    merged = inject_attack(events, spec)
    _write(args.out, ev.format_log(merged))
    log.info("attack %s from %d: %d events kept, %d total", spec.case, spec.start_ts,
             sum(e.ts < spec.start_ts for e in events), len(merged))


def cmd_replay(args) -> None:
    events = ev.read_log(args.log)
    contacts = ev.read_contacts(args.contacts)
    config = load_config(args.config)
    records, metrics = replay(events, contacts, config, attack_start=args.attack_start)
    csv_text = format_decision_csv(records)
    _write(args.out, csv_text)
    if args.metrics:
        _write(args.metrics, metrics.to_json())
    log.info("%d decisions, backend=%s, %s", len(records), BACKEND, metrics)


def cmd_sweep(args) -> None:
    events = ev.read_log(args.log)
    contacts = ev.read_contacts(args.contacts)
    config = load_config(args.config)
    rows = sweep(events, contacts, config, _json_arg(args.grid), attack_start=args.attack_start)
    _write(args.out, format_sweep_csv(rows))
    log.info("%d grid points, backend=%s", len(rows), BACKEND)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="implicitauth", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a synthetic legitimate-user event log")
    p.add_argument("--profile", required=True, help="profile JSON (file path or inline object)")
    p.add_argument("--from", dest="start", required=True, type=_timestamp)
    p.add_argument("--to", dest="end", required=True, type=_timestamp)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("attack", help="replace the tail of a log with attacker activity")
    p.add_argument("--log", required=True)
    p.add_argument("--spec", required=True, help="attack spec JSON (file path or inline object)")
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("replay", help="score a log and write the decision stream")
    p.add_argument("--log", required=True)
    p.add_argument("--contacts", required=True)
    p.add_argument("--config", help="flat dotted-key JSON config; defaults when omitted")
    p.add_argument("--attack-start", type=_timestamp)
    p.add_argument("--out", required=True)
    p.add_argument("--metrics", help="write the metrics summary JSON here")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("sweep", help="evaluate a parameter grid over one log")
    p.add_argument("--log", required=True)
    p.add_argument("--contacts", required=True)
    p.add_argument("--config")
    p.add_argument("--grid", required=True, help='e.g. {"tolerance": [0, 5, 10]}')
    p.add_argument("--attack-start", type=_timestamp)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)
    return parser


def run_cli(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        args.func(args)
    except (ValueError, OSError) as exc:
        # EventLogError, ConfigError, AttackError, ... are all ValueErrors
        print(f"implicitauth {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
