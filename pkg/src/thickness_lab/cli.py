"""``thickness-lab run|check <config.json>``.

Exit codes: 0 success, 2 usage or config error, 3 failed assertion (check only).
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .errors import InputError, ResourceError
from .scenarios import ConfigError, ExperimentConfig, run

CSV_COLUMNS = ["scenario", "p", "dim", "m", "lower", "estimate", "upper", "pass", "seed"]

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="thickness-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_ in (("run", "run a scenario and write its reports"),
                        ("check", "run a scenario and exit 3 if any assertion fails")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("config", type=Path)
        p.add_argument("--seed", type=int)
        p.add_argument("--budget", type=int)
        p.add_argument("--restarts", type=int)
        p.add_argument("--out", dest="out_path")
    return parser


def load_config(path: Path, overrides: dict) -> ExperimentConfig:
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if isinstance(data, dict):
        data.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.from_dict(data)


def write_outputs(report: dict, out_path: str) -> tuple[Path, Path]:
    base = Path(out_path)
    if base.suffix in (".json", ".csv"):
        base = base.with_suffix("")
    base.parent.mkdir(parents=True, exist_ok=True)
    json_path, csv_path = base.with_suffix(".json"), base.with_suffix(".csv")
    json_path.write_text(json.dumps(report, indent=2) + "\n")
    cfg, summ = report["config"], report["summary"]
    row = {
        "scenario": cfg["scenario"], "p": cfg.get("p", ""), "dim": summ.get("dim"),
        "m": summ.get("m"), "lower": summ.get("lower"), "estimate": summ.get("estimate"),
        "upper": summ.get("upper"), "pass": report["pass"], "seed": cfg["seed"],
    }
    with csv_path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerow({k: "" if v is None else v for k, v in row.items()})
    return json_path, csv_path


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {"seed": args.seed, "budget": args.budget, "restarts": args.restarts,
                 "out_path": args.out_path}
    try:
        cfg = load_config(args.config, overrides)
        report = run(cfg)
    except (ConfigError, InputError, ResourceError) as exc:
        print(f"thickness-lab: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    json_path, csv_path = write_outputs(report, cfg.out_path or cfg.scenario)
    print(f"wrote {json_path} and {csv_path}")
    if args.command == "check":
        for a in report["assertions"]:
            print(f"{'PASS' if a['pass'] else 'FAIL'}  {a['name']}: {a['value']!r} {a['op']} {a['bound']!r}")
        print("PASS" if report["pass"] else "FAIL")
        return EXIT_OK if report["pass"] else EXIT_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
