"""Command line entry point: ``run <suite>`` and ``list``.

Exit codes: 0 all checks pass, 1 some check failed, 2 usage error,
3 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from functools import lru_cache
from importlib import resources

from . import __version__
from .constants import calibrated
from .suites import SUITES, SuiteConfig, run

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CONFIG = 0, 1, 2, 3
REPORT_SCHEMA = 1
CONFIG_KEYS = ("dim", "tol", "seed", "p", "weight_gamma", "max_bidegree", "trials", "out", "format")


class ConfigError(ValueError):
    pass


@lru_cache(maxsize=1)
def anchors():
    return json.loads(resources.files("riesz_hermite").joinpath("anchors.json").read_text())


def anchor_for(name):
    """Longest dotted prefix of ``name`` present in the anchor table."""
    table = anchors()["checks"]
    parts = name.split(".")
    for k in range(len(parts), 0, -1):
        key = ".".join(parts[:k])
        if key in table:
            return table[key]
    return anchors()["suites"].get(parts[0], {}).get("paper_anchor", "")


def catalog():
    return {
        "schema": 1,
        "suites": [{"name": n, **anchors()["suites"][n]} for n in SUITES],
    }


# ----------------------------------------------------------------------
# configuration


def _ints(text):
    return tuple(int(v) for v in str(text).split(",") if v.strip())


def _floats(text):
    return tuple(float(v) for v in str(text).split(",") if v.strip())


PARSERS = {
    "dim": _ints,
    "tol": float,
    "seed": int,
    "p": _floats,
    "weight_gamma": float,
    "max_bidegree": int,
    "trials": int,
    "out": str,
    "format": str,
}


def read_config_file(path):
    """Plain ``key = value`` lines; ``#`` starts a comment; unknown keys are errors."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    out = {}
    for no, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {no}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {no}: unknown key {key!r}")
        out[key] = value
    return out


def build_config(suite, file_values, flag_values):
    merged = dict(file_values)
    merged.update({k: v for k, v in flag_values.items() if v is not None})
    kwargs = {}
    try:
        for key, value in merged.items():
            kwargs[key] = PARSERS[key](value)
        return SuiteConfig(suite, **kwargs)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


# ----------------------------------------------------------------------
# reports


@dataclass
class Report:
    suite: str
    config: dict
    checks: list
    version: str = __version__
    timestamp: str = ""
    calibrated_constants: dict = field(default_factory=dict)
    schema: int = REPORT_SCHEMA

    @property
    def failed(self):
        return [c["name"] for c in self.checks if not c["pass"]]

    def summary(self):
        return {"total": len(self.checks), "passed": len(self.checks) - len(self.failed), "failed": len(self.failed), "failed_checks": self.failed}

    def as_dict(self):
        return {
            "schema": self.schema,
            "suite": self.suite,
            "version": self.version,
            "timestamp": self.timestamp,
            "config": self.config,
            "calibrated_constants": self.calibrated_constants,
            "checks": self.checks,
            "summary": self.summary(),
        }

    def to_json(self):
        return json.dumps(self.as_dict(), sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        return cls(
            suite=data["suite"],
            config=data["config"],
            checks=data["checks"],
            version=data["version"],
            timestamp=data["timestamp"],
            calibrated_constants=data["calibrated_constants"],
            schema=data["schema"],
        )

    def to_csv(self):
        buf = io.StringIO()
        for key in ("suite", "version", "timestamp"):
            buf.write(f"# {key}: {getattr(self, key)}\n")
        buf.write(f"# config: {json.dumps(self.config, sort_keys=True)}\n")
        buf.write(f"# calibrated_constants: {json.dumps(self.calibrated_constants, sort_keys=True)}\n")
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["name", "paper_anchor", "residual", "tolerance", "pass"])
        for c in self.checks:
            wr.writerow([c["name"], c["paper_anchor"], repr(c["residual"]), repr(c["tolerance"]), str(c["pass"]).lower()])
        return buf.getvalue()


def run_suite(cfg, timestamp=None):
    checks = run(cfg)
    for c in checks:
        c["paper_anchor"] = anchor_for(c["name"])
    stamp = timestamp if timestamp is not None else datetime.now(timezone.utc).isoformat(timespec="seconds")
    return Report(cfg.suite, cfg.echo(), checks, timestamp=stamp, calibrated_constants=calibrated())


# ----------------------------------------------------------------------
# argument parsing


def _parser():
    ap = argparse.ArgumentParser(prog="riesz-hermite", description="Verification suites for Hermite and special Hermite Riesz transforms.")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a suite and write its report")
    r.add_argument("suite", choices=SUITES + ("all",))
    r.add_argument("--dim", help="dimension or comma-separated dimensions")
    r.add_argument("--tol", help="tolerance for identity checks")
    r.add_argument("--seed", help="master seed")
    r.add_argument("--p", help="comma-separated exponents")
    r.add_argument("--weight-gamma", dest="weight_gamma", help="power-weight exponent")
    r.add_argument("--max-bidegree", dest="max_bidegree", help="largest m+n in bigraded sweeps")
    r.add_argument("--trials", help="trials per norm-ratio experiment")
    r.add_argument("--out", help="report path (default: stdout)")
    r.add_argument("--format", help="json or csv")
    r.add_argument("--config", help="key = value configuration file")
    ls = sub.add_parser("list", help="list suites with their anchors")
    ls.add_argument("--json", action="store_true", help="machine-readable catalog")
    return ap


def main(argv=None):
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.command == "list":
        cat = catalog()
        if args.json:
            print(json.dumps(cat, sort_keys=True, indent=1))
        else:
            width = max(len(s["paper_anchor"]) for s in cat["suites"])
            for s in cat["suites"]:
                print(f"{s['name']:<15} {s['paper_anchor']:<{width}}  {s['description']}")
        return EXIT_OK
    flags = {k: getattr(args, k) for k in CONFIG_KEYS}
    try:
        file_values = read_config_file(args.config) if args.config else {}
        cfg = build_config(args.suite, file_values, flags)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report = run_suite(cfg)
    text = report.to_json() if cfg.format == "json" else report.to_csv()
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    summary = report.summary()
    print(f"{cfg.suite}: {summary['passed']}/{summary['total']} checks passed", file=sys.stderr)
    for name in summary["failed_checks"]:
        print(f"  FAIL {name}", file=sys.stderr)
    return EXIT_OK if not summary["failed"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
