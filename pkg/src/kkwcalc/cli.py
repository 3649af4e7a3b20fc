"""Command-line entry point.

Exit status is 0 when every exact-versus-oracle check passes, 1 when the
oracle disagrees with the exact engine and 2 for invalid arguments.
Disagreements with the reference values are reported, never fatal.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import report
from .oracle import OracleConfig

OUTPUT_DIR_ENV = "KKWCALC_OUTPUT_DIR"
COMMANDS = ("verify-all", "phi", "interior", "oracle", "report")
FORMATS = {"text": "txt", "json": "json", "latex": "tex"}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    fmt: str = "text"
    output: str | None = None
    seed: int = 0
    case: int | None = None
    tolerance: float = 1e-8
    assignments: int = 5
    field_derivatives: bool = False
    reading: str = "derived"

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.fmt not in FORMATS:
            raise ConfigError(f"unknown format {self.fmt!r}")
        if self.command == "phi" and (self.case is None or not 1 <= self.case <= 5):
            raise ConfigError("phi needs --case in 1..5")
        if not self.tolerance > 0:
            raise ConfigError("tolerance must be positive")
        if self.assignments < 1:
            raise ConfigError("need at least one oracle assignment")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        return self


def _build_doc(cfg: RunConfig) -> tuple[dict, bool]:
    from .pipeline import assemble_theorem, compute_all_phi, compute_phi_case
    from .verify import cross_check, oracle_slot_values, verify_all

    ocfg = OracleConfig()
    if cfg.command == "verify-all":
        v = verify_all(cfg.seed, cfg.assignments, cfg.tolerance, ocfg)
        return report.verify_payload(v), v.ok
    if cfg.command == "phi":
        if cfg.field_derivatives:
            r = compute_all_phi(reading=cfg.reading, field_derivatives=True)[cfg.case - 1]
        else:
            r = compute_phi_case(cfg.case, reading=cfg.reading)
        return {"cases": [report.phi_payload(r)], "reading": cfg.reading}, True
    if cfg.command == "interior":
        return {"interior": report.interior_payload()}, True
    if cfg.command == "oracle":
        results = compute_all_phi(field_derivatives=cfg.field_derivatives)
        checks = cross_check(
            cfg.seed,
            cfg.assignments,
            cfg.tolerance,
            field_derivatives=cfg.field_derivatives,
            results=results,
            cfg=ocfg,
        )
        body = {"oracle": report.oracle_payload(checks, cfg.tolerance), "seed": cfg.seed}
        ok = body["oracle"]["ok"]
        body["ok"] = ok
        return body, ok
    # report
    t = assemble_theorem(reading=cfg.reading, oracle_values=oracle_slot_values(ocfg))
    doc = report.theorem_payload(t)
    ok = all(row.oracle is None or row.oracle["supports_engine"] for row in t.diff)
    doc["ok"] = ok
    return doc, ok


def render(cfg: RunConfig, doc: dict) -> str:
    doc = report.envelope(cfg.command, doc)
    if cfg.fmt == "json":
        return report.to_json(doc)
    if cfg.fmt == "latex":
        return report.to_latex(doc)
    return report.to_text(doc)


def _destination(cfg: RunConfig) -> Path | None:
    if cfg.output:
        return Path(cfg.output)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base:
        name = cfg.command if cfg.case is None else f"{cfg.command}-{cfg.case}"
        return Path(base) / f"{name}.{FORMATS[cfg.fmt]}"
    return None


def run(cfg: RunConfig, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    try:
        cfg.validate()
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    doc, ok = _build_doc(cfg)
    text = render(cfg, doc)
    dest = _destination(cfg)
    if dest is None:
        stdout.write(text)
    else:
        dest.parent.mkdir(parents=True, exist_ok=True)
        dest.write_text(text, encoding="utf-8")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=sorted(FORMATS), default="text", dest="fmt")
    common.add_argument("-o", "--output", help=f"output file (default: stdout, or ${OUTPUT_DIR_ENV})")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tolerance", type=float, default=1e-8)
    common.add_argument("--assignments", type=int, default=5, help="random oracle assignments")
    common.add_argument("--reading", choices=("derived", "printed"), default="derived")
    common.add_argument(
        "--field-derivatives",
        action="store_true",
        help="carry tangential derivatives of Y at the boundary point",
    )
    parser = argparse.ArgumentParser(
        prog="kkwcalc",
        description="Exact boundary terms of a spectral Einstein functional, with a numeric oracle.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify-all", parents=[common], help="all cases, interior part, oracle checks")
    p = sub.add_parser("phi", parents=[common], help="one boundary case")
    p.add_argument("--case", type=int, required=True)
    sub.add_parser("interior", parents=[common], help="interior coefficients")
    sub.add_parser("oracle", parents=[common], help="exact-versus-numeric checks only")
    sub.add_parser("report", parents=[common], help="assembled statement and comparison table")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(
        command=args.command,
        fmt=args.fmt,
        output=args.output,
        seed=args.seed,
        case=getattr(args, "case", None),
        tolerance=args.tolerance,
        assignments=args.assignments,
        field_derivatives=args.field_derivatives,
        reading=args.reading,
    )
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
