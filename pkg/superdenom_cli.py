from __future__ import annotations

import argparse
import asyncio
import csv
import io
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Literal

import networkx as nx
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from char_series import series_rows
from denominator import CheckReport, Control, Selection, apply_control, parse_selection, run_checks
from errors import ConfigurationError, SuperdenomError
from root_data import FamilySpec, RootSystem, build_root_system, delta_sharp_simple, dual_coxeter, theta_sharp
from simple_systems import SimpleSystem, explore_theta, start_system, theta_graph
from weyl import generate_finite_sharp
import worker

logger = logging.getLogger("superdenom")

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_INTERNAL = 3


def _print_err(msg: str) -> None:
    sys.stderr.write(msg + "\n")


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    family: str
    m: int = 0
    n: int = 0
    height: int = Field(default=6, ge=0)
    checks: tuple[Selection, ...] = tuple(Selection)
    shells: int = Field(default=3, ge=1)
    theta_depth: int = Field(default=3, ge=0)
    format: Literal["json", "text", "csv"] = "json"
    out: Path | None = None
    workers: int = Field(default=1, ge=1)
    control: Control = Control.NONE

    @field_validator("checks", mode="before")
    @classmethod
    def _parse_checks(cls, value: Any) -> tuple[Selection, ...]:
        try:
            return parse_selection(value)
        except ConfigurationError as exc:
            raise ValueError(str(exc)) from exc

    @model_validator(mode="after")
    def _admissible(self) -> "RunConfig":
        try:
            FamilySpec.parse(self.family, self.m, self.n)
        except ConfigurationError as exc:
            raise ValueError(str(exc)) from exc
        return self

    @property
    def spec(self) -> FamilySpec:
        return FamilySpec.parse(self.family, self.m, self.n)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        fields = {k: v for k, v in vars(args).items() if k in cls.model_fields and v is not None}
        try:
            return cls(**fields)
        except ValidationError as exc:
            msgs = "; ".join(e["msg"] for e in exc.errors())
            raise ConfigurationError(f"Invalid configuration: {msgs}") from exc


# =============================================================================
# COMMANDS
# =============================================================================


def render_text(report: CheckReport) -> str:
    lines = [f"{report.spec} N={report.N}: {'PASS' if report.passed else 'FAIL'}"]
    for c in report.checks:
        line = f"  {c.status.upper():<4}  {c.name:<26} window={c.window_size} terms={c.terms}"
        if c.mismatch is not None:
            line += f" mismatch at {c.mismatch.exponent_coords}: lhs={c.mismatch.lhs} rhs={c.mismatch.rhs}"
        if c.detail:
            line += f" ({c.detail})"
        lines.append(line)
    return "\n".join(lines)


def render_csv(report: CheckReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["series", "offset", "height", "coefficient"])
    for name in sorted(report.series):
        writer.writerows(series_rows(name, report.series[name]))
    return buf.getvalue()


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        out.write_text(text if text.endswith("\n") else text + "\n")


def cmd_verify(config: RunConfig) -> int:
    rs = apply_control(build_root_system(config.spec), config.control)
    report = run_checks(rs, config.height, config.checks, shells=config.shells, theta_depth=config.theta_depth)
    if config.format == "json":
        text = json.dumps(report.to_dict(), indent=2)
    elif config.format == "text":
        text = render_text(report)
    else:
        text = render_csv(report)
    _emit(text, config.out)
    return EXIT_OK if report.passed else EXIT_FAIL


def info_payload(rs: RootSystem, ball: list[SimpleSystem], theta_depth: int) -> dict[str, Any]:
    basis = rs.basis
    return {
        "spec": rs.key,
        "symbols": list(basis.symbols),
        "relation": "eps_1 + eps_2 + eps_3 = 0" if basis.form.sum_zero_eps else None,
        "pi": [a.label() for a in rs.pi],
        "pi_parities": [p.value for p in rs.pi_parities],
        "s": [b.label() for b in rs.s_set],
        "theta": rs.theta.label(),
        "xi": rs.xi.label() if rs.xi is not None else None,
        "rho": rs.rho.label(),
        "rho_hat": rs.rho_hat.label(),
        "h_dual": str(dual_coxeter(rs)),
        "even_roots": len(rs.even_roots),
        "odd_roots": len(rs.odd_roots),
        "sharp": len(rs.sharp),
        "sharp_simple": [a.label() for a in delta_sharp_simple(rs)],
        "theta_sharp": theta_sharp(rs).label(),
        "delta2": len(rs.delta2),
        "weyl_sharp_order": len(generate_finite_sharp(rs)),
        "theta_ball": len(ball),
        "theta_depth": theta_depth,
    }


def cmd_info(config: RunConfig, theta_graph_path: Path | None = None) -> int:
    rs = build_root_system(config.spec)
    ball = explore_theta(start_system(rs), config.theta_depth)
    payload = info_payload(rs, ball, config.theta_depth)
    if theta_graph_path is not None:
        nx.write_graphml(theta_graph(ball), str(theta_graph_path))
        logger.info("Wrote Theta graph with %d nodes to %s", len(ball), theta_graph_path)
    if config.format == "json":
        text = json.dumps(payload, indent=2)
    else:
        text = "\n".join(f"{k}: {', '.join(v) if isinstance(v, list) else v}" for k, v in payload.items())
    _emit(text, config.out)
    return EXIT_OK


def cmd_batch(path: Path, *, workers: int, shells: int, theta_depth: int, as_json: bool) -> int:
    return asyncio.run(worker._amain(path, workers, shells, theta_depth, as_json))


# =============================================================================
# PARSER
# =============================================================================


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", "-v", action="store_true", help="Log progress to stderr")

    family = argparse.ArgumentParser(add_help=False)
    family.add_argument("--family", required=True, choices=list(worker.FAMILY_TOKENS))
    family.add_argument("--m", type=int, default=0)
    family.add_argument("--n", type=int, default=0)
    family.add_argument("--theta-depth", dest="theta_depth", type=int, default=int(os.getenv("SUPERDENOM_THETA_DEPTH", "3")))
    family.add_argument("--out", type=Path, default=None, help="Write output here instead of stdout")

    p = argparse.ArgumentParser(prog="superdenom", description="Verify denominator identities of basic Lie superalgebras")
    sub = p.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", parents=[common, family], help="Run the check battery for one family")
    verify.add_argument("--height", type=int, default=int(os.getenv("SUPERDENOM_HEIGHT", "6")))
    verify.add_argument("--checks", default="all", help="Comma list of finite,affine,translation,lemmas or all")
    verify.add_argument("--shells", type=int, default=int(os.getenv("SUPERDENOM_SHELLS", "3")))
    verify.add_argument("--format", choices=["json", "text", "csv"], default="json")
    verify.add_argument("--workers", type=int, default=int(os.getenv("SUPERDENOM_WORKERS", "1")))
    verify.add_argument("--control", choices=[c.value for c in Control], default=Control.NONE.value)
    verify.set_defaults(func="verify")

    info = sub.add_parser("info", parents=[common, family], help="Print the root data of one family")
    info.add_argument("--format", choices=["json", "text"], default="text")
    info.add_argument("--theta-graph", dest="theta_graph", type=Path, default=None, help="Write the Theta graph as GraphML")
    info.set_defaults(func="info")

    batch = sub.add_parser("batch", parents=[common], help="Run a batch file of 'family m n N [control]' lines")
    batch.add_argument("file", type=Path)
    batch.add_argument("--workers", type=int, default=int(os.getenv("SUPERDENOM_WORKERS", "1")))
    batch.add_argument("--shells", type=int, default=int(os.getenv("SUPERDENOM_SHELLS", "3")))
    batch.add_argument("--theta-depth", dest="theta_depth", type=int, default=int(os.getenv("SUPERDENOM_THETA_DEPTH", "3")))
    batch.add_argument("--format", choices=["json", "text"], default="text")
    batch.set_defaults(func="batch")

    return p


def main(argv: list[str] | None = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)

    level = "DEBUG" if args.verbose else os.getenv("SUPERDENOM_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(
        level=level, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s", stream=sys.stderr
    )

    try:
        if args.func == "batch":
            if args.workers < 1 or args.shells < 1 or args.theta_depth < 0:
                raise ConfigurationError("workers and shells must be >= 1, theta depth >= 0")
            return cmd_batch(
                args.file,
                workers=args.workers,
                shells=args.shells,
                theta_depth=args.theta_depth,
                as_json=args.format == "json",
            )
        config = RunConfig.from_args(args)
        if args.func == "verify":
            return cmd_verify(config)
        if args.func == "info":
            return cmd_info(config, args.theta_graph)
    except ConfigurationError as exc:
        _print_err(f"error: {exc}")
        return EXIT_CONFIG
    except SuperdenomError as exc:
        _print_err(f"internal error: {type(exc).__name__}: {exc}")
        return EXIT_INTERNAL
    except Exception as exc:
        logger.exception("Unexpected failure")
        _print_err(f"internal error: {type(exc).__name__}: {exc}")
        return EXIT_INTERNAL
    _print_err(f"Unknown command: {args.func}")
    return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
