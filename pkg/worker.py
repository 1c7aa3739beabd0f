#!/usr/bin/env python3
"""
Batch worker

Runs the verification battery over a list of family specs:

- one entry per line of a batch file: `family m n N [control]`
  (blank lines and `#` comments are skipped);
- entries fan out to a process pool through the event loop, bounded by a
  semaphore; with a single worker they run in-process, one after another;
- results come back in input order as plain dicts, so the summary is the same
  whatever the schedule.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from dotenv import load_dotenv

from denominator import Control, apply_control, run_checks
from errors import ConfigurationError
from root_data import FamilySpec, build_root_system

logger = logging.getLogger("superdenom.worker")

FAMILY_TOKENS = ("A", "B", "C", "D", "F4", "G3")


@dataclass(frozen=True)
class BatchEntry:
    family: str
    m: int
    n: int
    N: int
    control: Control = Control.NONE
    line_no: int = 0


def parse_batch_line(line: str, line_no: int = 0) -> BatchEntry | None:
    text = line.split("#", 1)[0].strip()
    if not text:
        return None
    parts = text.split()
    if len(parts) not in (4, 5):
        raise ConfigurationError(f"line {line_no}: expected 'family m n N [control]', got {text!r}")
    family = parts[0]
    if family not in FAMILY_TOKENS:
        raise ConfigurationError(f"line {line_no}: unknown family {family!r}. Available: {list(FAMILY_TOKENS)}")
    try:
        m, n, N = (int(p) for p in parts[1:4])
    except ValueError as exc:
        raise ConfigurationError(f"line {line_no}: m, n and N must be integers") from exc
    if N < 0:
        raise ConfigurationError(f"line {line_no}: N must be >= 0")
    control = Control.NONE
    if len(parts) == 5:
        try:
            control = Control(parts[4])
        except ValueError as exc:
            raise ConfigurationError(
                f"line {line_no}: unknown control {parts[4]!r}. Available: {[c.value for c in Control]}"
            ) from exc
    return BatchEntry(family, m, n, N, control, line_no)


def parse_batch(text: str) -> list[BatchEntry]:
    entries = []
    for i, line in enumerate(text.splitlines(), start=1):
        entry = parse_batch_line(line, i)
        if entry is not None:
            entries.append(entry)
    return entries


def run_entry(entry: BatchEntry, shells: int = 3, theta_depth: int = 3) -> dict[str, Any]:
    """Run one entry to a summary dict; never raises."""
    started = time.perf_counter()
    summary: dict[str, Any] = {
        "spec": f"{entry.family}({entry.m},{entry.n})",
        "N": entry.N,
        "control": entry.control.value,
        "status": "error",
        "failed_checks": [],
        "seconds": 0.0,
    }
    try:
        spec = FamilySpec.parse(entry.family, entry.m, entry.n)
        summary["spec"] = spec.key
        rs = apply_control(build_root_system(spec), entry.control)
        report = run_checks(rs, entry.N, shells=shells, theta_depth=theta_depth)
        summary["status"] = "pass" if report.passed else "fail"
        summary["failed_checks"] = report.failed
    except ConfigurationError as exc:
        logger.warning("Config error on line %d: %s", entry.line_no, exc)
        summary["status"] = "config-error"
    except Exception as exc:
        logger.exception("Error on line %d: %s", entry.line_no, exc)
        summary["status"] = "error"
    summary["seconds"] = round(time.perf_counter() - started, 3)
    return summary


def batch_exit_code(results: list[dict[str, Any]]) -> int:
    statuses = {r["status"] for r in results}
    if "error" in statuses:
        return 3
    if "config-error" in statuses:
        return 2
    if "fail" in statuses:
        return 1
    return 0


class BatchWorker:
    """Runs a batch on the event loop, fanning out to a process pool."""

    def __init__(self, entries: list[BatchEntry], *, workers: int = 1, shells: int = 3, theta_depth: int = 3):
        self.entries = entries
        self.workers = max(1, workers)
        self.shells = shells
        self.theta_depth = theta_depth

    async def run(self) -> list[dict[str, Any]]:
        logger.info("Batch of %d entries on %d worker(s)", len(self.entries), self.workers)
        if self.workers == 1:
            return [run_entry(e, self.shells, self.theta_depth) for e in self.entries]

        loop = asyncio.get_running_loop()
        sem = asyncio.Semaphore(self.workers)
        with ProcessPoolExecutor(max_workers=self.workers) as executor:

            async def one(entry: BatchEntry) -> dict[str, Any]:
                async with sem:
                    return await loop.run_in_executor(executor, run_entry, entry, self.shells, self.theta_depth)

            return list(await asyncio.gather(*(one(e) for e in self.entries)))


async def run_batch(
    entries: list[BatchEntry], *, workers: int = 1, shells: int = 3, theta_depth: int = 3
) -> list[dict[str, Any]]:
    return await BatchWorker(entries, workers=workers, shells=shells, theta_depth=theta_depth).run()


def format_summary(results: list[dict[str, Any]]) -> str:
    lines = [f"{'spec':<10} {'N':>3} {'control':<15} {'status':<12} {'seconds':>8}  failed"]
    for r in results:
        lines.append(
            f"{r['spec']:<10} {r['N']:>3} {r['control']:<15} {r['status']:<12} {r['seconds']:>8.3f}  "
            + ",".join(r["failed_checks"])
        )
    return "\n".join(lines)


async def _amain(path: Path, workers: int, shells: int, theta_depth: int, as_json: bool) -> int:
    try:
        entries = parse_batch(path.read_text())
    except OSError as exc:
        sys.stderr.write(f"Cannot read batch file {path}: {exc}\n")
        return 2
    except ConfigurationError as exc:
        sys.stderr.write(f"{exc}\n")
        return 2
    results = await run_batch(entries, workers=workers, shells=shells, theta_depth=theta_depth)
    if as_json:
        sys.stdout.write(json.dumps(results, indent=2) + "\n")
    else:
        sys.stdout.write(format_summary(results) + "\n")
    return batch_exit_code(results)


def main(argv: list[str] | None = None) -> int:
    """Console-script entry point."""
    load_dotenv()
    p = argparse.ArgumentParser(prog="superdenom-worker", description="Run a batch of denominator checks.")
    p.add_argument("file", type=Path, help="Batch file with lines 'family m n N [control]'")
    p.add_argument("--workers", type=int, default=int(os.getenv("SUPERDENOM_WORKERS", "1")))
    p.add_argument("--shells", type=int, default=int(os.getenv("SUPERDENOM_SHELLS", "3")))
    p.add_argument("--theta-depth", type=int, default=int(os.getenv("SUPERDENOM_THETA_DEPTH", "3")))
    p.add_argument("--json", action="store_true", help="Output JSON")
    args = p.parse_args(argv)
    logging.basicConfig(
        level=os.getenv("SUPERDENOM_LOG_LEVEL", "WARNING").upper(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    return asyncio.run(_amain(args.file, args.workers, args.shells, args.theta_depth, args.json))


if __name__ == "__main__":
    raise SystemExit(main())
