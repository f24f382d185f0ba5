"""Command-line front end.

Exit codes: 0 every asserted check passed, 1 an asserted check failed,
2 bad arguments, 3 internal inconsistency, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .exceptions import InternalInconsistency, NonUniqueMinimum
from .groebner import MAX_N, MAX_R
from .matchfield import Composition, compositions, is_eligible
from .records import (
    CHECKS,
    CertificateRecord,
    canonical_json,
    emit_fixture,
    fixture_text,
    record_from_fixture,
    verify_instance,
)

EXIT_OK, EXIT_FAIL, EXIT_ARGS, EXIT_INTERNAL, EXIT_IO = 0, 1, 2, 3, 4

log = logging.getLogger("blockmf")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    r: int
    n: int
    a: Composition | None = None  # None means sweep over all compositions
    checks: tuple[str, ...] = CHECKS
    only_eligible: bool = False
    out: Path | None = None
    jobs: int = 1
    unsafe_bounds: bool = False

    def __post_init__(self) -> None:
        if not 2 <= self.r < self.n:
            raise ConfigError(f"need 2 <= r < n, got r={self.r}, n={self.n}")
        if not self.unsafe_bounds and (self.n > MAX_N or self.r > MAX_R):
            raise ConfigError(
                f"(r, n) = ({self.r}, {self.n}) exceeds n <= {MAX_N}, r <= {MAX_R}; pass --unsafe-bounds to override"
            )
        if self.a is not None and self.a.n != self.n:
            raise ConfigError(f"composition {self.a} sums to {self.a.n}, expected n={self.n}")
        if self.jobs < 1:
            raise ConfigError("--jobs must be at least 1")

    def compositions(self) -> list[Composition]:
        if self.a is not None:
            return [self.a]
        return [a for a in compositions(self.n) if is_eligible(a) or not self.only_eligible]


def parse_checks(values: Sequence[str] | None) -> tuple[str, ...]:
    if not values:
        return CHECKS
    picked = set()
    for v in values:
        for tok in v.split(","):
            tok = tok.strip()
            if tok == "all":
                picked.update(CHECKS)
            elif tok in CHECKS:
                picked.add(tok)
            else:
                raise ConfigError(f"unknown check {tok!r}; choose from {', '.join(CHECKS)}, all")
    return tuple(c for c in CHECKS if c in picked)


def _run_one(args: tuple[int, int, Composition, tuple[str, ...], bool]) -> CertificateRecord:
    r, n, a, checks, unsafe = args
    return verify_instance(r, n, a, checks, unsafe=unsafe)


def run_records(cfg: RunConfig) -> list[CertificateRecord]:
    tasks = [(cfg.r, cfg.n, a, cfg.checks, cfg.unsafe_bounds) for a in cfg.compositions()]
    if cfg.jobs == 1 or len(tasks) <= 1:
        return [_run_one(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
        return list(pool.map(_run_one, tasks))


def exit_code(records: Sequence[CertificateRecord]) -> int:
    return EXIT_FAIL if any(rec.failed for rec in records) else EXIT_OK


def run_verify(cfg: RunConfig) -> tuple[CertificateRecord, int]:
    if cfg.a is None:
        raise ConfigError("verify needs --a")
    (rec,) = run_records(cfg)
    if cfg.out is not None:
        emit_fixture(rec, cfg.out)
    return rec, exit_code([rec])


def summarize(cfg: RunConfig, records: Sequence[CertificateRecord]) -> dict:
    """Universal properties over a sweep: dim2 constancy, gb pass on the eligible subset."""
    summary: dict = {
        "r": cfg.r,
        "n": cfg.n,
        "only_eligible": cfg.only_eligible,
        "requested": list(cfg.checks),
        "records": len(records),
        "expected_records": 2 ** (cfg.n - 1) if not cfg.only_eligible else sum(1 for _ in cfg.compositions()),
        "status_counts": {},
        "assertions": {},
    }
    for name in cfg.checks:
        counts: dict[str, int] = {}
        for rec in records:
            st = rec.status(name)
            counts[st] = counts.get(st, 0) + 1
        summary["status_counts"][name] = dict(sorted(counts.items()))
    if "dim2" in cfg.checks:
        values = sorted({rec.checks["dim2"]["dim2_image"] for rec in records})
        summary["dim2_values"] = values
        summary["assertions"]["dim2_constant"] = len(values) == 1
    if "gb" in cfg.checks:
        summary["assertions"]["gb_eligible_pass"] = all(
            rec.status("gb") == "pass" for rec in records if rec.eligible
        )
        summary["ineligible_gb_observed"] = {
            str(rec.a): rec.checks["gb"]["observed"] for rec in records if not rec.eligible
        }
    summary["assertions"]["coverage"] = summary["records"] == summary["expected_records"]
    return summary


def run_sweep(cfg: RunConfig) -> tuple[list[CertificateRecord], dict, int]:
    records = run_records(cfg)
    summary = summarize(cfg, records)
    code = exit_code(records)
    if not all(summary["assertions"].values()):
        code = EXIT_FAIL
    if cfg.out is not None:
        doc = {"summary": summary, "records": [rec.to_json(with_timing=False) for rec in records]}
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(canonical_json(doc))
    return records, summary, code


def _print_record(rec: CertificateRecord) -> None:
    print(f"{rec.id}  eligible={str(rec.eligible).lower()}")
    for name in CHECKS:
        c = rec.checks[name]
        if c["status"] == "skipped" and name not in rec.requested:
            continue
        extra = ""
        if name == "gb" and "generators" in c:
            extra = f"|G_a|={c['generators']} observed={c['observed']}"
        elif name == "dim2" and "dim2_image" in c:
            extra = f"dim2={c['dim2_image']} std={c['std_monomials']}"
        elif name == "sagbi" and "verdict" in c:
            extra = f"verdict={c['verdict']} kernel={c['plucker_kernel_dim']} in_w={c['initial_space_dim']}"
        elif name == "coherence" and "subsets" in c:
            extra = f"subsets={c['subsets']}"
        secs = rec.timing.get(name)
        t = f" ({secs:.2f}s)" if secs is not None else ""
        print(f"  {name:<10} {c['status']:<19} {extra}{t}")


def _print_summary(records: Sequence[CertificateRecord], summary: dict) -> None:
    checks = summary["requested"]
    print(f"{'composition':<20}" + "".join(f"{c:<20}" for c in checks))
    for rec in records:
        print(f"{str(rec.a):<20}" + "".join(f"{rec.status(c):<20}" for c in checks))
    for name, ok in summary["assertions"].items():
        print(f"{name}: {'PASS' if ok else 'FAIL'}")


def fixture_check(paths: Sequence[Path], unsafe: bool = False) -> int:
    code = EXIT_OK
    for path in paths:
        raw = path.read_bytes()
        rec = record_from_fixture(json.loads(raw), unsafe=unsafe)
        fresh = fixture_text(rec).encode("utf-8")
        same = fresh == raw
        print(f"{path}: {'match' if same else 'MISMATCH'}")
        if not same:
            code = EXIT_FAIL
    return code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="blockmf", description="Certify block diagonal matching fields of Grassmannians.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--r", type=int, required=True)
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--check", action="append", help="coherence, gb, dim2, sagbi or all (repeatable, comma-separated)")
        sp.add_argument("--out", type=Path)
        sp.add_argument("--unsafe-bounds", action="store_true")

    v = sub.add_parser("verify", help="verify one composition")
    common(v)
    v.add_argument("--a", required=True, help="composition, e.g. 2,2,2")

    s = sub.add_parser("sweep", help="verify every composition of n")
    common(s)
    s.add_argument("--only-eligible", action="store_true")
    s.add_argument("--jobs", type=int, default=1)

    f = sub.add_parser("fixture-check", help="recompute fixtures and compare bytes")
    f.add_argument("paths", nargs="+", type=Path)
    f.add_argument("--unsafe-bounds", action="store_true")
    return p


def _setup_logging() -> None:
    level = getattr(logging, os.environ.get("MF_LOG", "WARNING").upper(), logging.WARNING)
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    log.setLevel(level)


def main(argv: Sequence[str] | None = None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        if args.command == "fixture-check":
            return fixture_check(args.paths, unsafe=args.unsafe_bounds)
        cfg = RunConfig(
            r=args.r,
            n=args.n,
            a=Composition.parse(args.a) if args.command == "verify" else None,
            checks=parse_checks(args.check),
            only_eligible=getattr(args, "only_eligible", False),
            out=args.out,
            jobs=getattr(args, "jobs", 1),
            unsafe_bounds=args.unsafe_bounds,
        )
        if args.command == "verify":
            rec, code = run_verify(cfg)
            _print_record(rec)
        else:
            records, summary, code = run_sweep(cfg)
            _print_summary(records, summary)
        return code
    except (NonUniqueMinimum, InternalInconsistency) as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS


if __name__ == "__main__":
    sys.exit(main())
