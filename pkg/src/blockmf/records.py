"""Per-instance verification records and their canonical JSON form."""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .exceptions import InstanceTooLarge
from .groebner import (
    Binomial,
    BracketRing,
    GbReport,
    buchberger_check,
    check_bounds,
    dim2_image,
    g_a_generators,
    hook_content_dim2,
    spans_agree,
    std_monomials_deg2,
)
from .matchfield import Composition, coherence_failures, is_eligible, r_subsets
from .sagbi import DEFAULT_KERNEL_LIMITS, sagbi_certificate

log = logging.getLogger(__name__)

CHECKS = ("coherence", "gb", "dim2", "sagbi")
STATUSES = ("pass", "fail", "skipped", "outside-hypotheses")
SCHEMA_ID = "blockmf.certificate/1"


def instance_id(r: int, n: int, a: Composition) -> str:
    return f"r{r}-n{n}-a{a}"


@dataclass
class CertificateRecord:
    r: int
    n: int
    a: Composition
    requested: tuple[str, ...]
    checks: dict[str, dict[str, Any]] = field(default_factory=dict)
    counts: dict[str, int] = field(default_factory=dict)
    timing: dict[str, float] = field(default_factory=dict)
    version: str = __version__

    @property
    def id(self) -> str:
        return instance_id(self.r, self.n, self.a)

    @property
    def eligible(self) -> bool:
        return is_eligible(self.a)

    def status(self, check: str) -> str:
        return self.checks[check]["status"]

    @property
    def failed(self) -> bool:
        return any(c["status"] == "fail" for c in self.checks.values())

    def to_json(self, with_timing: bool = True) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "schema": SCHEMA_ID,
            "tool_version": self.version,
            "instance": {
                "id": self.id,
                "r": self.r,
                "n": self.n,
                "a": list(self.a.parts),
                "eligible": self.eligible,
            },
            "requested": list(self.requested),
            "checks": self.checks,
            "counts": self.counts,
        }
        if with_timing:
            doc["timing"] = {k: round(v, 6) for k, v in self.timing.items()}
        return doc


def _binomial_json(ring: BracketRing, b: Binomial) -> dict[str, list[str]]:
    return {"lead": ring.serialize(b.lead), "trail": ring.serialize(b.trail)}


def gb_json(ring: BracketRing, report: GbReport) -> dict[str, Any]:
    out: dict[str, Any] = {
        "generators": report.generators,
        "pairs": report.pairs,
        "coprime_skipped": report.coprime_skipped,
        "reduced": report.reduced,
        "witness": None,
    }
    if report.witness is not None:
        f, g, rem = report.witness
        out["witness"] = {
            "f": _binomial_json(ring, f),
            "g": _binomial_json(ring, g),
            "remainder": _binomial_json(ring, rem),
        }
    return out


def _hypothesis_status(eligible: bool, passed: bool) -> str:
    if not eligible:
        return "outside-hypotheses"
    return "pass" if passed else "fail"


def verify_instance(
    r: int,
    n: int,
    a: Composition,
    checks: Sequence[str] = CHECKS,
    unsafe: bool = False,
    generators: Sequence[Binomial] | None = None,
) -> CertificateRecord:
    """Run the requested checks on one instance, in dependency order.

    ``generators`` overrides the seven-family generating set for the gb check;
    it exists to exercise failure reporting.
    """
    if a.n != n:
        raise ValueError(f"composition {a} sums to {a.n}, not n={n}")
    check_bounds(r, n, unsafe)
    unknown = set(checks) - set(CHECKS)
    if unknown:
        raise ValueError(f"unknown checks {sorted(unknown)}")
    rec = CertificateRecord(r, n, a, tuple(c for c in CHECKS if c in checks))
    eligible = is_eligible(a)
    ring = BracketRing.of(r, n, a)
    rec.counts["variables"] = len(ring)
    for name in CHECKS:
        rec.checks[name] = {"status": "skipped"}
    report: GbReport | None = None

    if "coherence" in checks:
        t = time.perf_counter()
        bad = coherence_failures(a, r)
        rec.checks["coherence"] = {
            "status": "fail" if bad else "pass",
            "subsets": sum(1 for _ in r_subsets(n, r)),
            "mismatches": [list(I) for I in bad],
        }
        rec.timing["coherence"] = time.perf_counter() - t

    if "gb" in checks:
        t = time.perf_counter()
        G = g_a_generators(r, n, a) if generators is None else list(generators)
        report = buchberger_check(G)
        rec.checks["gb"] = {
            "status": _hypothesis_status(eligible, report.passed),
            "observed": "pass" if report.passed else "fail",
            **gb_json(ring, report),
        }
        rec.counts["generators"] = report.generators
        rec.timing["gb"] = time.perf_counter() - t

    if "dim2" in checks:
        t = time.perf_counter()
        G = g_a_generators(r, n, a)
        d = dim2_image(r, n, a, unsafe=unsafe)
        std = len(std_monomials_deg2(r, n, a, G))
        diag = dim2_image(r, n, Composition((n,)), unsafe=unsafe)
        hook = hook_content_dim2(r, n)
        agree = spans_agree(r, n, a, G)
        rec.checks["dim2"] = {
            "status": "pass" if d == std == diag == hook and agree else "fail",
            "dim2_image": d,
            "std_monomials": std,
            "diagonal_dim2": diag,
            "hook_content": hook,
            "spans_agree": agree,
        }
        rec.counts["dim2"] = d
        rec.timing["dim2"] = time.perf_counter() - t

    if "sagbi" in checks:
        t = time.perf_counter()
        try:
            cert = sagbi_certificate(r, n, a, limits=None if unsafe else DEFAULT_KERNEL_LIMITS, gb_report=report)
        except InstanceTooLarge as exc:
            log.info("%s: sagbi skipped: %s", rec.id, exc)
            rec.checks["sagbi"] = {"status": "skipped", "reason": "instance-too-large"}
        else:
            rec.checks["sagbi"] = {
                "status": _hypothesis_status(eligible, cert.ok),
                "verdict": cert.verdict,
                "plucker_kernel_dim": cert.plucker_kernel_dim,
                "initial_space_dim": cert.initial_space_dim,
                "matching_ideal_dim": cert.matching_ideal_dim,
                "containment": cert.containment,
                "buchberger_passed": cert.buchberger_passed,
                "dim2_equal": cert.dim2_equal,
                "scope": cert.scope,
            }
            rec.counts["plucker_kernel_dim"] = cert.plucker_kernel_dim
            rec.counts["matching_ideal_dim"] = cert.matching_ideal_dim
        rec.timing["sagbi"] = time.perf_counter() - t

    log.debug("%s: %s", rec.id, {k: v["status"] for k, v in rec.checks.items()})
    return rec


def canonical_json(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def fixture_text(record: CertificateRecord) -> str:
    """Canonical fixture form: sorted keys, no timing, trailing LF."""
    return canonical_json(record.to_json(with_timing=False))


def emit_fixture(record: CertificateRecord, path: str | Path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(fixture_text(record))
    return path


def record_from_fixture(doc: dict[str, Any], unsafe: bool = False) -> CertificateRecord:
    """Recompute the record a fixture document describes."""
    inst = doc["instance"]
    a = Composition(tuple(inst["a"]))
    return verify_instance(inst["r"], inst["n"], a, doc["requested"], unsafe=unsafe)
