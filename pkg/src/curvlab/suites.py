"""Batch verification: map suite names onto theorem checks over metric specs.

Reports are assembled in a fixed order (entries sorted by id, checks in
suite order) so the serialized output is byte-stable for a given seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import __version__, theorems
from .errors import InputError
from .geometry import WeylStructure
from .specfile import MetricSpec

SUITES = ("coincidence", "invariance", "bianchi", "traces", "lowdim", "nurowski", "schouten-law", "all")
ALGEBRAIC_TRIALS = 100
COINCIDING_TAGS = ("flat", "einstein")


@dataclass
class SuiteResult:
    suite: str
    seed: int
    samples: int
    tolerance_override: float | None
    entries: list
    reports: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    calibration: dict | None = None

    @property
    def passed(self):
        calibration_ok = self.calibration is None or all(c["matches_resolved"] for c in self.calibration.values())
        return calibration_ok and all(r.verdict for r in self.reports)

    def to_dict(self):
        failed = [f"{r.check_id}:{r.metric_id}" for r in self.reports if not r.verdict]
        out = {
            "tool": "curvlab",
            "version": __version__,
            "suite": self.suite,
            "seed": self.seed,
            "samples": self.samples,
            "tolerance_override": self.tolerance_override,
            "entries": self.entries,
            "resolved_convention": theorems.RESOLVED_CONVENTION,
        }
        if self.calibration is not None:
            out["calibration"] = self.calibration
        out["skipped"] = self.skipped
        out["reports"] = [r.to_dict() for r in self.reports]
        out["summary"] = {
            "checks": len(self.reports),
            "passed": len(self.reports) - len(failed),
            "failed": failed,
            "verdict": "pass" if self.passed else "fail",
        }
        return out


def expectation(spec: MetricSpec):
    """Tag-aware outcome of the coincidence check; unclassified specs are expected to coincide."""
    if spec.classification is None or spec.classification in COINCIDING_TAGS:
        return "coincide"
    return "separate"


def _entry_reports(suite, spec: MetricSpec, seed, samples, tag_aware):
    """Reports (and skip notes) for one spec; ``tag_aware`` is set when running 'all'."""
    source, box, mid, n = spec.source(), spec.box(), spec.id or "custom", spec.n
    reports, skipped = [], []

    def skip(reason):
        skipped.append({"suite": suite, "metric_id": mid, "reason": reason})

    if suite == "coincidence":
        if tag_aware and n < 4:
            skip("coincidence theorem needs n >= 4; covered by lowdim")
        else:
            expect = expectation(spec) if tag_aware else "coincide"
            reports += theorems.coincidence_suite(source, seed, samples, box, mid, expect=expect)
    elif suite == "invariance":
        reports.append(theorems.invariance_suite(source, "projective", seed, samples, box, mid))
        if n >= 3:
            reports.append(theorems.invariance_suite(source, "conformal", seed, samples, box, mid))
            if not isinstance(source, WeylStructure):
                reports.append(theorems.rescaling_suite(source, seed, samples, box, mid))
        else:
            skip("conformal invariance needs n >= 3")
    elif suite == "bianchi":
        if n >= 3:
            reports += theorems.bianchi_suite(source, seed, samples, box, mid)
        else:
            skip("Bianchi identities need n >= 3")
    elif suite == "lowdim":
        if n in (2, 3):
            reports += theorems.lowdim_check(source, seed, samples, box, mid)
        else:
            skip("lowdim applies to n = 2 or 3")
    elif suite == "schouten-law":
        reports += theorems.schouten_law_suite(source, seed, samples, box, mid)
    return reports, skipped


def calibration_table(seed=0):
    out = {}
    for kind in ("projective", "conformal"):
        found = theorems.calibrate_transformation_convention(kind, seed)
        resolved = theorems.RESOLVED_CONVENTION[kind]
        found["matches_resolved"] = (found["sign"], found["connection"]) == (resolved["sign"], resolved["connection"])
        out[kind] = found
    return out


def run_suite(suite, specs, seed, samples=10, tol=None) -> SuiteResult:
    """Run ``suite`` over ``specs`` (a list of MetricSpec)."""
    if suite not in SUITES:
        raise InputError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    if samples < 1:
        raise InputError("--samples must be >= 1")
    if tol is not None and not tol > 0:
        raise InputError("--tol must be positive")
    specs = sorted(specs, key=lambda s: s.id or "custom")
    result = SuiteResult(suite, seed, samples, tol, [s.id or "custom" for s in specs])
    parts = [s for s in SUITES if s != "all"] if suite == "all" else [suite]
    for part in parts:
        if part == "traces":
            result.reports += theorems.trace_identity_suite(seed, ALGEBRAIC_TRIALS)
        elif part == "nurowski":
            result.reports += theorems.einstein_equivalence_check(seed, ALGEBRAIC_TRIALS)
        else:
            for spec in specs:
                reports, skipped = _entry_reports(part, spec, seed, samples, tag_aware=(suite == "all"))
                result.reports += reports
                result.skipped += skipped
    if "schouten-law" in parts:
        result.calibration = calibration_table()
    if tol is not None:
        for r in result.reports:
            if r.comparison == "le":
                r.tolerance = tol
    return result


def summary_table(result: SuiteResult) -> str:
    rows = [("check", "metric", "connection", "points", "worst", "tolerance", "verdict")]
    for r in result.reports:
        worst = r.worst
        rows.append((
            r.check_id, r.metric_id, r.connection, str(len(r.residuals)),
            "-" if worst is None else f"{worst:.2e}",
            f"{'>=' if r.comparison == 'ge' else '<='} {r.tolerance:.0e}",
            "pass" if r.verdict else "FAIL",
        ))
    widths = [max(len(row[k]) for row in rows) for k in range(len(rows[0]))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    for r in result.reports:
        text = r.details.get("verdict_text")
        if text:
            lines.append(f"{r.metric_id}: {text}")
    for s in result.skipped:
        lines.append(f"skipped {s['suite']} on {s['metric_id']}: {s['reason']}")
    if result.calibration is not None:
        for kind, c in result.calibration.items():
            lines.append(f"transformation law ({kind}): sign {c['sign']:+d}, "
                         f"{c['connection']} connection differentiates b")
    passed = sum(r.verdict for r in result.reports)
    lines.append(f"{passed}/{len(result.reports)} checks passed: {'PASS' if result.passed else 'FAIL'}")
    return "\n".join(lines)
