"""Suite reports: mergeable records of a seeded verification run."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction

MAX_LISTED_FAILURES = 50


def _num(x):
    if isinstance(x, Fraction):
        return float(x)
    return x


@dataclass
class SuiteReport:
    suite: str
    space: str
    samples: int = 0
    seed: int = 0
    tolerance: float = 0.0
    claim: str = ""
    max_violation: float = 0.0
    failures: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures and self.max_violation <= self.tolerance

    def record(self, sample_id, violation, diagnostic=""):
        """Count one sample; a violation above tolerance is also a failure."""
        self.samples += 1
        self.update(sample_id, violation, diagnostic)

    def update(self, sample_id, violation, diagnostic=""):
        """Fold an extra measurement into an already counted sample."""
        violation = _num(violation)
        if violation > self.max_violation:
            self.max_violation = violation
        if violation > self.tolerance:
            self.fail(sample_id, diagnostic or f"violation {violation:.3e}")

    def fail(self, sample_id, diagnostic):
        self.failures.append((sample_id, str(diagnostic)))

    def merge(self, other: "SuiteReport") -> "SuiteReport":
        """Combine two shards; associative, failures kept in sample order."""
        out = SuiteReport(
            suite=self.suite, space=self.space,
            samples=self.samples + other.samples, seed=self.seed,
            tolerance=self.tolerance, claim=self.claim or other.claim,
            max_violation=max(self.max_violation, other.max_violation),
            failures=sorted(self.failures + other.failures, key=lambda f: f[0]),
            wall_time=self.wall_time + other.wall_time)
        return out

    def to_dict(self, include_time=True) -> dict:
        d = {
            "suite": self.suite,
            "space": self.space,
            "claim": self.claim,
            "samples": self.samples,
            "seed": self.seed,
            "max_violation": float(self.max_violation),
            "tolerance": float(self.tolerance),
            "pass": self.passed,
            "failure_count": len(self.failures),
            "failures": [{"sample": s, "diagnostic": msg}
                         for s, msg in self.failures[:MAX_LISTED_FAILURES]],
        }
        if include_time:
            d["wall_time"] = round(self.wall_time, 3)
        return d

    def to_json(self, include_time=True) -> str:
        return json.dumps(self.to_dict(include_time), indent=2) + "\n"

    def to_csv(self, include_time=True) -> str:
        d = self.to_dict(include_time)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        keys = [k for k in d if k != "failures"]
        writer.writerow(keys + ["failures"])
        fails = ";".join(f"{f['sample']}:{f['diagnostic']}" for f in d["failures"])
        writer.writerow([d[k] for k in keys] + [fails])
        return buf.getvalue()

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.suite} [{self.space}] samples={self.samples} "
                f"max_violation={float(self.max_violation):.3e} "
                f"tol={float(self.tolerance):.1e} failures={len(self.failures)}")
