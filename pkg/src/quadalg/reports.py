"""Verification reports.

A report is an ordered list of named checks, each passed or failed, with an
optional witness string describing the concrete elements that broke an axiom.
Reports render deterministically: the same input and seed produce the same
bytes, in both human-readable and machine-readable (line-delimited JSON) form.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class Check:
    """One named check: an axiom, law, or structural condition."""

    name: str
    ok: bool
    witness: str | None = None


@dataclass
class Report:
    """Outcome of a verification run.

    >>> r = Report("demo", samples=10, seed=0)
    >>> r.add("x + 0 = x", True)
    >>> r.add("x + y = y + x", False, witness="x=1, y=2")
    >>> r.passed
    False
    >>> print(r.render())
    == demo ==
    samples=10 seed=0
    [PASS] x + 0 = x
    [FAIL] x + y = y + x
           witness: x=1, y=2
    result: FAIL (1 of 2 checks failed)
    """

    title: str
    samples: int | None = None
    seed: int | None = None
    checks: list[Check] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def add(self, name: str, ok: bool, witness: str | None = None) -> None:
        self.checks.append(Check(name, bool(ok), witness if not ok else None))

    def note(self, text: str) -> None:
        self.notes.append(text)

    def extend(self, other: Report, prefix: str = "") -> None:
        """Absorb another report's checks, optionally prefixing their names."""
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.ok, c.witness))
        self.notes.extend(other.notes)

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]

    def first_failure(self) -> Check | None:
        for c in self.checks:
            if not c.ok:
                return c
        return None

    def render(self) -> str:
        """Human-readable rendering, deterministic."""
        lines = [f"== {self.title} =="]
        if self.samples is not None or self.seed is not None:
            lines.append(f"samples={self.samples} seed={self.seed}")
        for text in self.notes:
            lines.append(f"note: {text}")
        for c in self.checks:
            lines.append(f"[{'PASS' if c.ok else 'FAIL'}] {c.name}")
            if c.witness is not None:
                lines.append(f"       witness: {c.witness}")
        nfail = len(self.failures)
        if nfail:
            lines.append(f"result: FAIL ({nfail} of {len(self.checks)} checks failed)")
        else:
            lines.append(f"result: PASS ({len(self.checks)} checks)")
        return "\n".join(lines)

    def records(self) -> list[dict]:
        """Machine-readable records, one per check plus a summary record."""
        recs: list[dict] = []
        head: dict = {"record": "header", "title": self.title}
        if self.samples is not None:
            head["samples"] = self.samples
        if self.seed is not None:
            head["seed"] = self.seed
        if self.notes:
            head["notes"] = list(self.notes)
        recs.append(head)
        for c in self.checks:
            rec: dict = {"record": "check", "name": c.name, "ok": c.ok}
            if c.witness is not None:
                rec["witness"] = c.witness
            recs.append(rec)
        recs.append(
            {
                "record": "summary",
                "passed": self.passed,
                "checks": len(self.checks),
                "failures": len(self.failures),
            }
        )
        return recs

    def render_jsonl(self) -> str:
        return "\n".join(json.dumps(r, sort_keys=True) for r in self.records())
