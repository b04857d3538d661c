"""Verdict objects returned by every predicate checker."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one mathematical check.

    ok       -- verdict; truthiness of the report itself.
    axiom    -- name of the condition that was decided (on failure, the
                first condition violated in deterministic scan order).
    witness  -- node indices / coordinates of the first violation, or None.
    residual -- numeric margin of the violation, or None.
    notes    -- extra facts worth surfacing (vacuous sub-checks, clipping,
                sampling parameters), never needed to interpret the verdict.
    """

    ok: bool
    axiom: str
    witness: tuple | None = None
    residual: float | None = None
    notes: tuple[str, ...] = field(default=())

    def __bool__(self) -> bool:
        return self.ok

    @property
    def verdict(self) -> str:
        return "pass" if self.ok else "fail"

    def to_lines(self) -> list[str]:
        """Flat key = value serialization used by report files."""
        lines = [f"verdict = {self.verdict}", f"axiom = {self.axiom}"]
        if self.witness is not None:
            lines.append(f"witness = {self.witness}")
        if self.residual is not None:
            lines.append(f"residual = {self.residual!r}")
        for i, note in enumerate(self.notes):
            lines.append(f"note.{i} = {note}")
        return lines

    def with_notes(self, *extra: str) -> "CheckReport":
        return CheckReport(self.ok, self.axiom, self.witness, self.residual,
                           self.notes + tuple(extra))


def passing(axiom: str, *notes: str) -> CheckReport:
    return CheckReport(True, axiom, notes=tuple(notes))


def failing(axiom: str, witness, residual=None, *notes: str) -> CheckReport:
    return CheckReport(False, axiom, witness,
                       None if residual is None else float(residual),
                       tuple(notes))
