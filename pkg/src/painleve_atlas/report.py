"""Pass/fail records shared by every verification routine."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from .symcore import RationalFunction, as_rf


@dataclass(frozen=True)
class Check:
    check_id: str
    status: str  # "pass" | "fail"
    witness: str = "0"

    @property
    def passed(self) -> bool:
        return self.status == "pass"


@dataclass
class VerificationReport:
    checks: list[Check] = field(default_factory=list)

    def add(self, check_id: str, ok: bool, witness="0") -> Check:
        if isinstance(witness, RationalFunction):
            witness = str(witness)
        chk = Check(check_id, "pass" if ok else "fail", str(witness))
        self.checks.append(chk)
        return chk

    def expect_zero(self, check_id: str, residual) -> Check:
        """Record ``residual == 0`` exactly; the residual itself is the witness."""
        residual = as_rf(residual)
        return self.add(check_id, residual.is_zero(), residual)

    def extend(self, other: "VerificationReport") -> "VerificationReport":
        self.checks.extend(other.checks)
        return self

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def first_failure(self) -> Check | None:
        return next((c for c in self.checks if not c.passed), None)

    def __getitem__(self, check_id: str) -> Check:
        for c in self.checks:
            if c.check_id == check_id:
                return c
        raise KeyError(check_id)

    def __iter__(self):
        return iter(self.checks)

    def __len__(self):
        return len(self.checks)

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps([asdict(c) for c in self.checks], indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "VerificationReport":
        return cls([Check(**d) for d in json.loads(text)])
