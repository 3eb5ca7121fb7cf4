"""Pass/fail records produced by the invariant checks."""

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    residual: float
    tolerance: float
    detail: str = ""

    def to_dict(self):
        d = {
            "name": self.name,
            "passed": bool(self.passed),
            "residual": float(self.residual),
            "tolerance": float(self.tolerance),
        }
        if self.detail:
            d["detail"] = self.detail
        return d


@dataclass(frozen=True)
class Report:
    subject: str
    checks: tuple = field(default_factory=tuple)
    extra: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    @property
    def residual(self):
        return max((c.residual for c in self.checks), default=0.0)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def to_dict(self):
        return {
            "subject": self.subject,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            **self.extra,
        }


def check(name, residual, tolerance, detail=""):
    return Check(name, bool(residual <= tolerance), float(residual), float(tolerance), detail)
