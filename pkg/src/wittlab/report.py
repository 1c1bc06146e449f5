"""Report documents shared by the verification suites and the command line."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction

SCHEMA_VERSION = 1
STATUSES = ("pass", "fail", "skipped")


def exact(value) -> str:
    """Render a number as an exact rational string ("p/q" or "p"); other values via str."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int, Fraction)):
        v = Fraction(value)
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(value, float):
        raise TypeError("floats are not allowed in reports")
    return str(value)


@dataclass
class Result:
    name: str
    expected: str
    computed: str
    status: str

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"bad status {self.status!r}")

    @classmethod
    def check(cls, name: str, expected, computed, source: str, ok: bool | None = None) -> Result:
        """Compare ``computed`` with ``expected`` (or use ``ok``); ``source`` is cited in the expected field."""
        exp, got = exact(expected), exact(computed)
        passed = (exp == got) if ok is None else ok
        return cls(name, f"{exp} [{source}]", got, "pass" if passed else "fail")

    @classmethod
    def skipped(cls, name: str, reason: str) -> Result:
        return cls(name, reason, "", "skipped")


@dataclass
class ReportDocument:
    command: str
    algebra: str
    window: int
    results: list[Result] = field(default_factory=list)
    elapsed_ms: int = 0
    schema: int = SCHEMA_VERSION

    @property
    def ok(self) -> bool:
        return all(r.status == "pass" for r in self.results)

    @property
    def exit_code(self) -> int:
        return 0 if self.ok else 1

    def to_dict(self) -> dict:
        return {"schema": self.schema, "command": self.command, "algebra": self.algebra,
                "window": self.window, "results": [asdict(r) for r in self.results],
                "elapsed_ms": self.elapsed_ms}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> ReportDocument:
        if data.get("schema") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {data.get('schema')!r}")
        return cls(data["command"], data["algebra"], int(data["window"]),
                   [Result(**r) for r in data["results"]], int(data["elapsed_ms"]), data["schema"])

    @classmethod
    def from_json(cls, text: str) -> ReportDocument:
        return cls.from_dict(json.loads(text))

    def to_text(self) -> str:
        lines = [f"{self.command}  algebra={self.algebra}  window={self.window}"]
        width = max((len(r.name) for r in self.results), default=0)
        for r in self.results:
            lines.append(f"  {r.status.upper():7} {r.name:{width}}  computed={r.computed}  expected={r.expected}")
        passed = sum(r.status == "pass" for r in self.results)
        lines.append(f"{passed}/{len(self.results)} passed in {self.elapsed_ms} ms")
        return "\n".join(lines)
