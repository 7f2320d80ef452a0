"""Run configuration and check reports shared by the command-line tools."""

from __future__ import annotations

import json
import platform
import re
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable

from .algebra import CheckRecord

__all__ = ["SCHEMA_VERSION", "ConfigError", "RunConfig", "Report", "parse_rational",
           "parse_space"]

SCHEMA_VERSION = 1

_RATIONAL = re.compile(r"[+-]?\d+(/\d+)?")


class ConfigError(ValueError):
    """A configuration field is invalid; ``field`` names it."""

    def __init__(self, field_name: str, message: str):
        super().__init__("{}: {}".format(field_name, message))
        self.field = field_name


def parse_rational(text: str, field_name: str = "value") -> Fraction:
    """Parse ``p/q`` or an integer.  Decimal and float notation is rejected."""
    s = str(text).strip()
    if not _RATIONAL.fullmatch(s):
        raise ConfigError(field_name, "expected an integer or p/q, got {!r}".format(text))
    if "/" in s and int(s.split("/")[1]) == 0:
        raise ConfigError(field_name, "zero denominator")
    return Fraction(s)


def parse_space(alpha: str, beta: Fraction):
    """``alpha`` is a rational, or ``(1,0)`` / ``(0,1)`` for the two special modules."""
    from .boson import SpaceSpec
    a = str(alpha).replace(" ", "")
    if a in ("(1,0)", "10"):
        return SpaceSpec("10", 0, beta)
    if a in ("(0,1)", "01"):
        return SpaceSpec("01", 0, beta)
    return SpaceSpec.F(parse_rational(a, "alpha"), beta)


@dataclass
class RunConfig:
    M: int = 1
    N: int = 0
    alpha: str = "0"
    beta: str = "0"
    degree: int = 2
    modes: int = 2
    relations: tuple = ()
    part: str = "full"
    kind: str = "phi"
    format: str = "text"
    out: str | None = None
    jobs: int = 1

    def validate(self) -> "RunConfig":
        if self.M < 0 or self.N < 0:
            raise ConfigError("M/N", "must be non-negative")
        if self.M == self.N:
            raise ConfigError("M/N", "M != N is required, got M = N = {}".format(self.M))
        if self.degree < 0:
            raise ConfigError("degree", "must be >= 0")
        if self.modes < 0:
            raise ConfigError("modes", "must be >= 0")
        if self.jobs < 1:
            raise ConfigError("jobs", "must be >= 1")
        if self.format not in ("text", "json"):
            raise ConfigError("format", "must be 'text' or 'json'")
        if self.part not in ("full", "ker", "coker"):
            raise ConfigError("part", "must be full, ker or coker")
        self.beta_value()
        self.space()
        return self

    def beta_value(self) -> Fraction:
        return parse_rational(self.beta, "beta")

    def space(self):
        return parse_space(self.alpha, self.beta_value())

    def echo(self) -> dict:
        d = asdict(self)
        d["relations"] = list(self.relations)
        return d


@dataclass
class Report:
    command: str
    config: dict
    records: list = field(default_factory=list)
    data: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    seconds: float = 0.0

    def extend(self, recs: Iterable[CheckRecord]) -> None:
        self.records.extend(recs)

    def summary(self) -> dict:
        out = {"pass": 0, "fail": 0, "skipped": 0}
        for r in self.records:
            out[r.status] = out.get(r.status, 0) + 1
        out["total"] = len(self.records)
        return out

    @property
    def failed(self) -> bool:
        return any(r.status == "fail" for r in self.records)

    def exit_code(self) -> int:
        return 1 if self.failed else 0

    def to_dict(self, timing: bool = True) -> dict:
        from . import __version__
        import flint
        meta = {"schema_version": SCHEMA_VERSION, "command": self.command,
                "versions": {"superboson": __version__, "python-flint": flint.__version__,
                             "python": platform.python_version()}}
        if timing:
            meta["seconds"] = round(self.seconds, 3)
        return {
            "meta": meta,
            "config": self.config,
            "records": [{"id": r.id, "status": r.status, "residual": r.residual,
                         "notes": r.notes, "states": r.states} for r in self.records],
            "summary": self.summary(),
            "data": self.data,
            "notes": list(self.notes),
        }

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True, default=str) + "\n"

    def to_text(self) -> str:
        lines = ["# {}  schema {}".format(self.command, SCHEMA_VERSION)]
        for r in self.records:
            extra = r.notes if r.status != "fail" else r.residual
            head = "{:7} {}".format(r.status.upper(), r.id)
            if extra:
                first, *rest = str(extra).split("\n")
                head += "  " + first
                lines.append(head)
                lines.extend("        " + x for x in rest)
            else:
                lines.append(head)
        for k, v in self.data.items():
            if isinstance(v, str) and "\n" in v:
                lines.append("## {}".format(k))
                lines.append(v.rstrip("\n"))
            else:
                lines.append("## {}: {}".format(k, v))
        for n in self.notes:
            lines.append("note: " + n)
        s = self.summary()
        lines.append("summary: {pass} pass, {fail} fail, {skipped} skipped of {total}".format(**s))
        return "\n".join(lines) + "\n"

    def render(self, fmt: str = "text") -> str:
        return self.to_json() if fmt == "json" else self.to_text()
