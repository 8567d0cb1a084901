from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CheckResult:
    """Outcome of one lemma check: ``pass``, ``fail`` (with witness) or ``skipped``."""

    lemma: str
    status: str
    detail: str = ""
    witness: str | None = None
    values: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status != "fail"

    @classmethod
    def passed(cls, lemma, detail="", **values):
        return cls(lemma, "pass", detail, None, values)

    @classmethod
    def failed(cls, lemma, detail, witness=None, **values):
        return cls(lemma, "fail", detail, witness, values)

    @classmethod
    def skipped(cls, lemma, reason, **values):
        return cls(lemma, "skipped", reason, None, values)
