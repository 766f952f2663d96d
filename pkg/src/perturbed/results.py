"""Result containers shared by the two cycle pipelines."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class WitnessResult:
    """Outcome of a full every-length cycle hunt on one instance."""

    n: int
    cycles: dict = field(default_factory=dict)  # k -> vertex tuple
    failures: list = field(default_factory=list)  # {k, stage, reason}
    flags: list = field(default_factory=list)  # soft budget overruns etc.
    meta: dict = field(default_factory=dict)

    @property
    def complete(self) -> bool:
        return not self.failures and len(self.cycles) == max(0, self.n - 2)

    def failure_ks(self) -> list[int]:
        return sorted({f["k"] for f in self.failures if f.get("k") is not None})

    def to_jsonable(self) -> dict:
        return {
            "n": self.n,
            "complete": self.complete,
            "witness": [
                {"k": k, "vertices": list(self.cycles[k])} for k in sorted(self.cycles)
            ],
            "failures": self.failures,
            "flags": self.flags,
            "meta": self.meta,
        }
