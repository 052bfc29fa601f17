from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class PosteriorSummary:
    exact_value: float
    lower_bound: float | None = None
    upper_bound: float | None = None
    n: int = 0
    method: str = ""

    def __post_init__(self):
        if not 0.0 <= self.exact_value <= 1.0:
            raise ValueError(f"posterior probability {self.exact_value} outside [0, 1]")
        lo, hi = self.lower_bound, self.upper_bound
        if lo is not None and hi is not None and not lo <= self.exact_value <= hi:
            raise ValueError("bounds do not bracket the exact value")

    def to_dict(self) -> dict:
        return asdict(self)
