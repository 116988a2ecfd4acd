"""Cost criteria for operand sizes."""
from __future__ import annotations

import enum


class CostModel(enum.Enum):
    CONSTANT = "constant"
    LOGARITHMIC = "logarithmic"

    @classmethod
    def parse(cls, text: str) -> CostModel:
        t = text.strip().lower()
        for m in cls:
            if m.value.startswith(t):
                return m
        raise ValueError(f"unknown cost criterion {text!r}")


def l(n: int, model: CostModel = CostModel.LOGARITHMIC) -> int:  # noqa: E743
    """Charge for an operand of value ``n``: 1, or the bit length of |n| (1 for 0)."""
    if model is CostModel.CONSTANT:
        return 1
    return max(1, abs(n).bit_length())
