"""Built-in test functions for the denoising experiments."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict

import numpy as np


@dataclass(frozen=True)
class SampledSignal:
    function_id: str
    formula: str
    evaluate: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x):
        return self.evaluate(np.asarray(x, dtype=float))


CATALOG: Dict[str, SampledSignal] = {
    s.function_id: s
    for s in (
        SampledSignal("fig4", "sin(x/10) + (x/50)^2", lambda x: np.sin(x / 10.0) + (x / 50.0) ** 2),
        SampledSignal("fig6", "cos(0.4x) + (x/40 - 1)^3", lambda x: np.cos(0.4 * x) + (x / 40.0 - 1.0) ** 3),
        SampledSignal("fig7", "1 for x >= 50, else 0", lambda x: np.where(x >= 50.0, 1.0, 0.0)),
        SampledSignal("fig10", "cos(0.1x) - (x/50 - 1)^3", lambda x: np.cos(0.1 * x) - (x / 50.0 - 1.0) ** 3),
        SampledSignal("fig11", "cos(0.4x) - (x/50 - 0.8)^3", lambda x: np.cos(0.4 * x) - (x / 50.0 - 0.8) ** 3),
        SampledSignal("linear", "x/50 - 1", lambda x: x / 50.0 - 1.0),
    )
}


def get_signal(function_id: str) -> SampledSignal:
    try:
        return CATALOG[function_id]
    except KeyError:
        raise ValueError(f"unknown function id {function_id!r}; choose from {sorted(CATALOG)}") from None
