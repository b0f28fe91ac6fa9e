"""Seven-sensor network with a hidden common driver.

Physical links (cars move one step per hop, each car kept with probability
``keep``)::

    s1 -> s2, s1 -> s3, s1 -> s5, s5 -> s4, s6 -> s2, s6 -> s5, s7 -> s4

Sensors s6 and s7 are not connected by road but both see traffic released by
an unobserved source ``H``: s7 counts it as it happens, s6 two steps later.
Leaving s7 out of the analysis makes s4 (which receives s7's cars) the best
remaining proxy for ``H``, so a spurious ``s4 -> s6`` dependence shows up.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._validation import check_int, check_real
from ..series import FlowSeries
from ._rng import derive_rng, poisson_inversion

LATENT_LINKS = (("s1", "s2"), ("s1", "s3"), ("s1", "s5"), ("s5", "s4"),
                ("s6", "s2"), ("s6", "s5"), ("s7", "s4"))


@dataclass(frozen=True)
class LatentDriverConfig:
    n: int = 100_000
    source_mean: float = 4.0
    hidden_mean: float = 4.0
    keep: float = 0.8
    noise_mean: float = 0.5
    seed: int = 0
    period_seconds: int = 300

    def __post_init__(self):
        check_int(self.n, "n", minimum=3)
        check_real(self.source_mean, "source_mean", low=0.0)
        check_real(self.hidden_mean, "hidden_mean", low=0.0)
        check_real(self.keep, "keep", low=0.0, high=1.0)
        check_real(self.noise_mean, "noise_mean", low=0.0)


def _shift(values: np.ndarray, lag: int) -> np.ndarray:
    out = np.zeros_like(values)
    out[lag:] = values[:-lag]
    return out


def generate_latent_network(config: LatentDriverConfig = LatentDriverConfig()) -> list[FlowSeries]:
    """Series ``s1`` .. ``s7`` of the hidden-driver network."""
    rng = derive_rng(config.seed, "latent/r3")
    n = config.n

    def hop(cars):
        return _shift(rng.binomial(cars, config.keep), 1)

    source = poisson_inversion(rng, config.source_mean, n)
    hidden = poisson_inversion(rng, config.hidden_mean, n)
    traffic = {"s1": source, "s7": hidden, "s6": _shift(hidden, 2)}
    traffic["s3"] = hop(traffic["s1"])
    traffic["s5"] = hop(traffic["s1"]) + hop(traffic["s6"])
    traffic["s2"] = hop(traffic["s1"]) + hop(traffic["s6"])
    traffic["s4"] = hop(traffic["s5"]) + hop(traffic["s7"])
    return [FlowSeries(f"s{j}", traffic[f"s{j}"] + poisson_inversion(rng, config.noise_mean, n),
                       config.period_seconds)
            for j in range(1, 8)]
