"""Synthetic traffic generators and named scenario presets."""

from __future__ import annotations

from dataclasses import replace

from .ctm import (CtmFlows, CtmLink, CtmMerge, CtmNetwork, CtmStabilityError, CtmState,
                  DemandProfile, ctm_step, run_scenario, scenario_network)
from .latent import LATENT_LINKS, LatentDriverConfig, generate_latent_network
from .poisson import (LinearPoissonCoeffs, PoissonChainConfig, generate_chain,
                      generate_linear_model, generate_merge)

# p_fast for S-III is higher than for S-II: with an even split the delayed
# share from sensor 1 is hard to tell apart from sensor 2's delayed cars.
S2_P_FAST = 0.5
S3_P_FAST = 0.8

SCENARIO_NAMES = ("s1", "s2", "s3", "c1", "c2", "linear", "latent")
DEFAULT_LENGTH = {"s1": 100_000, "s2": 100_000, "s3": 100_000, "c1": 10_000,
                  "c2": 10_000, "linear": 100_000, "latent": 100_000}


def simulate_scenario(name: str, seed: int = 0, n: int | None = None):
    """Series of a named preset.

    ``s1``/``s2``/``s3`` are the Poisson chain, instantaneous chain and merge;
    ``c1``/``c2`` the CTM road and merge; ``linear`` the three-sensor linear
    Poisson system; ``latent`` the seven-sensor hidden-driver network.
    """
    if name not in SCENARIO_NAMES:
        raise ValueError(f"unknown scenario {name!r}; expected one of {', '.join(SCENARIO_NAMES)}")
    n = DEFAULT_LENGTH[name] if n is None else n
    if name == "s1":
        return generate_chain(PoissonChainConfig(n=n, seed=seed))
    if name == "s2":
        return generate_chain(PoissonChainConfig(n=n, seed=seed, instantaneous=True,
                                                 p_fast=S2_P_FAST))
    if name == "s3":
        return generate_merge(PoissonChainConfig(num_sensors=3, n=n, seed=seed, p_fast=S3_P_FAST))
    if name in ("c1", "c2"):
        return run_scenario("C-I" if name == "c1" else "C-II", n, seed=seed)
    if name == "linear":
        return generate_linear_model(LinearPoissonCoeffs(n=n, seed=seed))
    return generate_latent_network(replace(LatentDriverConfig(), n=n, seed=seed))


__all__ = [
    "CtmFlows", "CtmLink", "CtmMerge", "CtmNetwork", "CtmStabilityError", "CtmState",
    "DemandProfile", "LATENT_LINKS", "LatentDriverConfig", "LinearPoissonCoeffs",
    "PoissonChainConfig", "SCENARIO_NAMES", "ctm_step", "generate_chain",
    "generate_latent_network", "generate_linear_model", "generate_merge", "run_scenario",
    "scenario_network", "simulate_scenario",
]
