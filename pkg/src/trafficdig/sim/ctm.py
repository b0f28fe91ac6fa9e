"""Stochastic cell transmission model with an optional two-link merge.

Each link is a row of cells holding a vehicle density.  Per step, every cell
draws a free-flow speed ``V`` and a congestion wave speed ``W`` uniformly from
their ranges, and flow between neighbours is the smaller of the upstream
demand ``min(V rho, q_max)`` and the downstream supply
``min(W (P - rho), q_max)``.  At a merge the receiving cell's supply is shared
between the two upstream cells in proportion to their densities.

Units: densities in veh/m, flows in veh/s, lengths in m, time in s.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .._validation import check_int, check_real
from ..series import FlowSeries
from ._rng import derive_rng

_BOUND_TOL = 1e-9


class CtmStabilityError(ArithmeticError):
    """A density left ``[0, P]``; the step violated the CFL condition."""


@dataclass(frozen=True)
class CtmLink:
    cells: int
    cell_length: float = 100.0
    q_max: float = 0.6
    jam_density: float = 0.15


@dataclass(frozen=True)
class CtmMerge:
    """``from_link`` ends by feeding cell ``into_cell`` (0-based) of ``into_link``."""

    from_link: int
    into_link: int
    into_cell: int


@dataclass(frozen=True)
class CtmNetwork:
    links: tuple
    time_step: float = 3.0
    v_range: tuple = (20.0, 30.0)
    w_range: tuple = (5.0, 8.0)
    merge: CtmMerge | None = None
    sensors: tuple = ()

    def __post_init__(self):
        if not self.links:
            raise ValueError("network needs at least one link")
        check_real(self.time_step, "time_step", low=0.0, low_open=True)
        vmin, vmax = self.v_range
        wmin, wmax = self.w_range
        if not 0 < vmin <= vmax:
            raise ValueError(f"need 0 < V_min <= V_max, got {self.v_range}")
        if not 0 < wmin <= wmax:
            raise ValueError(f"need 0 < W_min <= W_max, got {self.w_range}")
        for k, link in enumerate(self.links):
            check_int(link.cells, f"links[{k}].cells", minimum=1)
            for name in ("cell_length", "q_max", "jam_density"):
                check_real(getattr(link, name), f"links[{k}].{name}", low=0.0, low_open=True)
            if vmax * self.time_step > link.cell_length or wmax * self.time_step > link.cell_length:
                raise ValueError(
                    f"link {k}: CFL condition violated (V_max*T={vmax * self.time_step}, "
                    f"W_max*T={wmax * self.time_step}, L={link.cell_length})")
        if self.merge is not None:
            m = self.merge
            if m.from_link == m.into_link:
                raise ValueError("a link cannot merge into itself")
            for idx in (m.from_link, m.into_link):
                if not 0 <= idx < len(self.links):
                    raise ValueError(f"merge link index {idx} out of range")
            if not 1 <= m.into_cell < self.links[m.into_link].cells:
                raise ValueError(f"merge cell {m.into_cell} outside link {m.into_link}")
        for link_idx, cell in self.sensors:
            if not 0 <= link_idx < len(self.links) or not 0 <= cell < self.links[link_idx].cells:
                raise ValueError(f"sensor ({link_idx}, {cell}) outside the network")


@dataclass
class CtmState:
    densities: list
    t: int = 0

    @classmethod
    def empty(cls, network: CtmNetwork) -> "CtmState":
        return cls([np.zeros(link.cells) for link in network.links])

    def vehicles(self, network: CtmNetwork) -> float:
        return float(sum(link.cell_length * rho.sum()
                         for link, rho in zip(network.links, self.densities)))


@dataclass
class CtmFlows:
    """Flows of one step: ``outflow[l][i]`` leaves cell ``i`` of link ``l``."""

    inflow: np.ndarray
    outflow: list
    exit: np.ndarray = field(default=None)


def ctm_step(network: CtmNetwork, state: CtmState, inflows,
             rng: np.random.Generator) -> tuple[CtmState, CtmFlows]:
    """Advance every cell density by one time step.

    ``inflows[l]`` is the external demand (veh/s) at the head of link ``l``;
    the flow actually admitted is capped by the first cell's supply.  The last
    cell of a link that does not merge discharges its full demand.
    """
    inflows = np.asarray(inflows, dtype=np.float64)
    if inflows.shape != (len(network.links),) or np.any(inflows < 0):
        raise ValueError("inflows must be one non-negative value per link")
    T = network.time_step
    demand, supply = [], []
    for link, rho in zip(network.links, state.densities):
        v = rng.uniform(*network.v_range, size=link.cells)
        w = rng.uniform(*network.w_range, size=link.cells)
        demand.append(np.minimum(v * rho, link.q_max))
        supply.append(np.minimum(w * (link.jam_density - rho), link.q_max))

    admitted = np.minimum(inflows, [s[0] for s in supply])
    outflow = []
    for k, (d, s) in enumerate(zip(demand, supply)):
        out = np.empty_like(d)
        out[:-1] = np.minimum(d[:-1], s[1:])
        out[-1] = d[-1]
        outflow.append(out)

    merge = network.merge
    if merge is not None:
        main, side, c = merge.into_link, merge.from_link, merge.into_cell
        rho_main = state.densities[main][c - 1]
        rho_side = state.densities[side][-1]
        total = rho_main + rho_side
        share_main = 0.5 if total == 0 else rho_main / total
        cap = supply[main][c]
        outflow[main][c - 1] = min(demand[main][c - 1], cap * share_main)
        outflow[side][-1] = min(demand[side][-1], cap * (1.0 - share_main))

    new = []
    exits = np.zeros(len(network.links))
    for k, (link, rho, out) in enumerate(zip(network.links, state.densities, outflow)):
        into = np.empty_like(out)
        into[0] = admitted[k]
        into[1:] = out[:-1]
        if merge is not None and k == merge.into_link:
            into[merge.into_cell] += outflow[merge.from_link][-1]
        if merge is None or k != merge.from_link:
            exits[k] = out[-1]
        nxt = rho + (T / link.cell_length) * (into - out)
        if np.any(nxt < -_BOUND_TOL) or np.any(nxt > link.jam_density + _BOUND_TOL):
            raise CtmStabilityError(f"density left [0, {link.jam_density}] on link {k}")
        new.append(nxt)
    return CtmState(new, state.t + 1), CtmFlows(admitted, outflow, exits)


@dataclass(frozen=True)
class DemandProfile:
    """Head-of-link demand alternating between two fractions of capacity."""

    high: float = 0.7
    low: float = 0.3
    period: int = 20
    noise: float = 0.2

    def sample(self, n: int, capacity: float, rng: np.random.Generator) -> np.ndarray:
        phase = (np.arange(n) // self.period) % 2
        level = np.where(phase == 0, self.high, self.low)
        jitter = rng.uniform(-self.noise, self.noise, size=n)
        return np.clip(level + jitter, 0.0, None) * capacity


SCENARIOS = ("C-I", "C-II")

# Taps are 0-based.  Sensors sit a few cells apart so that a car crosses
# from one to the next within about four steps, inside the memory depths
# used for these scenarios; wider spacing lets the shared demand dominate.


def scenario_network(kind: str, **overrides) -> CtmNetwork:
    """Topology of a named scenario; keyword overrides replace network fields."""
    link_keys = {"cell_length", "q_max", "jam_density"}
    link_kw = {k: overrides.pop(k) for k in list(overrides) if k in link_keys}
    if kind == "C-I":
        net = CtmNetwork(links=(CtmLink(100, **link_kw),),
                         sensors=((0, 4), (0, 7), (0, 10), (0, 13)))
    elif kind == "C-II":
        net = CtmNetwork(links=(CtmLink(200, **link_kw), CtmLink(100, **link_kw)),
                         merge=CtmMerge(from_link=1, into_link=0, into_cell=99),
                         sensors=((0, 97), (1, 98), (0, 100)))
    else:
        raise ValueError(f"unknown CTM scenario {kind!r}; expected one of {SCENARIOS}")
    return replace(net, **overrides) if overrides else net


def run_scenario(kind: str, n: int, seed: int = 0, demand: DemandProfile | Sequence | None = None,
                 warmup: int = 500, period_seconds: int | None = None,
                 **overrides) -> list[FlowSeries]:
    """Simulate a scenario and read the sensors.

    A sensor reports the outflow of its cell over one step, in vehicles,
    floored to an integer.  ``demand`` is one profile for all links or one per
    link.  The first ``warmup`` steps fill the road and are discarded.
    """
    n = check_int(n, "n", minimum=1)
    network = scenario_network(kind, **overrides)
    rng = derive_rng(seed, f"ctm/{kind}")
    if demand is None:
        demand = DemandProfile()
    profiles = list(demand) if isinstance(demand, (list, tuple)) else [demand] * len(network.links)
    if len(profiles) != len(network.links):
        raise ValueError(f"need {len(network.links)} demand profiles, got {len(profiles)}")
    total = n + warmup
    heads = np.column_stack([p.sample(total, link.q_max, rng)
                             for p, link in zip(profiles, network.links)])
    state = CtmState.empty(network)
    readings = np.empty((n, len(network.sensors)))
    for t in range(total):
        state, flows = ctm_step(network, state, heads[t], rng)
        if t >= warmup:
            for j, (link_idx, cell) in enumerate(network.sensors):
                readings[t - warmup, j] = flows.outflow[link_idx][cell] * network.time_step
    period = int(round(network.time_step)) if period_seconds is None else period_seconds
    counts = np.floor(readings + 1e-12).astype(np.int64)
    return [FlowSeries(f"s{j + 1}", counts[:, j], max(period, 1))
            for j in range(len(network.sensors))]
