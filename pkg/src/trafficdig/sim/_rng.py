"""Seeded random streams for the simulators.

All generators draw from Philox, a counter-based 64-bit generator whose output
does not depend on platform.  Sub-streams are keyed by a text label so that
adding a scenario never shifts the stream of another.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_rng(seed: int, label: str = "") -> np.random.Generator:
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    key = int.from_bytes(digest[:8], "little")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), key])))


def poisson_inversion(rng: np.random.Generator, lam, size=None) -> np.ndarray:
    """Poisson draws by sequential CDF inversion of uniform variates.

    Meant for the small means used here (up to ~30); each draw uses exactly one
    uniform so streams are reproducible.
    """
    lam = np.asarray(lam, dtype=np.float64)
    if size is None:
        size = lam.shape
    lam = np.broadcast_to(lam, size)
    if np.any(lam < 0):
        raise ValueError("Poisson means must be non-negative")
    u = rng.random(size)
    k = np.zeros(size, dtype=np.int64)
    p = np.exp(-lam)
    cdf = p.copy()
    active = u > cdf
    step = 0
    while np.any(active):
        step += 1
        p = np.where(active, p * lam / step, p)
        k += active
        cdf = np.where(active, cdf + p, cdf)
        # guard against cdf stalling just below u from rounding
        active = active & (u > cdf) & (p > 0)
    return k
