"""Seeded synthetic panels with the triangular (nested) structure of real
location-activity data, plus a relatedness-driven diversification step.

Used by the experiment scripts and the acceptance suite; everything is a pure
function of its seed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metrics import SpecializationMatrix, _bipartite_components


@dataclass(frozen=True)
class PanelConfig:
    """Shape of a synthetic nested-with-noise panel."""

    n_locations: int = 32
    n_activities: int = 48
    min_diversity: int = 4
    max_diversity: int = 44
    noise: float = 0.06
    seed: int = 20260825

    def __post_init__(self):
        if not 0 <= self.noise < 0.5:
            raise ValueError("noise must be in [0, 0.5)")
        if not 1 <= self.min_diversity <= self.max_diversity < self.n_activities:
            raise ValueError("need 1 <= min_diversity <= max_diversity < n_activities")


def _labels(prefix: str, n: int) -> tuple[str, ...]:
    width = len(str(n - 1))
    return tuple(f"{prefix}{i:0{width}d}" for i in range(n))


def _repair(M: np.ndarray) -> None:
    """Ensure no zero rows/columns and a single bipartite component (in place)."""
    # zero rows pick up the most common activity; zero columns go to the most
    # diverse location — both keep the panel's nested texture
    for i in np.nonzero(M.sum(axis=1) == 0)[0]:
        M[i, int(np.argmax(M.sum(axis=0)))] = 1
    for j in np.nonzero(M.sum(axis=0) == 0)[0]:
        M[int(np.argmax(M.sum(axis=1))), j] = 1

    n_loc = M.shape[0]
    while True:
        comp = np.full(n_loc, -1)
        comp_act: dict[int, set[int]] = {}
        cid = 0
        for start in range(n_loc):
            if comp[start] >= 0:
                continue
            stack = [start]
            comp[start] = cid
            comp_act[cid] = set()
            while stack:
                i = stack.pop()
                for j in np.nonzero(M[i])[0]:
                    comp_act[cid].add(int(j))
                    for i2 in np.nonzero(M[:, j])[0]:
                        if comp[i2] < 0:
                            comp[i2] = cid
                            stack.append(int(i2))
            cid += 1
        if cid == 1:
            return
        # merge the second component into the first via its most diverse location
        rows = np.nonzero(comp == 1)[0]
        i = rows[int(np.argmax(M[rows].sum(axis=1)))]
        M[i, min(comp_act[0])] = 1


def nested_noise_matrix(cfg: PanelConfig = PanelConfig(), period: str = "t0") -> SpecializationMatrix:
    """Triangular diversity ramp with independent cell flips.

    Location i starts with the d_i most common activities (d linearly spaced
    from max_diversity down to min_diversity); each cell is then flipped with
    probability ``noise``; the result is repaired to have no zero margins and
    a single connected component.
    """
    rng = np.random.default_rng(cfg.seed)
    d = np.linspace(cfg.max_diversity, cfg.min_diversity, cfg.n_locations)
    d = np.round(d).astype(int)
    M = (np.arange(cfg.n_activities)[None, :] < d[:, None]).astype(np.uint8)
    flips = rng.random(M.shape) < cfg.noise
    M = np.where(flips, 1 - M, M).astype(np.uint8)
    _repair(M)
    return SpecializationMatrix(
        _labels("L", cfg.n_locations), _labels("A", cfg.n_activities), period, M,
    )


def diversification_step(m: SpecializationMatrix, omega_values: np.ndarray,
                         rate_scale: float, seed: int,
                         period: str = "t1") -> SpecializationMatrix:
    """One panel step where entry probability is proportional to density.

    Each baseline-zero cell enters with probability
    min(0.95, rate_scale * omega); no exits. Pure function of the seed.
    """
    rng = np.random.default_rng(seed)
    M0 = m.values.astype(np.uint8)
    p = np.clip(rate_scale * np.asarray(omega_values), 0.0, 0.95)
    draws = rng.random(M0.shape)
    entries = (M0 == 0) & (draws < p)
    return SpecializationMatrix(m.locations, m.activities, period,
                                (M0 | entries).astype(np.uint8), m.threshold)


def random_connected_specialization(rng: np.random.Generator, max_side: int = 6,
                                    period: str = "t0") -> SpecializationMatrix:
    """Random small binary matrix with no zero margins and one component.

    Rejection-samples until valid; used to drive oracle-vs-engine sweeps.
    """
    while True:
        n_loc = int(rng.integers(2, max_side + 1))
        n_act = int(rng.integers(2, max_side + 1))
        M = (rng.random((n_loc, n_act)) < rng.uniform(0.35, 0.75)).astype(np.uint8)
        if (M.sum(axis=1) == 0).any() or (M.sum(axis=0) == 0).any():
            continue
        m = SpecializationMatrix(_labels("L", n_loc), _labels("A", n_act), period, M)
        if len(_bipartite_components(m)) == 1:
            return m
