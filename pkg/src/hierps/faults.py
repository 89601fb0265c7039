"""Per-edge operational schedules under the B-window availability rule.

Every schedule generated here keeps each link operational at least once in
any window of ``window`` consecutive rounds, which is the only assumption
the consensus analysis needs. Senders never learn whether a round's packet
went through.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .topology import NetworkSpec


@dataclass
class LinkSchedule:
    """Operational bits for every directed edge over rounds ``1..horizon``.

    ``bits[t, e]`` says whether flat edge ``e`` delivers in round ``t``;
    row 0 is padding so rounds can be indexed directly. Columns follow the
    spec's flat edge order (clusters in index order, edges lexicographic).
    Immutable after generation.
    """

    horizon: int
    window: int
    bits: np.ndarray
    edge_order: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        self.bits.setflags(write=False)

    @property
    def num_edges(self) -> int:
        return self.bits.shape[1]

    def operational(self, t: int) -> np.ndarray:
        return self.bits[t]

    def to_csv(self, path) -> None:
        """Audit dump: one row per (cluster, src, dst, round, bit)."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["cluster", "src", "dst", "round", "bit"])
            for e, (cluster, src, dst) in enumerate(self.edge_order):
                for t in range(1, self.horizon + 1):
                    writer.writerow([cluster, src, dst, t, int(self.bits[t, e])])


def _empty_bits(spec: NetworkSpec, horizon: int) -> np.ndarray:
    return np.zeros((horizon + 1, spec.num_edges), dtype=bool)


def always_on(spec: NetworkSpec, horizon: int) -> LinkSchedule:
    """Fully reliable links: every edge delivers every round (window 1)."""
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    bits = np.ones((horizon + 1, spec.num_edges), dtype=bool)
    return LinkSchedule(horizon=horizon, window=1, bits=bits, edge_order=spec.flat_edges)


def geometric_schedule(spec: NetworkSpec, horizon: int, window: int, seed: int) -> LinkSchedule:
    """Random drops with capped-geometric gaps between deliveries.

    Every edge is operational in round 1; afterwards the gap to its next
    operational round is ``min(window, Geometric(p))`` with
    ``p = 1 / (1.5 * window)``, drawn independently per edge. The cap keeps
    the B-window assumption satisfied from the first round on.
    """
    if window < 1:
        raise ValueError("window must be at least 1")
    rng = np.random.default_rng(seed)
    p = 1.0 / (1.5 * window)
    bits = _empty_bits(spec, horizon)
    for e in range(spec.num_edges):
        t = 1
        while t <= horizon:
            bits[t, e] = True
            t += min(window, int(rng.geometric(p)))
    return LinkSchedule(horizon=horizon, window=window, bits=bits, edge_order=spec.flat_edges)


def adversarial_schedule(spec: NetworkSpec, horizon: int, window: int, seed: int) -> LinkSchedule:
    """Worst-case schedules: exactly one delivery per length-B block.

    The delivery position is drawn per block, but never later in the block
    than the previous block's position; that constraint is what keeps every
    *sliding* window covered while gaps are pushed to the full B rounds.
    """
    if window < 1:
        raise ValueError("window must be at least 1")
    rng = np.random.default_rng(seed)
    bits = _empty_bits(spec, horizon)
    for e in range(spec.num_edges):
        offset = int(rng.integers(1, window + 1))
        start = 1
        while start <= horizon:
            width = min(window, horizon - start + 1)
            pos = min(offset, width)
            bits[start + pos - 1, e] = True
            offset = int(rng.integers(1, pos + 1))
            start += window
    return LinkSchedule(horizon=horizon, window=window, bits=bits, edge_order=spec.flat_edges)


def validate_window(sched: LinkSchedule) -> bool:
    """True iff every length-B sliding window over ``1..horizon`` contains an
    operational round for every edge."""
    b, t_max = sched.window, sched.horizon
    if t_max < b:
        return True
    active = sched.bits[1:]
    for e in range(sched.num_edges):
        ops = np.nonzero(active[:, e])[0] + 1
        if ops.size == 0:
            return False
        if ops[0] > b or ops[-1] < t_max - b + 1:
            return False
        if ops.size > 1 and int(np.diff(ops).max()) > b:
            return False
    return True
