"""Directed multi-cluster network model.

A network is a set of agents partitioned into clusters, each cluster carrying
its own directed superset edge set. Links may go silent in individual rounds
(see :mod:`hierps.faults`) but never appear outside the superset. Clusters
talk to each other only through the parameter server, which is not an agent.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np
import yaml

from .errors import EmptyCluster, GenerationBudgetExceeded, NotStronglyConnected

Edge = tuple[int, int]


@dataclass(frozen=True)
class NetworkSpec:
    """A directed network split into disjoint clusters.

    Agents are numbered ``0..num_agents-1`` and every directed edge connects
    two agents of the same cluster. ``designated[i]`` is the single agent of
    cluster ``i`` that exchanges messages with the parameter server.

    Instances are immutable after construction; the derived index arrays are
    read-only and safe to share across threads.
    """

    num_agents: int
    clusters: tuple[tuple[int, ...], ...]
    edges: tuple[tuple[Edge, ...], ...]
    designated: tuple[int, ...]

    def __post_init__(self):
        self._check_well_formed()
        cluster_of = np.full(self.num_agents, -1, dtype=np.int64)
        for i, members in enumerate(self.clusters):
            for a in members:
                cluster_of[a] = i
        flat = [(i, u, v) for i, es in enumerate(self.edges) for (u, v) in es]
        edge_cluster = np.array([f[0] for f in flat], dtype=np.int64)
        edge_src = np.array([f[1] for f in flat], dtype=np.int64)
        edge_dst = np.array([f[2] for f in flat], dtype=np.int64)
        out_degree = np.zeros(self.num_agents, dtype=np.int64)
        for s in edge_src:
            out_degree[s] += 1
        inv_degp1 = 1.0 / (out_degree + 1.0)
        for arr in (cluster_of, edge_cluster, edge_src, edge_dst, out_degree, inv_degp1):
            arr.setflags(write=False)
        object.__setattr__(self, "cluster_of", cluster_of)
        object.__setattr__(self, "edge_cluster", edge_cluster)
        object.__setattr__(self, "edge_src", edge_src)
        object.__setattr__(self, "edge_dst", edge_dst)
        object.__setattr__(self, "out_degree", out_degree)
        object.__setattr__(self, "inv_degp1", inv_degp1)
        object.__setattr__(self, "flat_edges", tuple(flat))

    def _check_well_formed(self):
        seen: set[int] = set()
        for i, members in enumerate(self.clusters):
            if not members:
                raise EmptyCluster(f"cluster {i} has no agents")
            if seen.intersection(members):
                raise ValueError(f"cluster {i} overlaps another cluster")
            seen.update(members)
        if seen != set(range(self.num_agents)):
            raise ValueError("clusters do not partition the agent ids")
        if len(self.edges) != len(self.clusters):
            raise ValueError("need one edge set per cluster")
        for i, (members, es) in enumerate(zip(self.clusters, self.edges)):
            mset = set(members)
            for (u, v) in es:
                if u == v:
                    raise ValueError(f"self-loop ({u},{v}) in cluster {i}; self-weights are implicit")
                if u not in mset or v not in mset:
                    raise ValueError(f"edge ({u},{v}) leaves cluster {i}")
            if len(set(es)) != len(es):
                raise ValueError(f"duplicate edge in cluster {i}")
        if len(self.designated) != len(self.clusters):
            raise ValueError("need one designated agent per cluster")
        for i, d in enumerate(self.designated):
            if d not in self.clusters[i]:
                raise ValueError(f"designated agent {d} not in cluster {i}")

    @classmethod
    def create(cls, clusters, edges, designated=None) -> "NetworkSpec":
        """Build a spec from plain lists, normalising the ordering.

        Cluster members are sorted ascending and edges lexicographically by
        (source, destination), which fixes the node indexing used everywhere
        else. The designated agent defaults to the lowest id of each cluster.
        """
        clusters = tuple(tuple(sorted(int(a) for a in c)) for c in clusters)
        edges = tuple(tuple(sorted((int(u), int(v)) for (u, v) in es)) for es in edges)
        if designated is None:
            designated = tuple(c[0] for c in clusters if c)
        else:
            designated = tuple(int(d) for d in designated)
        num_agents = sum(len(c) for c in clusters)
        return cls(num_agents=num_agents, clusters=clusters, edges=edges, designated=designated)

    @property
    def num_clusters(self) -> int:
        return len(self.clusters)

    @property
    def num_edges(self) -> int:
        return len(self.flat_edges)

    @property
    def augmented_size(self) -> int:
        """Agents plus one virtual node per directed edge."""
        return self.num_agents + self.num_edges

    def cluster_edges(self, i: int) -> tuple[Edge, ...]:
        return self.edges[i]

    def to_dict(self) -> dict:
        return {
            "num_agents": self.num_agents,
            "clusters": [
                {
                    "agents": list(c),
                    "designated": int(self.designated[i]),
                    "edges": [[int(u), int(v)] for (u, v) in self.edges[i]],
                }
                for i, c in enumerate(self.clusters)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NetworkSpec":
        clusters = [c["agents"] for c in data["clusters"]]
        edges = [[tuple(e) for e in c["edges"]] for c in data["clusters"]]
        designated = [c.get("designated", min(c["agents"])) for c in data["clusters"]]
        spec = cls.create(clusters, edges, designated)
        if "num_agents" in data and spec.num_agents != int(data["num_agents"]):
            raise ValueError("num_agents does not match the cluster partition")
        return spec


def save_network(spec: NetworkSpec, path) -> None:
    """Write a spec to the documented YAML format (see docs/formats.md)."""
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(spec.to_dict(), fh, sort_keys=False)


def load_network(path) -> NetworkSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return NetworkSpec.from_dict(yaml.safe_load(fh))


@dataclass(frozen=True)
class ValidationReport:
    """Per-cluster structural constants; existence implies every cluster is
    strongly connected."""

    diameters: tuple[int, ...]
    betas: tuple[float, ...]


@dataclass(frozen=True)
class GraphConstants:
    """Derived constants controlling the worst-case consensus contraction.

    ``beta[i] = 1 / (1 + max out-degree in cluster i)^2`` is the smallest
    two-hop self weight in cluster i. Over any window of two fusion periods
    the row spread of the mixing-matrix product contracts by at least
    ``gamma = 1 - min(beta)^(2 * max_diameter * window) / (4 M^2)``.

    ``gamma`` is numerically indistinguishable from 1 on large networks, so
    the complement is stored and all powers of gamma go through ``log1p``.
    """

    diameters: tuple[int, ...]
    betas: tuple[float, ...]
    max_diameter: int
    min_beta: float
    num_clusters: int
    window: int
    sync_period: int
    gamma_complement: float

    @property
    def gamma(self) -> float:
        return 1.0 - self.gamma_complement

    @property
    def log_mixing_floor(self) -> float:
        """log of min(beta)^(2 * max_diameter * window)."""
        return 2.0 * self.max_diameter * self.window * math.log(self.min_beta)

    @property
    def mixing_floor(self) -> float:
        return math.exp(self.log_mixing_floor)

    def gamma_pow(self, exponent: float) -> float:
        """gamma**exponent, accurate even when gamma rounds to 1.0."""
        if exponent == 0.0:
            return 1.0
        return math.exp(exponent * math.log1p(-self.gamma_complement))

    def one_minus_gamma_pow(self, exponent: float) -> float:
        """1 - gamma**exponent without cancellation."""
        return -math.expm1(exponent * math.log1p(-self.gamma_complement))


def _eccentricities(n: int, adj: list[list[int]]) -> list[int]:
    """BFS eccentricity of every node; -1 marks an unreachable pair."""
    ecc = []
    for s in range(n):
        dist = [-1] * n
        dist[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for v in adj[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    q.append(v)
        if min(dist) < 0:
            return [-1]
        ecc.append(max(dist))
    return ecc


def validate(spec: NetworkSpec) -> ValidationReport:
    """Check strong connectivity of every cluster and derive D_i and beta_i.

    Diameters come from all-pairs BFS on the cluster subgraph. Single-agent
    clusters get diameter 1 so the default fusion period stays positive.

    Raises:
        NotStronglyConnected: some cluster has an unreachable agent pair.
        EmptyCluster: raised at construction, re-checked here.
    """
    diameters = []
    betas = []
    for i, members in enumerate(spec.clusters):
        if not members:
            raise EmptyCluster(f"cluster {i} has no agents")
        local = {a: k for k, a in enumerate(members)}
        n = len(members)
        adj: list[list[int]] = [[] for _ in range(n)]
        for (u, v) in spec.edges[i]:
            adj[local[u]].append(local[v])
        ecc = _eccentricities(n, adj)
        if ecc == [-1]:
            raise NotStronglyConnected(i)
        diameters.append(max(1, max(ecc)))
        max_deg = max(int(spec.out_degree[a]) for a in members)
        betas.append(1.0 / (max_deg + 1) ** 2)
    return ValidationReport(diameters=tuple(diameters), betas=tuple(betas))


def derive_constants(spec: NetworkSpec, window: int) -> GraphConstants:
    """Compute the contraction constants for a B-round availability window.

    The default fusion period is ``window * max_diameter``: long enough for
    any value to cross its cluster between consecutive fusions.
    """
    if window < 1:
        raise ValueError("availability window must be a positive integer")
    report = validate(spec)
    d_star = max(report.diameters)
    min_beta = min(report.betas)
    m = spec.num_clusters
    log_floor = 2.0 * d_star * window * math.log(min_beta)
    complement = math.exp(log_floor - math.log(4.0 * m * m))
    return GraphConstants(
        diameters=report.diameters,
        betas=report.betas,
        max_diameter=d_star,
        min_beta=min_beta,
        num_clusters=m,
        window=window,
        sync_period=window * d_star,
        gamma_complement=complement,
    )


@dataclass(frozen=True)
class AugmentedGraph:
    """One cluster's graph extended with a virtual node per directed edge.

    A virtual node models the in-flight content of its edge: whatever was
    sent but not yet delivered is treated as parked there. Node indexing is
    deterministic: agents first in ascending id order, then edges in
    lexicographic (source, destination) order.
    """

    cluster: int
    agents: tuple[int, ...]
    edges: tuple[Edge, ...]

    @property
    def total_size(self) -> int:
        return len(self.agents) + len(self.edges)

    @property
    def index_map(self) -> dict:
        """Bijection from node label to local index. Agent labels are ints,
        virtual labels are the (source, destination) edge tuples."""
        mapping: dict = {a: k for k, a in enumerate(self.agents)}
        base = len(self.agents)
        for k, e in enumerate(self.edges):
            mapping[e] = base + k
        return mapping

    def augmented_edges(self) -> set:
        """Original edges plus the two links routing through each virtual node."""
        out: set = set(self.edges)
        for (u, v) in self.edges:
            out.add((u, (u, v)))
            out.add(((u, v), v))
        return out


def build_augmented(spec: NetworkSpec, cluster: int) -> AugmentedGraph:
    if not 0 <= cluster < spec.num_clusters:
        raise ValueError(f"no cluster {cluster}")
    return AugmentedGraph(
        cluster=cluster,
        agents=spec.clusters[cluster],
        edges=spec.edges[cluster],
    )


def _strongly_connected(n: int, edges) -> bool:
    if n <= 1:
        return True
    fwd: list[list[int]] = [[] for _ in range(n)]
    rev: list[list[int]] = [[] for _ in range(n)]
    for (u, v) in edges:
        fwd[u].append(v)
        rev[v].append(u)

    def reaches_all(adj) -> bool:
        seen = [False] * n
        seen[0] = True
        q = deque([0])
        count = 1
        while q:
            u = q.popleft()
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    count += 1
                    q.append(v)
        return count == n

    return reaches_all(fwd) and reaches_all(rev)


def generate_sbm(
    num_clusters: int,
    nodes_per_cluster: int,
    edge_prob: float,
    seed: int,
    max_resamples: int = 10000,
) -> NetworkSpec:
    """Sample a multi-cluster network from a stochastic block model.

    Each cluster is an independent directed Erdos-Renyi graph on
    ``nodes_per_cluster`` agents; a cluster is resampled until it comes out
    strongly connected. There are no cross-cluster edges. Deterministic for
    a fixed seed.

    Raises:
        GenerationBudgetExceeded: a cluster failed ``max_resamples`` times,
            which signals ``edge_prob`` is too low for this cluster size.
    """
    if not 0.0 < edge_prob <= 1.0:
        raise ValueError("edge_prob must be in (0, 1]")
    rng = np.random.default_rng(seed)
    n = nodes_per_cluster
    clusters = []
    edge_sets = []
    for i in range(num_clusters):
        base = i * n
        members = list(range(base, base + n))
        for attempt in range(max_resamples):
            mask = rng.random((n, n)) < edge_prob
            np.fill_diagonal(mask, False)
            local_edges = [(int(u), int(v)) for u, v in zip(*np.nonzero(mask))]
            if _strongly_connected(n, local_edges):
                break
        else:
            raise GenerationBudgetExceeded(
                f"cluster {i}: no strongly connected sample in {max_resamples} draws"
            )
        clusters.append(members)
        edge_sets.append([(base + u, base + v) for (u, v) in local_edges])
    return NetworkSpec.create(clusters, edge_sets)
