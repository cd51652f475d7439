"""Weighted directed social network with per-agent stubbornness.

The graph stores directed influence weights w_ij >= 0 (influence of j on i)
so explicitly asymmetric networks load unchanged; the random generators
emit symmetric weights. Stubborn agents are modelled purely through a large
anchoring weight k_i, never by freezing their state.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Graph",
    "GraphSpec",
    "build_erdos_renyi",
    "build_clustered",
    "build_explicit",
    "load_graph_csv",
    "radius_neighborhood",
]

_STREAM_GRAPH = 0x67726170  # domain tag so graph draws never alias other streams


class Graph:
    """Immutable agent roster: weights w_ij, stubbornness k_i, neighbor sets."""

    def __init__(self, n: int, weights: dict[tuple[int, int], float], stubbornness):
        if n < 1:
            raise ValueError("graph needs at least one agent")
        k = np.asarray(stubbornness, dtype=float)
        if k.shape != (n,):
            raise ValueError(f"stubbornness must have shape ({n},), got {k.shape}")
        if np.any(k < 0):
            raise ValueError("stubbornness k_i must be nonnegative")
        rows: list[list[tuple[int, float]]] = [[] for _ in range(n)]
        for (i, j), w in weights.items():
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i},{j}) out of range for n={n}")
            if i == j:
                raise ValueError(f"self-loop on agent {i} is not allowed")
            if w < 0:
                raise ValueError(f"weight w[{i},{j}]={w} must be nonnegative")
            if w > 0:
                rows[i].append((j, float(w)))
        self.n = n
        self.stubbornness = k
        self.stubbornness.flags.writeable = False
        self._neighbor_idx: list[np.ndarray] = []
        self._neighbor_w: list[np.ndarray] = []
        for row in rows:
            row.sort()
            idx = np.array([j for j, _ in row], dtype=int)
            wts = np.array([w for _, w in row], dtype=float)
            idx.flags.writeable = False
            wts.flags.writeable = False
            self._neighbor_idx.append(idx)
            self._neighbor_w.append(wts)
        self._dense: np.ndarray | None = None

    # -- spec'd views -------------------------------------------------

    @property
    def weights(self) -> dict[tuple[int, int], float]:
        """Sparse map (i, j) -> w_ij over the positive-weight edges."""
        out: dict[tuple[int, int], float] = {}
        for i in range(self.n):
            for j, w in zip(self._neighbor_idx[i], self._neighbor_w[i]):
                out[(i, int(j))] = float(w)
        return out

    def neighbors(self, i: int) -> np.ndarray:
        """eta_i = { j : w_ij > 0 }, sorted."""
        return self._neighbor_idx[i]

    def neighbor_weights(self, i: int) -> np.ndarray:
        return self._neighbor_w[i]

    def weight_sum(self, i: int) -> float:
        return float(self._neighbor_w[i].sum())

    def edge_count(self) -> int:
        return sum(len(idx) for idx in self._neighbor_idx)

    def dense_weights(self) -> np.ndarray:
        """Dense (n, n) weight matrix, built lazily for vectorized sums."""
        if self._dense is None:
            W = np.zeros((self.n, self.n))
            for i in range(self.n):
                W[i, self._neighbor_idx[i]] = self._neighbor_w[i]
            W.flags.writeable = False
            self._dense = W
        return self._dense

    @classmethod
    def empty(cls, n: int) -> "Graph":
        """n isolated agents with zero stubbornness."""
        return cls(n, {}, np.zeros(n))


@dataclass(frozen=True)
class GraphSpec:
    """Parameters for the seeded random generators."""

    kind: str = "erdos-renyi"  # erdos-renyi | clustered | explicit
    n: int = 10
    p: float = 0.1
    clusters: int = 1
    p_in: float = 0.3
    p_out: float = 0.02
    stubborn_fraction: float = 0.0
    stubborn_k: float = 1.0
    default_k: float = 0.0
    default_weight: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("p", "p_in", "p_out", "stubborn_fraction"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} must lie in [0, 1]")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 1 <= self.clusters <= self.n:
            raise ValueError(f"clusters={self.clusters} must lie in [1, n={self.n}]")
        if self.default_weight < 0 or self.stubborn_k < 0 or self.default_k < 0:
            raise ValueError("weights and stubbornness values must be nonnegative")


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([_STREAM_GRAPH, int(seed)]))


def _symmetric_edges(pairs: np.ndarray, w: float) -> dict[tuple[int, int], float]:
    weights: dict[tuple[int, int], float] = {}
    for i, j in pairs:
        weights[(int(i), int(j))] = w
        weights[(int(j), int(i))] = w
    return weights


def build_erdos_renyi(n: int, p: float, w: float = 1.0, k: float = 0.0, seed: int = 0) -> Graph:
    """G(n, p): each unordered pair linked independently with probability p.

    Linked pairs receive the symmetric weight w in both directions and every
    agent gets stubbornness k. Deterministic function of the seed.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability p={p} must lie in [0, 1]")
    if w < 0 or k < 0:
        raise ValueError("weight and stubbornness must be nonnegative")
    rng = _rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    mask = rng.random(iu.size) < p
    pairs = np.column_stack([iu[mask], ju[mask]])
    return Graph(n, _symmetric_edges(pairs, w), np.full(n, float(k)))


def build_clustered(spec: GraphSpec) -> Graph:
    """Near-equal clusters with dense intra- and sparse inter-cluster links.

    A seeded shuffle picks floor(stubborn_fraction * n) agents that receive
    the stubborn k-value; everyone else gets the default.
    """
    n, c = spec.n, spec.clusters
    rng = _rng(spec.seed)
    # cluster labels: sizes differ by at most one
    labels = np.repeat(np.arange(c), np.diff(np.linspace(0, n, c + 1).astype(int)))
    iu, ju = np.triu_indices(n, k=1)
    same = labels[iu] == labels[ju]
    prob = np.where(same, spec.p_in, spec.p_out)
    mask = rng.random(iu.size) < prob
    pairs = np.column_stack([iu[mask], ju[mask]])
    weights = _symmetric_edges(pairs, spec.default_weight)

    k = np.full(n, float(spec.default_k))
    n_stubborn = int(np.floor(spec.stubborn_fraction * n))
    order = rng.permutation(n)
    k[order[:n_stubborn]] = spec.stubborn_k
    return Graph(n, weights, k)


def build_explicit(n: int, weights: dict[tuple[int, int], float], stubbornness) -> Graph:
    return Graph(n, weights, stubbornness)


def load_graph_csv(edge_path, node_path) -> Graph:
    """Load an explicit graph from CSV files.

    Node list: header row then ``i,k_i``; every agent 0..n-1 must appear.
    Edge list: header row then ``i,j,w_ij`` with 0-based indices.
    """
    nodes: dict[int, float] = {}
    with open(node_path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{node_path}: missing header row")
        for row in reader:
            if not row:
                continue
            nodes[int(row[0])] = float(row[1])
    n = len(nodes)
    if n == 0:
        raise ValueError(f"{node_path}: no agents listed")
    if sorted(nodes) != list(range(n)):
        raise ValueError(f"{node_path}: agent ids must be exactly 0..{n - 1}")
    stubbornness = np.array([nodes[i] for i in range(n)])

    weights: dict[tuple[int, int], float] = {}
    with open(edge_path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{edge_path}: missing header row")
        for row in reader:
            if not row:
                continue
            weights[(int(row[0]), int(row[1]))] = float(row[2])
    return Graph(n, weights, stubbornness)


def write_graph_csv(graph: Graph, edge_path, node_path) -> None:
    with open(edge_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["i", "j", "w_ij"])
        for i in range(graph.n):
            for j, w in zip(graph.neighbors(i), graph.neighbor_weights(i)):
                writer.writerow([i, int(j), repr(float(w))])
    with open(node_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["i", "k_i"])
        for i in range(graph.n):
            writer.writerow([i, repr(float(graph.stubbornness[i]))])


def radius_neighborhood(x, i: int, r: float) -> set[int]:
    """Agents within squared distance r of agent i: { j != i : (x_i - x_j)^2 <= r }."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    x = np.asarray(x, dtype=float)
    if not 0 <= i < x.size:
        raise ValueError(f"agent index {i} out of range for n={x.size}")
    close = np.nonzero((x[i] - x) ** 2 <= r)[0]
    return {int(j) for j in close if j != i}
