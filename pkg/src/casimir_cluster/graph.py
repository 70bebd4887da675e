"""H-graphs built from squeezing interactions and their conversion to CV cluster states."""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import expm

from .errors import InvalidArgumentError, NotBipartiteError
from .gaussian_core import CovarianceState, p_index, partial_trace, phase_shift, q_index

EDGE_TOL = 1e-15


@dataclass(frozen=True, eq=False)
class HGraph:
    """Modes (by label) with the symmetric matrix ``B`` of accumulated squeezing.

    ``B`` is indexed by position in ``nodes``. Updates return new graphs.
    """

    nodes: tuple[int, ...]
    B_matrix: np.ndarray = None
    bipartition: dict | None = None
    history: tuple = field(default=())

    def __post_init__(self):
        nodes = tuple(int(n) for n in self.nodes)
        if len(set(nodes)) != len(nodes):
            raise InvalidArgumentError("duplicate node labels")
        n = len(nodes)
        b = np.zeros((n, n)) if self.B_matrix is None else np.array(self.B_matrix, dtype=float)
        if b.shape != (n, n):
            raise InvalidArgumentError(f"B_matrix must be {n}x{n}, got {b.shape}")
        if np.max(np.abs(b - b.T), initial=0.0) > 1e-12:
            raise InvalidArgumentError("B_matrix must be symmetric")
        b.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "B_matrix", b)

    @classmethod
    def empty(cls, nodes) -> "HGraph":
        return cls(tuple(nodes))

    def index(self, mode: int) -> int:
        try:
            return self.nodes.index(mode)
        except ValueError:
            raise InvalidArgumentError(f"mode {mode} is not a node of this graph") from None

    def weight(self, j: int, k: int) -> float:
        return float(self.B_matrix[self.index(j), self.index(k)])

    def edges(self, tol: float = EDGE_TOL) -> list[tuple[int, int, float]]:
        out = []
        n = len(self.nodes)
        for a in range(n):
            for b in range(a + 1, n):
                w = self.B_matrix[a, b]
                if abs(w) > tol:
                    out.append((self.nodes[a], self.nodes[b], float(w)))
        return out

    def to_json(self) -> str:
        return json.dumps({"nodes": list(self.nodes),
                           "edges": [[j, k, w] for j, k, w in self.edges()],
                           "bipartition": self.bipartition and
                           {str(k): v for k, v in sorted(self.bipartition.items())}},
                          indent=2, sort_keys=True)

    def to_dot(self, name: str = "hgraph") -> str:
        lines = [f"graph {name} {{"]
        for mode in self.nodes:
            color = "" if not self.bipartition else f", color={'black' if self.bipartition[mode] == 0 else 'red'}"
            lines.append(f'  {mode} [label="{mode}"{color}];')
        for j, k, w in self.edges():
            lines.append(f'  {j} -- {k} [label="{w:.6g}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def accumulate_drive(graph: HGraph, pair: tuple[int, int], beta: float,
                     pump_phase: float = 0.0) -> HGraph:
    """Add ``beta * cos(2 pump_phase)`` to the ``pair`` entry (a pi/2 pump flips the sign)."""
    j, k = pair
    if j == k:
        raise InvalidArgumentError("an edge needs two distinct modes")
    a, b = graph.index(j), graph.index(k)
    if beta == 0:
        return graph
    delta = beta * math.cos(2 * pump_phase)
    mat = graph.B_matrix.copy()
    mat[a, b] += delta
    mat[b, a] += delta
    return replace(graph, B_matrix=mat, bipartition=None,
                   history=graph.history + ((j, k, float(beta), float(pump_phase)),))


def materialize_Z(graph: HGraph, order: str = "first") -> np.ndarray:
    """Complex adjacency ``i exp(-2B)`` (``order="exact"``) or ``i (I - 2B)`` (``"first"``)."""
    b = graph.B_matrix
    if order == "first":
        return 1j * (np.eye(len(b)) - 2 * b)
    if order == "exact":
        w, v = np.linalg.eigh(b)
        return 1j * (v * np.exp(-2 * w)) @ v.T
    raise InvalidArgumentError(f"order must be 'first' or 'exact', got {order!r}")


def _odd_cycle(parent: dict, u: int, v: int) -> list[int]:
    path_u, path_v = [u], [v]
    while parent[path_u[-1]] is not None:
        path_u.append(parent[path_u[-1]])
    while parent[path_v[-1]] is not None:
        path_v.append(parent[path_v[-1]])
    ancestors = set(path_u)
    meet = next(x for x in path_v if x in ancestors)
    left = path_u[:path_u.index(meet) + 1]
    right = path_v[:path_v.index(meet)]
    return left + right[::-1]


def bipartition(graph: HGraph, tol: float = EDGE_TOL) -> dict[int, int]:
    """BFS 2-coloring over nonzero ``B`` entries; each component's lowest mode gets 0.

    Raises:
        NotBipartiteError: carrying an odd cycle of mode labels.
    """
    adj = {m: [] for m in graph.nodes}
    for j, k, _ in graph.edges(tol):
        adj[j].append(k)
        adj[k].append(j)
    color: dict[int, int] = {}
    parent: dict[int, int | None] = {}
    for start in sorted(graph.nodes):
        if start in color:
            continue
        color[start], parent[start] = 0, None
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in sorted(adj[u]):
                if v not in color:
                    color[v], parent[v] = 1 - color[u], u
                    queue.append(v)
                elif color[v] == color[u]:
                    raise NotBipartiteError(_odd_cycle(parent, u, v))
    return color


@dataclass(frozen=True, eq=False)
class ClusterAdjacency:
    """Target adjacency ``A`` of a CV cluster state (zero diagonal, symmetric)."""

    nodes: tuple[int, ...]
    A_matrix: np.ndarray
    squeeze_strength: np.ndarray = None

    def __post_init__(self):
        a = np.array(self.A_matrix, dtype=float)
        n = len(self.nodes)
        if a.shape != (n, n):
            raise InvalidArgumentError(f"A_matrix must be {n}x{n}")
        if np.max(np.abs(a - a.T), initial=0.0) > 1e-12 or np.any(np.diag(a) != 0):
            raise InvalidArgumentError("A_matrix must be symmetric with zero diagonal")
        a.flags.writeable = False
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "A_matrix", a)
        if self.squeeze_strength is not None:
            object.__setattr__(self, "squeeze_strength", np.asarray(self.squeeze_strength, float))

    def sign_pattern(self) -> np.ndarray:
        return np.sign(self.A_matrix).astype(int)


def cluster_adjacency(graph: HGraph, method: str = "first_order") -> ClusterAdjacency:
    """Adjacency implied by ``B`` after rotating one color class.

    ``first_order``: ``A = 2B``. ``exact``: ``A_jk = -M_jk / sqrt(M_jj M_kk)``
    with ``M = exp(-2B)``, which for one pair equals ``tanh(2b)``.
    """
    b = graph.B_matrix
    n = len(graph.nodes)
    if method == "first_order":
        a = 2 * b.copy()
    elif method == "exact":
        m = expm(-2 * b)
        d = np.sqrt(np.diag(m))
        a = -m / np.outer(d, d)
    else:
        raise InvalidArgumentError(f"unknown adjacency method {method!r}")
    np.fill_diagonal(a, 0.0)
    a = 0.5 * (a + a.T)
    strength = np.exp(np.abs(b).sum(axis=1)) if n else np.zeros(0)
    return ClusterAdjacency(graph.nodes, a, strength)


def rotated_class(colors: dict[int, int]) -> list[int]:
    """Modes that receive the pi/2 shift.

    :func:`bipartition` gives color 0 to the lowest mode of every component,
    so this is the class not holding it, component by component.
    """
    return sorted(m for m, c in colors.items() if c == 1)


def to_cluster(state: CovarianceState, graph: HGraph, method: str = "first_order"
               ) -> tuple[CovarianceState, ClusterAdjacency]:
    """Rotate one color class by pi/2 and return the state with its target adjacency.

    State mode ``i`` is taken to be ``graph.nodes[i]``. Isolated nodes form
    their own components and are colored 0 unless reached, so they are never
    rotated.
    """
    if state.n_modes != len(graph.nodes):
        raise InvalidArgumentError(
            f"state has {state.n_modes} modes, graph has {len(graph.nodes)} nodes")
    colors = bipartition(graph)
    out = state
    for mode in rotated_class(colors):
        out = phase_shift(out, graph.index(mode), math.pi / 2)
    return out, cluster_adjacency(replace(graph, bipartition=colors), method)


def nullifier_vectors(adj: ClusterAdjacency) -> np.ndarray:
    n = len(adj.nodes)
    vecs = np.zeros((n, 2 * n))
    for j in range(n):
        vecs[j, p_index(j)] = 1.0
        for k in range(n):
            vecs[j, q_index(k)] -= adj.A_matrix[j, k]
    return vecs


def nullifier_variances(state: CovarianceState, adj: ClusterAdjacency) -> np.ndarray:
    """Variance of ``P_j - sum_k A_jk Q_k`` for every node, plus its squared mean."""
    if state.n_modes != len(adj.nodes):
        raise InvalidArgumentError("state and adjacency sizes differ")
    vecs = nullifier_vectors(adj)
    var = np.einsum("ji,ik,jk->j", vecs, state.sigma, vecs) / 2
    return var + (vecs @ state.mean) ** 2


def nullifier_means(state: CovarianceState, adj: ClusterAdjacency) -> np.ndarray:
    return nullifier_vectors(adj) @ state.mean


def nullifier_csv(state: CovarianceState, adj: ClusterAdjacency) -> str:
    """CSV report ``node,mean,variance`` (variance in the sigma/2 convention)."""
    means = nullifier_means(state, adj)
    var = nullifier_variances(state, adj)
    lines = ["node,mean,variance"]
    for node, m, v in zip(adj.nodes, means, var):
        lines.append(f"{node},{m:.12e},{v:.12e}")
    return "\n".join(lines) + "\n"


def effective_hamiltonian(state: CovarianceState, pair: tuple[int, int]) -> np.ndarray:
    """Reduced two-mode covariance, read as the coefficients of ``X^T H X``."""
    j, k = pair
    if j == k:
        raise InvalidArgumentError("pair must name two distinct modes")
    return partial_trace(state, [j, k]).sigma.copy()
