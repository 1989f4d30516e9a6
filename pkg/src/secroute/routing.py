"""Route selection over the complete graph of legitimate nodes.

Link weights psi^(2/(2+alpha)) depend only on hop geometry and gamma_c, so the
minimum-weight path both minimizes the achievable connection outage and is
invariant to the eavesdropper density and the secrecy budget. Ties are broken
deterministically: fewer hops first, then the lexicographically smallest node
sequence.
"""

from __future__ import annotations

import heapq

import numpy as np

from .geometry import NetworkInstance, SystemParams, pairwise_distances
from .outage import Route
from .power import PowerSolution, allocate_powers


def link_weight(psi_value: float, alpha: float) -> float:
    """Routing weight of a hop with outage coefficient ``psi_value``."""
    if psi_value <= 0.0:
        raise ValueError("psi must be strictly positive")
    return psi_value ** (2.0 / (2.0 + alpha))


class WeightedGraph:
    """Complete digraph over the nodes of an instance with routing weights.

    Weights are symmetric. ``max_link_distance`` optionally removes links
    longer than a radio range; the default keeps the graph complete.
    """

    def __init__(
        self,
        instance: NetworkInstance,
        params: SystemParams,
        max_link_distance: float | None = None,
    ) -> None:
        self.instance = instance
        self.params = params
        d = pairwise_distances(instance.nodes)
        psi = params.gamma_c * d**params.alpha * params.sigma2
        with np.errstate(divide="ignore"):
            w = psi ** (2.0 / (2.0 + params.alpha))
        np.fill_diagonal(w, np.inf)
        if max_link_distance is not None:
            w[d > max_link_distance] = np.inf
        self._weights = w

    @property
    def m(self) -> int:
        return self.instance.m

    def weight(self, i: int, j: int) -> float:
        return float(self._weights[i, j])

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    def route_from_nodes(self, nodes) -> Route:
        return Route.from_nodes(self.instance, nodes, self.params)


def _dijkstra_path(weights: np.ndarray, source: int, destination: int):
    """Min-weight path with (weight, hop count, node sequence) tie-breaking."""
    m = weights.shape[0]
    settled = [False] * m
    heap = [(0.0, 0, (source,))]
    while heap:
        dist, hops, path = heapq.heappop(heap)
        node = path[-1]
        if settled[node]:
            continue
        settled[node] = True
        if node == destination:
            return path, dist
        row = weights[node]
        for nxt in range(m):
            if settled[nxt] or not np.isfinite(row[nxt]):
                continue
            heapq.heappush(heap, (dist + row[nxt], hops + 1, path + (nxt,)))
    return None, np.inf


def find_optimal_route(
    graph: WeightedGraph,
    source: int | None = None,
    destination: int | None = None,
) -> Route:
    """Minimum-total-weight route between source and destination."""
    src = graph.instance.source if source is None else int(source)
    dst = graph.instance.destination if destination is None else int(destination)
    if src == dst:
        raise ValueError("source and destination must differ")
    path, _ = _dijkstra_path(graph.weights, src, dst)
    if path is None:
        raise ValueError("no path between source and destination")
    return graph.route_from_nodes(path)


def route_total_weight(graph: WeightedGraph, nodes) -> float:
    seq = list(nodes)
    return float(sum(graph.weight(i, j) for i, j in zip(seq[:-1], seq[1:])))


def enumerate_all_routes(
    graph: WeightedGraph,
    source: int | None = None,
    destination: int | None = None,
    max_nodes: int = 8,
) -> list[tuple[Route, float]]:
    """All simple paths with their total weights, for small instances only.

    Guards against factorial blowup by rejecting graphs with more than
    ``max_nodes`` nodes.
    """
    if graph.m > max_nodes:
        raise ValueError(f"enumeration limited to {max_nodes} nodes, got {graph.m}")
    src = graph.instance.source if source is None else int(source)
    dst = graph.instance.destination if destination is None else int(destination)
    out: list[tuple[Route, float]] = []
    weights = graph.weights

    def extend(path: tuple[int, ...], total: float) -> None:
        node = path[-1]
        if node == dst:
            out.append((graph.route_from_nodes(path), total))
            return
        for nxt in range(graph.m):
            if nxt in path or not np.isfinite(weights[node, nxt]):
                continue
            extend(path + (nxt,), total + weights[node, nxt])

    extend((src,), 0.0)
    return out


def run_algorithm_1(
    instance: NetworkInstance,
    params: SystemParams,
    max_link_distance: float | None = None,
) -> tuple[Route, PowerSolution]:
    """Full secure-routing pipeline: weights, shortest path, power allocation."""
    graph = WeightedGraph(instance, params, max_link_distance=max_link_distance)
    route = find_optimal_route(graph)
    solution = allocate_powers(route, params)
    return route, solution
