"""Outer polyblock approximation for jammer-assisted power optimization.

With the jammer power fixed, maximizing U(p) = sum -psi_n / P_n over the
feasible power region is a monotonic optimization problem: U is strictly
increasing in every coordinate and the region is a compact normal set, so the
maximum over any covering polyblock is attained at a vertex. The algorithm
keeps a shrinking polyblock that covers the region, projects its best vertex
onto the upper boundary along the ray from the origin, and replaces that
vertex by its N children until the gap between the best vertex value (upper
bound) and the best projection value (lower bound) closes below eta.

A one-dimensional search over the jammer power wraps the fixed-jammer solver
to address the joint problem.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .jamming import FeasibleRegion
from .power import PowerSolution


def objective(psi, powers) -> float:
    """Monotone objective U(p) = sum -psi_n / P_n; COP = 1 - exp(U)."""
    p = np.asarray(powers, dtype=float)
    if np.any(p <= 0.0):
        raise ValueError("powers must be strictly positive")
    return float(-np.sum(np.asarray(psi, dtype=float) / p))


@dataclass
class PolyblockState:
    """Bound trace and counters of one fixed-jammer polyblock run."""

    iterations: int = 0
    upper: float = math.inf
    lower: float = -math.inf
    converged: bool = False
    exhausted: bool = False
    trace: list = field(default_factory=list)  # rows (k, upper, lower, gap)

    @property
    def gap(self) -> float:
        return self.upper - self.lower


def initial_vertex(
    region: FeasibleRegion, p_jam: float, use_interpolation: bool = False
) -> np.ndarray:
    """Componentwise power bounds whose box covers the feasible region.

    Each coordinate relaxes the joint constraints to its own hop:
    z_n = min(remaining budget, largest P with g_n(P) <= eps / lambda_e).
    """
    budget = region.p_total - p_jam
    if budget <= 0.0:
        raise ValueError("jammer power exhausts the total budget")
    if region.sop_cap <= 0.0:
        raise ValueError("secrecy budget leaves no feasible power region")
    z = np.empty(region.n_hops)
    for hop in range(region.n_hops):
        if math.isinf(region.sop_cap):
            z[hop] = budget
            continue
        if use_interpolation:
            c_cap = _interp_ratio_cap(region, hop, budget / p_jam)
        else:
            c_cap = region.max_ratio_for_cap(hop, region.sop_cap, budget / p_jam)
        z[hop] = min(budget, c_cap * p_jam)
    return z


def _interp_ratio_cap(region: FeasibleRegion, hop: int, c_hi: float) -> float:
    """Bisect the interpolated g_n for the ratio where the secrecy cap binds."""
    cap = region.sop_cap
    if region.g_of_ratio(hop, c_hi, use_interpolation=True) <= cap:
        return c_hi
    lo, hi = c_hi * 1e-15, c_hi
    for _ in range(100):
        mid = math.sqrt(lo * hi)
        if region.g_of_ratio(hop, mid, use_interpolation=True) <= cap:
            lo = mid
        else:
            hi = mid
    return lo


def project_to_boundary(
    region: FeasibleRegion,
    p_jam: float,
    vertex: np.ndarray,
    *,
    tol: float = 1e-9,
    use_interpolation: bool = False,
) -> tuple[float, np.ndarray]:
    """Scale ``vertex`` back onto the upper boundary of the feasible region.

    Returns the largest delta in [0, 1] with delta * vertex feasible (found by
    bisection on the monotone feasibility predicate, keeping the feasible
    endpoint) and the boundary point itself. delta = 0 signals a degenerate
    projection. With the ratio table available the bisection proceeds in
    vectorized grid rounds instead of scalar steps.
    """
    budget = region.p_total - p_jam
    total = float(np.sum(vertex))
    d_hi = min(1.0, budget / total)
    cap = region.sop_cap

    if region.g_total_of_scaled(vertex, p_jam, [d_hi], use_interpolation)[0] <= cap:
        return d_hi, d_hi * vertex

    lo, hi = 0.0, d_hi
    if use_interpolation:
        grid = 64
        while hi - lo > tol:
            ds = np.linspace(lo, hi, grid + 1)[1:]
            ok = region.g_total_of_scaled(vertex, p_jam, ds, True) <= cap
            last_ok = int(np.count_nonzero(ok))  # feasibility is monotone in delta
            lo = ds[last_ok - 1] if last_ok else lo
            hi = ds[last_ok] if last_ok < grid else hi
    else:
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if region.g_total_of_scaled(vertex, p_jam, [mid], False)[0] <= cap:
                lo = mid
            else:
                hi = mid
    return lo, lo * vertex


def generate_vertices(vertex: np.ndarray, boundary: np.ndarray) -> np.ndarray:
    """The N children of a vertex after projecting it to ``boundary``.

    Child n equals the vertex with coordinate n lowered to the boundary value.
    """
    if np.any(boundary > vertex + 1e-15 * np.abs(vertex)):
        raise ValueError("boundary point must be dominated by the vertex")
    children = np.repeat(vertex[None, :], vertex.size, axis=0)
    idx = np.arange(vertex.size)
    children[idx, idx] = boundary
    return children


def polyblock_solve(
    region: FeasibleRegion,
    p_jam: float,
    *,
    eta: float = 1e-4,
    vertex_floor: float | None = None,
    bisect_tol: float = 1e-9,
    max_iter: int = 10_000,
    use_interpolation: bool = False,
    exact_polish: bool = True,
    collect_trace: bool = False,
) -> PowerSolution:
    """Globally solve the fixed-jammer power problem to gap eta.

    Vertices with any coordinate below ``vertex_floor`` (default
    1e-6 * p_total) are pruned from the searchable set, trading a bounded
    amount of accuracy near the axes for convergence speed. The incumbent is
    kept outside the vertex set and is never pruned.
    """
    if not 0.0 < p_jam < region.p_total:
        raise ValueError("jammer power must lie strictly inside (0, p_total)")
    if eta <= 0.0:
        raise ValueError("eta must be positive")
    floor = 1e-6 * region.p_total if vertex_floor is None else vertex_floor
    if floor <= 0.0:
        raise ValueError("vertex floor must be positive")
    psi = region.route.psi
    state = PolyblockState()

    z0 = initial_vertex(region, p_jam, use_interpolation)
    counter = 0
    heap: list[tuple[float, int, np.ndarray]] = [(-objective(psi, z0), counter, z0)]
    incumbent: np.ndarray | None = None

    while heap and state.iterations < max_iter:
        state.iterations += 1
        neg_u, _, z = heapq.heappop(heap)
        state.upper = -neg_u
        delta, boundary = project_to_boundary(
            region, p_jam, z, tol=bisect_tol, use_interpolation=use_interpolation
        )
        if delta > 0.0:
            u_boundary = objective(psi, boundary)
            if u_boundary > state.lower:
                state.lower = u_boundary
                incumbent = boundary
        if collect_trace:
            state.trace.append((state.iterations, state.upper, state.lower, state.gap))
        if state.gap <= eta:
            state.converged = True
            break
        if delta >= 1.0:
            # Vertex already feasible: its box adds nothing beyond the incumbent.
            continue
        for child in generate_vertices(z, boundary):
            if np.all(child >= floor):
                counter += 1
                heapq.heappush(heap, (-objective(psi, child), counter, child))

    if not heap and not state.converged:
        # Searchable set exhausted under the floor: accurate to the floor.
        state.converged = True
        state.exhausted = True
        state.upper = state.lower

    if incumbent is None:
        raise RuntimeError("polyblock projection never produced a feasible point")

    if use_interpolation and exact_polish:
        _, incumbent = project_to_boundary(
            region, p_jam, incumbent, tol=bisect_tol, use_interpolation=False
        )
        state.lower = objective(psi, incumbent)

    report = region.is_feasible(incumbent, p_jam, tol=1e-7 * max(1.0, region.sop_cap))
    return PowerSolution(
        powers=incumbent,
        jammer_power=p_jam,
        achieved_cop=-math.expm1(objective(psi, incumbent)),
        achieved_sop=region.sop(incumbent, p_jam),
        feasible=report.feasible,
        solver="polyblock",
        info={
            "iterations": state.iterations,
            "upper": state.upper,
            "lower": state.lower,
            "gap": state.gap,
            "converged": state.converged,
            "exhausted": state.exhausted,
            "trace": state.trace,
            "eta": eta,
            "vertex_floor": floor,
        },
    )


def default_jammer_grid(p_total: float, n_grid: int = 100) -> np.ndarray:
    """Log-spaced jammer powers spanning (0, p_total)."""
    return np.geomspace(1e-3, 0.99, n_grid) * p_total


def solve_with_jammer_search(
    region: FeasibleRegion,
    p_jam_values=None,
    *,
    n_grid: int = 100,
    eta: float = 1e-4,
    vertex_floor: float | None = None,
    bisect_tol: float = 1e-9,
    max_iter: int = 10_000,
    scout_max_iter: int | None = 400,
    use_interpolation: bool = True,
    collect_trace: bool = False,
) -> PowerSolution:
    """Solve the joint problem by sweeping the jammer power over a grid.

    Runs the fixed-jammer polyblock per grid point and returns the best
    solution (minimum connection outage). Grid points are scouted with an
    iteration cap of ``scout_max_iter`` (the incumbent stabilizes long before
    the bound certificate closes), then the winning point is re-solved with
    the full budget so the returned solution carries an honest gap. The sweep
    defaults to the ratio interpolant for speed; each incumbent is polished
    against the exact quadrature regardless.
    """
    grid = (
        default_jammer_grid(region.p_total, n_grid)
        if p_jam_values is None
        else np.asarray(p_jam_values, dtype=float)
    )
    if grid.size == 0:
        raise ValueError("jammer power grid must be nonempty")
    if use_interpolation:
        region.ensure_interpolant()
    scout_iter = max_iter if scout_max_iter is None else min(scout_max_iter, max_iter)
    best: PowerSolution | None = None
    search = []
    for p_jam in grid:
        try:
            sol = polyblock_solve(
                region,
                float(p_jam),
                eta=eta,
                vertex_floor=vertex_floor,
                bisect_tol=bisect_tol,
                max_iter=scout_iter,
                use_interpolation=use_interpolation,
                collect_trace=collect_trace,
            )
        except (ValueError, RuntimeError) as exc:
            search.append(
                {"p_jam": float(p_jam), "feasible": False, "error": str(exc)}
            )
            continue
        search.append(
            {
                "p_jam": float(p_jam),
                "feasible": sol.feasible,
                "cop": sol.achieved_cop,
                "converged": sol.info["converged"],
                "powers": sol.powers.copy(),
            }
        )
        if sol.feasible and (best is None or sol.achieved_cop < best.achieved_cop):
            best = sol
    if best is None:
        raise RuntimeError("every jammer power grid point was infeasible")
    if not best.info["converged"] and max_iter > scout_iter:
        refined = polyblock_solve(
            region,
            best.jammer_power,
            eta=eta,
            vertex_floor=vertex_floor,
            bisect_tol=bisect_tol,
            max_iter=max_iter,
            use_interpolation=use_interpolation,
            collect_trace=collect_trace,
        )
        if refined.feasible and refined.achieved_cop <= best.achieved_cop:
            best = refined
    best.info["search"] = search
    return best
