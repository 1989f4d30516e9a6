"""Successive convex approximation for the joint jammer/hop power problem.

The joint problem is rewritten in the power ratios c_n = P_Tn / P_J and the
jammer power, then lifted with slack scalars a >= 1/P_J and b >= sum psi_n/c_n
so that the objective becomes the product ab = ((a+b)^2 - (a-b)^2) / 4. Three
non-convex pieces are replaced by first-order majorants at the previous
iterate:

    H1  tangent of -(a-b)^2              (affine in a, b)
    H2  tangent of the interception sum  (affine in c, upper bound by concavity)
    H3  tangent of -P_total/P_J          (affine in P_J)

Each surrogate touches its term at the expansion point and never falls below
it, so every subproblem-feasible point is feasible for the true problem and
the true objective is non-increasing along the iterates. The smooth convex
subproblem is solved by a feasible-start log-barrier method with damped
Newton steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from .jamming import FeasibleRegion
from .power import PowerSolution


@dataclass(frozen=True, eq=False)
class ScaIterate:
    """One feasible point of the slack-reformulated problem."""

    a: float
    b: float
    c: np.ndarray
    p_jam: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "c", np.asarray(self.c, dtype=float))
        if self.a <= 0 or self.b <= 0 or self.p_jam <= 0 or np.any(self.c <= 0):
            raise ValueError("iterate components must be strictly positive")

    @property
    def powers(self) -> np.ndarray:
        return self.c * self.p_jam

    def true_objective(self, psi: np.ndarray) -> float:
        """sum psi_n / P_Tn evaluated at this iterate (COP exponent)."""
        return float(np.sum(psi / (self.c * self.p_jam)))


def surrogate_h1(a: float, b: float, a_prev: float, b_prev: float) -> float:
    """Tangent majorant of -(a - b)^2 at the expansion point."""
    d0 = a_prev - b_prev
    return d0 * d0 - 2.0 * (a - b) * d0


def surrogate_h2(region: FeasibleRegion, c, c_prev) -> float:
    """Tangent majorant of the interception sum, affine in the ratios.

    The per-hop integral is concave in its ratio, so the first-order expansion
    at c_prev upper-bounds it everywhere.
    """
    c = np.asarray(c, dtype=float)
    c_prev = np.asarray(c_prev, dtype=float)
    total = 0.0
    for hop in range(region.n_hops):
        value, slope = region.value_and_slope(hop, float(c_prev[hop]))
        total += value + (c[hop] - c_prev[hop]) * slope
    return total


def surrogate_h3(p_jam: float, p_jam_prev: float, p_total: float) -> float:
    """Tangent majorant of -p_total / p_jam at the expansion point."""
    if p_jam_prev <= 0.0:
        raise ValueError("expansion jammer power must be positive")
    return -2.0 * p_total / p_jam_prev + p_total * p_jam / (p_jam_prev * p_jam_prev)


# -- convex subproblem ---------------------------------------------------------


@dataclass
class _Subproblem:
    """One convex approximation in balanced slack variables.

    The raw slacks sit at wildly different scales (a ~ 1/P_J, b ~ sum psi/c),
    which makes (a+b)^2 - (a-b)^2 cancel catastrophically. Each subproblem is
    therefore solved in ah = a * s, bh = b / s with s = sqrt(b_prev / a_prev),
    which leaves the product objective and the feasible set untouched, makes
    the expansion slacks equal, and keeps every intermediate quantity well
    scaled. The tangency and majorization properties hold verbatim in the
    balanced variables, so the majorize-minimize descent chain is unchanged.
    """

    psi_h: np.ndarray  # psi / s
    cap: float
    p_total: float
    s: float  # slack balancing factor
    ab0: float  # balanced expansion slack, ah0 = bh0 = sqrt(a0 * b0)
    c0: np.ndarray
    pj0: float
    i0: np.ndarray  # per-hop integral values at c0
    d0: np.ndarray  # per-hop integral slopes at c0

    @property
    def n(self) -> int:
        return self.c0.size + 3

    def unpack(self, x: np.ndarray):
        return x[0], x[1], x[2:-1], x[-1]

    def f0(self, x: np.ndarray) -> float:
        ah, bh, _, _ = self.unpack(x)
        return 0.25 * ((ah + bh) ** 2 + surrogate_h1(ah, bh, self.ab0, self.ab0))

    def f0_grad(self, x: np.ndarray) -> np.ndarray:
        ah, bh, _, _ = self.unpack(x)
        g = np.zeros(self.n)
        g[0] = 0.5 * (ah + bh)
        g[1] = 0.5 * (ah + bh)
        return g

    def constraints(self, x: np.ndarray) -> np.ndarray:
        ah, bh, c, pj = self.unpack(x)
        return np.array(
            [
                self.s / pj - ah,
                float(np.sum(self.psi_h / c)) - bh,
                float(np.sum(self.i0 + (c - self.c0) * self.d0)) - self.cap,
                1.0
                + float(np.sum(c))
                - 2.0 * self.p_total / self.pj0
                + self.p_total * pj / (self.pj0 * self.pj0),
            ]
        )

    def constraint_grads(self, x: np.ndarray) -> np.ndarray:
        _, _, c, pj = self.unpack(x)
        n = self.n
        grads = np.zeros((4, n))
        grads[0, 0] = -1.0
        grads[0, -1] = -self.s / (pj * pj)
        grads[1, 1] = -1.0
        grads[1, 2:-1] = -self.psi_h / (c * c)
        grads[2, 2:-1] = self.d0
        grads[3, 2:-1] = 1.0
        grads[3, -1] = self.p_total / (self.pj0 * self.pj0)
        return grads

    def in_domain(self, x: np.ndarray) -> bool:
        _, _, c, pj = self.unpack(x)
        return bool(pj > 0.0 and np.all(c > 0.0))


def _barrier_solve(sub: _Subproblem, x0: np.ndarray, *, gap_rel: float = 1e-10):
    """Feasible-start log-barrier minimization of the subproblem.

    Newton steps are preconditioned by the starting-point scale of each
    variable (the unknowns span many orders of magnitude). Returns the
    minimizer and the KKT diagnostics at the final barrier parameter.
    """
    n = sub.n
    m = 4
    scale = np.abs(x0)
    f_scale = max(abs(sub.f0(x0)), 1e-12)
    t = m / f_scale
    x = x0.copy()
    newton_steps = 0

    def barrier_value(xv: np.ndarray, tv: float) -> float:
        g = sub.constraints(xv)
        if np.any(g >= 0.0):
            return math.inf
        return tv * sub.f0(xv) - float(np.sum(np.log(-g)))

    while True:
        for _ in range(80):
            g = sub.constraints(x)
            grads = sub.constraint_grads(x)
            inv_g = -1.0 / g
            grad = t * sub.f0_grad(x) + grads.T @ inv_g
            hess = np.zeros((n, n))
            hess[0, 0] = hess[1, 1] = hess[0, 1] = hess[1, 0] = 0.5 * t
            hess += (grads * inv_g[:, None] ** 2).T @ grads
            # curvature of the non-affine constraints themselves
            _, _, c, pj = sub.unpack(x)
            hess[-1, -1] += inv_g[0] * 2.0 * sub.s / pj**3
            idx = np.arange(2, n - 1)
            hess[idx, idx] += inv_g[1] * 2.0 * sub.psi_h / c**3
            hs = hess * scale[None, :] * scale[:, None]
            gs = grad * scale
            hs[np.diag_indices_from(hs)] += 1e-13 * np.trace(hs) / n
            try:
                ds = np.linalg.solve(hs, -gs)
            except np.linalg.LinAlgError:
                ds = np.linalg.lstsq(hs, -gs, rcond=None)[0]
            decrement2 = float(-gs @ ds)
            if decrement2 <= 2e-12:
                break
            d = ds * scale
            phi0 = barrier_value(x, t)
            step = 1.0
            for _ in range(60):
                cand = x + step * d
                if sub.in_domain(cand):
                    phi = barrier_value(cand, t)
                    if phi <= phi0 - 0.25 * step * decrement2:
                        break
                step *= 0.5
            else:
                break
            x = cand
            newton_steps += 1
        if m / t <= gap_rel * max(abs(sub.f0(x)), f_scale * 1e-6, 1e-12):
            break
        t *= 30.0

    g = sub.constraints(x)
    lam = -1.0 / (t * g)
    stat = sub.f0_grad(x) + sub.constraint_grads(x).T @ lam
    kkt = float(
        np.linalg.norm(stat * scale) / (1.0 + np.linalg.norm(sub.f0_grad(x) * scale))
    )
    return x, {
        "kkt_residual": kkt,
        "duality_gap": m / t,
        "multipliers": lam,
        "newton_steps": newton_steps,
    }


def _strictly_interior_start(sub: _Subproblem, shrink: float = 1e-3) -> np.ndarray:
    """Shift the expansion point into the strict interior of the subproblem.

    Shrinking the ratios and jammer power loosens the two affine constraints
    (the expansion point satisfies them by tangency), then the slacks are
    raised just above their lower bounds.
    """
    c = sub.c0 * (1.0 - shrink)
    pj = sub.pj0 * (1.0 - shrink)
    ah = max(sub.ab0, sub.s / pj) * (1.0 + shrink)
    bh = max(sub.ab0, float(np.sum(sub.psi_h / c))) * (1.0 + shrink)
    x0 = np.concatenate([[ah, bh], c, [pj]])
    if np.any(sub.constraints(x0) >= 0.0):
        raise RuntimeError("failed to construct a strictly feasible start")
    return x0


def solve_subproblem(
    region: FeasibleRegion, prev: ScaIterate
) -> tuple[ScaIterate, dict]:
    """Solve the convex approximation anchored at ``prev`` to high accuracy."""
    i0 = np.empty(region.n_hops)
    d0 = np.empty(region.n_hops)
    for hop in range(region.n_hops):
        i0[hop], d0[hop] = region.value_and_slope(hop, float(prev.c[hop]))
    s = math.sqrt(prev.b / prev.a)
    sub = _Subproblem(
        psi_h=region.route.psi / s,
        cap=region.sop_cap,
        p_total=region.p_total,
        s=s,
        ab0=math.sqrt(prev.a * prev.b),
        c0=prev.c.copy(),
        pj0=prev.p_jam,
        i0=i0,
        d0=d0,
    )
    x0 = _strictly_interior_start(sub)
    x, info = _barrier_solve(sub, x0)
    ah, bh, c, pj = sub.unpack(x)
    return (
        ScaIterate(a=float(ah / s), b=float(bh * s), c=c.copy(), p_jam=float(pj)),
        info,
    )


# -- outer loop ----------------------------------------------------------------


def initial_iterate(region: FeasibleRegion, powers, p_jam: float) -> ScaIterate:
    """Feasible starting point from explicit powers, slacks taken active."""
    p = np.asarray(powers, dtype=float)
    c = p / p_jam
    report = region.is_feasible(p, p_jam, tol=1e-7 * max(1.0, region.sop_cap))
    if not report.feasible:
        raise ValueError(
            f"initial powers are infeasible (sop slack {report.sop_slack:.3e}, "
            f"budget slack {report.budget_slack:.3e})"
        )
    return ScaIterate(
        a=1.0 / p_jam,
        b=float(np.sum(region.route.psi / c)),
        c=c,
        p_jam=p_jam,
    )


def initial_point_from_polyblock(
    region: FeasibleRegion, p_jam_seed: float, **polyblock_kwargs
) -> ScaIterate:
    """Seed the local search with the fixed-jammer global solution."""
    from .polyblock import polyblock_solve

    sol = polyblock_solve(region, p_jam_seed, **polyblock_kwargs)
    return initial_iterate(region, sol.powers, p_jam_seed)


def sca_solve(
    region: FeasibleRegion,
    initial: ScaIterate,
    rho: float = 1e-6,
    *,
    max_iter: int = 200,
) -> PowerSolution:
    """Iterate convex approximations until the true objective stalls.

    Stops when the relative drop of the true objective between consecutive
    iterations falls below ``rho``. Every iterate is feasible for the true
    constraints (up to quadrature tolerance); feasibility slacks are recorded
    per iteration.
    """
    psi = region.route.psi
    cur = initial
    trace = [cur.true_objective(psi)]
    slack_tol = 1e-6 * max(1.0, region.sop_cap)
    slacks = [region.is_feasible(cur.powers, cur.p_jam, tol=slack_tol)]
    converged = False
    sub_info: dict = {}
    for _ in range(max_iter):
        cur_new, sub_info = solve_subproblem(region, cur)
        f_prev, f_new = trace[-1], cur_new.true_objective(psi)
        cur = cur_new
        trace.append(f_new)
        slacks.append(region.is_feasible(cur.powers, cur.p_jam, tol=slack_tol))
        if abs(f_prev - f_new) <= rho * max(abs(f_prev), 1e-300):
            converged = True
            break
    powers = cur.powers
    return PowerSolution(
        powers=powers,
        jammer_power=cur.p_jam,
        achieved_cop=-math.expm1(-trace[-1]),
        achieved_sop=region.sop(powers, cur.p_jam),
        feasible=all(s.feasible for s in slacks),
        solver="sca",
        info={
            "iterations": len(trace) - 1,
            "converged": converged,
            "objective_trace": trace,
            "feasibility": slacks,
            "subproblem": sub_info,
            "kkt_true": true_kkt_residual(region, cur.c, cur.p_jam),
            "rho": rho,
        },
    )


def multistart_sca(
    region: FeasibleRegion,
    seeds=None,
    *,
    n_starts: int = 20,
    rho: float = 1e-6,
    max_iter: int = 200,
    polyblock_eta: float = 1e-4,
    use_interpolation: bool = True,
) -> tuple[PowerSolution, list[PowerSolution]]:
    """Run the local search from several seeds and keep the best outcome.

    ``seeds`` may be explicit (p_jam, powers) pairs (for instance the stored
    grid solutions of a jammer search); by default seeds come from polyblock
    solutions at log-spaced jammer powers.
    """
    from .polyblock import polyblock_solve

    if seeds is None:
        if use_interpolation:
            region.ensure_interpolant()
        grid = np.geomspace(1e-3, 0.99, n_starts) * region.p_total
        seeds = []
        for p_jam in grid:
            sol = polyblock_solve(
                region,
                float(p_jam),
                eta=polyblock_eta,
                use_interpolation=use_interpolation,
            )
            seeds.append((float(p_jam), sol.powers))
    results = []
    for p_jam, powers in seeds:
        start = initial_iterate(region, powers, p_jam)
        results.append(sca_solve(region, start, rho, max_iter=max_iter))
    best = min(results, key=lambda sol: sol.achieved_cop)
    return best, results


def true_kkt_residual(
    region: FeasibleRegion,
    c,
    p_jam: float,
    active_rtol: float = 1e-5,
) -> float:
    """Scaled stationarity residual of the true ratio-space problem.

    Fits non-negative multipliers for the near-active constraints by least
    squares and reports the remaining gradient norm relative to the objective
    gradient. Small values certify a local optimum.
    """
    c = np.asarray(c, dtype=float)
    psi = region.route.psi
    n = c.size + 1

    grad_f = np.empty(n)
    grad_f[:-1] = -psi / (c * c * p_jam)
    grad_f[-1] = -float(np.sum(psi / c)) / (p_jam * p_jam)

    values = np.empty(c.size)
    slopes = np.empty(c.size)
    for hop in range(region.n_hops):
        values[hop], slopes[hop] = region.value_and_slope(hop, float(c[hop]))
    g1 = float(np.sum(values)) - region.sop_cap
    g2 = 1.0 + float(np.sum(c)) - region.p_total / p_jam

    columns = []
    if g1 >= -active_rtol * max(1.0, region.sop_cap):
        grad = np.zeros(n)
        grad[:-1] = slopes
        columns.append(grad)
    if g2 >= -active_rtol * max(1.0, region.p_total / p_jam):
        grad = np.zeros(n)
        grad[:-1] = 1.0
        grad[-1] = region.p_total / (p_jam * p_jam)
        columns.append(grad)

    scale = np.linalg.norm(grad_f)
    if not columns:
        return float(np.linalg.norm(grad_f) / (1.0 + scale))
    a_mat = np.stack(columns, axis=1)
    _, resid = nnls(a_mat, -grad_f)
    return float(resid / (1.0 + scale))
