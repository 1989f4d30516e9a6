"""Friendly-jammer model: interception integrals and the joint power region.

A multi-antenna jammer radiates artificial noise in the null space of all
legitimate receive channels, so connection outage is untouched while every
eavesdropper sees an extra Exp(1)-faded interference term. The per-hop
interception mass

    g_n(P_Tn, P_J) = integral over the eavesdropper region of
                     1 / (1 + F_n(x) * P_J / P_Tn),
    F_n(x) = gamma_e * d(T_n, x)^alpha / d(J, x)^alpha,

has no closed form and is evaluated by adaptive quadrature on a cached field
mesh. g_n depends on the powers only through the ratio c_n = P_Tn / P_J, which
the optimizers exploit heavily; an optional monotone spline of ln g versus
ln c accelerates sweep workloads at a verified accuracy cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .geometry import STREAM_PROBE, Region, SystemParams, substream
from .outage import Route, sop_budget
from .quadrature import FieldQuadrature

_EXACT_CHUNK = 24


@dataclass(frozen=True)
class JammerConfig:
    """Jammer placement and the shared transmit power budget."""

    position: tuple[float, float]
    p_total: float
    quad_rel_tol: float = 1e-6
    quad_abs_floor: float | None = None  # defaults to 1e-9 * region area
    max_panels: int = 60_000
    hotspot_size: float = 1.0

    def __post_init__(self) -> None:
        if self.p_total <= 0.0:
            raise ValueError("total power budget must be strictly positive")
        if not all(math.isfinite(v) for v in self.position):
            raise ValueError("jammer position must be finite")
        if self.quad_rel_tol <= 0.0:
            raise ValueError("quadrature tolerance must be positive")

    @classmethod
    def centered(cls, region: Region, p_total: float, **kwargs) -> "JammerConfig":
        return cls(position=region.center, p_total=p_total, **kwargs)


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    sop_slack: float  # eps/lambda_e - sum g_n, >= 0 when the secrecy cap holds
    budget_slack: float  # p_total - p_jam - sum powers


def _hop_field(tx, jammer, alpha: float, gamma_e: float):
    txx, txy = float(tx[0]), float(tx[1])
    jx, jy = float(jammer[0]), float(jammer[1])

    def field(pts: np.ndarray) -> np.ndarray:
        d_tx = np.hypot(pts[:, 0] - txx, pts[:, 1] - txy)
        d_jam = np.hypot(pts[:, 0] - jx, pts[:, 1] - jy)
        with np.errstate(divide="ignore"):
            return gamma_e * (d_tx / d_jam) ** alpha

    return field


class FeasibleRegion:
    """Joint power region of a route assisted by a fixed jammer.

    Caches one adaptive quadrature mesh per hop (the exposure field F_n is
    fixed by geometry) and exposes the interception integrals, the secrecy
    outage with jamming, and the two feasibility constraints. The region is a
    compact normal set in the power orthant: shrinking any power componentwise
    keeps a feasible point feasible.
    """

    def __init__(
        self,
        route: Route,
        params: SystemParams,
        jammer: JammerConfig,
        eve_region: Region,
    ) -> None:
        self.route = route
        self.params = params
        self.jammer = jammer
        self.eve_region = eve_region
        self.eps = sop_budget(params.zeta)
        self.sop_cap = self.eps / params.lambda_e if params.lambda_e > 0 else math.inf
        for tx in route.tx_coords:
            if math.hypot(tx[0] - jammer.position[0], tx[1] - jammer.position[1]) == 0.0:
                raise ValueError("jammer must not coincide with a transmitter")
        floor = (
            jammer.quad_abs_floor
            if jammer.quad_abs_floor is not None
            else 1e-9 * eve_region.area
        )
        self._abs_floor = floor
        self._quads = [
            FieldQuadrature(
                eve_region,
                _hop_field(tx, jammer.position, params.alpha, params.gamma_e),
                hotspots=(tuple(tx), jammer.position),
                hotspot_size=jammer.hotspot_size,
                max_panels=jammer.max_panels,
            )
            for tx in route.tx_coords
        ]
        self._interp: list | None = None

    @property
    def n_hops(self) -> int:
        return self.route.n_hops

    @property
    def p_total(self) -> float:
        return self.jammer.p_total

    def with_total_power(self, p_total: float) -> "FeasibleRegion":
        """Same geometry under a different power budget.

        The copy shares the cached quadrature meshes and ratio tables (the
        interception integrals depend on geometry and power ratios only).
        """
        clone = object.__new__(FeasibleRegion)
        clone.__dict__.update(self.__dict__)
        clone.jammer = replace(self.jammer, p_total=float(p_total))
        return clone

    # -- exact quadrature ---------------------------------------------------

    def g_of_ratio_many(
        self, hop: int, ratios, use_interpolation: bool = False
    ) -> np.ndarray:
        """Interception integrals for an array of power ratios c = P_T / P_J."""
        cs = np.atleast_1d(np.asarray(ratios, dtype=float))
        if np.any(cs < 0.0):
            raise ValueError("power ratios must be non-negative")
        out = np.zeros(cs.shape, dtype=float)
        pos = cs > 0.0
        if not np.any(pos):
            return out
        if use_interpolation:
            out[pos] = self._interp_eval(hop, cs[pos])
            return out
        quad = self._quads[hop]
        active = cs[pos]
        vals = np.empty(active.shape)
        for start in range(0, active.size, _EXACT_CHUNK):
            block = active[start : start + _EXACT_CHUNK]

            def phi(f: np.ndarray, block=block) -> np.ndarray:
                return block[:, None] / (block[:, None] + f[None, :])

            vals[start : start + block.size] = quad.integrate_batch(
                phi,
                rel_tol=self.jammer.quad_rel_tol,
                abs_floor=self._abs_floor,
            )
        out[pos] = vals
        return out

    def g_of_ratio(self, hop: int, ratio: float, use_interpolation: bool = False) -> float:
        return float(self.g_of_ratio_many(hop, [ratio], use_interpolation)[0])

    def g(self, hop: int, p_tx: float, p_jam: float, use_interpolation: bool = False) -> float:
        """g_n at explicit powers; depends on them only through p_tx / p_jam."""
        if p_tx <= 0.0 or p_jam <= 0.0:
            raise ValueError("powers must be strictly positive")
        return self.g_of_ratio(hop, p_tx / p_jam, use_interpolation)

    def g_total(self, powers, p_jam: float, use_interpolation: bool = False) -> float:
        p = np.asarray(powers, dtype=float)
        return float(
            sum(
                self.g_of_ratio(hop, p[hop] / p_jam, use_interpolation)
                for hop in range(self.n_hops)
            )
        )

    def value_and_slope(self, hop: int, ratio: float) -> tuple[float, float]:
        """Exact (g_n, d g_n / d c) at ratio c, used by the convex surrogates.

        The integrand of g_n is u = c / (c + F); its c-derivative integrand is
        u (1 - u) / c, so both come from one pass over the cached mesh.
        """
        c = float(ratio)
        if c <= 0.0:
            raise ValueError("ratio must be strictly positive for the slope")

        def phi(f: np.ndarray) -> np.ndarray:
            u = c / (c + f)
            return np.stack([u, u * (1.0 - u) / c])

        vals = self._quads[hop].integrate_batch(
            phi, rel_tol=self.jammer.quad_rel_tol, abs_floor=self._abs_floor
        )
        return float(vals[0]), float(vals[1])

    # -- outage and feasibility ----------------------------------------------

    def sop(self, powers, p_jam: float, use_interpolation: bool = False) -> float:
        """Secrecy outage with jamming, 1 - exp(-lambda_e * sum g_n)."""
        total = self.g_total(powers, p_jam, use_interpolation)
        return -math.expm1(-self.params.lambda_e * total)

    def is_feasible(
        self,
        powers,
        p_jam: float,
        use_interpolation: bool = False,
        tol: float = 0.0,
    ) -> FeasibilityReport:
        """Evaluate both region constraints and report their slacks."""
        p = np.asarray(powers, dtype=float)
        sop_slack = self.sop_cap - self.g_total(p, p_jam, use_interpolation)
        budget_slack = self.p_total - p_jam - float(np.sum(p))
        return FeasibilityReport(
            feasible=bool(sop_slack >= -tol and budget_slack >= -tol),
            sop_slack=float(sop_slack),
            budget_slack=float(budget_slack),
        )

    def max_ratio_for_cap(self, hop: int, cap: float, c_hi: float) -> float:
        """Largest ratio c <= c_hi with g_n(c) <= cap (monotone bracketing)."""
        if self.g_of_ratio(hop, c_hi) <= cap:
            return c_hi
        lo = c_hi * 1e-15
        return float(
            brentq(
                lambda c: self.g_of_ratio(hop, c) - cap,
                lo,
                c_hi,
                rtol=1e-12,
                maxiter=200,
            )
        )

    def g_total_of_scaled(
        self,
        vertex: np.ndarray,
        p_jam: float,
        deltas: np.ndarray,
        use_interpolation: bool = False,
    ) -> np.ndarray:
        """sum_n g_n(delta * vertex_n / p_jam) for a vector of scalings.

        This is the hot path of boundary projections; with the ratio table
        built it is a handful of vectorized lookups.
        """
        ds = np.atleast_1d(np.asarray(deltas, dtype=float))
        total = np.zeros(ds.shape)
        for hop in range(self.n_hops):
            total += self.g_of_ratio_many(
                hop, ds * (vertex[hop] / p_jam), use_interpolation
            )
        return total

    # -- optional ratio interpolation -----------------------------------------

    def ensure_interpolant(
        self,
        *,
        c_min: float = 1e-10,
        c_max: float = 1e6,
        points_per_decade: int = 96,
        resample_per_decade: int = 480,
        probe_count: int = 12,
        probe_rtol: float = 1e-5,
        probe_seed: int = 0,
    ) -> None:
        """Build per-hop tables of ln g versus ln c for fast monotone lookups.

        The exact quadrature is sampled on a log grid, smoothed through a
        monotone cubic, then resampled densely so that lookups reduce to
        linear interpolation. The result is validated against the exact
        quadrature on random probe ratios. Below c_min the exact low-ratio
        power law g ~ c^(2/alpha) extends the table; above c_max the integral
        has saturated towards the region area and is clamped.
        """
        if self._interp is not None:
            return
        decades = math.log10(c_max / c_min)
        knots = np.geomspace(c_min, c_max, int(decades * points_per_decade) + 1)
        dense_ln = np.linspace(
            math.log(c_min), math.log(c_max), int(decades * resample_per_decade) + 1
        )
        tables = []
        for hop in range(self.n_hops):
            g_vals = self.g_of_ratio_many(hop, knots)
            if np.any(np.diff(g_vals) <= 0.0):
                raise RuntimeError(
                    "interception integral table is not strictly increasing; "
                    "tighten the quadrature tolerance"
                )
            spline = PchipInterpolator(np.log(knots), np.log(g_vals))
            dense_vals = spline(dense_ln)
            tables.append(
                (dense_ln, dense_vals, c_min, c_max, g_vals[0], g_vals[-1])
            )
        self._interp = tables
        rng = substream(probe_seed, STREAM_PROBE)
        probes = np.exp(
            rng.uniform(math.log(c_min * 10), math.log(c_max / 10), probe_count)
        )
        for hop in range(self.n_hops):
            exact = self.g_of_ratio_many(hop, probes)
            approx = self._interp_eval(hop, probes)
            rel = np.max(np.abs(approx - exact) / exact)
            if rel > probe_rtol:
                self._interp = None
                raise RuntimeError(
                    f"ratio interpolant failed validation on hop {hop}: "
                    f"relative error {rel:.2e} exceeds {probe_rtol:.1e}"
                )

    @property
    def has_interpolant(self) -> bool:
        return self._interp is not None

    def _interp_eval(self, hop: int, cs: np.ndarray) -> np.ndarray:
        if self._interp is None:
            raise RuntimeError("call ensure_interpolant() before interpolated reads")
        dense_ln, dense_vals, c_min, c_max, g_lo, g_hi = self._interp[hop]
        out = np.exp(np.interp(np.log(cs), dense_ln, dense_vals))
        low = cs < c_min
        if np.any(low):
            out[low] = g_lo * (cs[low] / c_min) ** (2.0 / self.params.alpha)
        high = cs > c_max
        if np.any(high):
            out[high] = g_hi
        return out


def cover_jammer_power(region: FeasibleRegion, powers) -> float:
    """Smallest jammer power protecting the given transmit powers.

    Solves sum_n g_n(P_n / P_J) = eps / lambda_e for P_J; any larger jammer
    power keeps the same transmit powers inside the secrecy cap (the
    interception integrals decrease in P_J). Used to size total power budgets
    for jamming scenarios.
    """
    p = np.asarray(powers, dtype=float)
    if np.any(p <= 0.0):
        raise ValueError("powers must be strictly positive")
    if math.isinf(region.sop_cap):
        return 0.0
    total = float(np.sum(p))

    def excess(p_jam: float) -> float:
        return region.g_total(p, p_jam) - region.sop_cap

    lo, hi = 1e-9 * total, 1e12 * total
    if excess(hi) > 0.0:
        raise ValueError("secrecy cap unattainable even with an enormous jammer")
    if excess(lo) <= 0.0:
        return lo
    return float(brentq(excess, lo, hi, rtol=1e-9, maxiter=300))


def g_n(region: FeasibleRegion, hop_index: int, p_tx: float, p_jam: float) -> float:
    """Interception integral of one hop at explicit transmit/jammer powers."""
    return region.g(hop_index, p_tx, p_jam)


def sop_jamming(region: FeasibleRegion, powers, p_jam: float) -> float:
    """Route secrecy outage probability under jamming."""
    return region.sop(powers, p_jam)


def is_feasible(region: FeasibleRegion, powers, p_jam: float) -> FeasibilityReport:
    """Check the secrecy-cap and power-budget constraints with slack values."""
    return region.is_feasible(powers, p_jam)
