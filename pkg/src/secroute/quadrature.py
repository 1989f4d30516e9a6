"""Adaptive tensor-product Gauss-Legendre quadrature over a rectangle.

Specialized for integrals of the form  integral phi(F(x)) dx  where the scalar
field F is fixed per integrator instance while phi changes between calls (a
family of integrands sharing one geometry). Panel locations and field values
are cached, so after the mesh has adapted, each new phi costs a single
vectorized pass over the panel set.

Error control is embedded: every panel carries a low-order and a high-order
tensor rule, the difference serving as the panel error estimate. Panels whose
estimated error exceeds an equal share of the requested tolerance are split
into four children until the global estimate converges or the panel budget is
exhausted.
"""

from __future__ import annotations

import numpy as np
from scipy.special import roots_legendre

from .geometry import Region


class QuadratureError(RuntimeError):
    """Raised when refinement hits the panel budget before converging."""

    def __init__(self, message: str, residual):
        super().__init__(message)
        self.residual = residual


def _tensor_rule(order: int):
    """Nodes and weights of the tensor Gauss-Legendre rule on [-1, 1]^2."""
    x, w = roots_legendre(order)
    xx, yy = np.meshgrid(x, x, indexing="ij")
    ww = np.outer(w, w)
    return np.column_stack([xx.ravel(), yy.ravel()]), ww.ravel()


class FieldQuadrature:
    """Cached-field adaptive quadrature over ``region``.

    field          callable mapping an (m, 2) point array to (m,) field values
    order_low/high embedded rule orders used for the error estimate
    init_grid      initial uniform split of the region (init_grid x init_grid)
    hotspots       points near which the integrand is known to vary sharply;
                   panels containing them are pre-split down to hotspot_size
    max_panels     refinement budget before QuadratureError is raised
    """

    def __init__(
        self,
        region: Region,
        field,
        *,
        order_low: int = 4,
        order_high: int = 8,
        init_grid: int = 2,
        hotspots=(),
        hotspot_size: float = 1.0,
        max_panels: int = 60_000,
    ) -> None:
        self.region = region
        self._field = field
        self._ref_lo = _tensor_rule(order_low)
        self._ref_hi = _tensor_rule(order_high)
        self.max_panels = int(max_panels)

        xs = np.linspace(region.x_min, region.x_max, init_grid + 1)
        ys = np.linspace(region.y_min, region.y_max, init_grid + 1)
        rects = [
            (xs[i], xs[i + 1], ys[j], ys[j + 1])
            for i in range(init_grid)
            for j in range(init_grid)
        ]
        self._rects = np.asarray(rects, dtype=float)
        self._f_lo, self._w_lo = self._make_rows(self._rects, *self._ref_lo)
        self._f_hi, self._w_hi = self._make_rows(self._rects, *self._ref_hi)
        for spot in hotspots:
            self._presplit(np.asarray(spot, dtype=float), hotspot_size)

    @property
    def n_panels(self) -> int:
        return self._rects.shape[0]

    def _make_rows(self, rects: np.ndarray, ref_pts: np.ndarray, ref_w: np.ndarray):
        """Field values and scaled weights for each panel of ``rects``."""
        cx = 0.5 * (rects[:, 0] + rects[:, 1])
        cy = 0.5 * (rects[:, 2] + rects[:, 3])
        hx = 0.5 * (rects[:, 1] - rects[:, 0])
        hy = 0.5 * (rects[:, 3] - rects[:, 2])
        px = cx[:, None] + hx[:, None] * ref_pts[None, :, 0]
        py = cy[:, None] + hy[:, None] * ref_pts[None, :, 1]
        pts = np.stack([px.ravel(), py.ravel()], axis=1)
        f = np.asarray(self._field(pts), dtype=float).reshape(px.shape)
        w = ref_w[None, :] * (hx * hy)[:, None]
        return f, w

    def _split(self, idx: np.ndarray) -> None:
        rects = self._rects[idx]
        mx = 0.5 * (rects[:, 0] + rects[:, 1])
        my = 0.5 * (rects[:, 2] + rects[:, 3])
        children = np.concatenate(
            [
                np.stack([rects[:, 0], mx, rects[:, 2], my], axis=1),
                np.stack([mx, rects[:, 1], rects[:, 2], my], axis=1),
                np.stack([rects[:, 0], mx, my, rects[:, 3]], axis=1),
                np.stack([mx, rects[:, 1], my, rects[:, 3]], axis=1),
            ]
        )
        keep = np.ones(self.n_panels, dtype=bool)
        keep[idx] = False
        f_lo, w_lo = self._make_rows(children, *self._ref_lo)
        f_hi, w_hi = self._make_rows(children, *self._ref_hi)
        self._rects = np.concatenate([self._rects[keep], children])
        self._f_lo = np.concatenate([self._f_lo[keep], f_lo])
        self._w_lo = np.concatenate([self._w_lo[keep], w_lo])
        self._f_hi = np.concatenate([self._f_hi[keep], f_hi])
        self._w_hi = np.concatenate([self._w_hi[keep], w_hi])

    def _presplit(self, spot: np.ndarray, target_size: float) -> None:
        while True:
            r = self._rects
            inside = (
                (r[:, 0] <= spot[0])
                & (spot[0] <= r[:, 1])
                & (r[:, 2] <= spot[1])
                & (spot[1] <= r[:, 3])
            )
            size = np.maximum(r[:, 1] - r[:, 0], r[:, 3] - r[:, 2])
            idx = np.nonzero(inside & (size > target_size))[0]
            if idx.size == 0:
                return
            self._split(idx)

    def integrate_batch(
        self, phi, *, rel_tol: float = 1e-6, abs_floor: float = 0.0
    ) -> np.ndarray:
        """Integrate a batch of integrands sharing this field.

        ``phi`` maps an (m,) array of field values to a (B, m) array of
        integrand values. Returns the (B,) integral estimates, refined until
        every row's error estimate is below max(rel_tol * |value|, abs_floor).
        Keep B modest (tens); callers supply larger batches in chunks.
        """
        while True:
            lo = phi(self._f_lo.ravel())
            lo = lo.reshape(lo.shape[0], *self._f_lo.shape)
            lo_sums = np.einsum("bpn,pn->bp", lo, self._w_lo)
            hi = phi(self._f_hi.ravel())
            hi = hi.reshape(hi.shape[0], *self._f_hi.shape)
            hi_sums = np.einsum("bpn,pn->bp", hi, self._w_hi)
            est = hi_sums.sum(axis=1)
            panel_err = np.abs(hi_sums - lo_sums)
            err = panel_err.sum(axis=1)
            tol = np.maximum(rel_tol * np.abs(est), abs_floor)
            if np.all(err <= tol):
                return est
            if self.n_panels >= self.max_panels:
                raise QuadratureError(
                    f"no convergence within {self.max_panels} panels "
                    f"(residual {err.max():.3e})",
                    residual=err,
                )
            # Split every panel exceeding an equal share of the tolerance it
            # is blowing; fall back to the worst eighth when errors are diffuse.
            badness = (panel_err / tol[:, None]).max(axis=0)
            share = 0.25 / self.n_panels
            idx = np.nonzero(badness > share)[0]
            if idx.size == 0:
                idx = np.argsort(badness)[-max(1, self.n_panels // 8) :]
            room = max(1, (self.max_panels - self.n_panels) // 3)
            if idx.size > room:
                idx = idx[np.argsort(badness[idx])[-room:]]
            self._split(idx)

    def integrate(self, phi, *, rel_tol: float = 1e-6, abs_floor: float = 0.0) -> float:
        """Integrate a single integrand ``phi(F)`` over the region."""
        return float(
            self.integrate_batch(
                lambda f: phi(f)[None, :], rel_tol=rel_tol, abs_floor=abs_floor
            )[0]
        )
