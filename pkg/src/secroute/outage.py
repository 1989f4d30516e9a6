"""Closed-form connection and secrecy outage probabilities for a multi-hop route.

Per hop, the legitimate link fails when its Rayleigh-faded SNR drops below
gamma_c; the route leaks when any eavesdropper of a Poisson field overhears any
hop above gamma_e. Both events have exponential-family closed forms driven by
the per-hop coefficient psi = gamma_c * d^alpha * sigma2 and the field constant
omega, and both are evaluated here in cancellation-safe form (expm1/log1p).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as gamma_fn

from .geometry import NetworkInstance, SystemParams


@dataclass(frozen=True, eq=False)
class Route:
    """An ordered multi-hop path with cached hop geometry.

    nodes      node indices along the path, source first
    coords     (N+1, 2) positions of the path nodes, same order
    distances  (N,) hop lengths in meters
    psi        (N,) per-hop outage coefficients gamma_c * d^alpha * sigma2
    """

    nodes: tuple[int, ...]
    coords: np.ndarray
    distances: np.ndarray
    psi: np.ndarray

    def __post_init__(self) -> None:
        coords = np.asarray(self.coords, dtype=float)
        distances = np.asarray(self.distances, dtype=float)
        psi = np.asarray(self.psi, dtype=float)
        object.__setattr__(self, "nodes", tuple(int(n) for n in self.nodes))
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "distances", distances)
        object.__setattr__(self, "psi", psi)
        n = len(self.nodes) - 1
        if n < 1:
            raise ValueError("route needs at least one hop")
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("route must not repeat nodes")
        if coords.shape != (n + 1, 2):
            raise ValueError("coords must be (n_hops + 1, 2)")
        if distances.shape != (n,) or psi.shape != (n,):
            raise ValueError("distances/psi must have one entry per hop")
        if np.any(distances <= 0.0) or np.any(psi <= 0.0):
            raise ValueError("hop distances and psi must be strictly positive")

    @property
    def n_hops(self) -> int:
        return len(self.nodes) - 1

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple(zip(self.nodes[:-1], self.nodes[1:]))

    @property
    def tx_coords(self) -> np.ndarray:
        """(N, 2) transmitter position of each hop."""
        return self.coords[:-1]

    @property
    def rx_coords(self) -> np.ndarray:
        return self.coords[1:]

    @classmethod
    def from_nodes(
        cls, instance: NetworkInstance, nodes, params: SystemParams
    ) -> "Route":
        coords = np.asarray(instance.nodes, dtype=float)[list(nodes)]
        return cls.from_coords(coords, params, nodes=nodes)

    @classmethod
    def from_coords(cls, coords, params: SystemParams, nodes=None) -> "Route":
        coords = np.asarray(coords, dtype=float)
        if nodes is None:
            nodes = tuple(range(coords.shape[0]))
        diff = np.diff(coords, axis=0)
        d = np.hypot(diff[:, 0], diff[:, 1])
        return cls(
            nodes=tuple(nodes),
            coords=coords,
            distances=d,
            psi=psi_many(params, d),
        )


def omega(params: SystemParams) -> float:
    """Eavesdropper-field constant of the secrecy outage closed form.

    omega = (2 pi lambda_e / alpha) * Gamma(2/alpha) * (gamma_e sigma2)^(-2/alpha)
    """
    a = params.alpha
    return (
        (2.0 * math.pi * params.lambda_e / a)
        * float(gamma_fn(2.0 / a))
        * (params.gamma_e * params.sigma2) ** (-2.0 / a)
    )


def psi(params: SystemParams, hop_distance: float) -> float:
    """Per-hop outage coefficient gamma_c * d^alpha * sigma2."""
    if hop_distance <= 0.0:
        raise ValueError("hop distance must be positive")
    return params.gamma_c * hop_distance**params.alpha * params.sigma2


def psi_many(params: SystemParams, hop_distances) -> np.ndarray:
    d = np.asarray(hop_distances, dtype=float)
    if np.any(d <= 0.0):
        raise ValueError("hop distances must be positive")
    return params.gamma_c * d**params.alpha * params.sigma2


def sop_budget(zeta: float) -> float:
    """Exponent budget ln(1/(1 - zeta)) matching a secrecy outage cap zeta."""
    if not 0.0 < zeta < 1.0:
        raise ValueError("zeta must lie in (0, 1)")
    return -math.log1p(-zeta)


@dataclass(frozen=True)
class DerivedConstants:
    """omega and the secrecy budget epsilon, both derived from SystemParams."""

    omega: float
    sop_budget: float

    def __post_init__(self) -> None:
        if self.omega <= 0.0 or self.sop_budget <= 0.0:
            raise ValueError("derived constants must be strictly positive")

    @classmethod
    def from_params(cls, params: SystemParams) -> "DerivedConstants":
        return cls(omega=omega(params), sop_budget=sop_budget(params.zeta))


def _check_powers(route: Route, powers) -> np.ndarray:
    p = np.asarray(powers, dtype=float)
    if p.shape != (route.n_hops,):
        raise ValueError("need exactly one transmit power per hop")
    if np.any(p <= 0.0) or not np.all(np.isfinite(p)):
        raise ValueError("transmit powers must be finite and strictly positive")
    return p


def cop(route: Route, powers) -> float:
    """End-to-end connection outage probability 1 - exp(-sum psi_n / P_n)."""
    p = _check_powers(route, powers)
    return -math.expm1(-float(np.sum(route.psi / p)))


def sop(route: Route, powers, params: SystemParams) -> float:
    """Route secrecy outage probability 1 - exp(-omega * sum P_n^(2/alpha))."""
    p = _check_powers(route, powers)
    w = omega(params)
    return -math.expm1(-w * float(np.sum(p ** (2.0 / params.alpha))))
