"""Node layouts, deployment regions, eavesdropper field sampling, and RNG streams.

Distances are meters, coordinates are 2-D doubles. All randomness flows through
named substreams derived from a single 64-bit seed, so every sampled quantity is
bit-reproducible per (seed, stream, index) and independent streams never share
state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Substream identifiers. Every consumer of randomness owns one of these so that
# concurrent tasks (or re-ordered calls) never perturb each other's draws.
STREAM_NODES = 0
STREAM_EVE_FIELD = 1
STREAM_FADING = 2
STREAM_COP_SIM = 10
STREAM_SOP_FIELD = 11
STREAM_SOP_FADE = 12
STREAM_JAM_FIELD = 13
STREAM_JAM_FADE = 14
STREAM_PROBE = 20

_SEED_MASK = (1 << 64) - 1


def substream(seed: int, *key: int) -> np.random.Generator:
    """Return the generator for the substream identified by ``(seed, *key)``.

    The same (seed, key) always produces the same stream; distinct keys give
    statistically independent streams.
    """
    entropy = [int(seed) & _SEED_MASK] + [int(k) for k in key]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def db_to_linear(x_db: float) -> float:
    """Convert a decibel quantity to a linear ratio (10^(x/10))."""
    return 10.0 ** (float(x_db) / 10.0)


def distance(a, b) -> float:
    """Euclidean distance between two 2-D points."""
    return math.hypot(float(a[0]) - float(b[0]), float(a[1]) - float(b[1]))


def pairwise_distances(points: np.ndarray) -> np.ndarray:
    """Full matrix of Euclidean distances between rows of ``points``."""
    pts = np.asarray(points, dtype=float)
    diff = pts[:, None, :] - pts[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])


@dataclass(frozen=True)
class Region:
    """Axis-aligned rectangular deployment region (meters)."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self) -> None:
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ValueError("region must have positive extent on both axes")

    @classmethod
    def square(cls, side: float, center: tuple[float, float] = (0.0, 0.0)) -> "Region":
        cx, cy = center
        h = side / 2.0
        return cls(cx - h, cx + h, cy - h, cy + h)

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return (
            (pts[:, 0] >= self.x_min)
            & (pts[:, 0] <= self.x_max)
            & (pts[:, 1] >= self.y_min)
            & (pts[:, 1] <= self.y_max)
        )

    def sample_uniform(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Draw ``n`` points independently uniform over the region."""
        xy = rng.random((int(n), 2))
        xy[:, 0] = self.x_min + xy[:, 0] * self.width
        xy[:, 1] = self.y_min + xy[:, 1] * self.height
        return xy


@dataclass(frozen=True)
class SystemParams:
    """Physical-layer parameters, all in linear units.

    alpha     path-loss exponent (>= 2)
    sigma2    receiver noise power
    gamma_c   SNR threshold for successful decoding at a legitimate receiver
    gamma_e   SNR (or SIR) threshold above which an eavesdropper intercepts
    lambda_e  eavesdropper density per square meter
    zeta      maximum tolerable secrecy outage probability, in (0, 1)
    """

    alpha: float
    sigma2: float
    gamma_c: float
    gamma_e: float
    lambda_e: float
    zeta: float

    def __post_init__(self) -> None:
        if self.alpha < 2.0:
            raise ValueError("path-loss exponent must be >= 2")
        for name in ("sigma2", "gamma_c", "gamma_e"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be strictly positive")
        if self.lambda_e < 0.0:
            raise ValueError("lambda_e must be non-negative")
        if not 0.0 < self.zeta < 1.0:
            raise ValueError("zeta must lie in (0, 1)")

    @classmethod
    def from_db(
        cls,
        *,
        alpha: float,
        gamma_c_db: float,
        gamma_e_db: float,
        lambda_e: float,
        zeta: float,
        sigma2: float = 1.0,
    ) -> "SystemParams":
        """Build params from dB-valued SNR thresholds."""
        return cls(
            alpha=alpha,
            sigma2=sigma2,
            gamma_c=db_to_linear(gamma_c_db),
            gamma_e=db_to_linear(gamma_e_db),
            lambda_e=lambda_e,
            zeta=zeta,
        )


@dataclass(frozen=True, eq=False)
class NetworkInstance:
    """A fixed layout of legitimate nodes with source and destination picked out."""

    nodes: np.ndarray  # (M, 2) coordinates
    source: int
    destination: int
    node_region: Region
    eve_region: Region

    def __post_init__(self) -> None:
        nodes = np.asarray(self.nodes, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 2 or nodes.shape[1] != 2 or nodes.shape[0] < 2:
            raise ValueError("need at least two 2-D node coordinates")
        m = nodes.shape[0]
        if not (0 <= self.source < m and 0 <= self.destination < m):
            raise ValueError("source/destination index out of range")
        if self.source == self.destination:
            raise ValueError("source and destination must differ")
        if not bool(np.all(self.node_region.contains(nodes))):
            raise ValueError("every node must lie inside the node region")

    @property
    def m(self) -> int:
        return int(self.nodes.shape[0])


def sample_ppp(region: Region, lambda_e: float, rng: np.random.Generator) -> np.ndarray:
    """Sample a homogeneous Poisson point process over ``region``.

    The count is Poisson(lambda_e * area) and positions are independent
    uniform draws. Returns an (k, 2) array, possibly empty.
    """
    if lambda_e < 0.0:
        raise ValueError("density must be non-negative")
    k = int(rng.poisson(lambda_e * region.area))
    return region.sample_uniform(k, rng)


def sample_rayleigh_power(rng: np.random.Generator, size=None):
    """Squared-envelope gain of a unit-variance Rayleigh fade: Exp(1) draws."""
    return rng.exponential(1.0, size)


def farthest_pair(points: np.ndarray) -> tuple[int, int]:
    """Indices of the two mutually farthest points (smallest indices on ties)."""
    d = pairwise_distances(points)
    i, j = np.unravel_index(int(np.argmax(d)), d.shape)
    return (min(i, j), max(i, j))


def random_instance(
    m: int,
    node_region: Region,
    eve_region: Region,
    seed: int,
    trial: int = 0,
    endpoints: tuple[int, int] | str = "farthest",
) -> NetworkInstance:
    """Draw a layout of ``m`` nodes i.i.d. uniform over ``node_region``.

    Each (seed, trial) pair owns a distinct substream, so layouts are
    reproducible per trial and independent across trials. ``endpoints`` is
    either an explicit (source, destination) pair or "farthest" to pick the
    farthest-apart pair.
    """
    if m < 2:
        raise ValueError("need at least two nodes")
    rng = substream(seed, STREAM_NODES, trial)
    nodes = node_region.sample_uniform(m, rng)
    if endpoints == "farthest":
        src, dst = farthest_pair(nodes)
    else:
        src, dst = endpoints
    return NetworkInstance(
        nodes=nodes,
        source=int(src),
        destination=int(dst),
        node_region=node_region,
        eve_region=eve_region,
    )
