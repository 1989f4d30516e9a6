"""Monte Carlo estimation of connection and secrecy outage probabilities.

The simulators draw explicit Rayleigh fades and eavesdropper point fields and
count outage events directly, serving as the validation oracle for every
closed form in the package. Trials are processed in fixed-size chunks, each
chunk owning its own substream, so estimates are bit-identical regardless of
how chunks are scheduled across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    STREAM_COP_SIM,
    STREAM_JAM_FIELD,
    STREAM_JAM_FADE,
    STREAM_SOP_FADE,
    STREAM_SOP_FIELD,
    Region,
    SystemParams,
    substream,
)
from .outage import Route

CHUNK = 4096


@dataclass(frozen=True)
class SimReport:
    """Outcome of a Monte Carlo estimation run."""

    estimate: float
    trials: int
    std_error: float
    seed: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.estimate <= 1.0:
            raise ValueError("estimate must be a probability")


def _report(count: int, trials: int, seed: int) -> SimReport:
    est = count / trials
    return SimReport(
        estimate=est,
        trials=trials,
        std_error=math.sqrt(est * (1.0 - est) / trials),
        seed=seed,
    )


def _chunks(trials: int):
    full, rem = divmod(int(trials), CHUNK)
    for ci in range(full):
        yield ci, CHUNK
    if rem:
        yield full, rem


def simulate_cop(
    route: Route, powers, params: SystemParams, trials: int, seed: int
) -> SimReport:
    """Estimate connection outage by direct draws of per-hop fades.

    A trial is in outage when any hop's faded SNR falls below gamma_c, which
    happens exactly when the Exp(1) gain drops below psi_n / P_n.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    p = np.asarray(powers, dtype=float)
    thresholds = route.psi / p
    count = 0
    for ci, n in _chunks(trials):
        rng = substream(seed, STREAM_COP_SIM, ci)
        fades = rng.exponential(1.0, (n, route.n_hops))
        count += int(np.any(fades < thresholds, axis=1).sum())
    return _report(count, trials, seed)


def _field_outage_counts(
    trial_count: int,
    route: Route,
    region: Region,
    mean_points: float,
    rng_field: np.random.Generator,
    rng_fade: np.random.Generator,
    hop_outage,
    resample_per_hop: bool,
) -> int:
    """Count trials where any eavesdropper intercepts any hop.

    ``hop_outage(hop_index, points, rng_fade)`` returns a boolean per point.
    With ``resample_per_hop`` the point field is drawn independently per hop,
    matching the uncorrelated-fields assumption behind the closed forms;
    otherwise one field per trial is shared by all hops.
    """
    outage = np.zeros(trial_count, dtype=bool)
    if resample_per_hop:
        for hop in range(route.n_hops):
            counts = rng_field.poisson(mean_points, trial_count)
            pts = region.sample_uniform(int(counts.sum()), rng_field)
            idx = np.repeat(np.arange(trial_count), counts)
            hot = hop_outage(hop, pts, rng_fade)
            np.logical_or.at(outage, idx[hot], True)
    else:
        counts = rng_field.poisson(mean_points, trial_count)
        pts = region.sample_uniform(int(counts.sum()), rng_field)
        idx = np.repeat(np.arange(trial_count), counts)
        for hop in range(route.n_hops):
            hot = hop_outage(hop, pts, rng_fade)
            np.logical_or.at(outage, idx[hot], True)
    return int(outage.sum())


def simulate_sop(
    route: Route,
    powers,
    params: SystemParams,
    eve_region: Region,
    trials: int,
    seed: int,
    resample_per_hop: bool = True,
) -> SimReport:
    """Estimate secrecy outage against a sampled Poisson eavesdropper field.

    Eavesdropper SNR at a hop exceeds gamma_e when its Exp(1) fade beats
    gamma_e * sigma2 * d^alpha / P_n. ``resample_per_hop=True`` matches the
    per-hop-independent-field assumption of the closed form; False keeps one
    common field per trial, whose outage is bounded above by the former.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    p = np.asarray(powers, dtype=float)
    mean_points = params.lambda_e * eve_region.area
    a = params.alpha

    def hop_outage(hop: int, pts: np.ndarray, rng: np.random.Generator):
        d = np.hypot(pts[:, 0] - route.tx_coords[hop, 0], pts[:, 1] - route.tx_coords[hop, 1])
        thr = params.gamma_e * params.sigma2 * d**a / p[hop]
        return rng.exponential(1.0, pts.shape[0]) >= thr

    count = 0
    for ci, n in _chunks(trials):
        count += _field_outage_counts(
            n,
            route,
            eve_region,
            mean_points,
            substream(seed, STREAM_SOP_FIELD, ci),
            substream(seed, STREAM_SOP_FADE, ci),
            hop_outage,
            resample_per_hop,
        )
    return _report(count, trials, seed)


def simulate_sop_jamming(
    route: Route,
    powers,
    p_jam: float,
    jammer_position,
    params: SystemParams,
    eve_region: Region,
    trials: int,
    seed: int,
    include_noise: bool = False,
    resample_per_hop: bool = True,
) -> SimReport:
    """Estimate secrecy outage with a friendly jammer degrading eavesdroppers.

    Per eavesdropper and hop, independent Exp(1) fades are drawn for the
    signal and for the effective jamming channel; interception requires
    SIR >= gamma_e. ``include_noise`` adds sigma2 to the denominator to probe
    how far the interference-only model overestimates the true outage.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if p_jam <= 0.0:
        raise ValueError("jammer power must be strictly positive")
    p = np.asarray(powers, dtype=float)
    jx, jy = float(jammer_position[0]), float(jammer_position[1])
    mean_points = params.lambda_e * eve_region.area
    a = params.alpha
    noise = params.sigma2 if include_noise else 0.0

    def hop_outage(hop: int, pts: np.ndarray, rng: np.random.Generator):
        d_tx = np.hypot(pts[:, 0] - route.tx_coords[hop, 0], pts[:, 1] - route.tx_coords[hop, 1])
        d_jam = np.hypot(pts[:, 0] - jx, pts[:, 1] - jy)
        sig = p[hop] * rng.exponential(1.0, pts.shape[0]) / d_tx**a
        interference = p_jam * rng.exponential(1.0, pts.shape[0]) / d_jam**a
        return sig >= params.gamma_e * (interference + noise)

    count = 0
    for ci, n in _chunks(trials):
        count += _field_outage_counts(
            n,
            route,
            eve_region,
            mean_points,
            substream(seed, STREAM_JAM_FIELD, ci),
            substream(seed, STREAM_JAM_FADE, ci),
            hop_outage,
            resample_per_hop,
        )
    return _report(count, trials, seed)
