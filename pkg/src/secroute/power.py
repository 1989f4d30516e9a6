"""Closed-form per-hop power allocation under a secrecy outage budget.

For a fixed route, connection outage is minimized subject to the secrecy
budget by a water-filling-like split that is available in closed form: the
constraint is always active at the optimum, and the per-hop powers follow a
psi^(alpha/(alpha+2)) profile scaled so the budget binds exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import SystemParams
from .outage import DerivedConstants, Route, cop, sop


@dataclass(eq=False)
class PowerSolution:
    """Transmit powers for a route, optionally with a jammer share.

    powers        (N,) per-hop transmit powers, sigma2-normalized linear units
    jammer_power  jammer transmit power, None when no jammer is present
    achieved_cop  connection outage probability at these powers
    achieved_sop  secrecy outage probability at these powers
    feasible      whether all constraints of the producing problem hold
    solver        provenance tag: "closed-form", "polyblock" or "sca"
    info          solver-specific metadata (iterations, traces, gaps)
    """

    powers: np.ndarray
    jammer_power: float | None
    achieved_cop: float
    achieved_sop: float
    feasible: bool
    solver: str
    info: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.powers = np.asarray(self.powers, dtype=float)
        if np.any(self.powers <= 0.0):
            raise ValueError("powers must be strictly positive")
        for p in (self.achieved_cop, self.achieved_sop):
            if not 0.0 <= p <= 1.0:
                raise ValueError("outage probabilities must lie in [0, 1]")

    @property
    def total_power(self) -> float:
        extra = self.jammer_power if self.jammer_power is not None else 0.0
        return float(np.sum(self.powers)) + extra


def allocate_powers(route: Route, params: SystemParams) -> PowerSolution:
    """Optimal per-hop powers for ``route`` with the secrecy budget active.

    P_n = psi_n^(alpha/(alpha+2)) * [(omega/eps) * sum_k psi_k^(2/(2+alpha))]^(-alpha/2)

    The returned solution satisfies omega * sum P_n^(2/alpha) = eps, so its
    secrecy outage equals zeta up to rounding.
    """
    consts = DerivedConstants.from_params(params)
    a = params.alpha
    s = float(np.sum(route.psi ** (2.0 / (2.0 + a))))
    powers = route.psi ** (a / (a + 2.0)) * (consts.omega / consts.sop_budget * s) ** (
        -a / 2.0
    )
    return PowerSolution(
        powers=powers,
        jammer_power=None,
        achieved_cop=cop(route, powers),
        achieved_sop=sop(route, powers, params),
        feasible=True,
        solver="closed-form",
    )


def min_cop_for_route(route: Route, params: SystemParams) -> float:
    """Connection outage of ``route`` under the optimal allocation.

    Equals cop(route, allocate_powers(route, params).powers) algebraically:
    1 - exp(-(omega/eps)^(alpha/2) * (sum psi_n^(2/(2+alpha)))^(alpha/2 + 1)).
    """
    consts = DerivedConstants.from_params(params)
    a = params.alpha
    s = float(np.sum(route.psi ** (2.0 / (2.0 + a))))
    exponent = (consts.omega / consts.sop_budget) ** (a / 2.0) * s ** (a / 2.0 + 1.0)
    return -float(np.expm1(-exponent))
