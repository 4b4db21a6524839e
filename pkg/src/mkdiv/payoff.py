"""Cheapest payoffs whose distribution stays near a benchmark.

A payoff is represented by its quantile curve ``G`` on the midpoint u-grid.
Among all payoffs with a given distribution the cheapest one is
anti-monotone in the state-price density ``xi``, and its cost is

    cost(G) = mean over u of  Q_xi(1 - u) * G(u),

evaluated by :func:`payoff_cost`.  Minimising this cost subject to the
payoff's distribution lying within Bregman-Wasserstein distance ``eps`` of a
benchmark is the same calibration problem as the worst-case distortion bound
with the signed, increasing weight ``-Q_xi(1 - u)``; the solver therefore
reuses the engine from :mod:`mkdiv.robust` verbatim:

    G_lam(u) = (phi')^{-1}( phi'(Q_bench(u)) - Q_xi(1 - u) / lam ).

The optimal curve may go negative even though payoffs are meant to be
non-negative; the solver flags this (``nonneg_violation``) instead of
projecting, so the reported optimum is exactly the formula's.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import Distribution, QuantileGrid, quantile_grid
from .errors import DomainError
from .generators import ConvexGenerator
from .numerics import midpoint_u, pairwise_mean
from .robust import calibrate_lambda, perturbed_nodes

__all__ = ["MarketSpec", "PayoffSolution", "payoff_cost", "cheapest_payoff"]


@dataclass(frozen=True, eq=False)
class MarketSpec:
    """State-price density with a flat rate and horizon.

    ``spd`` must be supported on [0, inf) with a finite mean (checked by the
    grid quadrature).  When ``normalized=True`` the mean is additionally
    required to match the discount factor exp(-rate * horizon) to 1e-3
    relative, a consistency check for densities meant to price the bank
    account correctly.
    """

    spd: Distribution
    rate: float = 0.0
    horizon: float = 1.0
    normalized: bool = False

    def __post_init__(self):
        if not self.horizon > 0.0:
            raise DomainError(f"horizon must be positive, got {self.horizon}")
        lo, _ = self.spd.support
        if lo < 0.0:
            raise DomainError(
                f"state-price density must be supported on [0, inf), "
                f"got lower bound {lo}"
            )
        mean = self.spd.mean()
        if not np.isfinite(mean):
            raise DomainError("state-price density must have a finite mean")
        if self.normalized:
            df = float(np.exp(-self.rate * self.horizon))
            if abs(mean - df) > 1e-3 * df:
                raise DomainError(
                    f"state-price density mean {mean} does not match the "
                    f"discount factor {df}"
                )

    def discount_factor(self) -> float:
        return float(np.exp(-self.rate * self.horizon))

    def neg_weight(self, u: np.ndarray) -> np.ndarray:
        """The signed weight -Q_xi(1 - u); negative but increasing in u."""
        return -np.asarray(self.spd.quantile(1.0 - u), dtype=float)


def payoff_cost(market: MarketSpec, grid: QuantileGrid) -> float:
    """Price of the cost-efficient payoff with quantile curve ``grid``:
    mean over nodes of Q_xi(1 - u_i) * node_i."""
    u = grid.u
    spd_rev = np.asarray(market.spd.quantile(1.0 - u), dtype=float)
    return pairwise_mean(spd_rev * grid.nodes)


@dataclass(frozen=True, eq=False)
class PayoffSolution:
    """Calibrated cheapest payoff: multiplier, quantile curve, cost."""

    lambda_star: float
    payoff_quantile: QuantileGrid
    cost: float
    divergence_at_solution: float
    epsilon: float
    binding: bool
    nonneg_violation: bool

    def to_json_dict(self) -> dict:
        return {
            "lambda_star": self.lambda_star,
            "cost": self.cost,
            "epsilon": self.epsilon,
            "binding": self.binding,
            "nonneg_violation": self.nonneg_violation,
            "divergence_at_solution": self.divergence_at_solution,
            "truncation_delta": self.payoff_quantile.delta,
            "grid": {
                "M": self.payoff_quantile.m,
                "nodes": [float(v) for v in self.payoff_quantile.nodes],
            },
        }


def cheapest_payoff(
    gen: ConvexGenerator,
    benchmark: Distribution,
    market: MarketSpec,
    eps: float,
    m: int = 10_000,
    delta: float = 1e-7,
    tol: float = 1e-8,
) -> PayoffSolution:
    """Cheapest payoff whose distribution stays within divergence ``eps`` of
    the benchmark; the multiplier is calibrated exactly as in the worst-case
    solver, with the signed spd weight."""
    grid = quantile_grid(benchmark, m, delta)
    weight = market.neg_weight(midpoint_u(m, delta))
    lam, div, binding = calibrate_lambda(gen, grid.nodes, weight, eps, tol)
    nodes = perturbed_nodes(gen, grid.nodes, weight, lam)
    curve = QuantileGrid(nodes=nodes, m=m, delta=delta)
    return PayoffSolution(
        lambda_star=lam,
        payoff_quantile=curve,
        cost=payoff_cost(market, curve),
        divergence_at_solution=div,
        epsilon=eps,
        binding=binding,
        nonneg_violation=bool(np.any(nodes < 0.0)),
    )
