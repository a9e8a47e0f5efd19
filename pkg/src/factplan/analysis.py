"""Sample-complexity analysis of joint versus factorized roadmaps.

All counts are real-valued: they bound the number of deterministic
low-dispersion samples after which a batch roadmap contains a
near-optimal solution with the requested reliability. `mu` is the
problem's measure constant, `dispersion_bound` the required l-infinity
dispersion relative to clearance, `p_bar` the target success
probability, `d_i` each agent's configuration dimension and `n_agents`
the number of agents. `f` is the fraction of the planning effort spent
in factorized subspaces (0 = fully joint, 1 = fully factorized).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def _validate_common(mu: float, dispersion_bound: float, p_bar: float) -> None:
    if mu <= 0.0:
        raise ValueError("mu must be positive")
    if not (0.0 < dispersion_bound <= 1.0):
        raise ValueError("dispersion bound must lie in (0, 1]")
    if not (0.0 <= p_bar < 1.0):
        raise ValueError("success probability must lie in [0, 1)")


def sufficient_samples(mu: float, dispersion_bound: float, p_bar: float, d: int) -> float:
    """Samples sufficient for a d-dimensional roadmap:
    (mu / disp^d) * log(mu / (disp^d * (1 - p_bar)))."""
    _validate_common(mu, dispersion_bound, p_bar)
    if d < 1:
        raise ValueError("dimension must be at least 1")
    a = mu / dispersion_bound**d
    return a * math.log(a / (1.0 - p_bar))


def prm_star_joint_samples(
    mu: float, dispersion_bound: float, p_bar: float, d_i: int, n_agents: int
) -> float:
    """Joint-space count: the d_i*n_agents-dimensional instance."""
    if n_agents < 1:
        raise ValueError("need at least one agent")
    return sufficient_samples(mu, dispersion_bound, p_bar, d_i * n_agents)


def fact_prm_star_samples(
    mu: float,
    dispersion_bound: float,
    p_bar: float,
    d_i: int,
    n_agents: int,
    f: float,
) -> float:
    """Factorized count: joint exploration on a (1-f) share of the
    problem plus n_agents independent single-agent roadmaps sharing the
    remaining f, each needing reliability p_bar^(1/n_agents).

    Both terms use the x*log(x/c) shape of `sufficient_samples`; the
    convention 0*log(0) := 0 applies at f = 1 (no joint share) and f = 0
    (no factorized share), making the count continuous on [0, 1] and
    equal to the joint count at f = 0.
    """
    _validate_common(mu, dispersion_bound, p_bar)
    if d_i < 1 or n_agents < 1:
        raise ValueError("d_i and n_agents must be at least 1")
    if not (0.0 <= f <= 1.0):
        raise ValueError("factorized fraction must lie in [0, 1]")

    d_joint = d_i * n_agents
    if f >= 1.0:
        joint_term = 0.0
    else:
        a = (1.0 - f) * mu / dispersion_bound**d_joint
        joint_term = a * math.log(a / (1.0 - p_bar))

    if f <= 0.0:
        fact_term = 0.0
    else:
        b = (f * mu) ** (1.0 / n_agents) / dispersion_bound**d_i
        fact_term = b * math.log(b / (1.0 - p_bar ** (1.0 / n_agents)))
    return joint_term + fact_term


@dataclass(frozen=True)
class GainInputs:
    mu: float
    dispersion_bound: float
    p_bar: float
    d_i: int
    n_agents: int
    f: float


@dataclass(frozen=True)
class GainReport:
    inputs: GainInputs
    n_joint: float
    n_fact: float
    gain_exact: float
    gain_asymptotic: float
    asymptotic_regime: bool


def factorization_gain(inputs: GainInputs) -> GainReport:
    """Relative sample savings of the factorized roadmap.

    gain_exact = 1 - N_fact / N_joint. gain_asymptotic keeps only the
    joint term's leading behavior:
    f - (1 - f) * log(1 - f) / log(mu / (disp^(d_i*n) * (1 - p_bar))),
    with the 0*log(0) := 0 convention at f = 1. `asymptotic_regime` is
    True when the dropped factored term is under 1% of the joint count,
    i.e. when the asymptotic expression is a faithful approximation.
    """
    n_joint = prm_star_joint_samples(
        inputs.mu, inputs.dispersion_bound, inputs.p_bar, inputs.d_i, inputs.n_agents
    )
    n_fact = fact_prm_star_samples(
        inputs.mu,
        inputs.dispersion_bound,
        inputs.p_bar,
        inputs.d_i,
        inputs.n_agents,
        inputs.f,
    )
    gain_exact = 1.0 - n_fact / n_joint

    d_joint = inputs.d_i * inputs.n_agents
    log_joint = math.log(
        inputs.mu / (inputs.dispersion_bound**d_joint * (1.0 - inputs.p_bar))
    )
    if inputs.f >= 1.0:
        correction = 0.0
    else:
        correction = (1.0 - inputs.f) * math.log(1.0 - inputs.f) / log_joint
    gain_asymptotic = inputs.f - correction

    if inputs.f <= 0.0:
        fact_share = 0.0
    else:
        b = (inputs.f * inputs.mu) ** (1.0 / inputs.n_agents) / (
            inputs.dispersion_bound**inputs.d_i
        )
        fact_share = (
            b * math.log(b / (1.0 - inputs.p_bar ** (1.0 / inputs.n_agents))) / n_joint
        )
    regime = abs(fact_share) < 0.01

    return GainReport(
        inputs=inputs,
        n_joint=n_joint,
        n_fact=n_fact,
        gain_exact=gain_exact,
        gain_asymptotic=gain_asymptotic,
        asymptotic_regime=regime,
    )


def gain_grid(
    f_values,
    agent_counts,
    mu: float,
    dispersion_bound: float,
    p_bar: float,
    d_i: int = 2,
) -> list[GainReport]:
    """Gain reports for the cross product of f values and agent counts,
    ordered agent-count-major."""
    out: list[GainReport] = []
    for n in agent_counts:
        for f in f_values:
            out.append(
                factorization_gain(
                    GainInputs(mu, dispersion_bound, p_bar, d_i, int(n), float(f))
                )
            )
    return out


def linf_dispersion(points: np.ndarray, grid: int = 64) -> float:
    """l-infinity dispersion of a point set in the unit cube, estimated
    on a boundary-inclusive (grid+1)^d evaluation lattice.

    Lower bound of the true dispersion; exact whenever the worst empty
    box is centered on a lattice point (e.g. the single center point
    gives exactly 0.5 for any grid, and a k x k sample lattice gives
    exactly half its spacing whenever grid is a multiple of 2*(k-1)).
    """
    pts = np.asarray(points, float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("points must be a non-empty (n, d) array")
    d = pts.shape[1]
    if d > 3:
        raise ValueError("dispersion lattice supports d <= 3")
    if grid < 1:
        raise ValueError("grid must be at least 1")
    axes = [np.linspace(0.0, 1.0, grid + 1)] * d
    mesh = np.meshgrid(*axes, indexing="ij")
    lattice = np.column_stack([m.ravel() for m in mesh])

    worst = 0.0
    chunk = max(1, 2_000_000 // max(1, pts.shape[0]))
    for lo in range(0, lattice.shape[0], chunk):
        block = lattice[lo : lo + chunk]
        cheb = np.abs(block[:, None, :] - pts[None, :, :]).max(axis=2)
        worst = max(worst, float(cheb.min(axis=1).max()))
    return worst


def composition_epsilon(
    costs, optima
) -> tuple[float, float]:
    """Joint and worst per-block suboptimality of a composed solution.

    costs[i] is the realized cost of block i, optima[i] its optimum.
    Returns (eps_joint, eps_max) where sum(costs) = (1 + eps_joint) *
    sum(optima) and eps_max = max_i costs[i]/optima[i] - 1. Additivity
    of the social cost gives eps_joint <= eps_max.
    """
    c = np.asarray(costs, float)
    o = np.asarray(optima, float)
    if c.shape != o.shape or c.ndim != 1 or c.size == 0:
        raise ValueError("costs and optima must be equal-length 1-d arrays")
    if not (o > 0.0).all():
        raise ValueError("block optima must be positive")
    if not (c >= o - 1e-12).all():
        raise ValueError("block costs cannot beat block optima")
    eps = c / o - 1.0
    eps_joint = float(c.sum() / o.sum() - 1.0)
    return eps_joint, float(eps.max())
