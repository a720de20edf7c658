"""Finite radial ensembles of cone needles and the aggregation chains.

An ensemble is a finite family of rays, each carrying the weight c_a * x**(N-1)
on its own copy of the half-line, mixed by a probability vector.  This is the
desk-scale model of a disintegrated measure: the mixture of the per-ray ball
volumes must reproduce the assembled volume exactly, a radial test function
induces a reweighting of the family normalizing its second distance moment per
ray, and the two-step estimate -- per-ray inequality, then Cauchy-Schwarz
across rays -- assembles into the global quadratic inequality with the sharp
constant.  Every intermediate slack is reported separately; the final slack
decomposes exactly as the Cauchy-Schwarz slack plus the weighted per-ray
slacks, which is what the chain-monotonicity tests pin down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import space
from .functionals import (
    CknParams,
    CknProfile,
    DegenerateFunctionError,
    GaussianProfile,
    GridFunction,
    ckn_report,
    hpw_report,
)
from .quadrature import QuadratureConfig

__all__ = [
    "Ray",
    "NeedleEnsemble",
    "assemble",
    "verify_disintegration",
    "ReweightResult",
    "reweight",
    "RayHpwTerms",
    "ChainReport",
    "aggregate_hpw",
    "ray_ckn_check",
]

RadialFunction = Union[GridFunction, GaussianProfile, CknProfile]


@dataclass(frozen=True)
class Ray:
    """One needle: weight c * x**(N-1) (N lives on the ensemble) and its
    share of the quotient measure."""

    c: float
    weight: float

    def __post_init__(self) -> None:
        if self.c <= 0:
            raise ValueError("ray coefficient must be positive")
        if self.weight <= 0:
            raise ValueError("ray weight must be positive")


@dataclass(frozen=True)
class NeedleEnsemble:
    N: float
    rays: tuple[Ray, ...]

    def __post_init__(self) -> None:
        if self.N <= 1:
            raise ValueError("N must exceed 1")
        rays = tuple(self.rays)
        object.__setattr__(self, "rays", rays)
        if not rays:
            raise ValueError("ensemble needs at least one ray")

    @property
    def total_weight(self) -> float:
        return float(sum(r.weight for r in self.rays))

    def ray_density(self, i: int) -> space.PowerLaw:
        return space.PowerLaw(c=self.rays[i].c, N=self.N)


def _require_probability(e: NeedleEnsemble, tol: float = 1e-9) -> None:
    total = e.total_weight
    if abs(total - 1.0) > tol:
        raise ValueError(
            f"ray weights must form a probability (sum {total}, tolerance {tol})"
        )


def assemble(e: NeedleEnsemble, rho) -> np.ndarray | float:
    """Ball volume of the mixture: sum of q_a * c_a * rho**N / N, exact."""
    rs = np.asarray(rho, dtype=float)
    scalar = rs.ndim == 0
    rs = np.atleast_1d(rs)
    if np.any(rs < 0):
        raise ValueError("radii must be nonnegative")
    coef = sum(r.weight * r.c for r in e.rays) / e.N
    out = coef * rs**e.N
    return float(out[0]) if scalar else out


def verify_disintegration(
    e: NeedleEnsemble, test_radii: Sequence[float]
) -> float:
    """Max relative deviation between the assembled ball volume and the
    normalized mixture of per-ray ball volumes.

    The identity is exact by construction for a probability ensemble; an
    unnormalized weight vector shows up here at exactly its relative size
    times the share of the offending ray.
    """
    radii = [float(r) for r in test_radii]
    if not radii:
        raise ValueError("need at least one test radius")
    if any(r <= 0 for r in radii):
        raise ValueError("test radii must be positive")

    total = e.total_weight
    worst = 0.0
    for r in radii:
        direct = float(assemble(e, r))
        mixture = sum(
            ray.weight / total * float(space.ball_volume(space.PowerLaw(ray.c, e.N), r))
            for ray in e.rays
        )
        scale = max(abs(direct), abs(mixture), 1e-300)
        worst = max(worst, abs(direct - mixture) / scale)
    return worst


# ---------------------------------------------------------------------------
# reweighting (second-moment normalization per ray)


@dataclass(frozen=True)
class ReweightResult:
    ray_moments: tuple[float, ...]  # C_a = second distance moment per unit ray
    reweighted_weights: tuple[float, ...]  # C_a * q_a, zero for dropped rays
    tilde_q_total: float
    moment_deviation: float  # worst |recomputed normalized moment - 1|
    total_moment_deviation: float  # vs the moment against the assembled density
    reassembly_deviation: float  # mixture of reweighted rays vs assembled volume
    dropped_rays: tuple[int, ...]


def _moment2(
    d: space.Density, u: RadialFunction, cfg: QuadratureConfig | None
) -> float:
    # Reuse the report machinery; only the second-moment integral is needed,
    # but the mass check catches degenerate u at the same time.
    return hpw_report(d, d.N, u, cfg).moment2


def reweight(
    e: NeedleEnsemble,
    u: RadialFunction,
    cfg: QuadratureConfig | None = None,
    test_radii: Sequence[float] = (0.5, 1.0, 2.0, 4.0),
) -> ReweightResult:
    """Normalize each ray by its second distance moment C_a of u.

    The reweighted family (ray measure divided by C_a, quotient weight
    multiplied by C_a) is again a disintegration of the same measure; the
    result carries numerical checks of the three identities that make the
    aggregation chain work: per-ray normalized moments are 1, the total
    reweighted mass equals the moment against the assembled density, and the
    reweighted mixture reassembles the original volumes.
    """
    _require_probability(e)

    moments: list[float] = []
    for i in range(len(e.rays)):
        try:
            moments.append(_moment2(e.ray_density(i), u, cfg))
        except DegenerateFunctionError:
            moments.append(0.0)
    if all(m == 0.0 for m in moments):
        raise DegenerateFunctionError("test function vanishes on every ray")

    dropped = tuple(i for i, m in enumerate(moments) if m == 0.0)
    tilde_weights = tuple(
        (m * ray.weight if m > 0.0 else 0.0) for m, ray in zip(moments, e.rays)
    )
    tilde_total = float(sum(tilde_weights))

    # Per-ray check: the moment of u against the reweighted ray is 1.
    moment_dev = 0.0
    for i, (m, ray) in enumerate(zip(moments, e.rays)):
        if m == 0.0:
            continue
        scaled = space.PowerLaw(c=ray.c / m, N=e.N)
        moment_dev = max(moment_dev, abs(_moment2(scaled, u, cfg) - 1.0))

    # Total check: tilde_q_total equals the moment against the assembled
    # density (one fresh quadrature, not a re-sum of the per-ray values).
    c_total = sum(ray.weight * ray.c for ray in e.rays)
    assembled = space.PowerLaw(c=c_total, N=e.N)
    total_direct = _moment2(assembled, u, cfg)
    total_dev = abs(tilde_total - total_direct) / max(
        abs(total_direct), abs(tilde_total), 1e-300
    )

    # Reassembly check: the reweighted mixture reproduces the volumes.
    reassembly_dev = 0.0
    for r in test_radii:
        direct = float(assemble(e, r))
        mixture = sum(
            tw / m * float(space.ball_volume(space.PowerLaw(ray.c, e.N), r))
            for tw, m, ray in zip(tilde_weights, moments, e.rays)
            if m > 0.0
        )
        scale = max(abs(direct), abs(mixture), 1e-300)
        reassembly_dev = max(reassembly_dev, abs(direct - mixture) / scale)

    return ReweightResult(
        ray_moments=tuple(moments),
        reweighted_weights=tilde_weights,
        tilde_q_total=tilde_total,
        moment_deviation=moment_dev,
        total_moment_deviation=total_dev,
        reassembly_deviation=reassembly_dev,
        dropped_rays=dropped,
    )


# ---------------------------------------------------------------------------
# aggregation chains


@dataclass(frozen=True)
class RayHpwTerms:
    dirichlet: float
    moment2: float
    mass: float
    slack: float  # sqrt(D*S) - (N/2)*M, the per-ray estimate
    reweighted_slack: float  # same divided by C_a = moment2
    rel_slack: float


@dataclass(frozen=True)
class ChainReport:
    per_ray: tuple[RayHpwTerms, ...]
    total_dirichlet: float
    total_moment2: float
    total_mass: float
    cs_slack: float  # Cauchy-Schwarz across rays
    final_slack: float  # sqrt(D*S) - (N/2)*M on the assembled measure
    final_quotient_slack: float  # D*S/M**2 - N**2/4
    sharp_constant: float


def aggregate_hpw(
    e: NeedleEnsemble,
    u: RadialFunction,
    cfg: QuadratureConfig | None = None,
) -> ChainReport:
    """Run the two-step aggregation and report every slack separately.

    Exact decomposition: final_slack = cs_slack + sum_a q_a * per_ray_slack_a,
    so the assembled inequality holds with margin whenever the per-ray
    estimates and the Cauchy-Schwarz step do.
    """
    _require_probability(e)
    n = e.N

    per_ray: list[RayHpwTerms] = []
    for i, ray in enumerate(e.rays):
        rep = hpw_report(e.ray_density(i), n, u, cfg)
        root = math.sqrt(rep.dirichlet * rep.moment2)
        slack = root - (n / 2.0) * rep.mass
        scale = max(root, (n / 2.0) * rep.mass, 1e-300)
        per_ray.append(
            RayHpwTerms(
                dirichlet=rep.dirichlet,
                moment2=rep.moment2,
                mass=rep.mass,
                slack=slack,
                reweighted_slack=slack / rep.moment2 if rep.moment2 > 0 else math.inf,
                rel_slack=slack / scale,
            )
        )

    weights = np.array([r.weight for r in e.rays])
    d_tot = float(weights @ [t.dirichlet for t in per_ray])
    s_tot = float(weights @ [t.moment2 for t in per_ray])
    m_tot = float(weights @ [t.mass for t in per_ray])
    if m_tot <= 0.0:
        raise DegenerateFunctionError("test function has zero mass on the ensemble")

    cross = float(
        weights @ [math.sqrt(t.dirichlet * t.moment2) for t in per_ray]
    )
    cs_slack = math.sqrt(d_tot * s_tot) - cross
    final_slack = math.sqrt(d_tot * s_tot) - (n / 2.0) * m_tot
    return ChainReport(
        per_ray=tuple(per_ray),
        total_dirichlet=d_tot,
        total_moment2=s_tot,
        total_mass=m_tot,
        cs_slack=cs_slack,
        final_slack=final_slack,
        final_quotient_slack=d_tot * s_tot / m_tot**2 - n * n / 4.0,
        sharp_constant=n * n / 4.0,
    )


def ray_ckn_check(
    ray: Ray,
    N: float,
    params: CknParams,
    u: RadialFunction,
    cfg: QuadratureConfig | None = None,
) -> float:
    """Slack of the per-ray weighted estimate on a single cone needle:
    sqrt(dirichlet * singular_moment) - ((N-q)/p) * weighted mass, which is
    nonnegative for every admissible u on a power-law ray."""
    rep = ckn_report(space.PowerLaw(ray.c, N), params, u, cfg)
    root = math.sqrt(rep.dirichlet * rep.singular_moment)
    return root - (N - params.q) / params.p * rep.ckn_mass
