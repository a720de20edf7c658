"""Uncertainty-type functionals on needle densities.

Two families live here.  The quadratic family pairs the Dirichlet energy of a
test function with its second distance moment; the weighted family replaces
the moment by a distance-weighted power integral with a singular weight at the
origin.  Both come with closed-form extremal profiles, truncated grid
approximants, moment functions of the family parameter with their scaling
identities, and per-density family-slack diagnostics whose sign is the whole
point: zero on exact cones, strictly negative somewhere on everything else.

Test functions are either piecewise-linear grid functions (compact support)
or the closed-form profiles; in both cases the local Lipschitz constant on a
ray is just |u'| a.e., which is what the Dirichlet integrals use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import space
from .quadrature import (
    CompactSupport,
    DecayClass,
    ExponentialDecay,
    GaussianDecay,
    IntegralResult,
    PowerDecay,
    QuadratureConfig,
    integrate_halfline,
    unit_ball_volume,
)

__all__ = [
    "DegenerateFunctionError",
    "GridFunction",
    "lip_profile",
    "random_grid_function",
    "CknParams",
    "GaussianProfile",
    "CknProfile",
    "hpw_extremal",
    "ckn_extremal",
    "hpw_approximant",
    "ckn_approximant",
    "DEFAULT_APPROXIMANT_LEVELS",
    "HpwReport",
    "CknReport",
    "hpw_report",
    "ckn_report",
    "HpwMoment",
    "CknMoment",
    "moment_T_hpw",
    "moment_T_ckn",
    "hpw_family_slack",
    "hpw_family_slack_terms",
    "ckn_family_slack",
    "ckn_family_slack_terms",
    "gaussian_mass",
    "gaussian_mass_layer_cake",
]

DEFAULT_APPROXIMANT_LEVELS = (2, 4, 8, 16)


class DegenerateFunctionError(ValueError):
    """Test function carries no mass against the density."""


@dataclass(frozen=True)
class GridFunction:
    """Piecewise-linear function with compact support.

    Values beyond the last node are 0 and the last nodal value must be 0, so
    the function is continuous.  A first node above 0 is allowed; the function
    extends constantly (not linearly) to the left, staying Lipschitz.
    """

    nodes: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        nodes = tuple(float(x) for x in self.nodes)
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)
        if len(nodes) < 2 or len(nodes) != len(values):
            raise ValueError("need matching nodes/values, at least two")
        if nodes[0] < 0:
            raise ValueError("nodes must be nonnegative")
        if any(b <= a for a, b in zip(nodes, nodes[1:])):
            raise ValueError("nodes must be strictly increasing")
        if not all(map(math.isfinite, values)):
            raise ValueError("values must be finite")
        if values[-1] != 0.0:
            raise ValueError("last value must be 0 (compact support)")

    @property
    def slopes(self) -> np.ndarray:
        n = np.asarray(self.nodes)
        v = np.asarray(self.values)
        return np.diff(v) / np.diff(n)

    def value(self, x) -> np.ndarray:
        return np.interp(
            np.asarray(x, dtype=float),
            self.nodes,
            self.values,
            left=self.values[0],
            right=0.0,
        )

    def derivative(self, x) -> np.ndarray:
        """a.e. derivative; at a node the right-interval slope is reported."""
        xs = np.asarray(x, dtype=float)
        n = np.asarray(self.nodes)
        idx = np.clip(np.searchsorted(n, xs, side="right") - 1, 0, len(n) - 2)
        out = self.slopes[idx]
        return np.where((xs < n[0]) | (xs >= n[-1]), 0.0, out)

    def lip(self, x) -> np.ndarray:
        return np.abs(self.derivative(x))

    @property
    def support_end(self) -> float:
        return self.nodes[-1]


def lip_profile(u: GridFunction) -> np.ndarray:
    """Per-interval local Lipschitz constant: |slope| on each node interval."""
    return np.abs(u.slopes)


def random_grid_function(
    rng: np.random.Generator, n_nodes: int = 17, support: float = 4.0
) -> GridFunction:
    """Nonnegative random test function on [0, support] for property tests."""
    nodes = np.linspace(0.0, support, n_nodes)
    values = rng.uniform(0.0, 1.0, size=n_nodes)
    values[-1] = 0.0
    return GridFunction(tuple(nodes), tuple(values))


@dataclass(frozen=True)
class CknParams:
    """Exponent triple for the weighted inequality.

    Requires 0 < q < 2 < p and 2 < N < 2(p-q)/(p-2); the derived exponent
    alpha = (N-q)/(2-q) - p/(p-2) is then strictly negative, which is exactly
    what makes the extremal profiles integrable at infinity.
    """

    p: float
    q: float
    N: float

    def __post_init__(self) -> None:
        if not self.p > 2:
            raise ValueError("p must exceed 2")
        if not 0 < self.q < 2:
            raise ValueError("q must lie in (0, 2)")
        upper = 2.0 * (self.p - self.q) / (self.p - 2.0)
        if not 2.0 < self.N < upper:
            raise ValueError(
                f"N must lie in (2, {upper}) for p={self.p}, q={self.q}; got {self.N}"
            )

    @property
    def alpha(self) -> float:
        return (self.N - self.q) / (2.0 - self.q) - self.p / (self.p - 2.0)

    @property
    def sharp_constant(self) -> float:
        return ((self.N - self.q) / self.p) ** 2


@dataclass(frozen=True)
class GaussianProfile:
    """Extremal profile exp(-lam * x**2) with its exact derivative."""

    lam: float

    def __post_init__(self) -> None:
        if self.lam <= 0:
            raise ValueError("lam must be positive")

    def value(self, x) -> np.ndarray:
        xs = np.asarray(x, dtype=float)
        return np.exp(-self.lam * xs**2)

    def derivative(self, x) -> np.ndarray:
        xs = np.asarray(x, dtype=float)
        return -2.0 * self.lam * xs * np.exp(-self.lam * xs**2)


@dataclass(frozen=True)
class CknProfile:
    """Extremal profile (lam + x**(2-q))**(1/(2-p)) with its exact derivative."""

    params: CknParams
    lam: float

    def __post_init__(self) -> None:
        if self.lam <= 0:
            raise ValueError("lam must be positive")

    def value(self, x) -> np.ndarray:
        xs = np.asarray(x, dtype=float)
        p, q = self.params.p, self.params.q
        return (self.lam + xs ** (2.0 - q)) ** (1.0 / (2.0 - p))

    def derivative(self, x) -> np.ndarray:
        # Singular like x**(1-q) at 0 when q > 1; quadrature never samples 0.
        xs = np.asarray(x, dtype=float)
        p, q = self.params.p, self.params.q
        base = (self.lam + xs ** (2.0 - q)) ** ((p - 1.0) / (2.0 - p))
        return (2.0 - q) / (2.0 - p) * base * xs ** (1.0 - q)


Profile = Union[GridFunction, GaussianProfile, CknProfile]


def hpw_extremal(lam: float) -> GaussianProfile:
    return GaussianProfile(lam=lam)


def ckn_extremal(params: CknParams, lam: float) -> CknProfile:
    return CknProfile(params=params, lam=lam)


def _cutoff(x: np.ndarray, k: float) -> np.ndarray:
    # 1 on [0, k], linear to 0 on [k, k+1], 0 beyond.
    return np.clip(k + 1.0 - x, 0.0, 1.0)


def hpw_approximant(lam: float, k: float, nodes_per_unit: int = 16) -> GridFunction:
    """Truncated grid sample of the gaussian profile: cutoff at radius k."""
    prof = GaussianProfile(lam=lam)
    n = int(nodes_per_unit * (k + 1)) + 1
    nodes = np.linspace(0.0, k + 1.0, n)
    values = prof.value(nodes) * _cutoff(nodes, k)
    values[-1] = 0.0
    return GridFunction(tuple(nodes), tuple(values))


def ckn_approximant(
    params: CknParams, lam: float, k: float, nodes_per_unit: int = 16
) -> GridFunction:
    """Truncated grid sample of the weighted-family profile.

    The distance is floored at 1/k before taking the (2-q) power, which tames
    the derivative singularity at the origin; the floor point is a node so
    the kink is represented exactly.

    The cutoff ramp has unit width, so on a cone of exponent N the family's
    Dirichlet integral converges as k grows only when N < 1 + 2(2-q)/(p-2);
    above that the ramp contributes ~ k**(N-1-2(2-q)/(p-2)) and the quotient
    of the family diverges even though every member still satisfies the
    inequality.  The convergence tests pin down both regimes.
    """
    q, p = params.q, params.p
    floor = 1.0 / k
    n = int(nodes_per_unit * (k + 1)) + 1
    nodes = np.linspace(0.0, k + 1.0, n)
    nodes = np.unique(np.concatenate([nodes, [floor]]))
    core = (lam + np.maximum(nodes, floor) ** (2.0 - q)) ** (1.0 / (2.0 - p))
    values = core * _cutoff(nodes, k)
    values[-1] = 0.0
    return GridFunction(tuple(nodes), tuple(values))


# ---------------------------------------------------------------------------
# report assembly


@dataclass(frozen=True)
class HpwReport:
    dirichlet: float
    moment2: float
    mass: float
    quotient: float
    sharp_constant: float
    slack: float
    integral_errors: tuple[float, float, float]
    quotient_error: float


@dataclass(frozen=True)
class CknReport:
    dirichlet: float
    singular_moment: float
    ckn_mass: float
    quotient: float
    sharp_constant: float
    slack: float
    integral_errors: tuple[float, float, float]
    quotient_error: float


def _safe_density(d: space.Density):
    """Density evaluator that treats points outside the domain as massless."""
    lo, hi = space.domain(d)
    if isinstance(d, space.Tabulated):

        def h(x: np.ndarray) -> np.ndarray:
            inside = (x >= lo) & (x <= hi)
            return np.where(
                inside, space.eval_density(d, np.clip(x, lo, hi)), 0.0
            )

        return h
    return lambda x: space.eval_density(d, x)


def _power_weighted(d: space.Density, extra_power: float, core):
    """Integrand h(x) * x**extra_power * core(x), assembled so that a core
    that has already underflowed to 0 masks the power factor.

    The power-law part of h is folded into a single exponent.  Under the
    exponent constraint the decaying core always underflows strictly before
    x**total can overflow, so masking on core == 0 rules out inf * 0 at the
    extreme arguments the tail-inversion fragment can produce.
    """
    if isinstance(d, space.Tabulated):
        h = _safe_density(d)

        def f(x: np.ndarray) -> np.ndarray:
            hv = h(x)
            out = np.zeros_like(x)
            m = hv != 0.0
            if np.any(m):
                out[m] = hv[m] * x[m] ** extra_power * np.asarray(core(x[m]))
            return out

        return f

    total = d.N - 1.0 + extra_power
    tilt = d.a if isinstance(d, space.PowerLawExp) else 0.0
    cutoff = d.R if isinstance(d, space.TruncatedPowerLaw) else math.inf

    def f(x: np.ndarray) -> np.ndarray:
        cv = np.asarray(core(x))
        out = np.zeros_like(x)
        m = (cv != 0.0) & (x <= cutoff)
        if np.any(m):
            out[m] = d.c * x[m] ** total * cv[m]
            if tilt:
                out[m] *= np.exp(-tilt * x[m])
        return out

    return f


def _profile_decay(d: space.Density, u: Profile) -> DecayClass:
    """Decay class of any u-weighted integrand against d."""
    support = space.support_bound(d)
    if isinstance(u, GridFunction):
        return CompactSupport(min(u.support_end, support))
    if math.isfinite(support):
        return CompactSupport(support)
    if isinstance(u, GaussianProfile):
        return GaussianDecay(2.0 * u.lam)
    # Weighted-family profile on an unbounded density.
    if isinstance(d, space.PowerLawExp):
        return ExponentialDecay(d.a)
    p, q = u.params.p, u.params.q
    beta = (2.0 - q) * p / (p - 2.0) + q + 1.0 - d.N
    return PowerDecay(beta)


def _breaks(d: space.Density, u: Profile) -> tuple[float, ...]:
    b = list(space.integration_breakpoints(d))
    if isinstance(u, GridFunction):
        b.extend(u.nodes)
    return tuple(b)


def _quotient_error(
    dirichlet: IntegralResult, moment: IntegralResult, mass: IntegralResult
) -> float:
    rel = 0.0
    for r in (dirichlet, moment):
        rel += r.error_estimate / max(abs(r.value), 1e-300)
    rel += 2.0 * mass.error_estimate / max(abs(mass.value), 1e-300)
    quot = dirichlet.value * moment.value / mass.value**2 if mass.value else math.inf
    return abs(quot) * rel


def hpw_report(
    d: space.Density,
    N: float,
    u: Profile,
    cfg: QuadratureConfig | None = None,
) -> HpwReport:
    """Dirichlet energy, second distance moment, and mass of u against d,
    with the quotient compared to the sharp constant N**2/4."""
    nu = space.origin_exponent(d)
    decay = _profile_decay(d, u)
    breaks = _breaks(d, u)

    if isinstance(u, GridFunction):
        s_d, s_m = nu, nu
    else:
        s_d, s_m = nu + 2.0, nu

    res_d = integrate_halfline(
        _power_weighted(d, 0.0, lambda x: u.derivative(x) ** 2),
        singularity_exponent=s_d,
        decay=decay,
        cfg=cfg,
        breakpoints=breaks,
    )
    res_s = integrate_halfline(
        _power_weighted(d, 2.0, lambda x: u.value(x) ** 2),
        singularity_exponent=nu + 2.0,
        decay=decay,
        cfg=cfg,
        breakpoints=breaks,
    )
    res_m = integrate_halfline(
        _power_weighted(d, 0.0, lambda x: u.value(x) ** 2),
        singularity_exponent=s_m,
        decay=decay,
        cfg=cfg,
        breakpoints=breaks,
    )
    if res_m.value <= 0.0 or not math.isfinite(res_m.value):
        raise DegenerateFunctionError("degenerate test function: zero mass")

    quotient = res_d.value * res_s.value / res_m.value**2
    sharp = N * N / 4.0
    return HpwReport(
        dirichlet=res_d.value,
        moment2=res_s.value,
        mass=res_m.value,
        quotient=quotient,
        sharp_constant=sharp,
        slack=quotient - sharp,
        integral_errors=(
            res_d.error_estimate,
            res_s.error_estimate,
            res_m.error_estimate,
        ),
        quotient_error=_quotient_error(res_d, res_s, res_m),
    )


def ckn_report(
    d: space.Density,
    params: CknParams,
    u: Profile,
    cfg: QuadratureConfig | None = None,
) -> CknReport:
    """Weighted-family report: Dirichlet energy, the |u|**(2p-2) integral with
    weight x**(2-2q), and the |u|**p integral with weight x**(-q)."""
    p, q = params.p, params.q
    nu = space.origin_exponent(d)
    decay = _profile_decay(d, u)
    breaks = _breaks(d, u)

    if isinstance(u, CknProfile):
        s_d = nu + 2.0 - 2.0 * q
    else:
        s_d = nu
    s_s = nu + 2.0 - 2.0 * q
    s_m = nu - q

    res_d = integrate_halfline(
        _power_weighted(d, 0.0, lambda x: u.derivative(x) ** 2),
        singularity_exponent=s_d,
        decay=decay,
        cfg=cfg,
        breakpoints=breaks,
    )
    res_s = integrate_halfline(
        _power_weighted(
            d, 2.0 - 2.0 * q, lambda x: np.abs(u.value(x)) ** (2.0 * p - 2.0)
        ),
        singularity_exponent=s_s,
        decay=decay,
        cfg=cfg,
        breakpoints=breaks,
    )
    res_m = integrate_halfline(
        _power_weighted(d, -q, lambda x: np.abs(u.value(x)) ** p),
        singularity_exponent=s_m,
        decay=decay,
        cfg=cfg,
        breakpoints=breaks,
    )
    if res_m.value <= 0.0 or not math.isfinite(res_m.value):
        raise DegenerateFunctionError("degenerate test function: zero mass")

    quotient = res_d.value * res_s.value / res_m.value**2
    sharp = params.sharp_constant
    return CknReport(
        dirichlet=res_d.value,
        singular_moment=res_s.value,
        ckn_mass=res_m.value,
        quotient=quotient,
        sharp_constant=sharp,
        slack=quotient - sharp,
        integral_errors=(
            res_d.error_estimate,
            res_s.error_estimate,
            res_m.error_estimate,
        ),
        quotient_error=_quotient_error(res_d, res_s, res_m),
    )


# ---------------------------------------------------------------------------
# moment functions of the family parameter


@dataclass(frozen=True)
class HpwMoment:
    value: float
    derivative: float
    closed_form: float


@dataclass(frozen=True)
class CknMoment:
    value: float
    fitted_exponent: float
    exponent: float


def moment_T_hpw(
    N: float, k: float, lam: float, cfg: QuadratureConfig | None = None
) -> HpwMoment:
    """Gaussian moment of the cone measure with m(B_rho) = k*omega_N*rho**N.

    The value is computed in layer-cake form (an integral against the ball
    volumes), the lambda-derivative directly from the defining integral, and
    both are returned beside the closed form (pi/2)**(N/2) * k * lam**(-N/2).
    """
    if N <= 1 or k <= 0 or lam <= 0:
        raise ValueError("need N > 1, k > 0, lam > 0")
    w = k * unit_ball_volume(N)

    value = integrate_halfline(
        lambda r: 4.0 * lam * w * r ** (N + 1.0) * np.exp(-2.0 * lam * r**2),
        singularity_exponent=N + 1.0,
        decay=GaussianDecay(2.0 * lam),
        cfg=cfg,
    ).value
    derivative = integrate_halfline(
        lambda x: -2.0 * w * N * x ** (N + 1.0) * np.exp(-2.0 * lam * x**2),
        singularity_exponent=N + 1.0,
        decay=GaussianDecay(2.0 * lam),
        cfg=cfg,
    ).value
    closed = (math.pi / 2.0) ** (N / 2.0) * k * lam ** (-N / 2.0)
    return HpwMoment(value=value, derivative=derivative, closed_form=closed)


def moment_T_ckn(
    params: CknParams, k: float, lam: float, cfg: QuadratureConfig | None = None
) -> CknMoment:
    """Weighted moment of the cone measure, with a numerical check of the
    pure-power scaling law T(lam) = C * lam**alpha.

    The fitted exponent is log2(T(2*lam)/T(lam)); on an exact cone it matches
    alpha to quadrature accuracy.
    """
    if k <= 0 or lam <= 0:
        raise ValueError("need k > 0, lam > 0")
    p, q, N = params.p, params.q, params.N
    w = k * unit_ball_volume(N) * N
    cone = space.PowerLaw(c=w, N=N)

    def t_of(lam_: float) -> float:
        core = lambda x: (lam_ + x ** (2.0 - q)) ** (p / (2.0 - p))
        return integrate_halfline(
            _power_weighted(cone, -q, core),
            singularity_exponent=N - 1.0 - q,
            decay=PowerDecay(
                (2.0 - q) * p / (p - 2.0) + q + 1.0 - N
            ),
            cfg=cfg,
        ).value * (p - 2.0) / p

    t1 = t_of(lam)
    t2 = t_of(2.0 * lam)
    fitted = math.log2(t2 / t1)
    return CknMoment(value=t1, fitted_exponent=fitted, exponent=params.alpha)


def gaussian_mass(
    d: space.Density, lam: float, cfg: QuadratureConfig | None = None
) -> float:
    """P(lam): mass of exp(-2*lam*x**2) against the density."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    support = space.support_bound(d)
    decay = (
        CompactSupport(support)
        if math.isfinite(support)
        else GaussianDecay(2.0 * lam)
    )
    return integrate_halfline(
        _power_weighted(d, 0.0, lambda x: np.exp(-2.0 * lam * x**2)),
        singularity_exponent=space.origin_exponent(d),
        decay=decay,
        cfg=cfg,
        breakpoints=space.integration_breakpoints(d),
    ).value


def gaussian_mass_layer_cake(
    d: space.Density, lam: float, cfg: QuadratureConfig | None = None
) -> float:
    """P(lam) in layer-cake form: 4*lam * integral of m(B_rho)*rho*exp(-2*lam*rho**2)."""
    if lam <= 0:
        raise ValueError("lam must be positive")

    def f(r: np.ndarray) -> np.ndarray:
        return (
            4.0 * lam * np.asarray(space.ball_volume(d, r)) * r * np.exp(-2.0 * lam * r**2)
        )

    return integrate_halfline(
        f,
        singularity_exponent=space.origin_exponent(d) + 2.0,
        decay=GaussianDecay(2.0 * lam),
        cfg=cfg,
        breakpoints=space.integration_breakpoints(d),
    ).value


def hpw_family_slack_terms(
    d: space.Density, N: float, lam: float, cfg: QuadratureConfig | None = None
) -> tuple[float, float]:
    """(slack, propagated error bound) for the quadratic family diagnostic."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    support = space.support_bound(d)
    decay = (
        CompactSupport(support)
        if math.isfinite(support)
        else GaussianDecay(2.0 * lam)
    )
    nu = space.origin_exponent(d)
    breaks = space.integration_breakpoints(d)
    m2 = integrate_halfline(
        _power_weighted(d, 2.0, lambda x: np.exp(-2.0 * lam * x**2)),
        singularity_exponent=nu + 2.0,
        decay=decay,
        cfg=cfg,
        breakpoints=breaks,
    )
    m0 = integrate_halfline(
        _power_weighted(d, 0.0, lambda x: np.exp(-2.0 * lam * x**2)),
        singularity_exponent=nu,
        decay=decay,
        cfg=cfg,
        breakpoints=breaks,
    )
    if m0.value <= 0.0:
        raise DegenerateFunctionError("density carries no gaussian mass")
    slack = 2.0 * lam * m2.value / m0.value - N / 2.0
    err = (
        2.0
        * lam
        / m0.value
        * (m2.error_estimate + abs(m2.value) * m0.error_estimate / m0.value)
    )
    return slack, err


def hpw_family_slack(
    d: space.Density, N: float, lam: float, cfg: QuadratureConfig | None = None
) -> float:
    """2*lam*M2(lam)/M0(lam) - N/2: zero on exact cones, negative somewhere
    on every finite-measure non-cone (and -> -N/2 as lam -> 0)."""
    return hpw_family_slack_terms(d, N, lam, cfg)[0]


def ckn_family_slack_terms(
    d: space.Density,
    params: CknParams,
    lam: float,
    cfg: QuadratureConfig | None = None,
) -> tuple[float, float]:
    """(slack, propagated error bound) for the weighted family diagnostic."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    p, q, N = params.p, params.q, params.N
    nu = space.origin_exponent(d)
    support = space.support_bound(d)
    if math.isfinite(support):
        decay: DecayClass = CompactSupport(support)
    elif isinstance(d, space.PowerLawExp):
        decay = ExponentialDecay(d.a)
    else:
        decay = PowerDecay((2.0 - q) * p / (p - 2.0) + q + 1.0 - d.N)
    breaks = space.integration_breakpoints(d)

    s_res = integrate_halfline(
        _power_weighted(
            d,
            2.0 - 2.0 * q,
            lambda x: (lam + x ** (2.0 - q)) ** ((2.0 * p - 2.0) / (2.0 - p)),
        ),
        singularity_exponent=nu + 2.0 - 2.0 * q,
        decay=decay,
        cfg=cfg,
        breakpoints=breaks,
    )
    m_res = integrate_halfline(
        _power_weighted(
            d, -q, lambda x: (lam + x ** (2.0 - q)) ** (p / (2.0 - p))
        ),
        singularity_exponent=nu - q,
        decay=decay,
        cfg=cfg,
        breakpoints=breaks,
    )
    slack = (2.0 - q) / (p - 2.0) * s_res.value - (N - q) / p * m_res.value
    err = (
        (2.0 - q) / (p - 2.0) * s_res.error_estimate
        + (N - q) / p * m_res.error_estimate
    )
    return slack, err


def ckn_family_slack(
    d: space.Density,
    params: CknParams,
    lam: float,
    cfg: QuadratureConfig | None = None,
) -> float:
    """Difference of the two sides of the weighted family identity:
    ((2-q)/(p-2)) * S(lam) - ((N-q)/p) * M(lam), where S carries weight
    x**(2-2q) against (lam + x**(2-q))**((2p-2)/(2-p)) and M carries weight
    x**(-q) against (lam + x**(2-q))**(p/(2-p))."""
    return ckn_family_slack_terms(d, params, lam, cfg)[0]
