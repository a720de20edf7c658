"""Needle densities on the half-line and the geometric checks built on them.

A needle is ([0, L), |.|, h(x) dx) for a nonnegative weight h.  Four density
families are supported: exact cones c*x^(N-1), their truncations, exponential
tilts c*x^(N-1)*exp(-a*x), and tabulated weights with exponential (log-linear
in value) interpolation.  On top of these sit the curvature-dimension
distortion coefficients, a sampled certificate for the one-dimensional
measure-contraction inequality, ball-volume ratio profiles, and a volume-cone
detector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .quadrature import unit_ball_volume

__all__ = [
    "PowerLaw",
    "TruncatedPowerLaw",
    "PowerLawExp",
    "Tabulated",
    "Density",
    "DegenerateDensityError",
    "DistortionInput",
    "McpSlackReport",
    "BgProfile",
    "ConeFit",
    "eval_density",
    "ball_volume",
    "support_bound",
    "domain",
    "origin_exponent",
    "volume_growth_exponent",
    "tail_kind",
    "integration_breakpoints",
    "sigma",
    "tau",
    "check_mcp_density",
    "bishop_gromov_profile",
    "cone_fit",
]


class DegenerateDensityError(ValueError):
    """Density carries no mass where an operation needs some."""


@dataclass(frozen=True)
class PowerLaw:
    """Exact cone weight c * x**(N-1) on [0, inf)."""

    c: float
    N: float

    def __post_init__(self) -> None:
        if self.c <= 0:
            raise ValueError("c must be positive")
        if self.N <= 1:
            raise ValueError("N must exceed 1")


@dataclass(frozen=True)
class TruncatedPowerLaw:
    """Cone weight c * x**(N-1) on [0, R], zero beyond."""

    c: float
    N: float
    R: float

    def __post_init__(self) -> None:
        if self.c <= 0:
            raise ValueError("c must be positive")
        if self.N <= 1:
            raise ValueError("N must exceed 1")
        if self.R <= 0:
            raise ValueError("R must be positive")


@dataclass(frozen=True)
class PowerLawExp:
    """Exponentially tilted cone weight c * x**(N-1) * exp(-a*x)."""

    c: float
    N: float
    a: float

    def __post_init__(self) -> None:
        if self.c <= 0:
            raise ValueError("c must be positive")
        if self.N <= 1:
            raise ValueError("N must exceed 1")
        if self.a <= 0:
            raise ValueError("a must be positive")


@dataclass(frozen=True)
class Tabulated:
    """Weight given at strictly increasing nodes, interpolated in between.

    Between nodes with positive values the interpolation is exponential
    (linear in log-value), so tabulated power-law-like profiles round-trip
    well; a segment touching a zero value falls back to linear.  Evaluation
    outside [nodes[0], nodes[-1]] is an error, not extrapolation.
    """

    nodes: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        nodes = tuple(float(x) for x in self.nodes)
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)
        if len(nodes) != len(values):
            raise ValueError("nodes and values must have equal length")
        if len(nodes) < 2:
            raise ValueError("need at least two nodes")
        if nodes[0] < 0:
            raise ValueError("nodes must be nonnegative")
        if any(b <= a for a, b in zip(nodes, nodes[1:])):
            raise ValueError("nodes must be strictly increasing")
        if any(v < 0 for v in values):
            raise ValueError("values must be nonnegative")


Density = Union[PowerLaw, TruncatedPowerLaw, PowerLawExp, Tabulated]


def _tab_arrays(d: Tabulated) -> tuple[np.ndarray, np.ndarray]:
    return np.asarray(d.nodes), np.asarray(d.values)


def eval_density(d: Density, x) -> np.ndarray | float:
    """h(x), vectorized.  Tabulated densities reject points outside their
    node range; truncated cones simply return 0 beyond the cutoff."""
    xs = np.asarray(x, dtype=float)
    scalar = xs.ndim == 0
    xs = np.atleast_1d(xs)
    if np.any(xs < 0):
        raise ValueError("density arguments must be nonnegative")

    if isinstance(d, PowerLaw):
        out = d.c * xs ** (d.N - 1.0)
    elif isinstance(d, TruncatedPowerLaw):
        out = np.where(xs <= d.R, d.c * xs ** (d.N - 1.0), 0.0)
    elif isinstance(d, PowerLawExp):
        out = d.c * xs ** (d.N - 1.0) * np.exp(-d.a * xs)
    elif isinstance(d, Tabulated):
        nodes, values = _tab_arrays(d)
        lo, hi = nodes[0], nodes[-1]
        pad = 1e-12 * max(1.0, hi)
        if np.any(xs < lo - pad) or np.any(xs > hi + pad):
            raise ValueError(
                f"tabulated density defined on [{lo}, {hi}] only"
            )
        xc = np.clip(xs, lo, hi)
        idx = np.clip(np.searchsorted(nodes, xc, side="right") - 1, 0, len(nodes) - 2)
        x0, x1 = nodes[idx], nodes[idx + 1]
        v0, v1 = values[idx], values[idx + 1]
        frac = (xc - x0) / (x1 - x0)
        both_pos = (v0 > 0) & (v1 > 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            expo = v0 * np.exp(frac * np.log(np.where(both_pos, v1 / v0, 1.0)))
        lin = v0 + frac * (v1 - v0)
        out = np.where(both_pos, expo, lin)
    else:
        raise TypeError(f"unknown density: {d!r}")
    return float(out[0]) if scalar else out


def _tab_segment_volume(
    x0: np.ndarray, x1: np.ndarray, v0: np.ndarray, v1: np.ndarray, upto: np.ndarray
) -> np.ndarray:
    """Integral of the interpolant over [x0, min(x1, upto)], vectorized."""
    dx = x1 - x0
    span = np.clip(upto - x0, 0.0, dx)
    both_pos = (v0 > 0) & (v1 > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        k = np.where(both_pos, np.log(np.where(both_pos, v1, 1.0) / np.where(both_pos, v0, 1.0)) / dx, 0.0)
        # Nearly-flat segments: expm1(k*span)/k degrades, plain v0*span is exact.
        same = np.abs(k) * dx < 1e-13
        expo = np.where(
            same, v0 * span, v0 * np.expm1(k * span) / np.where(k == 0.0, 1.0, k)
        )
    slope = (v1 - v0) / dx
    lin = v0 * span + 0.5 * slope * span**2
    return np.where(both_pos, expo, lin)


def ball_volume(d: Density, rho) -> np.ndarray | float:
    """Measure of the ball [0, rho): integral of h from 0.  Closed form for
    every density kind; saturates once rho passes the support."""
    rs = np.asarray(rho, dtype=float)
    scalar = rs.ndim == 0
    rs = np.atleast_1d(rs)
    if np.any(rs < 0):
        raise ValueError("radii must be nonnegative")

    if isinstance(d, PowerLaw):
        out = d.c * rs**d.N / d.N
    elif isinstance(d, TruncatedPowerLaw):
        out = d.c * np.minimum(rs, d.R) ** d.N / d.N
    elif isinstance(d, PowerLawExp):
        from scipy.special import gammainc

        out = d.c * d.a ** (-d.N) * math.gamma(d.N) * gammainc(d.N, d.a * rs)
    elif isinstance(d, Tabulated):
        nodes, values = _tab_arrays(d)
        seg = _tab_segment_volume(
            nodes[:-1], nodes[1:], values[:-1], values[1:], np.full(len(nodes) - 1, np.inf)
        )
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        rc = np.clip(rs, nodes[0], nodes[-1])
        idx = np.clip(np.searchsorted(nodes, rc, side="right") - 1, 0, len(nodes) - 2)
        partial = _tab_segment_volume(
            nodes[idx], nodes[idx + 1], values[idx], values[idx + 1], rc
        )
        out = cum[idx] + partial
    else:
        raise TypeError(f"unknown density: {d!r}")
    return float(out[0]) if scalar else out


def support_bound(d: Density) -> float:
    if isinstance(d, TruncatedPowerLaw):
        return d.R
    if isinstance(d, Tabulated):
        return d.nodes[-1]
    return math.inf


def domain(d: Density) -> tuple[float, float]:
    """Interval on which the density may be evaluated."""
    if isinstance(d, TruncatedPowerLaw):
        return (0.0, d.R)
    if isinstance(d, Tabulated):
        return (d.nodes[0], d.nodes[-1])
    return (0.0, math.inf)


def origin_exponent(d: Density) -> float:
    """Power s with h(x) = O(x**s) near 0, for quadrature declarations."""
    if isinstance(d, Tabulated):
        if d.nodes[0] > 0:
            return 0.0
        return 0.0 if d.values[0] > 0 else 1.0
    return d.N - 1.0


def volume_growth_exponent(d: Density) -> Optional[float]:
    """Growth power of ball_volume at infinity; None when volume is bounded."""
    return d.N if isinstance(d, PowerLaw) else None


def tail_kind(d: Density) -> tuple[str, float]:
    """(kind, parameter) describing h at infinity: 'power' carries the growth
    exponent N-1, 'exponential' the tilt rate, 'compact' the support bound."""
    if isinstance(d, PowerLaw):
        return ("power", d.N - 1.0)
    if isinstance(d, PowerLawExp):
        return ("exponential", d.a)
    return ("compact", support_bound(d))


def integration_breakpoints(d: Density) -> tuple[float, ...]:
    """Points where h loses smoothness; quadrature panels must not straddle
    them."""
    if isinstance(d, TruncatedPowerLaw):
        return (d.R,)
    if isinstance(d, Tabulated):
        return d.nodes
    return ()


# ---------------------------------------------------------------------------
# distortion coefficients


@dataclass(frozen=True)
class DistortionInput:
    K: float
    N: float
    t: float
    theta: float

    def __post_init__(self) -> None:
        if self.N < 0:
            raise ValueError("N must be nonnegative")
        if not 0.0 <= self.t <= 1.0:
            raise ValueError("t must lie in [0, 1]")
        if self.theta < 0:
            raise ValueError("theta must be nonnegative")


def sigma(inp: DistortionInput) -> float:
    """Distortion coefficient; +inf is a value (conjugate-point regime), not
    an error.  The flat case K*theta**2 == 0 returns t exactly."""
    k, n, t, theta = inp.K, inp.N, inp.t, inp.theta
    kt2 = k * theta * theta
    if kt2 == 0.0:
        return t
    if kt2 > 0.0:
        if kt2 >= n * math.pi**2:
            return math.inf
        w = theta * math.sqrt(k / n)
        return math.sin(t * w) / math.sin(w)
    if n == 0.0:
        return t
    w = theta * math.sqrt(-k / n)
    if w <= 30.0:
        return math.sinh(t * w) / math.sinh(w)
    # Large argument: form the ratio through exponentials that never overflow.
    return math.exp(w * (t - 1.0)) * (-math.expm1(-2.0 * t * w)) / (-math.expm1(-2.0 * w))


def tau(inp: DistortionInput) -> float:
    """t**(1/N) * sigma_{K,N-1}(theta)**((N-1)/N) for N >= 1."""
    if inp.N < 1.0:
        raise ValueError("tau requires N >= 1")
    k, n, t, theta = inp.K, inp.N, inp.t, inp.theta
    # Exact short-circuits: the flat case and N=1 both collapse to t, and
    # t=0 must return 0 rather than 0**(1/N) noise.
    if k * theta * theta == 0.0 or n == 1.0 or t == 0.0:
        return t
    s = sigma(DistortionInput(K=k, N=n - 1.0, t=t, theta=theta))
    if math.isinf(s):
        return math.inf
    return t ** (1.0 / n) * s ** ((n - 1.0) / n)


# ---------------------------------------------------------------------------
# sampled geometric certificates


@dataclass(frozen=True)
class McpSlackReport:
    min_slack: float
    argmin: tuple[float, float, float]
    samples_tested: int
    h_scale: float
    passes: bool


def check_mcp_density(
    d: Density,
    N: float,
    sampling: tuple[int, int, int] = (64, 64, 32),
    *,
    box: Optional[tuple[float, float]] = None,
) -> McpSlackReport:
    """Grid certificate for the needle measure-contraction inequality
    h(t*x1 + (1-t)*x0) >= (1-t)**(N-1) * h(x0).

    The (x0, x1) box defaults to [0, 20]^2 and is clamped to the density's
    own domain, since the inequality quantifies over points of the needle.
    Nonnegative min_slack is evidence, not proof; `passes` allows a relative
    rounding margin of 1e-9 so exact cones do not fail on 1-ulp noise.
    """
    if N <= 1:
        raise ValueError("N must exceed 1")
    n0, n1, nt = sampling
    if min(n0, n1, nt) < 2:
        raise ValueError("need at least 2 samples per axis")

    lo, hi = domain(d)
    blo, bhi = box if box is not None else (0.0, 20.0)
    lo = max(lo, blo)
    hi = min(hi, bhi) if math.isfinite(hi) else bhi
    if not hi > lo:
        raise ValueError("sampling box does not intersect the density domain")

    x0 = np.linspace(lo, hi, n0)
    x1 = np.linspace(lo, hi, n1)
    t = np.linspace(0.0, 1.0, nt)
    z = t[None, None, :] * x1[None, :, None] + (1.0 - t[None, None, :]) * x0[:, None, None]
    # Convex combinations stay inside [lo, hi], so evaluation cannot escape
    # a tabulated domain.
    hz = eval_density(d, z.reshape(-1)).reshape(z.shape)
    hx0 = eval_density(d, x0)
    slack = hz - (1.0 - t[None, None, :]) ** (N - 1.0) * hx0[:, None, None]

    flat = int(np.argmin(slack))
    i, j, k = np.unravel_index(flat, slack.shape)
    min_slack = float(slack[i, j, k])
    h_scale = float(np.max(hz))
    return McpSlackReport(
        min_slack=min_slack,
        argmin=(float(x0[i]), float(x1[j]), float(t[k])),
        samples_tested=int(slack.size),
        h_scale=h_scale,
        passes=min_slack >= -1e-9 * max(h_scale, 1e-300),
    )


@dataclass(frozen=True)
class BgProfile:
    points: tuple[tuple[float, float], ...]
    monotone_nonincreasing: bool


def bishop_gromov_profile(d: Density, N: float, radii: Sequence[float]) -> BgProfile:
    """Profile rho -> m(B_rho)/rho**N with a monotonicity verdict."""
    rs = [float(r) for r in radii]
    if not rs or any(r <= 0 for r in rs) or any(b <= a for a, b in zip(rs, rs[1:])):
        raise ValueError("radii must be strictly increasing positive reals")
    ratios = [float(ball_volume(d, r)) / r**N for r in rs]
    scale = max(ratios) if ratios else 0.0
    mono = all(
        nxt <= prev + 1e-12 * max(scale, 1.0) for prev, nxt in zip(ratios, ratios[1:])
    )
    return BgProfile(points=tuple(zip(rs, ratios)), monotone_nonincreasing=mono)


@dataclass(frozen=True)
class ConeFit:
    is_cone: bool
    A: float
    max_rel_deviation: float
    radii_tested: tuple[float, ...]


def cone_fit(
    d: Density, N: float, radii: Sequence[float], tol: float = 1e-8
) -> ConeFit:
    """Detect m(B_rho) = A * omega_N * rho**N across the given radii.

    The vertex density A is read off at the smallest radius; is_cone holds
    iff the volume ratios m(B_rho)/rho**N agree within tol across all radii.
    """
    rs = sorted(float(r) for r in radii)
    if len(rs) < 2:
        raise ValueError("need at least two radii")
    if rs[0] <= 0:
        raise ValueError("radii must be positive")
    vols = np.atleast_1d(np.asarray(ball_volume(d, np.array(rs))))
    if float(np.max(vols)) == 0.0:
        raise DegenerateDensityError("density has no mass on the tested radii")
    ratios = vols / np.array(rs) ** N
    top, bot = float(np.max(ratios)), float(np.min(ratios))
    deviation = math.inf if bot <= 0.0 else top / bot - 1.0
    return ConeFit(
        is_cone=deviation <= tol,
        A=float(ratios[0]) / unit_ball_volume(N),
        max_rel_deviation=deviation,
        radii_tested=tuple(rs),
    )
