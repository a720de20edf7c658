"""Adaptive quadrature on the half-line for weighted one-dimensional integrals.

Every integral in this package has the same shape: a possibly singular factor
``x**s`` at the origin (s > -1), a smooth middle, and a declared decay class at
infinity.  Rather than probing for these features (unreliable near 0), callers
declare them and the engine builds a mesh to match:

* the origin is handled by the exact substitution ``x = x_head * t**m`` whose
  grading order ``m`` is chosen from the declared singularity exponent, so the
  transformed head integrand is Hoelder-smooth at ``t = 0``;
* the tail is either truncated at a radius where the declared decay bound drops
  below ``tail_tol`` (gaussian / exponential), mapped exactly onto a second
  origin-singular fragment by ``u = 1/x`` (power decay), or cut at the known
  support radius (compact);
* everything in between is resolved by adaptive panel bisection driven by
  nested 16/32-point Gauss-Legendre error estimates, worst panel first.

The driver is deterministic: identical inputs produce identical panel trees,
hence bit-identical results.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np
from scipy.special import roots_legendre

__all__ = [
    "QuadratureError",
    "IntegrabilityError",
    "GaussianDecay",
    "ExponentialDecay",
    "PowerDecay",
    "CompactSupport",
    "DecayClass",
    "QuadratureConfig",
    "IntegralResult",
    "integrate_halfline",
    "gamma_fn",
    "unit_ball_volume",
    "layer_cake_check",
]


class QuadratureError(RuntimeError):
    """Raised when the engine cannot meet the requested tolerance honestly."""


class IntegrabilityError(ValueError):
    """Raised when declared exponents make the integral divergent."""


@dataclass(frozen=True)
class GaussianDecay:
    """Tail bound of the form ``exp(-rate * x**2)`` times a polynomial."""

    rate: float


@dataclass(frozen=True)
class ExponentialDecay:
    """Tail bound of the form ``exp(-rate * x)`` times a polynomial."""

    rate: float


@dataclass(frozen=True)
class PowerDecay:
    """Tail equivalent to ``x**(-exponent)`` with exponent > 1.

    Power tails are never truncated: the range beyond a pivot is mapped
    exactly onto a finite interval by ``u = 1/x``.
    """

    exponent: float


@dataclass(frozen=True)
class CompactSupport:
    """Integrand vanishes identically beyond ``radius``."""

    radius: float


DecayClass = Union[GaussianDecay, ExponentialDecay, PowerDecay, CompactSupport]


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_subdivisions: int = 2**16
    tail_tol: float = 1e-12
    grading_exponent: float = 3.0

    def __post_init__(self) -> None:
        if self.rel_tol <= 0 or self.abs_tol <= 0 or self.tail_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 4:
            raise ValueError("max_subdivisions must be at least 4")
        if self.grading_exponent < 1:
            raise ValueError("grading_exponent must be at least 1")


DEFAULT_CONFIG = QuadratureConfig()


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error_estimate: float
    truncation_radius: float
    subdivisions_used: int


# Nested Gauss-Legendre pair on [0, 1]; the 32-point value is reported, the
# 16-point value only feeds the per-panel error estimate.
_T16, _W16 = roots_legendre(16)
_T16 = 0.5 * (_T16 + 1.0)
_W16 = 0.5 * _W16
_T32, _W32 = roots_legendre(32)
_T32 = 0.5 * (_T32 + 1.0)
_W32 = 0.5 * _W32

_Integrand = Callable[[np.ndarray], np.ndarray]


def _eval(f: _Integrand, x: np.ndarray) -> np.ndarray:
    y = np.asarray(f(x), dtype=float)
    if y.shape != x.shape:
        y = np.broadcast_to(y, x.shape)
    if not np.all(np.isfinite(y)):
        bad = x[~np.isfinite(y)]
        raise QuadratureError(
            f"integrand returned a non-finite sample near x={bad.flat[0]:.6g}"
        )
    return y


def _panel(f: _Integrand, a: float, b: float) -> tuple[float, float]:
    """Return (32-point estimate, nested error estimate) for one panel."""
    w = b - a
    coarse = w * float(_W16 @ _eval(f, a + w * _T16))
    fine = w * float(_W32 @ _eval(f, a + w * _T32))
    return fine, abs(fine - coarse)


def _grading_order(singularity_exponent: float, grading_exponent: float) -> int:
    # x = x_head * t**m turns x**s into t**(m*(s+1)-1); pick m so the head is
    # at least C^grading smooth.  Capped: beyond ~512 double precision cannot
    # distinguish the iterates anyway.
    m = math.ceil((grading_exponent + 1.0) / (singularity_exponent + 1.0))
    return min(512, max(1, m))


def _substituted_head(
    f: _Integrand, x_head: float, order: int
) -> _Integrand:
    def head(t: np.ndarray) -> np.ndarray:
        x = x_head * t**order
        return _eval(f, x) * (x_head * order) * t ** (order - 1)

    return head


def _solve_truncation(tail_tol: float) -> float:
    # Fixed point of y = L + 8*log1p(y): budget for the exponential to beat
    # a polynomial prefactor of modest degree with margin.
    target = math.log(1.0 / tail_tol)
    y = target
    for _ in range(64):
        y = target + 8.0 * math.log1p(y)
    return y


def integrate_halfline(
    f: _Integrand,
    *,
    singularity_exponent: float,
    decay: DecayClass,
    cfg: QuadratureConfig | None = None,
    breakpoints: Sequence[float] = (),
) -> IntegralResult:
    """Integrate ``f`` over [0, inf) with declared origin and tail behaviour.

    ``f`` must accept ndarray arguments.  ``singularity_exponent`` is the power
    s with ``f(x) = O(x**s)`` as x -> 0 (s > -1 or the integral diverges and
    IntegrabilityError is raised).  ``breakpoints`` mark interior points where
    f loses smoothness (kinks of grid functions, tabulation nodes); panels
    never straddle them.
    """
    cfg = DEFAULT_CONFIG if cfg is None else cfg
    s = float(singularity_exponent)
    if s <= -1.0:
        raise IntegrabilityError(
            f"origin exponent {s} makes the integral divergent (need > -1)"
        )

    breaks = sorted({float(b) for b in breakpoints if 0.0 < b < math.inf})

    tail_proxy = 0.0
    inversion: _Integrand | None = None
    inv_exponent = 0.0
    if isinstance(decay, CompactSupport):
        if decay.radius <= 0:
            raise ValueError("support radius must be positive")
        body_end = float(decay.radius)
        truncation_radius = body_end
        breaks = [b for b in breaks if b < body_end]
    elif isinstance(decay, GaussianDecay):
        if decay.rate <= 0:
            raise ValueError("gaussian decay rate must be positive")
        y = _solve_truncation(cfg.tail_tol)
        body_end = math.sqrt(y / decay.rate)
        if breaks:
            body_end = max(body_end, 1.25 * breaks[-1])
        truncation_radius = body_end
        edge = abs(float(_eval(f, np.array([body_end]))[0]))
        tail_proxy = edge * min(body_end, 1.0 / (2.0 * decay.rate * body_end))
    elif isinstance(decay, ExponentialDecay):
        if decay.rate <= 0:
            raise ValueError("exponential decay rate must be positive")
        y = _solve_truncation(cfg.tail_tol)
        body_end = y / decay.rate
        if breaks:
            body_end = max(body_end, 1.25 * breaks[-1])
        truncation_radius = body_end
        edge = abs(float(_eval(f, np.array([body_end]))[0]))
        tail_proxy = edge * min(body_end, 1.0 / decay.rate)
    elif isinstance(decay, PowerDecay):
        beta = float(decay.exponent)
        if beta <= 1.0:
            raise IntegrabilityError(
                f"power tail exponent {beta} makes the integral divergent (need > 1)"
            )
        body_end = max(1.0, 2.0 * breaks[-1]) if breaks else 1.0
        truncation_radius = math.inf

        def _inverted(u: np.ndarray) -> np.ndarray:
            return _eval(f, 1.0 / u) / u**2

        inversion = _inverted
        inv_exponent = beta - 2.0
    else:
        raise TypeError(f"unknown decay class: {decay!r}")

    # Fragments: (integrand, initial mesh).  Fragment 0 is the substituted
    # head covering [0, x_head]; the body covers [x_head, body_end] with cuts
    # at declared breakpoints and octave fill so no panel spans many scales.
    x_head = min(body_end / 2.0, breaks[0]) if breaks else body_end / 2.0
    head_order = _grading_order(s, cfg.grading_exponent)
    fragments: list[tuple[_Integrand, np.ndarray]] = [
        (_substituted_head(f, x_head, head_order), np.linspace(0.0, 1.0, 9))
    ]

    n_oct = min(256, max(2, math.ceil(math.log2(body_end / x_head)) + 2))
    mesh = set(np.geomspace(x_head, body_end, n_oct).tolist())
    mesh.update(b for b in breaks if x_head < b < body_end)
    mesh.update((x_head, body_end))
    fragments.append((f, np.array(sorted(mesh))))

    if inversion is not None:
        inv_order = _grading_order(inv_exponent, cfg.grading_exponent)
        fragments.append(
            (
                _substituted_head(inversion, 1.0 / body_end, inv_order),
                np.linspace(0.0, 1.0, 9),
            )
        )

    # Worst-panel-first refinement over all fragments jointly.  The counter
    # tie-break keeps heap order (hence results) deterministic.
    counter = itertools.count()
    heap: list[tuple[float, int, int, float, float, float]] = []
    total = 0.0
    frozen_err = 0.0

    def push(idx: int, a: float, b: float) -> float:
        val, err = _panel(fragments[idx][0], a, b)
        heapq.heappush(heap, (-err, next(counter), idx, a, b, val))
        return val

    for idx, (_, init_mesh) in enumerate(fragments):
        for a, b in zip(init_mesh[:-1], init_mesh[1:]):
            total += push(idx, float(a), float(b))

    subdivisions = 0
    while heap:
        active_err = -sum(item[0] for item in heap)
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(total))
        if active_err + frozen_err <= tol:
            break
        if subdivisions >= cfg.max_subdivisions:
            raise QuadratureError(
                f"did not converge within {cfg.max_subdivisions} subdivisions "
                f"(residual error {active_err + frozen_err:.3e}, tol {tol:.3e})"
            )
        neg_err, _, idx, a, b, val = heapq.heappop(heap)
        if b - a <= 1e-15 * max(1.0, abs(a), abs(b)):
            # Width floor: splitting further only churns rounding error.
            frozen_err += -neg_err
            continue
        mid = 0.5 * (a + b)
        total -= val
        total += push(idx, a, mid)
        total += push(idx, mid, b)
        subdivisions += 1

    active_err = -sum(item[0] for item in heap)
    tol = max(cfg.abs_tol, cfg.rel_tol * abs(total))
    if active_err + frozen_err > tol:
        raise QuadratureError(
            f"residual error {active_err + frozen_err:.3e} exceeds tolerance "
            f"{tol:.3e} with all panels at the width floor"
        )

    return IntegralResult(
        value=total,
        error_estimate=active_err + frozen_err + tail_proxy,
        truncation_radius=truncation_radius,
        subdivisions_used=subdivisions,
    )


def gamma_fn(x: float) -> float:
    """Euler gamma for positive real arguments."""
    if x <= 0:
        raise ValueError(f"gamma_fn requires a positive argument, got {x}")
    return math.gamma(x)


def unit_ball_volume(dimension: float) -> float:
    """pi**(N/2) / gamma(N/2 + 1) for real N > 0."""
    if dimension <= 0:
        raise ValueError(f"dimension must be positive, got {dimension}")
    return math.pi ** (dimension / 2.0) / gamma_fn(dimension / 2.0 + 1.0)


def _superlevel_radius(
    g: _Integrand, thresholds: np.ndarray, hi0: float
) -> np.ndarray:
    """Boundary radius of {g > t} for each threshold, g nonincreasing."""
    lo = np.zeros_like(thresholds)
    hi = np.full_like(thresholds, hi0)
    for _ in range(110):
        mid = 0.5 * (lo + hi)
        below = _eval(g, mid) <= thresholds
        hi = np.where(below, mid, hi)
        lo = np.where(below, lo, mid)
    return 0.5 * (lo + hi)


def layer_cake_check(
    g: _Integrand,
    density,
    *,
    g_decay: DecayClass,
    cfg: QuadratureConfig | None = None,
) -> float:
    """Relative deviation between the direct integral of g against a density
    and its layer-cake form (integral of superlevel-set volumes).

    ``g`` must be nonnegative and nonincreasing so its superlevel sets are
    balls; a sampled monotonicity violation raises ValueError.  ``g_decay``
    declares g's own tail (the engine never probes tails).
    """
    from . import space  # local import: space does not depend on this function

    cfg = DEFAULT_CONFIG if cfg is None else cfg

    if isinstance(g_decay, CompactSupport):
        probe_end = g_decay.radius
    elif isinstance(g_decay, GaussianDecay):
        probe_end = math.sqrt(_solve_truncation(cfg.tail_tol) / g_decay.rate)
    elif isinstance(g_decay, ExponentialDecay):
        probe_end = _solve_truncation(cfg.tail_tol) / g_decay.rate
    elif isinstance(g_decay, PowerDecay):
        probe_end = cfg.tail_tol ** (-1.0 / g_decay.exponent)
    else:
        raise TypeError(f"unknown decay class: {g_decay!r}")

    probe = np.linspace(0.0, probe_end, 513)
    gp = _eval(g, probe)
    if np.any(np.diff(gp) > 1e-12 * max(1.0, float(np.max(np.abs(gp))))):
        raise ValueError("layer_cake_check requires a nonincreasing integrand")
    if np.any(gp < 0):
        raise ValueError("layer_cake_check requires a nonnegative integrand")

    g0 = float(_eval(g, np.array([0.0]))[0])
    if g0 <= 0.0:
        raise ValueError("integrand vanishes at 0; nothing to check")

    support = space.support_bound(density)
    direct_decay = _product_decay(g_decay, density)
    if isinstance(direct_decay, PowerDecay) and direct_decay.exponent <= 1.0:
        raise IntegrabilityError(
            "direct integral diverges: tail exponent "
            f"{direct_decay.exponent} after density growth"
        )

    def direct_integrand(x: np.ndarray) -> np.ndarray:
        return _eval(g, x) * space.eval_density(density, np.minimum(x, support))

    direct = integrate_halfline(
        direct_integrand,
        singularity_exponent=space.origin_exponent(density),
        decay=direct_decay,
        cfg=cfg,
        breakpoints=space.integration_breakpoints(density),
    ).value

    # Superlevel-volume side.  The integrand can blow up as t -> 0 only when
    # the density has unbounded volume growth under a power-decaying g.
    t_exponent = 0.0
    if isinstance(g_decay, PowerDecay):
        growth = space.volume_growth_exponent(density)
        if growth is not None:
            t_exponent = -growth / g_decay.exponent
            if t_exponent <= -1.0:
                raise IntegrabilityError(
                    "layer-cake side diverges: volume growth "
                    f"{growth} vs tail exponent {g_decay.exponent}"
                )

    hi0 = max(probe_end, 1.0)

    def level_integrand(t: np.ndarray) -> np.ndarray:
        radii = _superlevel_radius(g, t, hi0)
        return space.ball_volume(density, np.minimum(radii, support))

    levels = integrate_halfline(
        level_integrand,
        singularity_exponent=t_exponent,
        decay=CompactSupport(g0),
        cfg=cfg,
    ).value

    scale = max(abs(direct), abs(levels), 1e-300)
    return abs(direct - levels) / scale


def _product_decay(g_decay: DecayClass, density) -> DecayClass:
    """Decay class of g(x) * h(x) given g's decay and the density's growth."""
    from . import space

    support = space.support_bound(density)
    if math.isfinite(support):
        if isinstance(g_decay, CompactSupport):
            return CompactSupport(min(g_decay.radius, support))
        return CompactSupport(support)
    if isinstance(g_decay, CompactSupport):
        return g_decay

    kind, rate = space.tail_kind(density)
    if kind == "exponential":
        # Exponential tilt of the density dominates any polynomial growth.
        if isinstance(g_decay, GaussianDecay):
            return GaussianDecay(g_decay.rate)
        if isinstance(g_decay, ExponentialDecay):
            return ExponentialDecay(g_decay.rate + rate)
        return ExponentialDecay(rate)
    # Pure polynomial growth x**(N-1): fold it into the declared tail.
    growth = space.volume_growth_exponent(density)
    poly = (growth - 1.0) if growth is not None else 0.0
    if isinstance(g_decay, GaussianDecay):
        return g_decay
    if isinstance(g_decay, ExponentialDecay):
        return g_decay
    return PowerDecay(g_decay.exponent - poly)
