"""Potential descriptions: piecewise evaluators, exponential tails, perturbations.

Potentials are plain evaluator callbacks plus structured metadata (support
bounds, tail expansions).  Everything is immutable after construction and
evaluators are pure, so specs can be shared freely between workers.
"""
from __future__ import annotations

import cmath
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Callable

from .errors import RegimeViolation

Evaluator = Callable[[complex], complex]

_LN2 = math.log(2.0)


def log_cosh(z: complex) -> complex:
    """Analytic log(cosh(z)), continuous on |Im z| < pi/2 + |Re z| sectors.

    Computed from the half-plane with decaying exponential so the principal
    log never wraps; safe for the rotated-contour evaluations where plain
    log(cosh(z)) would jump branches.
    """
    z = complex(z)
    if z.real >= 0.0:
        return z - _LN2 + cmath.log(1.0 + cmath.exp(-2.0 * z))
    return -z - _LN2 + cmath.log(1.0 + cmath.exp(2.0 * z))


def sech2(z: complex) -> complex:
    """cosh(z)^-2 without overflow for large |Re z|."""
    return cmath.exp(-2.0 * log_cosh(z))


@dataclass(frozen=True)
class TailExpansion:
    """One side's exponential tail  V(x) = scale * sum_k c_k exp(-k*alpha*|x|).

    Exponents are evenly spaced, alpha_k = k*alpha with alpha > 0, so they are
    strictly increasing by construction.  `side` says which asymptotic region
    the expansion describes.
    """

    alpha: float
    coefficients: tuple
    scale: float = 1.0
    side: str = "right"

    def __post_init__(self):
        if self.alpha <= 0.0:
            raise ValueError("tail base exponent must be positive")
        if self.side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")

    @property
    def k_max(self) -> int:
        return len(self.coefficients)

    def exponent(self, k: int) -> float:
        return k * self.alpha

    def evaluate(self, x: complex) -> complex:
        """Partial tail sum at x (x measured outward: use |x| coordinates)."""
        u = cmath.exp(-self.alpha * x) if self.side == "right" else cmath.exp(self.alpha * x)
        acc = 0.0 + 0.0j
        p = 1.0 + 0.0j
        for c in self.coefficients:
            p *= u
            acc += c * p
        return self.scale * acc

    def truncation_bound(self, x: float) -> float:
        """Bound on the dropped remainder, |scale * c_{k+1}| e^{-(k+1) alpha x}.

        The first dropped coefficient is estimated from the last kept one by
        the ratio (k+1)/k, exact for the cosh^-2 family.
        """
        k = self.k_max
        c_next = abs(self.coefficients[-1]) * (k + 1) / k if k else 1.0
        return self.scale * c_next * math.exp(-(k + 1) * self.alpha * abs(x))


@dataclass(frozen=True)
class Segment:
    lo: float
    hi: float
    evaluator: Evaluator


@dataclass(frozen=True)
class PotentialSpec:
    """A potential on the real line: ordered, non-overlapping segments that
    cover (-inf, inf), a support hint outside which only tails survive, and
    optional tail expansions per side."""

    segments: tuple
    support: tuple
    tail_left: TailExpansion | None = None
    tail_right: TailExpansion | None = None
    label: str = ""

    def __post_init__(self):
        if not self.segments:
            raise ValueError("a potential needs at least one segment")
        if self.segments[0].lo != -math.inf or self.segments[-1].hi != math.inf:
            raise ValueError("segments must cover the real line")
        for a, b in zip(self.segments, self.segments[1:]):
            if a.hi != b.lo:
                raise ValueError("segments must be contiguous and non-overlapping")

    @property
    def boundaries(self) -> tuple:
        """Finite segment boundaries, useful as integration breakpoints."""
        return tuple(s.hi for s in self.segments[:-1])

    def evaluate(self, x: complex) -> complex:
        xs = x.real if isinstance(x, complex) else x
        idx = bisect_right(self.boundaries, xs)
        return self.segments[idx].evaluator(x)

    __call__ = evaluate


@dataclass(frozen=True)
class BumpPerturbation:
    """Unit-height rectangular bump on the open interval (x0 - w/2, x0 + w/2)."""

    center: float
    width: float
    height: float = 1.0

    def __post_init__(self):
        if self.center < 0.0:
            raise ValueError("bump center must be >= 0")
        if self.width <= 0.0:
            raise ValueError("bump width must be positive")

    @property
    def support(self) -> tuple:
        return (self.center - self.width / 2.0, self.center + self.width / 2.0)

    def evaluate(self, x: complex) -> complex:
        lo, hi = self.support
        xr = x.real if isinstance(x, complex) else x
        return self.height if lo < xr < hi else 0.0

    __call__ = evaluate


def eval_potential(spec: PotentialSpec, x: complex) -> complex:
    """Evaluate V(x); in tail regions this is the (exact or partial) tail sum."""
    return spec.evaluate(x)


def step_potential(v0: float, b: float) -> PotentialSpec:
    """V(x) = v0 for x < b, 0 beyond; the half-line scenarios use x >= 0 only."""
    return PotentialSpec(
        segments=(
            Segment(-math.inf, b, lambda x: complex(v0)),
            Segment(b, math.inf, lambda x: 0.0 + 0.0j),
        ),
        support=(0.0, b),
        label=f"step(v0={v0}, b={b})",
    )


def pt_tail_expansion(v0: float, b: float, k_max: int, side: str = "right") -> TailExpansion:
    """Tail expansion of v0*cosh^-2(x/b): alpha = 2/b, c_k = (-1)^(k+1) 4k.

    The expansion is exact for |x| > 0 (it is the convergent geometric-series
    form of cosh^-2), so truncation is purely a tolerance choice.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    coeff = tuple(float((-1) ** (k + 1) * 4 * k) for k in range(1, k_max + 1))
    return TailExpansion(alpha=2.0 / b, coefficients=coeff, scale=v0, side=side)


def poschl_teller(v0: float, b: float = 1.0, k_max: int = 8) -> PotentialSpec:
    """V(x) = v0 * cosh^-2(x/b), with its exact exponential tails attached."""
    return PotentialSpec(
        segments=(Segment(-math.inf, math.inf, lambda x: v0 * sech2(x / b)),),
        support=(-b, b),
        tail_left=pt_tail_expansion(v0, b, k_max, side="left"),
        tail_right=pt_tail_expansion(v0, b, k_max, side="right"),
        label=f"poschl_teller(v0={v0}, b={b})",
    )


def perturbed_step(v0: float, b: float, bump: BumpPerturbation, mu: float) -> PotentialSpec:
    """Step potential plus mu * bump, still piecewise constant."""
    cuts = sorted({b, *bump.support})
    edges = [-math.inf, *cuts, math.inf]
    segs = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        xm = lo + 0.5 if hi == math.inf else (hi - 0.5 if lo == -math.inf else 0.5 * (lo + hi))
        val = complex((v0 if xm < b else 0.0) + mu * bump(xm).real)
        segs.append(Segment(lo, hi, (lambda v: lambda x: v)(val)))
    return PotentialSpec(
        segments=tuple(segs),
        support=(0.0, max(b, bump.support[1])),
        label=f"step+bump(mu={mu})",
    )


def pt_width_perturbation(v0: float):
    """First-order expansion of v0*cosh^-2((1+mu)x) around mu = 0.

    Returns (V0, V1) evaluators with V0(x) = v0 cosh^-2 x and
    V1(x) = -2 v0 x sinh x cosh^-3 x = -2 v0 x tanh x cosh^-2 x.
    Requires v0 > 1/4 so the b = 1 eigenvalues sit in the oscillatory regime.
    """
    if v0 <= 0.25:
        raise RegimeViolation("pt width perturbation needs v0 > 1/4 (4 V0 b^2 > 1)")

    def v_zero(x: complex) -> complex:
        return v0 * sech2(x)

    def v_one(x: complex) -> complex:
        return -2.0 * v0 * x * cmath.tanh(x) * sech2(x)

    return v_zero, v_one


def auto_k_max(alpha: float, c_ratio_scale: float, radius: float, tol: float,
               k_cap: int = 64) -> int:
    """Smallest k_max with scale*|c_{k_max+1}| e^{-(k_max+1) alpha L} < tol.

    `c_ratio_scale` is |scale * c_1|; coefficients are assumed to grow at most
    linearly in k, which covers the cosh^-2 family.
    """
    for k in range(1, k_cap + 1):
        bound = c_ratio_scale * (k + 1) * math.exp(-(k + 1) * alpha * radius)
        if bound < tol:
            return k
    return k_cap
