"""Outgoing logarithmic derivatives in exponential-tail regions.

Two routes are provided.  The Born iteration of the Riccati equation gives
closed exponential sums order by order and works for any tail.  For evenly
spaced exponents (alpha_k = k*alpha) the wave equation is solved exactly by
phi = e^{i omega x} sum_k d_k e^{-k alpha x}; the d_k recursion is carried
together with its derivatives in omega (needed for D', D'') and in alpha
(needed for width-scaling perturbations, where the whole mu dependence of the
tail enters through alpha -> alpha (1 + mu)).

Everything is written for a right-side tail; left sides are handled by the
mirror x -> -x, under which f(x) -> -f(-x).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import PoleInTail, ResonantDenominator, TailRegionTooClose
from .potentials import TailExpansion
from .riccati import MatchData, SideMatch

_GUARD = 1e-8


def _check_resonance(alpha: float, omega: complex, k: int):
    if abs(alpha * k - 2j * omega) < _GUARD * max(1.0, abs(omega)):
        raise ResonantDenominator(
            f"alpha*k - 2i*omega nearly vanishes at k = {k}; the series form "
            "is invalid at this frequency", k=k)


@dataclass
class SeriesSolution:
    """Exact tail solution phi = e^{i omega x} sum d_k e^{-k alpha x} and the
    derivative channels of the coefficients."""

    tail: TailExpansion
    omega: complex
    alpha: float
    d: np.ndarray        # d_k
    d_w: np.ndarray      # d(d_k)/d(omega)
    d_ww: np.ndarray     # d^2(d_k)/d(omega)^2
    d_a: np.ndarray      # d(d_k)/d(alpha)

    @property
    def k_max(self) -> int:
        return len(self.d) - 1

    @property
    def side(self) -> str:
        return self.tail.side

    # -- series assembly at a point (right-side coordinates) ---------------
    def _powers(self, x: float) -> np.ndarray:
        k = np.arange(self.k_max + 1)
        return np.exp(-self.alpha * k * x)

    def amplitude_series(self, x: float) -> complex:
        """S(x) = sum d_k e^{-k alpha x}; phi = A e^{i omega x} S(x)."""
        return complex(np.sum(self.d * self._powers(x)))

    def g_coefficients(self) -> np.ndarray:
        """Coefficients of S(x)^2 = sum g_k e^{-k alpha x} (convolution)."""
        return np.convolve(self.d, self.d)

    def _sums(self, x: float):
        u = self._powers(x)
        k = np.arange(self.k_max + 1)
        S = np.sum(self.d * u)
        if abs(S) <= 1e-12 * np.sum(np.abs(self.d * u)):
            raise PoleInTail(f"tail denominator sum vanished at x = {x}")
        return u, k, S

    def correction(self, x: float) -> complex:
        """T(x) = f(x) - i*omega = -alpha * sum(k d_k u^k) / S, explicitly small."""
        u, k, S = self._sums(x)
        return complex(-self.alpha * np.sum(k * self.d * u) / S)

    def logderiv(self, x: float) -> complex:
        return 1j * self.omega + self.correction(x)

    def correction_dw(self, x: float) -> complex:
        """d/d(omega) of T(x); D'(omega) = i + this."""
        u, k, S = self._sums(x)
        P = np.sum(k * self.d * u)
        Pw = np.sum(k * self.d_w * u)
        Sw = np.sum(self.d_w * u)
        return complex(-self.alpha * (Pw * S - P * Sw) / (S * S))

    def correction_dww(self, x: float) -> complex:
        """Second omega-derivative of T(x); D''(omega) equals this."""
        u, k, S = self._sums(x)
        P = np.sum(k * self.d * u)
        Pw = np.sum(k * self.d_w * u)
        Pww = np.sum(k * self.d_ww * u)
        Sw = np.sum(self.d_w * u)
        Sww = np.sum(self.d_ww * u)
        return complex(-self.alpha * ((Pww * S - P * Sww) / (S * S)
                                      - 2.0 * Sw * (Pw * S - P * Sw) / (S ** 3)))

    def logderiv_da(self, x: float) -> complex:
        """d/d(alpha) of f(x) at fixed omega, including the exponents' alpha
        dependence."""
        u, k, S = self._sums(x)
        P = np.sum(k * self.d * u)
        Pa = np.sum(k * (self.d_a - k * x * self.d) * u)
        Sa = np.sum((self.d_a - k * x * self.d) * u)
        return complex(-P / S - self.alpha * (Pa * S - P * Sa) / (S * S))


def series_coefficients(tail: TailExpansion, omega: complex, k_max: int) -> SeriesSolution:
    """Solve the d_k recursion exactly for k = 1..k_max, with d_0 = 1.

    d_k = V0 / (alpha k (alpha k - 2 i omega)) * sum_{m<k} d_m c_{k-m};
    coefficients beyond the expansion's length enter as zero.  Raises
    ResonantDenominator when alpha k - 2 i omega falls under the guard.
    """
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    alpha, v0 = tail.alpha, tail.scale
    c = list(tail.coefficients) + [0.0] * max(0, k_max - len(tail.coefficients))
    d = np.zeros(k_max + 1, dtype=complex)
    dw = np.zeros_like(d)
    dww = np.zeros_like(d)
    da = np.zeros_like(d)
    d[0] = 1.0
    for k in range(1, k_max + 1):
        _check_resonance(alpha, omega, k)
        g = alpha * k * (alpha * k - 2j * omega)
        inv = 1.0 / g
        inv_w = 2j * alpha * k / (g * g)                # d(1/g)/d(omega)
        inv_ww = -8.0 * (alpha * k) ** 2 / (g ** 3)     # d^2(1/g)/d(omega)^2
        inv_a = -k * (2 * alpha * k - 2j * omega) / (g * g)
        conv = sum(d[m] * c[k - m - 1] for m in range(k))
        conv_w = sum(dw[m] * c[k - m - 1] for m in range(k))
        conv_ww = sum(dww[m] * c[k - m - 1] for m in range(k))
        conv_a = sum(da[m] * c[k - m - 1] for m in range(k))
        d[k] = v0 * conv * inv
        dw[k] = v0 * (conv_w * inv + conv * inv_w)
        dww[k] = v0 * (conv_ww * inv + 2.0 * conv_w * inv_w + conv * inv_ww)
        da[k] = v0 * (conv_a * inv + conv * inv_a)
    return SeriesSolution(tail=tail, omega=omega, alpha=alpha,
                          d=d, d_w=dw, d_ww=dww, d_a=da)


def series_logderiv(sol: SeriesSolution, x: float) -> complex:
    """f(x) = [sum (i omega - alpha k) d_k e^{-alpha k x}] / [sum d_k e^{-alpha k x}].

    Truncation leaves an O(e^{-(k_max+1) alpha x}) remainder.  For a left-side
    tail, x is the (negative) physical coordinate and the mirrored value is
    returned.
    """
    if sol.side == "left":
        return -(1j * sol.omega + sol.correction(-x))
    return sol.logderiv(x)


@dataclass(frozen=True)
class BornTerms:
    """Born-iteration terms of the tail log derivative, as exponential sums."""

    order: int
    omega: complex
    f1: Callable[[float], complex]
    f2: Callable[[float], complex]


def born_terms(tail: TailExpansion, omega: complex, order: int) -> BornTerms:
    if order not in (0, 1, 2):
        raise ValueError("Born iteration is provided for orders 0, 1, 2")
    alpha, v0, c = tail.alpha, tail.scale, tail.coefficients
    ks = range(1, len(c) + 1)
    for k in ks:
        if order >= 1:
            _check_resonance(alpha, omega, k)

    def f1(x):
        return v0 * sum(c[k - 1] * cmath.exp(-alpha * k * x) / (alpha * k - 2j * omega)
                        for k in ks)

    def f2(x):
        acc = 0.0 + 0.0j
        for k in ks:
            for kp in ks:
                _check_resonance(alpha, omega, k + kp)
                acc += (c[k - 1] * c[kp - 1]
                        * cmath.exp(-alpha * (k + kp) * x)
                        / ((alpha * k - 2j * omega) * (alpha * kp - 2j * omega)
                           * (alpha * (k + kp) - 2j * omega)))
        return v0 * v0 * acc

    return BornTerms(order=order, omega=omega, f1=f1, f2=f2)


def born_logderiv(tail: TailExpansion, omega: complex, x: float, order: int) -> complex:
    """f(x) = i omega + f1(x) + f2(x) truncated at `order` (right side; the
    left side mirrors to -f(-x)).

    Valid only where the tail is weak: |V(x)| << |alpha - 2 i omega|.
    """
    xr = abs(x)
    vmag = abs(tail.evaluate(xr if tail.side == "right" else -xr))
    if order >= 1 and vmag >= abs(tail.alpha - 2j * omega):
        raise TailRegionTooClose(
            f"|V({x})| = {vmag:.3e} is not small against |alpha - 2i omega|; "
            "move the matching radius outward")
    terms = born_terms(tail, omega, order)
    f = 1j * omega
    if order >= 1:
        f += terms.f1(xr)
    if order >= 2:
        f += terms.f2(xr)
    return f if tail.side == "right" else -f


def matchdata_from_tail(tail: TailExpansion, omega0: complex, l_radius: float,
                        k_max: int, symmetric: bool = False) -> MatchData:
    """MatchData at x = +-L from the exact tail series: D and D' computed by
    term-wise differentiation of the d_k recursion (no numerical differencing).

    With symmetric=True the opposite side is the mirror image (D -> -D); with
    symmetric=False the opposite side is a free wave.
    """
    sol = series_coefficients(tail, omega0, k_max)
    t = sol.correction(l_radius)
    tw = sol.correction_dw(l_radius)
    near = SideMatch(d=1j * omega0 + t, d_prime=1j + tw, source="tail-series",
                     position=l_radius, correction=t, correction_prime=tw,
                     payload=sol)
    if symmetric:
        far = SideMatch(d=-(1j * omega0 + t), d_prime=-(1j + tw),
                        source="tail-series", position=-l_radius,
                        correction=-t, correction_prime=-tw, payload=sol)
    else:
        far = SideMatch(d=-1j * omega0, d_prime=-1j, source="free-wave",
                        position=-l_radius)
    if tail.side == "right":
        return MatchData(plus=near, minus=far)
    # mirror the roles for a left-side tail
    near_m = SideMatch(d=-near.d, d_prime=-near.d_prime, source="tail-series",
                       position=-l_radius, correction=-t, correction_prime=-tw,
                       payload=sol)
    far_m = SideMatch(d=1j * omega0, d_prime=1j, source="free-wave",
                      position=l_radius)
    return MatchData(plus=far_m if not symmetric else
                     SideMatch(d=-near_m.d, d_prime=-near_m.d_prime,
                               source="tail-series", position=l_radius,
                               correction=t, correction_prime=tw, payload=sol),
                     minus=near_m)


def width_scaling_delta1(sol: SeriesSolution, l_radius: float) -> complex:
    """First-order tail change Delta_1 = D_1 for the width-scaling family.

    For V(x; mu) = scale * sum c_k e^{-k alpha (1+mu) x} the whole mu
    dependence of the outgoing log derivative enters through alpha, so
    D_1 = dD/dmu = alpha * dD/dalpha, evaluated exactly from the recursion.
    """
    return sol.alpha * sol.logderiv_da(l_radius)


def tail_boundary(tail: TailExpansion, l_radius: float, k_max: int):
    """Boundary supplier omega -> (x_start, f_start) for shoot_eigenvalue."""

    def start(omega):
        sol = series_coefficients(tail, omega, k_max)
        x0 = l_radius if tail.side == "right" else -l_radius
        return x0, series_logderiv(sol, x0)

    return start
