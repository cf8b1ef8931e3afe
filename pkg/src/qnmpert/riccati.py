"""Outgoing-wave integration of the 1-d wave equation and complex eigenvalue
shooting.

The logarithmic derivative f = phi'/phi obeys f' + f^2 - V + omega^2 = 0 with
f -> +-i*omega far out on either side.  f has poles at zeros of phi, so the
integrator runs a dual representation: the Riccati form where |f| is moderate
and the linear (phi, phi') form near nodes, with hysteresis on the switch.
Alongside f it accumulates ell = log(phi^2), which is what the perturbation
engine integrates; phi^2 = exp(ell) never needs a square-root branch choice.
"""
from __future__ import annotations

import cmath
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import IntegrationFailure, NoRoot, RegimeViolation, RejectedRoot


@dataclass(frozen=True)
class ComplexFrequency:
    """A quasinormal frequency omega = Re(omega) - i*gamma with gamma > 0."""

    value: complex
    mode_index: int = 0
    parity: str = "none"            # 'even' | 'odd' | 'none'
    residual: float = 0.0

    def __post_init__(self):
        if self.value.imag >= 0.0:
            raise RejectedRoot(
                f"omega = {self.value} is not an outgoing mode (Im >= 0)")

    @property
    def branch(self) -> int:
        return +1 if self.value.real >= 0.0 else -1

    def __complex__(self):
        return self.value


@dataclass(frozen=True)
class SideMatch:
    """Outgoing logarithmic derivative D and its omega-derivative at one edge.

    `correction` and `correction_prime` hold the explicitly small parts
    T = D -+ i*omega and T' = D' -+ i when the side comes from a tail series;
    they let the engine cancel the exponentially large surface pieces
    analytically.  `payload` carries the series solution itself.
    """

    d: complex
    d_prime: complex
    source: str = "free-wave"       # free-wave | tail-series | born | exact
    position: float | None = None
    correction: complex = 0.0
    correction_prime: complex = 0.0
    payload: object = None


@dataclass(frozen=True)
class MatchData:
    plus: SideMatch
    minus: SideMatch

    @classmethod
    def free_wave(cls, omega: complex, l_minus: float | None = None,
                  l_plus: float | None = None) -> "MatchData":
        """Tail-free edges: D = +-i*omega exactly, D' = +-i."""
        return cls(
            plus=SideMatch(1j * omega, 1j, "free-wave", l_plus),
            minus=SideMatch(-1j * omega, -1j, "free-wave", l_minus),
        )

    @property
    def d_plus(self):
        return self.plus.d

    @property
    def d_minus(self):
        return self.minus.d

    @property
    def d_plus_prime(self):
        return self.plus.d_prime

    @property
    def d_minus_prime(self):
        return self.minus.d_prime


# Dormand-Prince 4(5) tableau.
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200,
          187 / 2100, 1 / 40)


def _dp_step(rhs, x, y, h):
    """One embedded Dormand-Prince step on a tuple of complex components."""
    k = [rhs(x, y)]
    n = len(y)
    for i in range(1, 7):
        a = _DP_A[i]
        yi = tuple(y[j] + h * sum(a[m] * k[m][j] for m in range(i)) for j in range(n))
        k.append(rhs(x + _DP_C[i] * h, yi))
    y5 = tuple(y[j] + h * sum(_DP_B5[m] * k[m][j] for m in range(7)) for j in range(n))
    err = tuple(h * sum((_DP_B5[m] - _DP_B4[m]) * k[m][j] for m in range(7))
                for j in range(n))
    return y5, err


def _err_norm(err, y_old, y_new, atol, rtol):
    acc = 0.0
    for e, a, b in zip(err, y_old, y_new):
        sc = atol + rtol * max(abs(a), abs(b))
        acc += (abs(e) / sc) ** 2
    return math.sqrt(acc / len(err))


class _Marcher:
    """Adaptive integration of one side with representation switching."""

    def __init__(self, v_eval, omega, tol, f_switch=1e3, hysteresis=10.0,
                 max_steps=200000):
        self.v = v_eval
        self.w2 = omega * omega
        self.atol = self.rtol = tol
        self.f_switch = f_switch
        self.f_back = f_switch / hysteresis
        self.max_steps = max_steps

    def _rhs_riccati(self, x, y):
        f, _ = y
        return (self.v(x) - self.w2 - f * f, 2.0 * f)

    def _rhs_linear(self, x, y):
        u, v = y
        return (v, (self.v(x) - self.w2) * u)

    def run(self, x0, x1, f0, record):
        """March from x0 to x1 with f(x0) = f0; `record(x, f, fp, ell)` is
        called at each accepted step including both ends."""
        direction = 1.0 if x1 > x0 else -1.0
        mode = "R" if abs(f0) <= self.f_switch else "L"
        if mode == "R":
            y = (f0, 0.0 + 0.0j)
        else:
            y = (1.0 + 0.0j, f0)
        ell = 0.0 + 0.0j
        x = x0

        def f_of(y, mode):
            return y[0] if mode == "R" else y[1] / y[0]

        f_now = f_of(y, mode)
        record(x, f_now, self.v(x) - self.w2 - f_now * f_now, ell)

        span = abs(x1 - x0)
        rhs0 = self._rhs_riccati(x, y) if mode == "R" else self._rhs_linear(x, y)
        scale = max(abs(c) for c in rhs0) + 1.0
        h = direction * min(0.05 * span, 0.1 / scale, span)
        err_prev = 1.0
        steps = 0
        while (x1 - x) * direction > 1e-14 * max(1.0, abs(x1)):
            steps += 1
            if steps > self.max_steps:
                raise IntegrationFailure("step limit exceeded", x=x)
            if (x + h - x1) * direction > 0.0:
                h = x1 - x
            rhs = self._rhs_riccati if mode == "R" else self._rhs_linear
            y_new, err = _dp_step(rhs, x, y, h)
            en = _err_norm(err, y, y_new, self.atol, self.rtol)
            if en <= 1.0:
                if mode == "L":
                    ratio = y_new[0] / y[0]
                    ell += 2.0 * cmath.log(ratio)
                    s = abs(y_new[0])
                    if s > 0.0:
                        y_new = (y_new[0] / s, y_new[1] / s)
                else:
                    ell = y_new[1]
                x += h
                y = y_new
                f_now = f_of(y, mode)
                record(x, f_now, self.v(x) - self.w2 - f_now * f_now, ell)
                # representation switch with hysteresis
                if mode == "R" and abs(f_now) > self.f_switch:
                    mode = "L"
                    y = (1.0 + 0.0j, f_now)
                elif mode == "L" and abs(f_now) < self.f_back:
                    mode = "R"
                    y = (f_now, ell)
                fac = 0.9 * en ** -0.2 * (err_prev ** 0.04 if err_prev > 0 else 1.0)
                err_prev = max(en, 1e-10)
            else:
                fac = max(0.2, 0.9 * en ** -0.25)
            h *= min(5.0, max(0.2, fac))
            if abs(h) < 1e-15 * max(1.0, abs(x)):
                raise IntegrationFailure("step underflow (pole of f?)", x=x)
        return f_of(y, mode), ell


def _hermite5(xa, la, ma, ca, xb, lb, mb, cb):
    """Quintic two-point Taylor coefficients for ell on [xa, xb]; arguments
    are (value, first, second derivative) at each end."""
    h = xb - xa
    a0, a1, a2 = la, ma * h, 0.5 * ca * h * h
    r0 = lb - (a0 + a1 + a2)
    r1 = mb * h - (a1 + 2 * a2)
    r2 = cb * h * h - 2 * a2
    a3 = 10 * r0 - 4 * r1 + 0.5 * r2
    a4 = -15 * r0 + 7 * r1 - r2
    a5 = 6 * r0 - 3 * r1 + 0.5 * r2
    return (a0, a1, a2, a3, a4, a5), h


class LogDerivProfile:
    """Sampled outgoing solution on a grid: f = phi'/phi, phi, phi^2.

    Between nodes, ell = log(phi^2) is interpolated by a quintic two-point
    Taylor polynomial built from (ell, 2f, 2f') at the ends, so dense values
    inherit the integrator's accuracy.  `anchor` fixes the overall scale:
    phi(x_ref) = phi_ref.
    """

    def __init__(self, omega, grid, f_values, fp_values, ell_values, *,
                 potential=None, anchor=None, left_bc="outgoing", source="integration",
                 f_eval=None, phi_eval=None):
        self.omega = complex(omega)
        self.grid = np.asarray(grid, dtype=float)
        self.f_values = np.asarray(f_values, dtype=complex)
        self._fp = np.asarray(fp_values, dtype=complex)
        self._ell = np.asarray(ell_values, dtype=complex)
        self.potential = potential
        self.left_bc = left_bc
        self.source = source
        self._f_eval = f_eval
        self._phi_eval = phi_eval
        if anchor is None:
            # raw normalization: phi = exp(ell/2) as integrated, no exp() here
            # (a wild trial omega can push ell out of float range)
            self.anchor = (float(self.grid[0]), None)
            self._log_scale = 0.0
        else:
            self.anchor = anchor
            x_ref, phi_ref = anchor
            self._log_scale = cmath.log(phi_ref) - 0.5 * self._ell_raw_at(x_ref)

    # -- raw ell interpolation -------------------------------------------
    def _panel(self, x):
        i = bisect_right(self.grid, x) - 1
        return min(max(i, 0), len(self.grid) - 2)

    def _fp_inside(self, i, at_right):
        """f' = V - omega^2 - f^2 with V taken just inside panel i; this keeps
        panels touching a potential discontinuity one-sided."""
        if self.potential is None:
            return self._fp[i + 1] if at_right else self._fp[i]
        xa, xb = self.grid[i], self.grid[i + 1]
        eps = 1e-9 * max(1.0, abs(xb - xa))
        if at_right:
            f = self.f_values[i + 1]
            return self.potential(xb - eps) - self.omega ** 2 - f * f
        f = self.f_values[i]
        return self.potential(xa + eps) - self.omega ** 2 - f * f

    def _ell_raw_at(self, x, derivatives=0):
        if self._phi_eval is not None:
            raise RuntimeError("callable-backed profile has no raw ell")
        i = self._panel(x)
        coef, h = _hermite5(
            self.grid[i], self._ell[i], 2 * self.f_values[i],
            2 * self._fp_inside(i, at_right=False),
            self.grid[i + 1], self._ell[i + 1], 2 * self.f_values[i + 1],
            2 * self._fp_inside(i, at_right=True))
        s = (x - self.grid[i]) / h
        p = sum(c * s ** k for k, c in enumerate(coef))
        if derivatives == 0:
            return p
        dp = sum(k * c * s ** (k - 1) for k, c in enumerate(coef) if k >= 1) / h
        ddp = sum(k * (k - 1) * c * s ** (k - 2) for k, c in enumerate(coef) if k >= 2) / h ** 2
        return p, dp, ddp

    # -- public evaluators -------------------------------------------------
    def f_at(self, x) -> complex:
        if self._f_eval is not None:
            return self._f_eval(x)
        _, dp, _ = self._ell_raw_at(x, derivatives=2)
        return 0.5 * dp

    def phi_at(self, x) -> complex:
        if self._phi_eval is not None:
            return self._phi_eval(x)
        return cmath.exp(0.5 * self._ell_raw_at(x) + self._log_scale)

    def phi_sq_at(self, x) -> complex:
        if self._phi_eval is not None:
            v = self._phi_eval(x)
            return v * v
        return cmath.exp(self._ell_raw_at(x) + 2.0 * self._log_scale)

    @property
    def phi_values(self):
        if self._phi_eval is not None:
            return np.array([self._phi_eval(x) for x in self.grid])
        return np.exp(0.5 * self._ell + self._log_scale)

    @property
    def phi_sq(self):
        return self.phi_values ** 2

    def with_anchor(self, x_ref: float, phi_ref: complex) -> "LogDerivProfile":
        p = LogDerivProfile.__new__(LogDerivProfile)
        p.__dict__.update(self.__dict__)
        p.anchor = (x_ref, phi_ref)
        if self._phi_eval is None:
            p._log_scale = cmath.log(phi_ref) - 0.5 * self._ell_raw_at(x_ref)
        return p

    # -- diagnostics --------------------------------------------------------
    def riccati_residual(self):
        """(max residual on moderate-|f| panels, max scaled residual everywhere).

        The bare combination f' + f^2 - V + omega^2 cancels catastrophically
        near zeros of phi, so panels with |f|^2 >> |V - omega^2| are assessed
        in the scaled form residual / max(1, |f|^2) instead.
        """
        if self.potential is None:
            raise RuntimeError("profile carries no potential; cannot form residual")
        w2 = self.omega * self.omega
        plain = 0.0
        scaled = 0.0
        for i in range(len(self.grid) - 1):
            xm = 0.5 * (self.grid[i] + self.grid[i + 1])
            if self._phi_eval is not None:
                h = 1e-5 * max(1.0, abs(xm))
                fp = (self._f_eval(xm + h) - self._f_eval(xm - h)) / (2 * h)
                f = self._f_eval(xm)
            else:
                _, dp, ddp = self._ell_raw_at(xm, derivatives=2)
                f = 0.5 * dp
                fp = 0.5 * ddp
            vterm = self.potential(xm) - w2
            r = abs(fp + f * f - vterm)
            scaled = max(scaled, r / max(1.0, abs(f) ** 2))
            if abs(f) ** 2 <= 100.0 * max(1.0, abs(vterm)):
                plain = max(plain, r)
        return plain, scaled

    @classmethod
    def from_callables(cls, omega, grid, f_eval, phi_eval, potential=None,
                       left_bc="outgoing") -> "LogDerivProfile":
        """Profile backed by closed-form evaluators (oracle solutions)."""
        grid = np.asarray(grid, dtype=float)

        def _f_safe(x):
            try:
                return f_eval(x)
            except ZeroDivisionError:   # pole of f at a node of phi
                return complex(math.inf, math.inf)

        f_values = np.array([_f_safe(x) for x in grid])
        phi0 = phi_eval(grid[0])
        prof = cls.__new__(cls)
        prof.omega = complex(omega)
        prof.grid = grid
        prof.f_values = f_values
        prof._fp = np.zeros_like(f_values)
        prof._ell = np.zeros_like(f_values)
        prof.potential = potential
        prof.left_bc = left_bc
        prof.source = "exact"
        prof._f_eval = f_eval
        prof._phi_eval = phi_eval
        prof.anchor = (float(grid[0]), phi0)
        prof._log_scale = 0.0
        return prof


def _as_callable(potential):
    if callable(potential) and not hasattr(potential, "evaluate"):
        return potential, ()
    return potential.evaluate, potential.boundaries


def integrate_outgoing(potential, omega: complex, side: str, from_: float,
                       to: float, tol: float = 1e-10, *, f_start=None,
                       breakpoints=(), f_switch: float = 1e3,
                       anchor=None) -> LogDerivProfile:
    """Integrate the outgoing solution of one side from `from_` to `to`.

    side = 'right' starts from f = +i*omega (or `f_start`, e.g. a tail-series
    value) and normally integrates inward (from_ > to); side = 'left' mirrors.
    The returned profile is normalized to phi(from_) = 1 unless `anchor`
    overrides it.
    """
    v_eval, auto_bp = _as_callable(potential)
    if f_start is None:
        f_start = 1j * omega if side == "right" else -1j * omega
    pts = [x for x in sorted(set(auto_bp) | set(breakpoints))
           if min(from_, to) < x < max(from_, to)]
    if from_ > to:
        pts = pts[::-1]
    nodes = []

    def record(x, f, fp, ell):
        if nodes and abs(nodes[-1][0] - x) < 1e-15 * max(1.0, abs(x)):
            return
        nodes.append((x, f, fp, ell))

    m = _Marcher(v_eval, omega, tol, f_switch=f_switch)
    x_cur, f_cur = from_, f_start
    ell_off = 0.0 + 0.0j
    for x_next in pts + [to]:
        base = len(nodes)
        off = ell_off

        def rec(x, f, fp, ell, off=off, base=base):
            if nodes and len(nodes) > base or not nodes:
                pass
            record(x, f, fp, ell + off)

        f_cur, ell_seg = m.run(x_cur, x_next, f_cur, rec)
        ell_off += ell_seg
        x_cur = x_next

    nodes.sort(key=lambda t: t[0])
    xs = [t[0] for t in nodes]
    fs = [t[1] for t in nodes]
    fps = [t[2] for t in nodes]
    ells = [t[3] for t in nodes]
    return LogDerivProfile(omega, xs, fs, fps, ells, potential=v_eval,
                           anchor=anchor, source=f"integration-{side}")


def _muller_update(zs, ms):
    (x0, x1, x2), (f0, f1, f2) = zs, ms
    q = (x2 - x1) / (x1 - x0)
    a = q * f2 - q * (1 + q) * f1 + q * q * f0
    b = (2 * q + 1) * f2 - (1 + q) ** 2 * f1 + q * q * f0
    c = (1 + q) * f2
    disc = cmath.sqrt(b * b - 4 * a * c)
    den1, den2 = b + disc, b - disc
    den = den1 if abs(den1) >= abs(den2) else den2
    if den == 0:
        raise ZeroDivisionError
    return x2 - (x2 - x1) * 2 * c / den


def find_root(func: Callable[[complex], complex], z0: complex, *,
              tol: float = 1e-12, max_iter: int = 60) -> complex:
    """Newton with central complex-step derivative; Muller fallback on stall.

    The derivative uses a centered difference with step 1e-7 * max(1, |z|),
    exact for analytic mismatch functions up to O(step^2).
    """
    z = complex(z0)
    history = [(z, func(z))]
    stall = 0
    for _ in range(max_iter):
        z, m = history[-1]
        if abs(m) < tol:
            return z
        h = 1e-7 * max(1.0, abs(z))
        d = (func(z + h) - func(z - h)) / (2.0 * h)
        use_muller = (d == 0) or stall >= 2
        if use_muller and len(history) >= 3:
            try:
                z_new = _muller_update([p[0] for p in history[-3:]],
                                       [p[1] for p in history[-3:]])
            except ZeroDivisionError:
                z_new = z - m / d if d != 0 else z + h
            stall = 0
        else:
            if d == 0:
                z_new = z + h
            else:
                z_new = z - m / d
        m_new = func(z_new)
        stall = stall + 1 if abs(m_new) >= abs(m) else 0
        history.append((z_new, m_new))
        if abs(z_new - z) < 1e-15 * max(1.0, abs(z_new)) and abs(m_new) < math.sqrt(tol):
            return z_new
    z, m = history[-1]
    if abs(m) < tol:
        return z
    raise NoRoot(f"no convergence after {max_iter} iterations, |mismatch| = {abs(m):.3e}",
                 last=z)


def shoot_eigenvalue(potential, omega_guess: complex, match_point: float | None = None,
                     tol: float = 1e-12, *, left_bc: str = "outgoing",
                     x_left: float | None = None, x_right: float | None = None,
                     right_start: Callable[[complex], tuple] | None = None,
                     left_start: Callable[[complex], tuple] | None = None,
                     ode_tol: float | None = None, max_iter: int = 60,
                     mode_index: int = 0, parity: str = "none") -> ComplexFrequency:
    """Find the outgoing eigenvalue nearest omega_guess by complex shooting.

    left_bc:
      'outgoing'  two-sided problem, mismatch f_plus - f_minus at match_point;
      'dirichlet' half line with phi(0) = 0, mismatch 1/f_plus(match_point);
      'neumann'   half line with phi'(0) = 0, mismatch f_plus(match_point).
    `right_start`/`left_start` map omega -> (x_start, f_start), letting tail
    series supply the boundary data; defaults are free waves at the support
    edge (or at x_right/x_left).
    """
    v_eval, auto_bp = _as_callable(potential)
    ode_tol = ode_tol if ode_tol is not None else max(tol, 1e-12)
    support = getattr(potential, "support", None)
    if match_point is None:
        match_point = 0.0 if left_bc != "outgoing" else (support[1] if support else 1.0)
    if x_right is None:
        x_right = support[1] if support else match_point + 5.0
    if x_left is None:
        x_left = support[0] if support else match_point - 5.0

    def f_plus(omega):
        if right_start is not None:
            x0, f0 = right_start(omega)
        else:
            x0, f0 = x_right, 1j * omega
        if abs(x0 - match_point) < 1e-14:
            return f0
        prof = integrate_outgoing(potential, omega, "right", x0, match_point,
                                  tol=ode_tol, f_start=f0)
        return prof.f_values[0] if x0 > match_point else prof.f_values[-1]

    def f_minus(omega):
        if left_start is not None:
            x0, f0 = left_start(omega)
        else:
            x0, f0 = x_left, -1j * omega
        if abs(x0 - match_point) < 1e-14:
            return f0
        prof = integrate_outgoing(potential, omega, "left", x0, match_point,
                                  tol=ode_tol, f_start=f0)
        return prof.f_values[-1] if x0 < match_point else prof.f_values[0]

    if left_bc == "dirichlet":
        mismatch = lambda w: 1.0 / f_plus(w)
    elif left_bc == "neumann":
        mismatch = lambda w: f_plus(w)
    elif left_bc == "outgoing":
        mismatch = lambda w: f_plus(w) - f_minus(w)
    else:
        raise ValueError(f"unknown left_bc {left_bc!r}")

    root = find_root(mismatch, omega_guess, tol=tol, max_iter=max_iter)
    resid = abs(mismatch(root))
    if root.imag >= 0.0:
        raise RejectedRoot(f"converged to omega = {root} with Im >= 0")
    return ComplexFrequency(root, mode_index=mode_index, parity=parity,
                            residual=resid)


def step_eigenvalue(v0: float, b: float, root_index: int = 1) -> ComplexFrequency:
    """Outgoing modes of the half-line step: q cot(qb) = i sqrt(q^2 + v0).

    Solved as q cos(qb) - i sqrt(q^2+v0) sin(qb) = 0 (no cot poles) by the
    complex Newton of find_root, seeded near q b = root_index * pi.
    """
    if v0 <= 0.0 or b <= 0.0:
        raise ValueError("need v0 > 0 and b > 0")
    if root_index < 1:
        raise ValueError("root_index counts from 1")

    def omega_of(q):
        w = cmath.sqrt(q * q + v0)
        return w if w.real >= 0 else -w

    def g(q):
        return q * cmath.cos(q * b) - 1j * omega_of(q) * cmath.sin(q * b)

    qhw = root_index * math.pi / b
    seed = qhw + qhw / (1j * omega_of(qhw) * b * b)
    q = find_root(g, seed, tol=1e-13)
    om = omega_of(q)
    resid = abs(q * cmath.cos(q * b) / cmath.sin(q * b) - 1j * om)
    return ComplexFrequency(om, mode_index=root_index, parity="none", residual=resid)


def pt_eigenvalue(v0: float, b: float, j: int, branch: int = +1) -> ComplexFrequency:
    """omega(j) = (1/b) [branch * sqrt(v0 b^2 - 1/4) - i (j + 1/2)]."""
    if 4.0 * v0 * b * b <= 1.0:
        raise RegimeViolation("need 4 V0 b^2 > 1")
    if j < 0 or branch not in (+1, -1):
        raise ValueError("j >= 0 and branch in {+1,-1}")
    om = (branch * math.sqrt(v0 * b * b - 0.25) - 1j * (j + 0.5)) / b
    return ComplexFrequency(om, mode_index=j, parity="even" if j % 2 == 0 else "odd")


def count_real_nodes(profile: LogDerivProfile, rel_tol: float = 1e-6) -> int:
    """Count zeros of phi along the real grid.

    A zero is counted where the straight segment between adjacent complex
    phi samples passes within rel_tol of the origin (the complex version of a
    sign change), or where a boundary sample is essentially exactly zero (the
    node imposed by a Dirichlet/odd-parity condition).
    """
    phi = profile.phi_values
    scale = float(np.max(np.abs(phi)))
    count = 0
    if abs(phi[0]) < 1e-8 * scale:
        count += 1
    for i in range(len(phi) - 1):
        z0, z1 = phi[i], phi[i + 1]
        if abs(z0) < 1e-8 * scale and i > 0:
            continue  # already handled as segment minimum
        dz = z1 - z0
        if dz == 0:
            continue
        t = -(z0.real * dz.real + z0.imag * dz.imag) / abs(dz) ** 2
        if 0.0 < t <= 1.0:
            d = abs(z0 + t * dz)
            if d < rel_tol * max(abs(z0), abs(z1)):
                count += 1
    return count
