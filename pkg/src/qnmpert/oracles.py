"""Closed-form reference values: complex gamma/beta and the exactly solvable
potentials (cosh^-2 well, square step) used as oracles by the numerical paths.

Analytic continuation is realized by evaluating the closed forms directly at
complex arguments; nothing here integrates an ODE.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

from .errors import RegimeViolation
from .potentials import log_cosh, pt_width_perturbation, sech2

# Lanczos approximation, g = 607/128 with the standard 15-coefficient table
# (accurate to ~1e-15 relative over the strip used here).
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)
_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class SpecialFunctionResult:
    value: complex
    estimated_error: float


def _check_pole(z: complex, what: str):
    if abs(z.imag) < 1e-13 and z.real <= 0.5:
        n = round(z.real)
        if n <= 0 and abs(z.real - n) < 1e-13:
            raise ArithmeticError(f"{what} has a pole at the non-positive integer {n}")


def _loggamma(z: complex) -> complex:
    """log Gamma(z), possibly offset by a multiple of 2*pi*i (harmless under exp)."""
    z = complex(z)
    _check_pole(z, "gamma")
    if z.real < 0.5:
        # reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return cmath.log(math.pi) - cmath.log(cmath.sin(math.pi * z)) - _loggamma(1.0 - z)
    acc = _LANCZOS_C[0]
    for k in range(1, 15):
        acc += _LANCZOS_C[k] / (z - 1.0 + k)
    t = z - 0.5 + _LANCZOS_G
    return _HALF_LOG_TWO_PI + (z - 0.5) * cmath.log(t) - t + cmath.log(acc)


def complex_gamma(z: complex) -> complex:
    """Gamma(z) for complex z, Lanczos approximation with reflection."""
    return cmath.exp(_loggamma(z))


def gamma_with_error(z: complex) -> SpecialFunctionResult:
    """Gamma(z) plus a residual-based error estimate from the reflection formula."""
    value = complex_gamma(z)
    other = complex_gamma(1.0 - z)
    resid = abs(value * other * cmath.sin(math.pi * z) / math.pi - 1.0)
    return SpecialFunctionResult(value, resid * abs(value))


def complex_beta(a: complex, b: complex) -> complex:
    """B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b)."""
    return cmath.exp(_loggamma(a) + _loggamma(b) - _loggamma(a + b))


@dataclass(frozen=True)
class PtExact:
    """Exact data for the cosh^-2 well at unit width, one mode and branch.

    `omega1` is the width-scaling shift d(omega)/d(mu) for 1/b = 1 + mu; its
    real part is -branch/(4 sigma), so the two members of the +-Re(omega) pair
    carry opposite real shifts.  The bundle satisfies
    matrix_element = 2 * omega0 * omega1 * norm identically.
    """

    j: int
    v0: float
    branch: int
    sigma: float
    omega0: complex
    omega1: complex
    norm: complex
    matrix_element: complex
    amplitude: complex          # A with phi ~ A e^{i omega0 x}, A = 2^{-i omega0}
    phi: Callable[[complex], complex]
    phi_sq: Callable[[complex], complex]
    logderiv: Callable[[complex], complex]
    v0_eval: Callable[[complex], complex]
    v1_eval: Callable[[complex], complex]


def pt_exact(j: int, v0: float, branch: int = +1) -> PtExact:
    """Closed forms for the j = 0, 1 outgoing modes of v0 * cosh^-2(x)."""
    if j not in (0, 1):
        raise ValueError("only j = 0 and j = 1 are exactly tabulated")
    if v0 <= 0.25:
        raise RegimeViolation("need v0 > 1/4 for oscillatory eigenvalues")
    if branch not in (+1, -1):
        raise ValueError("branch must be +1 or -1")
    sigma = math.sqrt(v0 - 0.25)
    om0 = branch * sigma - 1j * (j + 0.5)
    om1 = -branch / (4.0 * sigma) - 1j * (j + 0.5)

    if j == 0:
        norm = complex_beta(0.5, -1j * om0)
        me = (-math.sqrt(math.pi) * v0 * complex_gamma(1.0 - 1j * om0)
              / ((1.0 - 1j * om0) * complex_gamma(1.5 - 1j * om0)))

        def phi(z):
            return cmath.exp(1j * om0 * log_cosh(z))

        def logderiv(z):
            return 1j * om0 * cmath.tanh(z)
    else:
        norm = complex_beta(1.5, -1j * om0)
        me = (v0 / (1j * om0 - 2.0)
              * (complex_beta(1.5, 1.0 - 1j * om0)
                 + math.sqrt(math.pi) * complex_gamma(1.0 - 1j * om0)
                 / ((1.0 - 1j * om0) * complex_gamma(1.5 - 1j * om0))))

        def phi(z):
            return cmath.tanh(z) * cmath.exp(1j * om0 * log_cosh(z))

        def logderiv(z):
            return 1j * om0 * cmath.tanh(z) + 2.0 / cmath.sinh(2.0 * z)

    def phi_sq(z):
        v = cmath.exp(2j * om0 * log_cosh(z))
        return v * cmath.tanh(z) ** 2 if j == 1 else v

    v0_eval, v1_eval = pt_width_perturbation(v0)
    return PtExact(
        j=j, v0=v0, branch=branch, sigma=sigma, omega0=om0, omega1=om1,
        norm=norm, matrix_element=me,
        amplitude=cmath.exp(-1j * om0 * math.log(2.0)),
        phi=phi, phi_sq=phi_sq, logderiv=logderiv,
        v0_eval=v0_eval, v1_eval=v1_eval,
    )


@dataclass(frozen=True)
class StepExact:
    """Closed forms for the half-line step well (A = 1 normalization)."""

    v0: float
    b: float
    a: float
    root_index: int
    q: complex
    omega0: complex
    norm: complex
    phi: Callable[[complex], complex]
    phi_sq: Callable[[complex], complex]
    logderiv: Callable[[complex], complex]
    psi2: Callable[[float], complex]
    bump_matrix_element: Callable[[float, float], complex]


def step_exact(v0: float, b: float, a: float, root_index: int = 1) -> StepExact:
    """Eigenfunction, norm and second-order weight for V = v0 on (0, b).

    phi = sin(q x) inside, sin(q b) e^{i omega (x-b)} outside; q solves
    q cot(q b) = i sqrt(q^2 + v0).  The weight Psi2(y) = -2 int_y^a phi^-2 is
    assembled piecewise; both branches are continuous at y = b.
    """
    if not (0.0 < b < a):
        raise ValueError("need 0 < b < a")
    from .riccati import step_eigenvalue

    freq = step_eigenvalue(v0, b, root_index)
    om0 = freq.value
    q = cmath.sqrt(om0 * om0 - v0)
    if q.real < 0:
        q = -q
    sqb = cmath.sin(q * b)

    def phi(x):
        if (x.real if isinstance(x, complex) else x) <= b:
            return cmath.sin(q * x)
        return sqb * cmath.exp(1j * om0 * (x - b))

    def phi_sq(x):
        return phi(x) ** 2

    def logderiv(x):
        if (x.real if isinstance(x, complex) else x) <= b:
            return q * cmath.cos(q * x) / cmath.sin(q * x)
        return 1j * om0

    c_out = 1j / (om0 * sqb * sqb)
    tail_const = c_out * (1.0 - cmath.exp(-2j * om0 * (a - b)))

    def psi2(y):
        if y < b:
            return (2.0 / q) * (cmath.cos(q * b) / sqb - cmath.cos(q * y) / cmath.sin(q * y)) \
                + tail_const
        return c_out * (cmath.exp(-2j * om0 * (y - b)) - cmath.exp(-2j * om0 * (a - b)))

    norm = (b / 2.0) * (1.0 - cmath.sin(2 * q * b) / (2 * q * b)
                        - sqb * sqb * cmath.tan(q * b) / (q * b))

    def antider_in(x):          # integral of sin^2(q x)
        return x / 2.0 - cmath.sin(2 * q * x) / (4 * q)

    def antider_out(x):         # integral of sin^2(q b) e^{2 i omega (x-b)}
        return sqb * sqb * cmath.exp(2j * om0 * (x - b)) / (2j * om0)

    def bump_matrix_element(x0: float, w: float) -> complex:
        lo, hi = x0 - w / 2.0, x0 + w / 2.0
        if lo < 0.0 or hi > a:
            raise ValueError("bump support must lie inside (0, a)")
        me = 0.0 + 0.0j
        if lo < b:
            t = min(hi, b)
            me += antider_in(t) - antider_in(lo)
        if hi > b:
            t = max(lo, b)
            me += antider_out(hi) - antider_out(t)
        return me

    return StepExact(v0=v0, b=b, a=a, root_index=root_index, q=q, omega0=om0,
                     norm=norm, phi=phi, phi_sq=phi_sq, logderiv=logderiv,
                     psi2=psi2, bump_matrix_element=bump_matrix_element)
