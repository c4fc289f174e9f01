"""Exact inverse-power-law Boltzmann angular kernel.

The potential U(r) = r^(-1/s), 0 < s < 1, yields a collision kernel
|v - v_*|^(1-4s) * b_s(theta) whose angular factor is built from an
implicitly defined impact-parameter map. This module evaluates that
chain with certified quadrature:

    phi_s(y)   = y * int_0^1 g(s, y, z)^(-1/2) dz
    g(s, y, z) = (1 - y^2) * (1 - z^(1/s)) + y^2 * (1 - z^2)
    y_s        = inverse of phi_s on [0, pi/2]
    beta_s(y)  = y * (1 - y^2)^(-s)
    b_s(theta) = 2^(4s-1) / sin(theta) * beta_s(y) * beta_s'(y) * y_s'(phi)

with 2*phi + theta = pi. The hard-sphere limit is b_s -> 1/4 as s -> 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .quadrature import QuadratureError, tanh_sinh

__all__ = [
    "PotentialParam",
    "ImplicitMapTable",
    "KernelValue",
    "DomainError",
    "InversionError",
    "eval_g",
    "phi_s",
    "phi_s_prime",
    "build_map_table",
    "y_s",
    "y_s_prime",
    "beta_s",
    "beta_s_prime",
    "b_s",
    "b_bar_s",
    "wallis",
    "c_s",
]

DEFAULT_TOL = 1e-10
INVERSION_ATOL = 1e-12
_MAX_NEWTON = 80


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class InversionError(RuntimeError):
    """Bracketed Newton inversion failed to converge."""


@dataclass(frozen=True)
class PotentialParam:
    """Softness exponent s of U(r) = r^(-1/s) and the derived velocity exponent."""

    s: float

    def __post_init__(self):
        if not 0.0 < self.s < 1.0:
            raise DomainError(f"softness s must lie in (0, 1), got {self.s}")

    @property
    def gamma(self) -> float:
        return 1.0 - 4.0 * self.s


def _check_s(s: float) -> None:
    if not 0.0 < s < 1.0:
        raise DomainError(f"softness s must lie in (0, 1), got {s}")


def eval_g(s: float, y: float, z):
    """g(s, y, z) = 1 - z^(1/s) - y^2 (z^2 - z^(1/s)).

    Evaluated as (1-y^2)(1-z^(1/s)) + y^2(1-z^2), a sum of nonnegative
    terms, so no cancellation occurs near z = 1. z^(1/s) is computed in
    log space (and is 0 at z = 0).
    """
    _check_s(s)
    z = np.asarray(z, dtype=float)
    if not 0.0 <= y <= 1.0 or np.any(z < 0.0) or np.any(z > 1.0):
        raise DomainError("eval_g requires y, z in [0, 1]")
    with np.errstate(divide="ignore"):
        one_minus_zpow = -np.expm1(np.log(np.where(z > 0.0, z, 1.0)) / s)
    one_minus_zpow = np.where(z > 0.0, one_minus_zpow, 1.0)
    g = (1.0 - y * y) * one_minus_zpow + y * y * (1.0 - z * z)
    return g if g.shape else float(g)


def _one_minus_zpow_u(s: float, u):
    """1 - z^(1/s) with z = 1 - u^2, stable for z near 1 (u near 0)."""
    with np.errstate(divide="ignore"):
        return -np.expm1(np.log1p(-u * u) / s)


def _g_u(s: float, y: float, u):
    """g(s, y, 1-u^2); note 1 - z^2 = u^2 (2 - u^2)."""
    return (1.0 - y * y) * _one_minus_zpow_u(s, u) + y * y * u * u * (2.0 - u * u)


def _phi_integral(s: float, y: float, tol: float):
    # substitution z = 1 - u^2 removes the sqrt endpoint singularity at z = 1
    def f(u):
        return 2.0 * u / np.sqrt(_g_u(s, y, u))

    return tanh_sinh(f, 0.0, 1.0, tol)


def phi_s(s: float, y: float, tol: float = DEFAULT_TOL) -> float:
    """Scattering angle phi_s(y) = y * int_0^1 g^(-1/2) dz, in [0, pi/2]."""
    _check_s(s)
    if not 0.0 <= y <= 1.0:
        raise DomainError(f"impact parameter y must lie in [0, 1], got {y}")
    if y == 0.0:
        return 0.0
    val, _ = _phi_integral(s, y, tol)
    return y * val


def phi_s_prime(s: float, y: float, tol: float = DEFAULT_TOL) -> float:
    """Derivative phi_s'(y) = int_0^1 (1 - z^(1/s)) / g^(3/2) dz > 0."""
    _check_s(s)
    if not 0.0 <= y <= 1.0:
        raise DomainError(f"impact parameter y must lie in [0, 1], got {y}")

    def f(u):
        g = _g_u(s, y, u)
        return 2.0 * u * _one_minus_zpow_u(s, u) / (g * np.sqrt(g))

    val, _ = tanh_sinh(f, 0.0, 1.0, tol)
    return val


def beta_s(s: float, y) -> float:
    """beta_s(y) = y / (1 - y^2)^s; pole at y = 1."""
    _check_s(s)
    y = np.asarray(y, dtype=float)
    if np.any(y < 0.0) or np.any(y >= 1.0):
        raise DomainError("beta_s requires y in [0, 1)")
    out = y * (1.0 - y * y) ** (-s)
    return out if out.shape else float(out)


def beta_s_prime(s: float, y) -> float:
    """beta_s'(y) = 2s (1-y^2)^(-1-s) + (1-2s) (1-y^2)^(-s)."""
    _check_s(s)
    y = np.asarray(y, dtype=float)
    if np.any(y < 0.0) or np.any(y >= 1.0):
        raise DomainError("beta_s_prime requires y in [0, 1)")
    w = 1.0 - y * y
    out = 2.0 * s * w ** (-1.0 - s) + (1.0 - 2.0 * s) * w ** (-s)
    return out if out.shape else float(out)


def wallis(n: float) -> float:
    """Wallis integral W_n = int_0^(pi/2) sin^n(t) dt for real n > 0."""
    if n <= 0:
        raise DomainError(f"wallis requires n > 0, got {n}")
    return math.exp(
        0.5 * math.log(math.pi) - math.log(2.0)
        + gammaln((n + 1.0) / 2.0) - gammaln(n / 2.0 + 1.0)
    )


def c_s(s: float) -> float:
    """Sharp small-angle constant: theta^(2+2s) b_s(theta) -> C_s as theta -> 0.

    C_s = 2^(4s) * s * ((1/s) W_(1/s))^(2s), and C_s / s -> 1 as s -> 0.
    """
    _check_s(s)
    return 2.0 ** (4.0 * s) * s * ((1.0 / s) * wallis(1.0 / s)) ** (2.0 * s)


# -- implicit map table and inversion ---------------------------------------

# grading of table nodes toward y = 1; (1 - y) shrinks to no less than this
_MIN_GAP = 1e-12
_GRADE_RATIO = 0.85


@dataclass(frozen=True)
class ImplicitMapTable:
    """Sampled monotone graph of phi_s and phi_s' used to invert y_s(phi).

    Nodes run from (0, 0, phi_s'(0)) to (1, pi/2, phi_s'(1)); both y and
    phi are strictly increasing and all dphi are positive.
    """

    s: float
    y: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    tol: float

    def __post_init__(self):
        if np.any(np.diff(self.y) <= 0) or np.any(np.diff(self.phi) <= 0):
            raise ValueError("table nodes must be strictly increasing in y and phi")
        if np.any(self.dphi <= 0):
            raise ValueError("table dphi must be positive")

    @property
    def n_nodes(self) -> int:
        return len(self.y)


def build_map_table(s: float, n_nodes: int = 256, tol: float = DEFAULT_TOL) -> ImplicitMapTable:
    """Tabulate (y, phi_s(y), phi_s'(y)) on a grid graded toward y = 1."""
    _check_s(s)
    if n_nodes < 16:
        raise ValueError(f"n_nodes must be >= 16, got {n_nodes}")
    # exponents chosen so 1 - y follows the grading ratio down to _MIN_GAP
    i_max = math.log(_MIN_GAP) / math.log(_GRADE_RATIO)
    exponents = np.linspace(0.0, i_max, n_nodes - 1)
    y = np.append(1.0 - _GRADE_RATIO ** exponents, 1.0)
    phi = np.array([phi_s(s, yi, tol) for yi in y[:-1]])
    dphi = np.array([phi_s_prime(s, yi, tol) for yi in y])
    phi_end = phi_s(s, 1.0, tol)
    if abs(phi_end - math.pi / 2.0) > 100.0 * tol * math.pi:
        raise QuadratureError("phi_s(1) deviates from pi/2 beyond tolerance",
                              phi_end, abs(phi_end - math.pi / 2.0))
    phi = np.append(phi, math.pi / 2.0)
    return ImplicitMapTable(s=s, y=y, phi=phi, dphi=dphi, tol=tol)


def y_s(table: ImplicitMapTable, phi: float) -> float:
    """Invert phi_s: find y in [0, 1] with phi_s(y) = phi.

    Bisection bracketed by the table nodes, polished by Newton with
    phi_s'; Newton alone is unsafe near y = 1 where phi_s' ~ s^(-1/2).
    """
    if not 0.0 <= phi <= math.pi / 2.0:
        raise DomainError(f"phi must lie in [0, pi/2], got {phi}")
    if phi == 0.0:
        return 0.0
    if phi == math.pi / 2.0:
        return 1.0
    s, tol = table.s, table.tol
    i = int(np.searchsorted(table.phi, phi))
    lo, hi = table.y[i - 1], table.y[i]
    flo, fhi = table.phi[i - 1] - phi, table.phi[i] - phi
    # secant initial guess inside the bracket
    x = lo + (hi - lo) * (-flo) / (fhi - flo)
    for _ in range(_MAX_NEWTON):
        fx = phi_s(s, x, tol) - phi
        if fx > 0.0:
            hi = x
        else:
            lo = x
        d = phi_s_prime(s, x, tol)
        xn = x - fx / d
        if not lo < xn < hi:
            xn = 0.5 * (lo + hi)
        if abs(xn - x) <= INVERSION_ATOL:
            return xn
        x = xn
    raise InversionError(
        f"y_s(phi={phi}) did not converge below {INVERSION_ATOL} "
        f"(bracket width {hi - lo:g})"
    )


def y_s_prime(table: ImplicitMapTable, phi: float) -> float:
    """y_s'(phi) = 1 / phi_s'(y_s(phi)); always in (0, 1]."""
    y = y_s(table, phi)
    return 1.0 / phi_s_prime(table.s, y, table.tol)


@dataclass(frozen=True)
class KernelValue:
    """One kernel evaluation with its scattering geometry."""

    theta: float
    phi: float
    y: float
    b: float
    quad_err: float


# theta closer to pi than this is treated by the removable-singularity limit
_THETA_PI_EPS = 1e-9


def b_s(table: ImplicitMapTable, theta: float) -> KernelValue:
    """Angular kernel b_s(theta) = 2^(4s-1) beta_s beta_s' y_s' / sin(theta).

    theta must lie in (0, pi]. At theta = pi the formula is 0/0; the
    limit value 2^(4s-2) * y_s'(0)^2 is used there.
    """
    if not 0.0 < theta <= math.pi:
        raise DomainError(f"theta must lie in (0, pi], got {theta}")
    s, tol = table.s, table.tol
    phi = 0.5 * (math.pi - theta)
    if math.pi - theta < _THETA_PI_EPS:
        yp0 = 1.0 / phi_s_prime(s, 0.0, tol)
        b = 2.0 ** (4.0 * s - 2.0) * yp0 * yp0
        return KernelValue(theta=theta, phi=phi, y=0.0, b=b, quad_err=10.0 * tol)
    y = y_s(table, phi)
    yp = 1.0 / phi_s_prime(s, y, tol)
    b = (
        2.0 ** (4.0 * s - 1.0)
        / math.sin(theta)
        * beta_s(s, y)
        * beta_s_prime(s, y)
        * yp
    )
    return KernelValue(theta=theta, phi=phi, y=y, b=b, quad_err=10.0 * tol)


def b_bar_s(table: ImplicitMapTable, theta: float) -> float:
    """Symmetrized kernel [b_s(theta) + b_s(pi - theta)] on [0, pi/2], else 0."""
    if not 0.0 <= theta <= math.pi:
        raise DomainError(f"theta must lie in [0, pi], got {theta}")
    if theta > math.pi / 2.0:
        return 0.0
    return b_s(table, theta).b + b_s(table, math.pi - theta).b
