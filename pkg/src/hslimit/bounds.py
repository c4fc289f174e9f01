"""Grid-based certification of the kernel inequalities.

Every explicit inequality satisfied by phi_s, y_s and b_s is checked on
parameter grids; each check records the worst LHS/RHS ratio and where it
occurred. Failures are data, not exceptions: the suite always completes.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .kernel import (
    DEFAULT_TOL,
    ImplicitMapTable,
    b_bar_s,
    b_s,
    build_map_table,
    phi_s,
    phi_s_prime,
    y_s,
    y_s_prime,
)
from .quadrature import graded_panels

# default slack absorbing certified quadrature error in ratio comparisons
DEFAULT_SLACK = 1e-6

# default parameter grids (logarithmic coverage of both singular limits)
S_GRID = (0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.7, 0.9)
THETA_GRID = tuple(np.geomspace(1e-4, math.pi, 400))
S_GRID_SMALL = tuple(s for s in S_GRID if s < 0.125)  # solver regime s < 1/8


@dataclass
class InequalityCheck:
    """Result of sweeping one inequality over a parameter grid."""

    name: str
    param_grid: str
    worst_ratio: float
    worst_point: tuple
    passed: bool
    slack: float = DEFAULT_SLACK
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "param_grid": self.param_grid,
            "worst_ratio": float(self.worst_ratio),
            "worst_point": [float(p) for p in self.worst_point],
            "passed": bool(self.passed),
            "slack": float(self.slack),
            "extra": self.extra,
        }


class _TableCache:
    """Build each s-table once per suite run."""

    def __init__(self, n_nodes: int = 256, tol: float = DEFAULT_TOL):
        self.n_nodes = n_nodes
        self.tol = tol
        self._tables: dict[float, ImplicitMapTable] = {}

    def get(self, s: float) -> ImplicitMapTable:
        if s not in self._tables:
            self._tables[s] = build_map_table(s, self.n_nodes, self.tol)
        return self._tables[s]


def _sweep(name, grid_desc, points, lhs_rhs, slack=DEFAULT_SLACK, extra=None):
    """Max LHS/RHS over points; 0/0 counts as ratio 0."""
    worst = -math.inf
    worst_pt = None
    for pt in points:
        lhs, rhs = lhs_rhs(*pt)
        if lhs == 0.0:
            ratio = 0.0
        elif rhs == 0.0:
            ratio = math.inf
        else:
            ratio = lhs / rhs
        if ratio > worst:
            worst = ratio
            worst_pt = pt
    return InequalityCheck(
        name=name,
        param_grid=grid_desc,
        worst_ratio=worst,
        worst_point=worst_pt,
        passed=worst <= 1.0 + slack,
        slack=slack,
        extra=extra or {},
    )


def _default_y_grid(cache: _TableCache, s: float, y_max: float = 1.0 - 1e-6):
    y = cache.get(s).y
    return y[(y > 0.0) & (y <= y_max)]


def check_lemma_2_1(s_grid=S_GRID, y_grid=None, cache=None, slack=DEFAULT_SLACK):
    """|phi_s(y) - arcsin y| <= 2sy (1-y^2)^(-1/2) and the derivative analogue."""
    cache = cache or _TableCache()
    pts = []
    for s in s_grid:
        ys = y_grid if y_grid is not None else _default_y_grid(cache, s)
        pts += [(s, float(y)) for y in ys]
    grid = f"s in {list(s_grid)}, y from table nodes up to 1-1e-6"
    tol = cache.tol

    def phi_pair(s, y):
        lhs = abs(phi_s(s, y, tol) - math.asin(y))
        rhs = 2.0 * s * y / math.sqrt(1.0 - y * y)
        return lhs, rhs

    def dphi_pair(s, y):
        lhs = abs(phi_s_prime(s, y, tol) - 1.0 / math.sqrt(1.0 - y * y))
        rhs = 2.0 * s * (1.0 - y * y) ** -1.5
        return lhs, rhs

    return (
        _sweep("lemma_2_1_phi", grid, pts, phi_pair, slack),
        _sweep("lemma_2_1_dphi", grid, pts, dphi_pair, slack),
    )


def check_lemma_2_2(s_grid=S_GRID, phi_grid=None, cache=None, slack=DEFAULT_SLACK):
    """|y_s(phi) - sin phi| <= 2ys and |y_s'(phi) - cos phi| <= 6s (1-y^2)^-1 y_s'."""
    cache = cache or _TableCache()
    if phi_grid is None:
        phi_grid = np.linspace(0.0, math.pi / 2.0, 60)
    pts = [(s, float(p)) for s in s_grid for p in phi_grid]
    grid = f"s in {list(s_grid)}, phi linspace[0, pi/2] x{len(phi_grid)}"

    def y_pair(s, phi):
        y = y_s(cache.get(s), phi)
        return abs(y - math.sin(phi)), 2.0 * y * s

    def yp_pair(s, phi):
        tab = cache.get(s)
        y = y_s(tab, phi)
        if y >= 1.0:
            return 0.0, 0.0  # phi = pi/2 endpoint: both sides degenerate
        yp = 1.0 / phi_s_prime(s, y, tab.tol)
        lhs = abs(yp - math.cos(phi))
        rhs = 6.0 * s / (1.0 - y * y) * yp
        return lhs, rhs

    return (
        _sweep("lemma_2_2_y", grid, pts, y_pair, slack),
        _sweep("lemma_2_2_yprime", grid, pts, yp_pair, slack),
    )


def check_lemma_2_3_and_2_4(s_grid=S_GRID, theta_grid=THETA_GRID, cache=None,
                            slack=DEFAULT_SLACK):
    """Endpoint-degeneracy bounds on (1-y)^-1 and (1-y)^-1 y_s'."""
    cache = cache or _TableCache()
    pts = [(s, float(t)) for s in s_grid for t in theta_grid]
    grid = f"s in {list(s_grid)}, theta geomspace[{theta_grid[0]:.0e}, pi] x{len(theta_grid)}"

    @functools.lru_cache(maxsize=None)
    def geom(s, theta):
        tab = cache.get(s)
        phi = 0.5 * (math.pi - theta)
        y = y_s(tab, phi)
        yp = 1.0 / phi_s_prime(s, y, tab.tol)
        return y, yp

    def l23_pair(s, theta):
        y, _ = geom(s, theta)
        lhs = 1.0 / (1.0 - y)
        rhs = min(4.0 / math.sqrt(s), math.pi ** 2 / theta) / theta
        return lhs, rhs

    def l24_pair(s, theta):
        y, yp = geom(s, theta)
        return yp / (1.0 - y), 18.0 / theta

    return (
        _sweep("lemma_2_3", grid, pts, l23_pair, slack),
        _sweep("lemma_2_4", grid, pts, l24_pair, slack),
    )


def check_y_prime_bound(s_grid=S_GRID, phi_grid=None, cache=None, slack=DEFAULT_SLACK):
    """Uniform bound y_s'(phi) <= 1."""
    cache = cache or _TableCache()
    if phi_grid is None:
        phi_grid = np.linspace(0.0, math.pi / 2.0, 60)
    pts = [(s, float(p)) for s in s_grid for p in phi_grid]
    grid = f"s in {list(s_grid)}, phi linspace[0, pi/2] x{len(phi_grid)}"

    def pair(s, phi):
        return y_s_prime(cache.get(s), phi), 1.0

    return _sweep("y_prime_le_1", grid, pts, pair, slack)


def check_H_s(s_grid=S_GRID, y_grid=None, cache=None, slack=DEFAULT_SLACK):
    """H_s(y) = (pi/2 - phi_s(y)) / ((1-y) phi_s'(y)) <= 9, with the sharper
    branches H_s <= 1 for s >= 1/2 and H_s <= 4 when 1 - y^2 <= s."""
    cache = cache or _TableCache()
    tol = cache.tol

    def H(s, y):
        return (math.pi / 2.0 - phi_s(s, y, tol)) / ((1.0 - y) * phi_s_prime(s, y, tol))

    def collect(s_values, y_filter, bound):
        pts = []
        for s in s_values:
            ys = y_grid if y_grid is not None else _default_y_grid(cache, s, 1.0 - 1e-8)
            pts += [(s, float(y)) for y in ys if y_filter(s, y)]
        return pts, (lambda s, y: (H(s, y), bound))

    grid = f"s in {list(s_grid)}, y from table nodes up to 1-1e-8"
    pts9, f9 = collect(s_grid, lambda s, y: True, 9.0)
    main = _sweep("H_s_le_9", grid, pts9, f9, slack)

    s_big = [s for s in s_grid if s >= 0.5]
    pts1, f1 = collect(s_big, lambda s, y: True, 1.0)
    sharp1 = _sweep("H_s_le_1_for_s_ge_half", f"s in {s_big}", pts1, f1, slack)

    pts4, f4 = collect(s_grid, lambda s, y: 1.0 - y * y <= s, 4.0)
    sharp4 = _sweep("H_s_le_4_near_endpoint", grid + ", 1-y^2 <= s", pts4, f4, slack)
    return main, sharp1, sharp4


def check_theorem_1_1(s_grid=S_GRID, theta_grid=THETA_GRID, cache=None,
                      slack=DEFAULT_SLACK):
    """sup |b_s(theta) - 1/4| theta^(2+2s) / s <= 50000."""
    cache = cache or _TableCache()
    pts = [(s, float(t)) for s in s_grid for t in theta_grid]
    grid = f"s in {list(s_grid)}, theta geomspace[{theta_grid[0]:.0e}, pi] x{len(theta_grid)}"

    def pair(s, theta):
        b = b_s(cache.get(s), theta).b
        lhs = abs(b - 0.25) * theta ** (2.0 + 2.0 * s) / s
        return lhs, 50000.0

    chk = _sweep("theorem_1_1", grid, pts, pair, slack)
    chk.extra["empirical_sup"] = chk.worst_ratio * 50000.0
    return chk


def sphere_angular_integrals(table: ImplicitMapTable, theta_min: float = 1e-6,
                             n_panels: int = 40, n_per_panel: int = 8):
    """(int sin^2(theta/2) bbar dsigma, int sin(theta/2) bbar dsigma).

    dsigma = 2 pi sin(theta) dtheta; bbar is supported on [0, pi/2] and
    behaves like s theta^(-2-2s) near 0, so panels are log-graded there.
    """
    theta, w = graded_panels(theta_min, math.pi / 2.0, n_panels, n_per_panel)
    bbar = np.array([b_bar_s(table, float(t)) for t in theta])
    base = 2.0 * math.pi * np.sin(theta) * bbar * w
    half = theta / 2.0
    return float(np.sum(np.sin(half) ** 2 * base)), float(np.sum(np.sin(half) * base))


def check_theta_integral(s_grid=S_GRID_SMALL, cache=None, slack=DEFAULT_SLACK):
    """Uniform boundedness of the two sphere moments of bbar_s for s < 1/8.

    The paper's constant is unspecified; the empirical sup over s_grid is
    reported. The check passes when every integral is finite; the ratio is
    normalized by the analytic value for the constant hard-sphere kernel
    times a generous factor of 20 to flag blow-up.
    """
    cache = cache or _TableCache()
    # constant kernel bbar = 1/2: integrals are pi/4 and 2*pi*sqrt(2)/6... see tests
    hs_sum = math.pi / 4.0 + math.pi * 2.0 ** 1.5 / 3.0
    values = {}
    worst = -math.inf
    worst_pt = None
    for s in s_grid:
        i2, i1 = sphere_angular_integrals(cache.get(s))
        total = i1 + i2
        values[s] = {"sin2_half": i2, "sin_half": i1, "sum": total}
        if total > worst:
            worst, worst_pt = total, (s,)
    finite = all(math.isfinite(v["sum"]) for v in values.values())
    return InequalityCheck(
        name="theta_integral_uniform",
        param_grid=f"s in {list(s_grid)} (regime s < 1/8)",
        worst_ratio=worst / (20.0 * hs_sum),
        worst_point=worst_pt,
        passed=finite and worst <= 20.0 * hs_sum * (1.0 + slack),
        slack=slack,
        extra={"empirical_C": worst, "per_s": {str(k): v for k, v in values.items()},
               "hard_sphere_sum": hs_sum},
    )


def run_all(s_grid=S_GRID, theta_grid=THETA_GRID, slack=DEFAULT_SLACK,
            n_nodes: int = 256, tol: float = DEFAULT_TOL) -> list[InequalityCheck]:
    """Full inequality suite on the default grids."""
    cache = _TableCache(n_nodes=n_nodes, tol=tol)
    checks: list[InequalityCheck] = []
    checks += check_lemma_2_1(s_grid, cache=cache, slack=slack)
    checks += check_lemma_2_2(s_grid, cache=cache, slack=slack)
    checks += check_lemma_2_3_and_2_4(s_grid, theta_grid, cache=cache, slack=slack)
    checks.append(check_y_prime_bound(s_grid, cache=cache, slack=slack))
    checks += check_H_s(s_grid, cache=cache, slack=slack)
    checks.append(check_theorem_1_1(s_grid, theta_grid, cache=cache, slack=slack))
    small = [s for s in s_grid if s < 0.125]
    if small:
        checks.append(check_theta_integral(small, cache=cache, slack=slack))
    return checks
