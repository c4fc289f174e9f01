"""Homogeneous Boltzmann collision operator for isotropic distributions.

The operator Q(f,f)(v) = int B(v - v_*, sigma) (f' f_*' - f f_*) dsigma dv_*
is reduced to radial form by fixing v = (0, 0, r) and integrating v_* in
spherical coordinates (azimuthal factor 2 pi) and sigma in deviation
angle theta and azimuth phi relative to the relative velocity. The
post-collision speeds

    |v'|^2   = cos^2(theta/2) |v|^2 + sin^2(theta/2) |v_*|^2
               + sin(theta) sin(beta) cos(phi) |v| |v_*|
    |v_*'|^2 = |v|^2 + |v_*|^2 - |v'|^2

make the reduction exact for isotropic f. The grazing singularity of the
inverse-power kernel is handled by an angular cutoff theta >= theta_cut
with a reported remainder scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import PchipInterpolator

from .bounds import InequalityCheck
from .kernel import DEFAULT_TOL, ImplicitMapTable, b_bar_s, build_map_table
from .quadrature import gauss_legendre, graded_panels

_INTERP_KINDS = ("linear", "monotone-cubic")
# tolerated negative radicand (roundoff) in post-collision speeds
_RADICAND_EPS = 1e-12


@dataclass(frozen=True)
class RadialDistribution:
    """Isotropic velocity distribution sampled on a radial speed grid.

    The interpolant evaluates to 0 beyond V_max; negative values are not
    clamped (solver drift is measured, not hidden).
    """

    r_nodes: np.ndarray
    values: np.ndarray
    V_max: float
    interp: str = "monotone-cubic"

    def __post_init__(self):
        object.__setattr__(self, "r_nodes", np.asarray(self.r_nodes, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.r_nodes.ndim != 1 or self.r_nodes.shape != self.values.shape:
            raise ValueError("r_nodes and values must be 1-d arrays of equal length")
        if np.any(np.diff(self.r_nodes) <= 0):
            raise ValueError("r_nodes must be strictly increasing")
        if self.r_nodes[0] < 0 or self.r_nodes[-1] > self.V_max:
            raise ValueError("r_nodes must lie in [0, V_max]")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("values must be finite")
        if self.interp not in _INTERP_KINDS:
            raise ValueError(f"interp must be one of {_INTERP_KINDS}, got {self.interp}")

    @cached_property
    def _interpolant(self):
        if self.interp == "linear":
            return None
        return PchipInterpolator(self.r_nodes, self.values, extrapolate=False)

    def evaluate(self, r):
        """f(r) for arbitrary speeds; 0 outside [r_nodes[0], V_max]."""
        r = np.asarray(r, dtype=float)
        if self.interp == "linear":
            out = np.interp(r, self.r_nodes, self.values, left=0.0, right=0.0)
        else:
            out = self._interpolant(r)
            out = np.where(np.isnan(out), 0.0, out)
        return out if out.shape else float(out)

    def with_values(self, values) -> "RadialDistribution":
        return RadialDistribution(self.r_nodes, values, self.V_max, self.interp)


def distribution_to_csv(f: RadialDistribution, path) -> None:
    """Write (r, f) rows with a header comment carrying V_max and interp."""
    with open(path, "w") as fh:
        fh.write(f"# V_max={f.V_max:.17g} interp={f.interp}\n")
        fh.write("r,f\n")
        for r, v in zip(f.r_nodes, f.values):
            fh.write(f"{r:.17g},{v:.17g}\n")


def distribution_from_csv(path) -> RadialDistribution:
    """Inverse of distribution_to_csv."""
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("#"):
            raise ValueError(f"{path}: missing metadata header line")
        meta = dict(item.split("=", 1) for item in header[1:].split())
        fh.readline()  # column names
        rows = np.loadtxt(fh, delimiter=",", ndmin=2)
    return RadialDistribution(rows[:, 0], rows[:, 1], float(meta["V_max"]),
                              meta.get("interp", "monotone-cubic"))


def _default_grid(n_r: int, V_max: float):
    return np.linspace(0.0, V_max, n_r)


def maxwellian(T: float = 1.0, n_r: int = 48, V_max: float = 8.0) -> RadialDistribution:
    """Unit-mass Maxwellian M(r) = (2 pi T)^(-3/2) exp(-r^2 / 2T)."""
    r = _default_grid(n_r, V_max)
    vals = (2.0 * math.pi * T) ** -1.5 * np.exp(-r * r / (2.0 * T))
    return RadialDistribution(r, vals, V_max)


def bimodal(T_cold: float = 0.5, T_hot: float = 1.5, weight: float = 0.5,
            n_r: int = 48, V_max: float = 8.0) -> RadialDistribution:
    """Unit-mass two-temperature Maxwellian mixture (non-equilibrium).

    With the defaults the mixture temperature is 1, so the k = 2 moment
    equals 1 + 3T = 4.
    """
    r = _default_grid(n_r, V_max)
    vals = (
        weight * (2.0 * math.pi * T_cold) ** -1.5 * np.exp(-r * r / (2.0 * T_cold))
        + (1.0 - weight) * (2.0 * math.pi * T_hot) ** -1.5 * np.exp(-r * r / (2.0 * T_hot))
    )
    return RadialDistribution(r, vals, V_max)


def compact_bump(center: float = 1.0, width: float = 0.8, n_r: int = 48,
                 V_max: float = 8.0) -> RadialDistribution:
    """Unit-mass smooth bump supported on |r - center| < width."""
    r = _default_grid(n_r, V_max)
    u = (r - center) / width
    with np.errstate(divide="ignore", over="ignore"):
        vals = np.where(np.abs(u) < 1.0, np.exp(-1.0 / np.maximum(1.0 - u * u, 1e-300)), 0.0)
    raw = RadialDistribution(r, vals, V_max)
    return raw.with_values(vals / l1k_norm(raw, 0))


# -- weighted norms and entropy ----------------------------------------------


def _norm_quad(f: RadialDistribution, n_panels: int = 16, n_per_panel: int = 16):
    """Fine composite Gauss-Legendre rule on [0, V_max] for norm integrals."""
    edges = np.linspace(0.0, f.V_max, n_panels + 1)
    xs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        x, w = gauss_legendre(n_per_panel, lo, hi)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def l1k_norm(f: RadialDistribution, k: float) -> float:
    """|f|_{L1_k} = 4 pi int |f(r)| <r>^k r^2 dr, <r> = (1 + r^2)^(1/2)."""
    if k < 0:
        raise ValueError(f"moment order k must be >= 0, got {k}")
    r, w = _norm_quad(f)
    fr = np.abs(f.evaluate(r))
    return float(4.0 * math.pi * np.sum(w * fr * (1.0 + r * r) ** (k / 2.0) * r * r))


def w11k_seminorm(f: RadialDistribution, k: float) -> float:
    """Radial-derivative seminorm 4 pi int |f'(r)| <r>^k r^2 dr.

    The derivative is a node finite difference; the r = 0 treatment is a
    diagnostic-only convention (smooth isotropic f has f'(0) = 0).
    """
    if k < 0:
        raise ValueError(f"moment order k must be >= 0, got {k}")
    r = f.r_nodes
    df = np.gradient(f.values, r)
    df[0] = 0.0
    wgt = np.abs(df) * (1.0 + r * r) ** (k / 2.0) * r * r
    return float(4.0 * math.pi * np.trapezoid(wgt, r))


def entropy(f: RadialDistribution) -> float:
    """H(f) = 4 pi int f log f r^2 dr with f log f = 0 wherever f <= 0."""
    r, w = _norm_quad(f)
    fr = f.evaluate(r)
    flogf = np.where(fr > 0.0, fr * np.log(np.where(fr > 0.0, fr, 1.0)), 0.0)
    return float(4.0 * math.pi * np.sum(w * flogf * r * r))


def llogl(f: RadialDistribution) -> float:
    """L log L size 4 pi int |f| log(1 + |f|) r^2 dr (nonnegative)."""
    r, w = _norm_quad(f)
    fr = np.abs(f.evaluate(r))
    return float(4.0 * math.pi * np.sum(w * fr * np.log1p(fr) * r * r))


# -- collision geometry ------------------------------------------------------


@dataclass(frozen=True)
class CollisionGeometry:
    """Scattering geometry: speeds, inter-velocity angle beta, deviation
    angle theta and azimuth phi_az of sigma about the relative velocity."""

    v_speed: float
    vstar_speed: float
    beta: float
    theta: float
    phi_az: float

    def __post_init__(self):
        if self.v_speed < 0 or self.vstar_speed < 0:
            raise ValueError("speeds must be nonnegative")
        if not 0.0 <= self.beta <= math.pi:
            raise ValueError(f"beta must lie in [0, pi], got {self.beta}")
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")


def post_collision_speeds(geom: CollisionGeometry):
    """(|v'|, |v_*'|); the energy sum is preserved exactly by construction."""
    r, rs = geom.v_speed, geom.vstar_speed
    e = r * r + rs * rs
    half = geom.theta / 2.0
    vp2 = (
        math.cos(half) ** 2 * r * r
        + math.sin(half) ** 2 * rs * rs
        + math.sin(geom.theta) * math.sin(geom.beta) * math.cos(geom.phi_az) * r * rs
    )
    vps2 = e - vp2
    for q in (vp2, vps2):
        if q < -_RADICAND_EPS * max(1.0, e):
            raise RuntimeError(f"negative post-collision radicand {q}")
    return math.sqrt(max(vp2, 0.0)), math.sqrt(max(vps2, 0.0))


# -- kernels -----------------------------------------------------------------


class HardSphereKernel:
    """B^0 = (1/4) |v - v_*|; symmetrized angular factor 1/2 on [0, pi/2]."""

    name = "hard-sphere"
    gamma = 1.0

    def angular_factor(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.where(theta <= math.pi / 2.0, 0.5, 0.0)


class InversePowerKernel:
    """B^s = |v - v_*|^(1-4s) bbar_s(theta) with the exact angular kernel."""

    def __init__(self, s: float, n_nodes: int = 256, tol: float = DEFAULT_TOL):
        self.s = s
        self.name = f"inverse-power(s={s:g})"
        self.table: ImplicitMapTable = build_map_table(s, n_nodes, tol)

    @property
    def gamma(self) -> float:
        return 1.0 - 4.0 * self.s

    def angular_factor(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.array([b_bar_s(self.table, float(t)) for t in theta])


def make_kernel(name: str, s: float | None = None):
    if name == "hard-sphere":
        return HardSphereKernel()
    if name == "inverse-power":
        if s is None or not 0.0 < s < 0.125:
            raise ValueError(f"inverse-power kernel requires 0 < s < 1/8, got {s}")
        return InversePowerKernel(s)
    raise ValueError(f"unknown kernel {name!r}")


# -- solver configuration ----------------------------------------------------


@dataclass(frozen=True)
class SolverConfig:
    """Resolution and time-stepping knobs shared by eval_Q and the solver."""

    n_r: int = 48
    V_max: float = 8.0
    n_quad: tuple = (48, 24, 32, 12)  # (n_rstar, n_beta, n_theta, n_phi)
    theta_cut: float = 1e-3
    dt: float | None = None  # None: 0.25 / max loss frequency
    t_end: float = 1.0
    k_weights: tuple = (2.0,)

    def __post_init__(self):
        if not 0.0 < self.theta_cut <= 0.1:
            raise ValueError(f"theta_cut must lie in (0, 0.1], got {self.theta_cut}")
        if self.dt is not None and self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if len(self.n_quad) != 4 or any(n < 4 for n in self.n_quad):
            raise ValueError(f"n_quad must be four counts >= 4, got {self.n_quad}")
        if self.n_r < 4:
            raise ValueError(f"n_r must be >= 4, got {self.n_r}")


def _theta_rule(cfg: SolverConfig):
    """Log-graded composite panels on [theta_cut, pi/2]; the symmetrized
    angular factor behaves like s theta^(-2-2s) near the cutoff."""
    n_theta = cfg.n_quad[2]
    n_per = 4
    return graded_panels(cfg.theta_cut, math.pi / 2.0, max(n_theta // n_per, 1), n_per)


def cutoff_remainder(kernel, cfg: SolverConfig) -> float:
    """Scale of the neglected grazing sector [0, theta_cut].

    The difference f' f_*' - f f_* is O(theta), so the remainder scales
    like the theta-weighted tail of the angular factor.
    """
    eps = cfg.theta_cut
    if isinstance(kernel, InversePowerKernel):
        s = kernel.s
        return s * eps ** (1.0 - 2.0 * s) / (1.0 - 2.0 * s) + 0.25 * eps * eps
    return 0.25 * eps * eps


class _AngularRule:
    """Precomputed (theta, phi) tensor weights for one kernel and config."""

    def __init__(self, kernel, cfg: SolverConfig):
        th, w_th = _theta_rule(cfg)
        ph, w_ph = gauss_legendre(cfg.n_quad[3], 0.0, math.pi)
        bbar = kernel.angular_factor(th)
        # azimuth integrated over [0, pi] and doubled (cos phi symmetry)
        self.wang = (w_th * bbar * np.sin(th))[:, None] * (2.0 * w_ph)[None, :]
        self.s_ang = float(self.wang.sum())
        self.cos2_half = np.cos(th / 2.0) ** 2
        self.sin2_half = np.sin(th / 2.0) ** 2
        self.sin_theta = np.sin(th)
        self.cos_phi = np.cos(ph)


_ANGULAR_CACHE: dict = {}


def _angular_rule(kernel, cfg: SolverConfig) -> _AngularRule:
    key = (kernel.name, cfg.n_quad, cfg.theta_cut)
    rule = _ANGULAR_CACHE.get(key)
    if rule is None:
        rule = _AngularRule(kernel, cfg)
        _ANGULAR_CACHE[key] = rule
    return rule


def eval_Q(f: RadialDistribution, kernel, cfg: SolverConfig) -> RadialDistribution:
    """Collision integral Q(f,f) on the nodes of f.

    Nested quadrature over (r_*, cos beta, theta, phi): Gauss-Legendre in
    the first two and in phi, log-graded panels in theta. Each output
    node is independent.
    """
    ang = _angular_rule(kernel, cfg)
    rs, w_rs = gauss_legendre(cfg.n_quad[0], 0.0, cfg.V_max)
    x, w_x = gauss_legendre(cfg.n_quad[1], -1.0, 1.0)
    gamma = kernel.gamma
    f_rs = np.asarray(f.evaluate(rs))
    sin_beta = np.sqrt(np.maximum(1.0 - x * x, 0.0))
    # (r_*, beta) measure: dv_* = 2 pi r_*^2 sin(beta) dr* dbeta, dx = sin(beta) dbeta
    w_ab = (w_rs * rs * rs * 2.0 * math.pi)[:, None] * w_x[None, :]
    rs2 = rs * rs

    out = np.empty_like(f.values)
    c2 = ang.cos2_half[None, None, :, None]
    s2 = ang.sin2_half[None, None, :, None]
    st = ang.sin_theta[None, None, :, None]
    cf = ang.cos_phi[None, None, None, :]
    for i, r in enumerate(f.r_nodes):
        r2 = r * r
        rel2 = np.maximum(r2 + rs2[:, None] - 2.0 * r * rs[:, None] * x[None, :], 0.0)
        w1 = w_ab * rel2 ** (0.5 * gamma) if gamma != 0.0 else w_ab
        cross = (r * rs)[:, None] * sin_beta[None, :]
        vp2 = c2 * r2 + s2 * rs2[:, None, None, None] + cross[:, :, None, None] * st * cf
        vp2 = np.maximum(vp2, 0.0)
        vps2 = np.maximum(r2 + rs2[:, None, None, None] - vp2, 0.0)
        gain = np.asarray(f.evaluate(np.sqrt(vp2))) * np.asarray(f.evaluate(np.sqrt(vps2)))
        g_ab = np.tensordot(gain, ang.wang, axes=([2, 3], [0, 1]))
        out[i] = np.sum(w1 * (g_ab - ang.s_ang * f.values[i] * f_rs[:, None]))
    return f.with_values(out)


def invariant_pairing(q: RadialDistribution, k: float) -> float:
    """Direct pairing 4 pi int Q(r) <r>^k r^2 dr of an eval_Q output."""
    r, w = _norm_quad(q)
    qr = q.evaluate(r)
    return float(4.0 * math.pi * np.sum(w * qr * (1.0 + r * r) ** (k / 2.0) * r * r))


def weak_form_pairing(f: RadialDistribution, kernel, cfg: SolverConfig,
                      psi: str) -> float:
    """Weak-form pairing int Q(f,f) psi dv in the symmetrized representation

        (1/2) int B f f_* (psi' + psi_*' - psi - psi_*) dsigma dv dv_*

    psi is "mass" (1) or "energy" (|v|^2). Both are collision invariants;
    the integrand vanishes pointwise up to roundoff, so the value
    measures the arithmetic of the discrete geometry, not quadrature.
    """
    if psi not in ("mass", "energy"):
        raise ValueError(f"psi must be 'mass' or 'energy', got {psi}")
    ang = _angular_rule(kernel, cfg)
    rs, w_rs = gauss_legendre(cfg.n_quad[0], 0.0, cfg.V_max)
    x, w_x = gauss_legendre(cfg.n_quad[1], -1.0, 1.0)
    gamma = kernel.gamma
    f_rs = np.asarray(f.evaluate(rs))
    sin_beta = np.sqrt(np.maximum(1.0 - x * x, 0.0))
    rs2 = rs * rs
    c2 = ang.cos2_half[None, None, :, None]
    s2 = ang.sin2_half[None, None, :, None]
    st = ang.sin_theta[None, None, :, None]
    cf = ang.cos_phi[None, None, None, :]
    total = 0.0
    for i, r in enumerate(rs):
        r2 = rs2[i]
        rel2 = np.maximum(r2 + rs2[:, None] - 2.0 * r * rs[:, None] * x[None, :], 0.0)
        w1 = w_rs[i] * r2 * 4.0 * math.pi \
            * (w_rs * rs2 * 2.0 * math.pi)[:, None] * w_x[None, :]
        if gamma != 0.0:
            w1 = w1 * rel2 ** (0.5 * gamma)
        cross = (r * rs)[:, None] * sin_beta[None, :]
        vp2 = c2 * r2 + s2 * rs2[:, None, None, None] + cross[:, :, None, None] * st * cf
        vps2 = r2 + rs2[:, None, None, None] - vp2
        if psi == "mass":
            defect = np.zeros_like(vp2)  # 1 + 1 - 1 - 1
        else:
            defect = vp2 + vps2 - r2 - rs2[:, None, None, None]
        d_ab = np.tensordot(defect, ang.wang, axes=([2, 3], [0, 1]))
        total += 0.5 * np.sum(w1 * d_ab * f_rs[i] * f_rs[:, None])
    return float(total)


def loss_frequency(f: RadialDistribution, gamma: float):
    """nu(r) = int |v - v_*|^gamma f(v_*) dv_*, as a vectorized callable.

    The beta integral has the closed form
    [(r + r_*)^(gamma+2) - |r - r_*|^(gamma+2)] / ((gamma + 2) r r_*),
    with limit 2 max(r, r_*)^gamma as r r_* -> 0.
    """
    rs, w_rs = gauss_legendre(256, 0.0, f.V_max)
    f_rs = np.asarray(f.evaluate(rs))
    base = 2.0 * math.pi * w_rs * rs * rs * f_rs

    def nu(r):
        r = np.asarray(r, dtype=float)
        rr = r[..., None]
        prod = rr * rs
        with np.errstate(divide="ignore", invalid="ignore"):
            bracket = ((rr + rs) ** (gamma + 2.0) - np.abs(rr - rs) ** (gamma + 2.0)) / (
                (gamma + 2.0) * prod
            )
        bracket = np.where(prod > 0.0, bracket, 2.0 * np.maximum(rr, rs) ** gamma)
        out = np.sum(base * bracket, axis=-1)
        return out if out.shape else float(out)

    return nu


def povzner_sample_check(k: float, n_samples: int, seed: int = 0) -> InequalityCheck:
    """Monte Carlo estimate of the constant C_k in the weight-splitting
    inequalities for <v'>^k and <v_*'>^k.

    Samples speeds uniformly in [0, 10] and angles over their full
    ranges; reports the empirical sup of LHS / bracket for both
    inequalities. The check passes when the sup is finite.
    """
    if k < 2:
        raise ValueError(f"povzner check requires k >= 2, got {k}")
    rng = np.random.default_rng(seed)
    v = rng.uniform(0.0, 10.0, n_samples)
    vs = rng.uniform(0.0, 10.0, n_samples)
    beta = rng.uniform(0.0, math.pi, n_samples)
    theta = rng.uniform(0.0, math.pi, n_samples)
    phi = rng.uniform(0.0, 2.0 * math.pi, n_samples)

    half = theta / 2.0
    c, s_ = np.cos(half), np.sin(half)
    vp2 = c * c * v * v + s_ * s_ * vs * vs + np.sin(theta) * np.sin(beta) * np.cos(phi) * v * vs
    vp2 = np.maximum(vp2, 0.0)
    vps2 = np.maximum(v * v + vs * vs - vp2, 0.0)
    av = np.sqrt(1.0 + v * v)
    avs = np.sqrt(1.0 + vs * vs)
    avp = np.sqrt(1.0 + vp2)
    avps = np.sqrt(1.0 + vps2)

    lhs1 = avp ** k - c ** k * av ** k - s_ ** k * avs ** k
    lhs2 = avps ** k - s_ ** k * av ** k - c ** k * avs ** k
    br1 = c ** (k - 1) * av ** (k - 1) * s_ * avs + c * av * s_ ** (k - 1) * avs ** (k - 1)
    br2 = s_ ** (k - 1) * av ** (k - 1) * c * avs + s_ * av * c ** (k - 1) * avs ** (k - 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = np.where(lhs1 > 0.0, lhs1 / br1, 0.0)
        r2 = np.where(lhs2 > 0.0, lhs2 / br2, 0.0)
    c_k = float(max(np.max(r1), np.max(r2)))
    i1, i2 = int(np.argmax(r1)), int(np.argmax(r2))
    worst = i1 if np.max(r1) >= np.max(r2) else i2
    return InequalityCheck(
        name=f"povzner_k_{k:g}",
        param_grid=f"{n_samples} uniform samples, speeds in [0, 10], seed {seed}",
        worst_ratio=c_k,
        worst_point=(float(v[worst]), float(vs[worst]), float(beta[worst]),
                     float(theta[worst]), float(phi[worst])),
        passed=math.isfinite(c_k),
        slack=0.0,
        extra={"C_k": c_k, "sup_first": float(np.max(r1)), "sup_second": float(np.max(r2))},
    )
