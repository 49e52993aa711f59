"""Per-Fourier-mode radial solver for the circle-times-cone edge operator.

Each Fourier mode n and separated eigenvalue mu reduces the operator to

    ((r d/dr)^2 - (n^2 r^2 + mu^2)) y = z(r)      on (0, 1],

solved for n != 0 through the I/K Green kernel (Wronskian exactly 1/x)

    y(r) = -I_mu(|n|r) int_r^1 K_mu(|n|s) z(s) ds/s
           -K_mu(|n|r) int_0^r I_mu(|n|s) z(s) ds/s

and for n = 0, mu > 0 through the double quadrature
y = r^mu int_0^r (int_0^s t^mu z dt/t) s^(-2mu) ds/s.  Homogeneous constants
are pinned to zero.  The splitting captures the I-mode coefficient

    c = (1/|n|) int_0^1 K_mu(|n|s) z(s) ds/s

(the Gamma-limit prefactor of the kernel is identically 1), bounds it by
C |n|^(-dpp-2) ||z|| with C^2 = int_0^inf K_mu^2(s) s^(2 dpp + 4) ds/s, and
enumerates the obstruction modes e^{in theta} built from (K_0, K_1) against
a closed-and-coclosed link 2-form, two per nonzero Fourier mode.

Grids are log-spaced so (r d/dr) is a uniform stencil; quadratures are
composite Gauss-Legendre per grid interval on the smooth factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from .bessel import bessel_i, bessel_k

__all__ = [
    "UnsupportedMode",
    "QuadratureFailure",
    "WeightOrderViolation",
    "DivergentConstant",
    "ModeProblem",
    "SplitSolution",
    "ObstructionMode",
    "log_grid",
    "smooth_cutoff",
    "solve_mode",
    "operator_residual",
    "split_solution",
    "coefficient_bound_check",
    "kernel_modes",
    "no_decaying_kernel_check",
]


class UnsupportedMode(ValueError):
    """n = 0, mu = 0 has no decaying kernel normalization here."""


class QuadratureFailure(RuntimeError):
    """Non-finite values in the Green-kernel quadrature."""


class WeightOrderViolation(ValueError):
    """Weights must satisfy -mu < delta' < mu < delta''."""


class DivergentConstant(ValueError):
    """The bound constant integral diverges at 0 for this weight."""


def log_grid(r_min: float = 1e-8, r_max: float = 1.0, num: int = 2048) -> np.ndarray:
    return np.geomspace(r_min, r_max, num)


def _bump(t):
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_cutoff(s) -> np.ndarray | float:
    """C-infinity chi with chi = 1 for s <= 1 and chi = 0 for s >= 2."""
    arr = np.atleast_1d(np.asarray(s, dtype=float))
    up = _bump(2.0 - arr)
    down = _bump(arr - 1.0)
    out = up / np.where(up + down > 0, up + down, 1.0)
    return float(out[0]) if np.ndim(s) == 0 else out


@dataclass(frozen=True)
class ModeProblem:
    """One separated radial problem: mode n, eigenvalue mu, sampled rhs."""

    n: int
    mu: float
    grid: np.ndarray
    rhs: np.ndarray
    support_max: float
    rhs_fn: object = None

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        z = np.asarray(self.rhs, dtype=float)
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "rhs", z)
        if g.ndim != 1 or np.any(np.diff(g) <= 0) or g[0] <= 0 or g[-1] > 1 + 1e-12:
            raise ValueError("grid must be increasing inside (0, 1]")
        if z.shape != g.shape:
            raise ValueError("rhs must be sampled on the grid")
        if self.mu < 0:
            raise ValueError("mu must be >= 0")
        if not self.support_max < 1.0:
            raise ValueError("rhs support must be bounded away from r = 1")
        if np.any(z[g > self.support_max] != 0.0):
            raise ValueError("rhs does not vanish beyond its support record")

    def rhs_at(self, s: np.ndarray) -> np.ndarray:
        if self.rhs_fn is not None:
            vals = np.asarray(self.rhs_fn(s), dtype=float)
        else:
            spline = CubicSpline(np.log(self.grid), self.rhs)
            vals = spline(np.log(s))
        return np.where(s > self.support_max, 0.0, vals)


@dataclass(frozen=True)
class SplitSolution:
    """y = y_low + y_high with y_low = -I_mu(|n|r) * cutoff * |n| * c_low."""

    y: np.ndarray
    c_low: float
    y_high: np.ndarray
    delta_pp: float
    c_low_regularized: float
    shell_norms: np.ndarray


_GL_NODES, _GL_WEIGHTS = leggauss(8)


def _interval_nodes(grid: np.ndarray):
    """Gauss-Legendre nodes/weights per interval in the log variable."""
    u = np.log(grid)
    mid = 0.5 * (u[1:] + u[:-1])
    half = 0.5 * np.diff(u)
    nodes = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    weights = half[:, None] * np.repeat(_GL_WEIGHTS[None, :], len(half), axis=0)
    return np.exp(nodes), weights


def solve_mode(problem: ModeProblem) -> np.ndarray:
    """Particular solution on the grid; homogeneous constants are zero."""
    n, mu, grid = problem.n, problem.mu, problem.grid
    if n == 0 and mu == 0.0:
        raise UnsupportedMode("n = 0, mu = 0 is not invertible in this family")
    s_nodes, w = _interval_nodes(grid)
    z_nodes = problem.rhs_at(s_nodes.ravel()).reshape(s_nodes.shape)
    if n != 0:
        a = abs(n)
        K_nodes = bessel_k(mu, (a * s_nodes).ravel()).reshape(s_nodes.shape)
        I_nodes = bessel_i(mu, (a * s_nodes).ravel()).reshape(s_nodes.shape)
        kz = np.sum(K_nodes * z_nodes * w, axis=1)
        iz = np.sum(I_nodes * z_nodes * w, axis=1)
        # int_r^1 K z du at grid points (grid[-1] = support side)
        tail = np.concatenate([np.cumsum(kz[::-1])[::-1], [0.0]])
        head = np.concatenate([[0.0], np.cumsum(iz)])
        y = (-bessel_i(mu, a * grid) * tail - bessel_k(mu, a * grid) * head)
    else:
        # inner G(s) = int_0^s t^mu z dt/t, then y = r^mu int_0^r G s^-2mu ds/s
        G_nodes, G_grid = _inner_cumulative(problem, s_nodes, z_nodes, w)
        hz = np.sum(G_nodes * s_nodes ** (-2.0 * mu) * w, axis=1)
        H = np.concatenate([[0.0], np.cumsum(hz)])
        y = grid ** mu * H
    if not np.all(np.isfinite(y)):
        raise QuadratureFailure("non-finite quadrature output")
    return y


def _inner_cumulative(problem: ModeProblem, s_nodes, z_nodes, w):
    """G(s) = int_0^s t^mu z dt/t at the outer Gauss nodes and grid points.

    Integrals below grid[0] are dropped (the weighted space forces decay
    there); inside each interval a nested 4-point rule reaches each node.
    """
    mu, grid = problem.mu, problem.grid
    gz = np.sum(s_nodes ** mu * z_nodes * w, axis=1)
    G_grid = np.concatenate([[0.0], np.cumsum(gz)])
    inner_x, inner_w = leggauss(4)
    u = np.log(grid)
    lo = u[:-1, None]
    node_u = np.log(s_nodes)
    half = 0.5 * (node_u - lo)
    mid = 0.5 * (node_u + lo)
    # shape (intervals, 8, 4): nested nodes from interval start to each node
    tt = np.exp(mid[:, :, None] + half[:, :, None] * inner_x[None, None, :])
    zz = problem.rhs_at(tt.ravel()).reshape(tt.shape)
    seg = np.sum(tt ** mu * zz * (half[:, :, None] * inner_w[None, None, :]),
                 axis=2)
    return G_grid[:-1, None] + seg, G_grid


def operator_residual(problem: ModeProblem, y: np.ndarray) -> float:
    """max |((r d/dr)^2 - (n^2 r^2 + mu^2)) y - z| / (1 + sup|z|), interior.

    Fourth-order stencil in log r.
    """
    u = np.log(problem.grid)
    h = u[1] - u[0]
    if np.max(np.abs(np.diff(u) - h)) > 1e-9 * h:
        raise ValueError("operator_residual requires a uniform log grid")
    d2 = (-y[:-4] + 16 * y[1:-3] - 30 * y[2:-2] + 16 * y[3:-1] - y[4:]) / (12 * h * h)
    mid = slice(2, -2)
    r = problem.grid[mid]
    lhs = d2 - (problem.n ** 2 * r ** 2 + problem.mu ** 2) * y[mid]
    return float(np.max(np.abs(lhs - problem.rhs[mid])) /
                 (1.0 + np.max(np.abs(problem.rhs))))


def _kz_integral(problem: ModeProblem) -> float:
    """int_0^1 K_mu(|n|s) z(s) ds/s by per-interval Gauss-Legendre."""
    s_nodes, w = _interval_nodes(problem.grid)
    z_nodes = problem.rhs_at(s_nodes.ravel()).reshape(s_nodes.shape)
    K_nodes = bessel_k(problem.mu, (abs(problem.n) * s_nodes).ravel())
    return float(np.sum(K_nodes.reshape(s_nodes.shape) * z_nodes * w))


def split_solution(problem: ModeProblem, delta_p: float,
                   delta_pp: float) -> SplitSolution:
    """Split y into the captured I-mode and a remainder in the dpp space.

    Requires -mu < delta_p < mu < delta_pp.  The remainder's dyadic shell
    norms toward r = 0 certify membership in the delta_pp-weighted space.
    For n = 0 the captured piece is the r^mu coefficient of the double
    quadrature taken over the whole support.
    """
    mu = problem.mu
    if not (-mu < delta_p < mu < delta_pp):
        raise WeightOrderViolation(
            f"need -mu < delta' < mu < delta'', got ({delta_p}, {mu}, {delta_pp})")
    y = solve_mode(problem)
    grid = problem.grid
    if problem.n != 0:
        a = abs(problem.n)
        c_low = _kz_integral(problem) / a
        y_low = -bessel_i(mu, a * grid) * smooth_cutoff(2.0 * a * grid) * a * c_low
        reg = (abs(problem.n + 0.5) / a) ** mu * c_low
    else:
        s_nodes, w = _interval_nodes(grid)
        z_nodes = problem.rhs_at(s_nodes.ravel()).reshape(s_nodes.shape)
        G_nodes, _ = _inner_cumulative(problem, s_nodes, z_nodes, w)
        c_low = float(np.sum(G_nodes * s_nodes ** (-2.0 * mu) * w))
        y_low = smooth_cutoff(2.0 * grid) * grid ** mu * c_low
        reg = 0.5 ** mu * c_low
    y_high = y - y_low
    shells = _shell_norms(grid, y_high, delta_pp)
    return SplitSolution(y=y, c_low=float(c_low), y_high=y_high,
                         delta_pp=delta_pp, c_low_regularized=float(reg),
                         shell_norms=shells)


def _shell_norms(grid: np.ndarray, vals: np.ndarray, delta: float,
                 shells: int = 16) -> np.ndarray:
    """Weighted L2 norms on dyadic shells [2^-k-1, 2^-k] descending to 0."""
    u = np.log(grid)
    w = np.gradient(u)
    out = []
    for k in range(shells):
        lo, hi = 2.0 ** (-k - 1), 2.0 ** (-k)
        mask = (grid >= lo) & (grid < hi)
        if not mask.any():
            break
        out.append(math.sqrt(float(np.sum(
            (grid[mask] ** (-delta) * vals[mask]) ** 2 * w[mask]))))
    return np.array(out)


@lru_cache(maxsize=64)
def _bound_constant_sq(mu: float, delta_pp: float) -> float:
    val, _ = quad(lambda s: bessel_k(mu, s) ** 2 * s ** (2 * delta_pp + 3),
                  0.0, np.inf, limit=200)
    return val


def coefficient_bound_check(problem: ModeProblem,
                            delta_pp: float) -> tuple[float, float]:
    """(|c|, C |n|^(-dpp-2) ||z||): the Cauchy-Schwarz certificate pair.

    C^2 = int_0^inf K_mu^2(s) s^(2 dpp+4) ds/s diverges at 0 when
    2 dpp + 4 <= 2 mu; ||z|| is the radial delta''+2 weighted norm.
    """
    mu = problem.mu
    if problem.n == 0:
        raise UnsupportedMode("the |n|-decay bound concerns n != 0")
    if 2.0 * delta_pp + 4.0 <= 2.0 * mu:
        raise DivergentConstant(
            f"2 dpp + 4 = {2 * delta_pp + 4} <= 2 mu = {2 * mu}")
    c = abs(_kz_integral(problem)) / abs(problem.n)
    C2 = _bound_constant_sq(mu, delta_pp)
    s_nodes, w = _interval_nodes(problem.grid)
    z_nodes = problem.rhs_at(s_nodes.ravel()).reshape(s_nodes.shape)
    znorm = math.sqrt(float(np.sum(
        (s_nodes ** (-(delta_pp + 2.0)) * z_nodes) ** 2 * w)))
    bound = math.sqrt(C2) * abs(problem.n) ** (-delta_pp - 2.0) * znorm
    return c, bound


@dataclass(frozen=True)
class ObstructionMode:
    """One verified (d+d*)-closed mode e^{in theta} (K_0, sign(n) K_1).

    Scalar identities checked on the grid: K_0' + K_1 = 0 and the modified
    Bessel equations of orders 0 and 1; leading behaviours -log(|n|r) and
    (|n|r)^-1 recorded (form rates r^-2 log r and r^-3).
    """

    n: int
    identity_residual: float
    ode0_residual: float
    ode1_residual: float
    log_ratio: float
    inverse_ratio: float
    normal_form: str


def _scaled_ode_residual(grid: np.ndarray, y: np.ndarray, a: float,
                         mu: float) -> float:
    u = np.log(grid)
    h = u[1] - u[0]
    d2 = (-y[:-4] + 16 * y[1:-3] - 30 * y[2:-2] + 16 * y[3:-1] - y[4:]) / (12 * h * h)
    r = grid[2:-2]
    coeff = a * a * r * r + mu * mu
    resid = d2 - coeff * y[2:-2]
    return float(np.max(np.abs(resid) / (1.0 + coeff * np.abs(y[2:-2]))))


def kernel_modes(n_max: int, r_grid: np.ndarray | None = None) -> list[ObstructionMode]:
    """The 2 n_max obstruction modes for 0 < |n| <= n_max, each verified.

    The count grows without bound with n_max: the assertable form of the
    infinite-dimensional obstruction space.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    grid = log_grid(num=4096) if r_grid is None else np.asarray(r_grid)
    u = np.log(grid)
    h = u[1] - u[0]
    modes = []
    for n in [s * k for k in range(1, n_max + 1) for s in (1, -1)]:
        a = abs(n)
        k0 = bessel_k(0.0, a * grid)
        k1 = bessel_k(1.0, a * grid)
        dk0 = (k0[:-4] - 8 * k0[1:-3] + 8 * k0[3:-1] - k0[4:]) / (12 * h)
        ident = np.abs(dk0 + (a * grid * k1)[2:-2])
        ident_res = float(np.max(ident / (1.0 + (a * grid * k1)[2:-2])))
        small = grid[grid <= 1e-6 / a]
        if small.size == 0:
            small = grid[:1]
        rs = float(small[-1])
        log_ratio = float(bessel_k(0.0, a * rs) / (-math.log(a * rs)))
        inverse_ratio = float(bessel_k(1.0, a * rs) * (a * rs))
        modes.append(ObstructionMode(
            n=n,
            identity_residual=ident_res,
            ode0_residual=_scaled_ode_residual(grid, k0, a, 0.0),
            ode1_residual=_scaled_ode_residual(grid, k1, a, 1.0),
            log_ratio=log_ratio,
            inverse_ratio=inverse_ratio,
            normal_form=("sin(theta) r^-1 dr ^ phi_21" if a == 1
                         else f"e^({n}i theta) (|n|r)^-1 dr ^ phi_21"),
        ))
    return modes


def no_decaying_kernel_check(mu_hat: float, delta: float,
                             grid: np.ndarray | None = None) -> bool:
    """True when no combination of I, K at order sqrt(mu_hat) decays two-sidedly.

    Certified on dyadic shells: the I branch has divergent delta-weighted
    shell norms toward infinity, the K branch toward zero, so the 2x2
    admissibility system only has the zero solution.  Valid input delta > -2.
    """
    if delta <= -2.0:
        raise ValueError("the statement concerns delta > -2")
    order = math.sqrt(mu_hat)
    grid = np.geomspace(1e-6, 60.0, 4096) if grid is None else np.asarray(grid)
    weight = delta + 2.0  # hat-modes carry the built-in r^-2
    i_vals = bessel_i(order, grid)
    k_vals = bessel_k(order, grid)
    u = np.log(grid)
    w = np.gradient(u)

    def shell(vals, lo, hi):
        mask = (grid >= lo) & (grid < hi)
        return math.sqrt(float(np.sum(
            (grid[mask] ** (-weight) * vals[mask]) ** 2 * w[mask])))

    top = [shell(i_vals, 2.0 ** k, 2.0 ** (k + 1)) for k in range(1, 5)]
    i_diverges = all(b > a for a, b in zip(top, top[1:])) and top[-1] > 10 * top[0]
    bottom = [shell(k_vals, 2.0 ** (-k - 1), 2.0 ** (-k)) for k in range(4, 17)]
    k_diverges = all(b >= a * 0.999 for a, b in zip(bottom, bottom[1:])) \
        and bottom[-1] > 2 * bottom[0]
    return bool(i_diverges and k_diverges)
