"""Radial profiles and potentials for the smoothed quadric cone.

The quadric  C_eps = {z_1^2 + ... + z_{n+1}^2 = eps}  in C^{n+1} carries, for
eps != 0, the rotation-invariant Ricci-flat Kahler potential

    u = |eps|^((n-1)/n) * f(arccosh(|z|^2 / |eps|))

where the profile f solves  (f'(w)^n)' = n sinh^{n-1}(w),  f(0) = f'(0) = 0,
and for eps = 0 the cone potential

    u = (n/(n-1))^((n+1)/n) * (|z|^2)^((n-1)/n).

Both satisfy, in the chart that solves for the last coordinate, the
Monge-Ampere identity  det(d^2 u / dz_j dzbar_k) * |z_last|^2 = 1  (n = 3),
which monge_ampere_residual checks by finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import CubicHermiteSpline

__all__ = [
    "GridTooCoarse",
    "OriginPoint",
    "OutOfProfileRange",
    "BelowVertex",
    "BranchCut",
    "StepTooLarge",
    "RadialProfile",
    "QuadricPoint",
    "solve_profile",
    "cone_potential",
    "smoothing_potential",
    "stenzel_potential_fn",
    "cone_potential_fn",
    "monge_ampere_residual",
    "random_chart_point",
]


class GridTooCoarse(ValueError):
    """Profile grid fails the ODE residual check."""


class OriginPoint(ValueError):
    """Cone potential evaluated at z = 0."""


class OutOfProfileRange(ValueError):
    """arccosh(|z|^2/|eps|) exceeds the solved profile range."""


class BelowVertex(ValueError):
    """|z|^2 < |eps| cannot happen on the quadric; bad evaluation point."""


class BranchCut(ValueError):
    """The chart coordinate being solved for degenerates at this point."""


class StepTooLarge(ValueError):
    """Richardson halving disagrees; the finite-difference step is unusable."""


@dataclass(frozen=True)
class RadialProfile:
    """Sampled solution (w, f, f') of the profile quadrature."""

    n: int
    w: np.ndarray
    f: np.ndarray
    fprime: np.ndarray

    @property
    def w_max(self) -> float:
        return float(self.w[-1])

    def interpolator(self) -> CubicHermiteSpline:
        """Cubic Hermite interpolant of f built from the exact derivatives.

        Monotone for these convex profiles; keeps the potential convex
        across grid joints.
        """
        return CubicHermiteSpline(self.w, self.f, self.fprime)


@dataclass(frozen=True)
class QuadricPoint:
    """A point of {sum z_j^2 = eps} with constraint residual enforced."""

    z: np.ndarray
    eps: complex = 0.0

    def __post_init__(self):
        z = np.asarray(self.z, dtype=complex)
        object.__setattr__(self, "z", z)
        res = abs(np.sum(z * z) - self.eps)
        if res > 1e-12 * (1.0 + float(np.sum(np.abs(z) ** 2))):
            raise ValueError(f"constraint residual {res:.3e} too large")

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.z) ** 2))


_GL_NODES, _GL_WEIGHTS = leggauss(10)


def _segment_integral(fn, a: float, b: float) -> float:
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return half * float(np.sum(_GL_WEIGHTS * fn(mid + half * _GL_NODES)))


def solve_profile(n: int, w_max: float, steps: int,
                  ode_tol: float = 1e-3) -> RadialProfile:
    """Solve (f'^n)' = n sinh^{n-1} w with f(0) = f'(0) = 0 by quadrature.

    f'(w) = (n * int_0^w sinh^{n-1} s ds)^(1/n), then f by cumulative
    Gauss-Legendre quadrature of f'.  Raises GridTooCoarse when the central
    difference of f'^n misses n sinh^{n-1} w by more than ode_tol relative.
    """
    if n < 2:
        raise ValueError("complex dimension n must be >= 2")
    if w_max <= 0 or steps < 100:
        raise ValueError("need w_max > 0 and steps >= 100")
    w = np.linspace(0.0, w_max, steps + 1)

    sinh_pow = lambda s: np.sinh(s) ** (n - 1)
    F = np.zeros(steps + 1)
    for k in range(steps):
        F[k + 1] = F[k] + _segment_integral(sinh_pow, w[k], w[k + 1])

    def fprime_at(ws, base_idx, base_val):
        # F at arbitrary points inside segment base_idx, then (n F)^(1/n)
        vals = np.array([base_val + _segment_integral(sinh_pow, w[base_idx], x)
                         for x in np.atleast_1d(ws)])
        return (n * vals) ** (1.0 / n)

    fprime = (n * F) ** (1.0 / n)
    f = np.zeros(steps + 1)
    for k in range(steps):
        f[k + 1] = f[k] + _segment_integral(
            lambda x: fprime_at(x, k, F[k]), w[k], w[k + 1])

    profile = RadialProfile(n=n, w=w, f=f, fprime=fprime)
    rhs = n * sinh_pow(w[1:-1])
    lhs = ((fprime[2:] ** n) - (fprime[:-2] ** n)) / (w[2] - w[0])
    resid = np.max(np.abs(lhs - rhs) / (1.0 + np.abs(rhs)))
    if resid > ode_tol:
        raise GridTooCoarse(f"ODE residual {resid:.3e} > {ode_tol:.1e}")
    return profile


def cone_potential(n: int, z) -> float:
    """(n/(n-1))^((n+1)/n) * (|z|^2)^((n-1)/n) on the eps = 0 cone."""
    zz = z.z if isinstance(z, QuadricPoint) else np.asarray(z, dtype=complex)
    s = float(np.sum(np.abs(zz) ** 2))
    if s == 0.0:
        raise OriginPoint("cone potential undefined at the vertex")
    return (n / (n - 1.0)) ** ((n + 1.0) / n) * s ** ((n - 1.0) / n)


def smoothing_potential(n: int, eps: complex, z, profile: RadialProfile,
                        _spline=None) -> float:
    """|eps|^((n-1)/n) * f(arccosh(|z|^2/|eps|)) with interpolated f."""
    if eps == 0:
        raise ValueError("eps = 0 is the cone; use cone_potential")
    zz = z.z if isinstance(z, QuadricPoint) else np.asarray(z, dtype=complex)
    s = float(np.sum(np.abs(zz) ** 2))
    ratio = s / abs(eps)
    if ratio < 1.0 - 1e-12:
        raise BelowVertex(f"|z|^2 = {s:.6g} below |eps| = {abs(eps):.6g}")
    wval = math.acosh(max(ratio, 1.0))
    if wval > profile.w_max:
        raise OutOfProfileRange(f"arccosh argument {wval:.4g} beyond grid")
    spline = _spline if _spline is not None else profile.interpolator()
    return abs(eps) ** ((n - 1.0) / n) * float(spline(wval))


def stenzel_potential_fn(profile: RadialProfile, eps: complex):
    """Closure evaluating the smoothing potential on raw coordinate arrays."""
    spline = profile.interpolator()
    n = profile.n

    def u(zarr: np.ndarray) -> float:
        s = float(np.sum(np.abs(zarr) ** 2))
        ratio = s / abs(eps)
        if ratio < 1.0 - 1e-12:
            raise BelowVertex(f"|z|^2 = {s:.6g} below |eps|")
        wval = math.acosh(max(ratio, 1.0))
        if wval > profile.w_max:
            raise OutOfProfileRange(f"w = {wval:.4g} beyond grid")
        return abs(eps) ** ((n - 1.0) / n) * float(spline(wval))

    return u


def cone_potential_fn(n: int = 3):
    return lambda zarr: cone_potential(n, zarr)


def _chart_embed(w: np.ndarray, eps: complex, chart: int, base: complex):
    """Lift chart coordinates to the quadric, branch fixed near base."""
    s2 = eps - np.sum(w * w)
    root = np.sqrt(s2)
    if abs(root - base) > abs(-root - base):
        root = -root
    z = np.empty(4, dtype=complex)
    free = [i for i in range(4) if i != chart]
    z[free] = w
    z[chart] = root
    return z


def monge_ampere_residual(potential, point: QuadricPoint, h: float = 1e-3,
                          chart: int = 3, richardson: bool = True) -> float:
    """|det(H) * |z_chart|^2 - 1| with H the finite-difference complex Hessian.

    The chart solves for coordinate `chart` via the principal square root
    branch nearest the point's own value; 4-point central stencils per
    coordinate pair, one Richardson halving.  Raises BranchCut when
    |z_chart| < 10 h and StepTooLarge when the halved step disagrees badly.
    """
    z0 = point.z
    if len(z0) != 4:
        raise ValueError("the Monge-Ampere check is wired for n = 3")
    if abs(z0[chart]) < 10.0 * h:
        raise BranchCut(f"|z[{chart}]| = {abs(z0[chart]):.3g} < 10h")
    eps = point.eps
    base = complex(z0[chart])
    w0 = np.array([z0[i] for i in range(4) if i != chart], dtype=complex)

    def u_real(x: np.ndarray) -> float:
        w = x[0::2] + 1j * x[1::2]
        return potential(_chart_embed(w, eps, chart, base))

    x0 = np.empty(6)
    x0[0::2] = w0.real
    x0[1::2] = w0.imag

    def hessian(step: float) -> np.ndarray:
        d2 = np.empty((6, 6))
        for a in range(6):
            ea = np.zeros(6)
            ea[a] = step
            for b in range(a, 6):
                if a == b:
                    d2[a, a] = (u_real(x0 + ea) - 2.0 * u_real(x0)
                                + u_real(x0 - ea)) / step**2
                else:
                    eb = np.zeros(6)
                    eb[b] = step
                    d2[a, b] = d2[b, a] = (
                        u_real(x0 + ea + eb) - u_real(x0 + ea - eb)
                        - u_real(x0 - ea + eb) + u_real(x0 - ea - eb)
                    ) / (4.0 * step**2)
        H = np.empty((3, 3), dtype=complex)
        for j in range(3):
            for k in range(3):
                xx = d2[2 * j, 2 * k] + d2[2 * j + 1, 2 * k + 1]
                xy = d2[2 * j, 2 * k + 1] - d2[2 * j + 1, 2 * k]
                H[j, k] = 0.25 * (xx + 1j * xy)
        return H

    H1 = hessian(h)
    if not richardson:
        det = np.linalg.det(H1)
    else:
        H2 = hessian(h / 2.0)
        d1, d2_ = np.linalg.det(H1), np.linalg.det(H2)
        if abs(d1 - d2_) > 0.5 * abs(d2_):
            raise StepTooLarge(f"det {d1:.6g} vs {d2_:.6g} under halving")
        det = np.linalg.det((4.0 * H2 - H1) / 3.0)
    return float(abs(det * abs(z0[chart]) ** 2 - 1.0))


def random_chart_point(eps: complex, rng: np.random.Generator,
                       scale: float = 1.0, chart: int = 3,
                       min_last: float = 0.3) -> QuadricPoint:
    """Random quadric point with the chart coordinate bounded away from 0."""
    for _ in range(200):
        w = scale * (rng.standard_normal(3) + 1j * rng.standard_normal(3))
        s2 = eps - np.sum(w * w)
        if abs(s2) < (min_last * scale) ** 2:
            continue
        root = np.sqrt(s2) * (1 if rng.random() < 0.5 else -1)
        z = np.empty(4, dtype=complex)
        free = [i for i in range(4) if i != chart]
        z[free] = w
        z[chart] = root
        return QuadricPoint(z=z, eps=eps)
    raise RuntimeError("could not sample a chart-valid point")
