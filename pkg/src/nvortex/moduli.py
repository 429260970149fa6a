"""Moduli-space metric data for one vortex on a rotationally symmetric disk.

For a unit vortex at the origin the position derivative of the field splits as

    d_X h = (-2/r + a(r)) * cos(theta),

where the radial factor ``a`` solves the linear two-point problem

    a'' + a'/r - a/r^2 = f(r) * (a - 2/r),   f = Omega * exp(h),

regular at the origin with ``a'(R) = -2/R^2``.  The kinetic-energy
coefficient of a moving vortex combines a boundary term,
``(1/2) * pi * (d_X h(R; 0))^2`` with ``d_X h(R; 0) = a(R) - 2/R``, and the
local term ``pi * (Omega(0) + 2 db/dZ)`` built from the core coefficient
``b(Z) = d_zbar (h - log|z - Z|^2)`` at ``z = Z``.  A nonzero boundary term is
the witness that the metric is not a purely local function of vortex position.

Convention: the assembled coefficient uses the real part of ``db/dZ`` (the
complex value, real up to differencing noise on a symmetric disk, is reported
alongside).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .geometry import (
    ConformalDisk,
    PolarGrid,
    ScalarField,
    VortexConfiguration,
)
from .shooting import RadialProfile, shoot
from .solver2d import solve_taubes_2d

__all__ = [
    "LinearizedProfile",
    "MetricReport",
    "ConditioningError",
    "FitError",
    "solve_linear_bvp",
    "solve_linearized",
    "boundary_metric_term",
    "samols_b",
    "boundary_ring_position_derivatives",
    "ring_metric_integral",
    "metric_coefficient",
]

DEFAULT_LIN_STEPS = 100_000
#: Inner start of the linearized integration, as a fraction of the radius;
#: the regular branch ``a ~ c r`` is imposed there (the 1/r branch is excluded
#: by smoothness of the position derivative at the origin).
EPS_FRACTION = 1e-6


class ConditioningError(RuntimeError):
    """The superposition for the linearized profile is numerically singular."""


class FitError(RuntimeError):
    """The core-coefficient fit has too few usable nodes (grid too coarse)."""


@dataclass
class LinearizedProfile:
    """Radial factor of the position derivative and its boundary data."""

    r: np.ndarray
    a: np.ndarray
    aR: float
    boundary_value: float  # d_X h(R; 0) = a(R) - 2/R
    bc_defect: float  # |a'(R) + 2/R^2|, zero up to roundoff by construction

    def a_at(self, r) -> np.ndarray:
        return np.interp(np.asarray(r, dtype=float), self.r, self.a)


def solve_linear_bvp(
    f_of_r,
    radius: float,
    eps: float | None = None,
    steps: int = DEFAULT_LIN_STEPS,
) -> LinearizedProfile:
    """Solve ``a'' + a'/r - a/r^2 = f(r)(a - 2/r)`` by superposition.

    Integrates in ``t = log r`` (keeping the Euler-type coefficients bounded
    near the core) the regular homogeneous solution and one particular
    solution from ``eps``, then combines them to meet ``a'(R) = -2/R^2``.
    The vacuum case ``f == 0`` has the closed form ``a = -2 r / R^2``.
    """
    if eps is None:
        eps = EPS_FRACTION * radius
    if not 0.0 < eps < radius:
        raise ValueError(f"eps must lie in (0, radius), got {eps}")
    t0, t1 = math.log(eps), math.log(radius)
    dt = (t1 - t0) / steps
    t_nodes = t0 + dt * np.arange(steps + 1)
    r_nodes = np.exp(t_nodes)
    r_mid = np.exp(t_nodes[:-1] + 0.5 * dt)
    f_nodes = np.asarray(f_of_r(r_nodes), dtype=float)
    f_mid = np.asarray(f_of_r(r_mid), dtype=float)
    # In t the system reads a_t = q, q_t = P(t) a + s(t); plain-float tables
    # keep the integration loop fast.
    p_nodes = (1.0 + r_nodes**2 * f_nodes).tolist()
    p_mid = (1.0 + r_mid**2 * f_mid).tolist()
    s_nodes = (-2.0 * r_nodes * f_nodes).tolist()
    s_mid = (-2.0 * r_mid * f_mid).tolist()

    a_reg = np.empty(steps + 1)
    a_par = np.empty(steps + 1)
    a1, q1 = eps, eps  # regular branch a ~ r: q = r a' = eps
    a2, q2 = 0.0, 0.0
    a_reg[0], a_par[0] = a1, a2
    half = 0.5 * dt
    sixth = dt / 6.0
    for k in range(steps):
        p0, pm, p1c = p_nodes[k], p_mid[k], p_nodes[k + 1]
        s0, sm, s1c = s_nodes[k], s_mid[k], s_nodes[k + 1]
        # regular (homogeneous) solution
        k1a, k1q = q1, p0 * a1
        k2a = q1 + half * k1q
        k2q = pm * (a1 + half * k1a)
        k3a = q1 + half * k2q
        k3q = pm * (a1 + half * k2a)
        k4a = q1 + dt * k3q
        k4q = p1c * (a1 + dt * k3a)
        a1 += sixth * (k1a + 2.0 * (k2a + k3a) + k4a)
        q1 += sixth * (k1q + 2.0 * (k2q + k3q) + k4q)
        # particular solution
        k1a, k1q = q2, p0 * a2 + s0
        k2a = q2 + half * k1q
        k2q = pm * (a2 + half * k1a) + sm
        k3a = q2 + half * k2q
        k3q = pm * (a2 + half * k2a) + sm
        k4a = q2 + dt * k3q
        k4q = p1c * (a2 + dt * k3a) + s1c
        a2 += sixth * (k1a + 2.0 * (k2a + k3a) + k4a)
        q2 += sixth * (k1q + 2.0 * (k2q + k3q) + k4q)
        a_reg[k + 1], a_par[k + 1] = a1, a2

    # Outer condition q(T) = R a'(R) = -2/R.
    target = -2.0 / radius
    if abs(q1) < 1e-12 * (abs(q2) + abs(target) + 1.0):
        raise ConditioningError("homogeneous solution has vanishing outer slope")
    coeff = (target - q2) / q1
    a = a_par + coeff * a_reg
    a_end = float(a[-1])
    q_end = q2 + coeff * q1
    bc_defect = abs(q_end / radius + 2.0 / radius**2)
    return LinearizedProfile(
        r=r_nodes,
        a=a,
        aR=a_end,
        boundary_value=a_end - 2.0 / radius,
        bc_defect=bc_defect,
    )


def solve_linearized(
    disk: ConformalDisk,
    radial: RadialProfile,
    steps: int = DEFAULT_LIN_STEPS,
) -> LinearizedProfile:
    """Linearized profile driven by a converged unit-vortex radial solution."""
    if radial.n != 1:
        raise ValueError("the linearized problem is defined for a unit vortex")
    if not radial.converged:
        raise ValueError("radial profile must be converged")

    def f_of_r(r):
        return disk.omega_at(r) * r**2 * np.exp(radial.htilde_at(r))

    return solve_linear_bvp(f_of_r, disk.radius, steps=steps)


def boundary_metric_term(lin: LinearizedProfile) -> float:
    """Boundary contribution ``(1/2) * pi * (d_X h(R; 0))^2`` (never negative)."""
    return 0.5 * math.pi * lin.boundary_value**2


def _fit_b(htilde: ScalarField, z_core: complex) -> complex:
    """Core coefficient from a local polynomial fit of ``htilde`` at ``z_core``.

    For a single vortex at ``Z`` the regular part ``h - log|z - Z|^2`` equals
    ``htilde``, so ``b(Z) = d_zbar htilde|_Z = (d_x + i d_y) htilde / 2``,
    read off the linear coefficients of a least-squares fit on the annulus
    ``2 dr <= |z - Z| <= 6 dr`` (inside the core's analytic neighbourhood,
    outside the worst discretisation error).  The design includes the full
    quadratic so the field curvature is absorbed by nuisance coefficients;
    with a purely linear design the curvature aliases into the gradient as
    nodes enter and leave the annulus, which wrecks differencing of ``b``
    with respect to the vortex position.
    """
    grid = htilde.grid
    d = grid.nodes_complex - z_core
    dist = np.abs(d)
    mask = (dist >= 2.0 * grid.dr) & (dist <= 6.0 * grid.dr)
    count = int(np.count_nonzero(mask))
    if count < 12:
        raise FitError(f"only {count} nodes in the fit annulus; refine the grid")
    dx = d.real[mask]
    dy = d.imag[mask]
    design = np.column_stack(
        [np.ones(count), dx, dy, dx * dx, dx * dy, dy * dy]
    )
    coeffs, *_ = np.linalg.lstsq(design, htilde.values[mask], rcond=None)
    return 0.5 * (coeffs[1] + 1j * coeffs[2])


def _htilde_for_vortex_at(args):
    disk, grid, z, tol, max_iter = args
    config = VortexConfiguration(interior=((z, 1),))
    field, report = solve_taubes_2d(disk, config, grid, tol=tol, max_iter=max_iter)
    if not report.converged:
        raise RuntimeError(f"field solve for vortex at {z} did not converge")
    return field


def _solve_set(disk, grid, positions, tol, max_iter, max_workers):
    jobs = [(disk, grid, z, tol, max_iter) for z in positions]
    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            fields = list(pool.map(_htilde_for_vortex_at, jobs))
    else:
        fields = [_htilde_for_vortex_at(j) for j in jobs]
    return dict(zip(positions, fields))


def _db_dz_from_fits(b_px, b_mx, b_py, b_my, delta) -> complex:
    """Central-difference ``db/dZ = (d_X b - i d_Y b) / 2`` at the origin."""
    db_dx = (b_px - b_mx) / (2.0 * delta)
    db_dy = (b_py - b_my) / (2.0 * delta)
    return 0.5 * (db_dx - 1j * db_dy)


def samols_b(
    disk: ConformalDisk,
    grid: PolarGrid,
    z_core: complex,
    delta: float,
    tol: float = 1e-8,
    max_iter: int = 50,
    max_workers: int = 1,
) -> tuple[complex, complex]:
    """Core coefficient ``b(Z)`` and its position derivative ``db/dZ``.

    ``b`` comes from the annulus fit on the solve at ``Z``; the derivative
    from central differences of ``b`` over ``Z +- delta`` and ``Z +- i delta``
    (four more solves, independent and parallelisable).
    """
    z_core = complex(z_core)
    delta = float(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    if abs(z_core) + delta >= disk.radius:
        raise ValueError("offset stencil leaves the disk; reduce |Z| or delta")
    offsets = [z_core, z_core + delta, z_core - delta, z_core + 1j * delta, z_core - 1j * delta]
    fields = _solve_set(disk, grid, offsets, tol, max_iter, max_workers)
    b = _fit_b(fields[offsets[0]], offsets[0])
    fits = [_fit_b(fields[z], z) for z in offsets[1:]]
    return b, _db_dz_from_fits(*fits, delta)


def boundary_ring_position_derivatives(
    disk: ConformalDisk,
    grid: PolarGrid,
    delta: float,
    tol: float = 1e-8,
    max_iter: int = 50,
    max_workers: int = 1,
):
    """``d_X h`` and ``d_Y h`` on the outermost node ring for a vortex at 0.

    Central differences in the vortex position (four solves) give the smooth
    part; the core logarithm contributes ``-2 cos(theta)/rho`` and
    ``-2 sin(theta)/rho`` analytically.  Returns ``(rho, theta, dxh, dyh)``.
    """
    offsets = [delta + 0j, -delta + 0j, 1j * delta, -1j * delta]
    fields = _solve_set(disk, grid, offsets, tol, max_iter, max_workers)
    ring = {z: fields[z].values[-1] for z in offsets}
    dxh_tilde = (ring[offsets[0]] - ring[offsets[1]]) / (2.0 * delta)
    dyh_tilde = (ring[offsets[2]] - ring[offsets[3]]) / (2.0 * delta)
    rho = grid.r[-1]
    theta = grid.theta
    dxh = dxh_tilde - 2.0 * np.cos(theta) / rho
    dyh = dyh_tilde - 2.0 * np.sin(theta) / rho
    return rho, theta, dxh, dyh


def ring_metric_integral(dxh: np.ndarray, dyh: np.ndarray) -> float:
    """Loop integral of ``d_X h``  against ``d(d_Y h)`` over a node ring.

    Periodic second-order quadrature: ``sum_j f_j (g_{j+1} - g_{j-1}) / 2``.
    For a vortex at the centre of a rotationally symmetric disk it equals
    ``pi * (d_X h(rho; 0))^2`` on every concentric ring.
    """
    return float(np.sum(dxh * (np.roll(dyh, -1) - np.roll(dyh, 1))) / 2.0)


@dataclass
class MetricReport:
    """Assembled kinetic-energy coefficient of one vortex through the origin.

    ``total_coefficient = boundary_term + local_term`` multiplies the squared
    modulus of the vortex velocity.  ``db_dZ`` is the refined (half-step)
    central difference; ``db_dZ_coarse`` exposes the truncation level.
    """

    boundary_value: float
    boundary_term: float
    samols_b: complex
    db_dZ: complex
    db_dZ_coarse: complex
    local_term: float
    total_coefficient: float
    delta: float
    nonlocal_boundary_term: bool

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "boundary_value": self.boundary_value,
            "boundary_term": self.boundary_term,
            "samols_b_re": self.samols_b.real,
            "samols_b_im": self.samols_b.imag,
            "db_dZ_re": self.db_dZ.real,
            "db_dZ_im": self.db_dZ.imag,
            "db_dZ_coarse_re": self.db_dZ_coarse.real,
            "db_dZ_coarse_im": self.db_dZ_coarse.imag,
            "local_term": self.local_term,
            "total_coefficient": self.total_coefficient,
            "delta": self.delta,
            "nonlocal_boundary_term": self.nonlocal_boundary_term,
        }


def metric_coefficient(
    disk: ConformalDisk,
    grid: PolarGrid,
    delta: float | None = None,
    tol: float = 1e-8,
    max_iter: int = 50,
    radial_steps: int = 100_000,
    max_workers: int = 1,
) -> MetricReport:
    """Full metric pipeline for a unit vortex at the origin.

    Runs the radial shoot, the linearized boundary-value solve, the core
    coefficient at the origin and its position derivative at steps ``delta``
    and ``delta/2`` (Richardson pair).  ``max_workers > 1`` runs the
    independent offset solves concurrently.
    """
    if delta is None:
        delta = disk.radius / 100.0
    radial = shoot(disk, n=1, steps=radial_steps)
    if not radial.converged:
        raise RuntimeError("radial shoot did not converge")
    lin = solve_linearized(disk, radial)
    bterm = boundary_metric_term(lin)

    offsets = [0j]
    for d in (delta, 0.5 * delta):
        offsets += [d + 0j, -d + 0j, 1j * d, -1j * d]
    fields = _solve_set(disk, grid, offsets, tol, max_iter, max_workers)
    fits = {z: _fit_b(fields[z], z) for z in offsets}
    b0 = fits[0j]
    db_coarse = _db_dz_from_fits(
        fits[delta + 0j], fits[-delta + 0j], fits[1j * delta], fits[-1j * delta], delta
    )
    half = 0.5 * delta
    db_fine = _db_dz_from_fits(
        fits[half + 0j], fits[-half + 0j], fits[1j * half], fits[-1j * half], half
    )
    local = math.pi * (float(disk.omega_at(0.0)) + 2.0 * db_fine.real)
    return MetricReport(
        boundary_value=lin.boundary_value,
        boundary_term=bterm,
        samols_b=b0,
        db_dZ=db_fine,
        db_dZ_coarse=db_coarse,
        local_term=local,
        total_coefficient=bterm + local,
        delta=delta,
        nonlocal_boundary_term=bterm > 0.0,
    )
