"""Vortex singular part and discrete Neumann Green functions.

The field ``h = log |phi|^2`` is split as ``h = htilde + v0`` where

    v0(z) = sum_k n_k log|z - X_k|^2 + sum_j m_j log|z - W_j|^2

carries the core logarithms.  Subtracting ``v0`` removes every interior delta
from the field equation and converts the boundary deltas into smooth inward
Neumann data for ``htilde``: each boundary vortex contributes the constant
``-m_j / R`` and each interior vortex the trace of ``-d_r log|z - X_k|^2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .geometry import ConformalDisk, PolarGrid, ScalarField, VortexConfiguration
from .operators import assemble_neumann_laplacian

__all__ = [
    "SingularPart",
    "build_singular_part",
    "neumann_green",
    "boundary_neumann_green",
]


@dataclass(frozen=True)
class SingularPart:
    """Core logarithms ``v0`` on the grid plus the outer Neumann data they induce.

    ``neumann_data[j]`` is ``-d_r v0`` at ``(R, theta_j)``, smooth part only:
    boundary vortices enter through the constant ``-m_j / R`` (the continuous
    extension of the radial derivative of their logarithm on the circle).
    """

    v0: ScalarField
    neumann_data: np.ndarray
    config: VortexConfiguration
    disk: ConformalDisk

    def gradient_polar(self) -> tuple[np.ndarray, np.ndarray]:
        """Analytic flat gradient of ``v0`` at the nodes: (radial, tangential).

        Each core contributes ``2 n (z - X) / |z - X|^2``; evaluating the sum
        exactly avoids the dominant near-core differencing error.
        """
        grid = self.v0.grid
        z = grid.nodes_complex
        gc = np.zeros(grid.shape, dtype=complex)
        for pos, n in self.config.interior:
            d = z - pos
            gc += (2.0 * n) * d / np.abs(d) ** 2
        radius = self.disk.radius
        for theta_w, m in self.config.boundary:
            d = z - radius * np.exp(1j * theta_w)
            gc += (2.0 * m) * d / np.abs(d) ** 2
        phase = np.exp(-1j * grid.theta)[None, :]
        local = phase * gc
        return local.real.copy(), local.imag.copy()


def build_singular_part(
    config: VortexConfiguration, disk: ConformalDisk, grid: PolarGrid
) -> SingularPart:
    """Evaluate ``v0`` at the grid nodes and its smooth outer Neumann trace.

    Raises ``ValueError`` if a vortex position coincides exactly with a grid
    node (the logarithm would be -inf there; perturb the position or the grid).
    """
    config.validate_inside(disk)
    z = grid.nodes_complex
    v0 = np.zeros(grid.shape)
    radius = disk.radius
    theta = grid.theta

    g = np.zeros(grid.ntheta)
    for pos, n in config.interior:
        d2 = np.abs(z - pos) ** 2
        if np.any(d2 == 0.0):
            raise ValueError(f"vortex at {pos} coincides with a grid node")
        v0 += n * np.log(d2)
        rho = abs(pos)
        alpha = np.angle(pos) if rho > 0 else 0.0
        boundary_d2 = radius * radius - 2.0 * radius * rho * np.cos(theta - alpha) + rho * rho
        g -= n * (2.0 * radius - 2.0 * rho * np.cos(theta - alpha)) / boundary_d2
    for theta_w, m in config.boundary:
        d2 = np.abs(z - radius * np.exp(1j * theta_w)) ** 2
        if np.any(d2 == 0.0):
            raise ValueError(f"boundary vortex at angle {theta_w} coincides with a grid node")
        v0 += m * np.log(d2)
        g -= m / radius

    return SingularPart(
        v0=ScalarField(grid, v0), neumann_data=g, config=config, disk=disk
    )


def _solve_mean_zero(matrix: sp.csc_matrix, rhs: np.ndarray, curved_w: np.ndarray) -> np.ndarray:
    """Solve the singular weighted Neumann system and project out the constant.

    The kernel of the flux-form operator is the constants, so the compatible
    system is solved with one node pinned (dropping the redundant equation)
    and the result shifted to zero curved-volume mean.
    """
    total = float(np.sum(rhs))
    scale = float(np.max(np.abs(rhs))) or 1.0
    if abs(total) > 1e-9 * scale * rhs.size:
        raise ValueError("right-hand side is not compatible with the Neumann operator")
    pinned = matrix.tolil(copy=True)
    pinned[0, :] = 0.0
    pinned[:, 0] = 0.0
    pinned[0, 0] = 1.0
    b = rhs.copy()
    b[0] = 0.0
    x = spla.spsolve(pinned.tocsc(), b)
    x -= float(np.dot(x, curved_w)) / float(np.sum(curved_w))
    return x


def neumann_green(disk: ConformalDisk, grid: PolarGrid, q: tuple[int, int]) -> ScalarField:
    """Discrete interior Neumann Green function for source node ``q = (i, j)``.

    Solves ``-lap_g G = delta_q - 1/A`` with zero outer flux, where the delta
    is ``1/cellvolume`` at ``q`` and ``A`` is the discrete curved area, which
    makes the singular Neumann system exactly compatible.  The result has zero
    curved-volume mean; near the source ``G ~ -(1/2 pi) log(distance)``.
    """
    i, j = q
    if not (0 <= i < grid.nr and 0 <= j < grid.ntheta):
        raise ValueError(f"source index {q} outside grid {grid.shape}")
    lap = assemble_neumann_laplacian(grid, disk)
    w_g = grid.curved_weights(disk)
    area_h = float(np.sum(w_g))
    rhs = w_g / area_h
    rhs[i * grid.ntheta + j] -= 1.0
    values = _solve_mean_zero(lap.matrix, rhs, w_g)
    return ScalarField(grid, values.reshape(grid.shape))


def boundary_neumann_green(disk: ConformalDisk, grid: PolarGrid, theta_q: float) -> ScalarField:
    """Discrete boundary Neumann Green function for a source angle on a node.

    Solves ``lap_g H = 1/A`` with outer flux data a unit boundary delta: the
    delta enters as a single outer-face flux of magnitude ``1/(R dtheta)``
    over one face, so the discrete boundary flux integral equals one.  The
    result has zero curved-volume mean; near the source
    ``H ~ -(1/pi) log(distance)`` (half-space behaviour).
    """
    j = int(round((float(theta_q) % (2.0 * np.pi)) / grid.dtheta)) % grid.ntheta
    if abs((float(theta_q) % (2.0 * np.pi)) - j * grid.dtheta) > 1e-10:
        raise ValueError(f"theta_q={theta_q} does not coincide with an angular node")
    lap = assemble_neumann_laplacian(grid, disk)
    w_g = grid.curved_weights(disk)
    area_h = float(np.sum(w_g))
    # Weighted system: matrix @ H + flux = w_g / A with the unit delta flux.
    rhs = w_g / area_h
    rhs[(grid.nr - 1) * grid.ntheta + j] -= 1.0
    values = _solve_mean_zero(lap.matrix, rhs, w_g)
    return ScalarField(grid, values.reshape(grid.shape))
