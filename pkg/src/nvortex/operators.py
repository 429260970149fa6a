"""Flux-form finite-difference Laplacian on the polar grid with Neumann faces.

The same assembled operator backs the nonlinear field solver and the discrete
Green-function solves, so all modules discretise the Laplacian identically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .geometry import ConformalDisk, PolarGrid

__all__ = ["NeumannLaplacian", "assemble_neumann_laplacian"]


@dataclass(frozen=True)
class NeumannLaplacian:
    """Volume-weighted flat Laplacian with zero-flux pole and Neumann outer face.

    ``matrix`` stores ``W * lap_e`` where ``W = diag(r_i * dr * dtheta)``; it is
    symmetric with exactly vanishing row sums (flux form).  A prescribed outer
    Neumann flux ``d_r u(R, theta_j) = g_j`` enters as the separate vector
    ``boundary_flux_vector(g)``, so that the weighted operator value is
    ``matrix @ u + boundary_flux_vector(g)``.
    """

    grid: PolarGrid
    matrix: sp.csc_matrix
    weights: np.ndarray  # flat cell measures r*dr*dtheta, shape (size,)

    def boundary_flux_vector(self, g) -> np.ndarray:
        """Weighted source carrying the outer fluxes ``R * dtheta * g_j``."""
        g = np.asarray(g, dtype=float)
        if g.shape != (self.grid.ntheta,):
            raise ValueError(f"expected {self.grid.ntheta} boundary values, got {g.shape}")
        b = np.zeros(self.grid.size)
        b[(self.grid.nr - 1) * self.grid.ntheta :] = self.grid.radius * self.grid.dtheta * g
        return b

    def apply(self, values: np.ndarray, g=None) -> np.ndarray:
        """Unweighted discrete Laplacian of a ``(nr, ntheta)`` array.

        ``g`` supplies the outer Neumann data (defaults to zero flux).
        """
        u = np.asarray(values, dtype=float).reshape(self.grid.size)
        out = self.matrix @ u
        if g is not None:
            out = out + self.boundary_flux_vector(g)
        return (out / self.weights).reshape(self.grid.shape)


def assemble_neumann_laplacian(grid: PolarGrid, disk: ConformalDisk) -> NeumannLaplacian:
    """Assemble the 5-point flux-form Laplacian for ``grid``.

    At node ``(i, j)`` the operator is

        [r_{i+1/2}(u_{i+1,j} - u_{i,j}) - r_{i-1/2}(u_{i,j} - u_{i-1,j})] / (r_i dr^2)
        + (u_{i,j+1} - 2 u_{i,j} + u_{i,j-1}) / (r_i^2 dtheta^2)

    with the inner face of the first ring at ``r = 0`` (zero flux, no pole
    special case) and the outer face carrying the prescribed Neumann flux.
    The matrix is assembled in the volume-weighted symmetric form.
    """
    if abs(grid.radius - disk.radius) > 1e-12 * disk.radius:
        raise ValueError("grid radius does not match disk radius")
    nr, nt = grid.nr, grid.ntheta
    dr, dt = grid.dr, grid.dtheta
    r = grid.r
    jj = np.arange(nt)

    # Radial couplings across interior faces at radius (i+1) * dr.
    i_in = np.arange(nr - 1)
    c_rad = np.repeat(grid.r_faces[1:nr] * dt / dr, nt)
    lo = (i_in[:, None] * nt + jj[None, :]).ravel()
    hi = ((i_in[:, None] + 1) * nt + jj[None, :]).ravel()

    # Angular couplings across the face between j and j+1 (periodic).
    c_ang = np.repeat(dr / (r * dt), nt)
    a1 = (np.arange(nr)[:, None] * nt + jj[None, :]).ravel()
    a2 = (np.arange(nr)[:, None] * nt + ((jj + 1) % nt)[None, :]).ravel()

    rows = np.concatenate([lo, hi, lo, hi, a1, a2, a1, a2])
    cols = np.concatenate([lo, hi, hi, lo, a1, a2, a2, a1])
    vals = np.concatenate([-c_rad, -c_rad, c_rad, c_rad, -c_ang, -c_ang, c_ang, c_ang])

    matrix = sp.coo_matrix((vals, (rows, cols)), shape=(grid.size, grid.size)).tocsc()
    weights = grid.flat_weights()
    weights.setflags(write=False)
    return NeumannLaplacian(grid=grid, matrix=matrix, weights=weights)
