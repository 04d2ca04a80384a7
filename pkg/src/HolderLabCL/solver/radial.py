from dataclasses import dataclass

import numpy as np

from ..domain.grid import GridFn
from ..utils.errors import DomainError, SingularDataError


@dataclass(eq=False)
class RadialSolveResult:
    """
    Radial solution of (s phi'(s))^n = n * int_0^s sigma^(n-1) f(sigma) dsigma.

    Attributes
    ----------
    mesh : numpy.ndarray
    phi : numpy.ndarray
        Recovered profile, pinned at s = S.
    dphi : numpy.ndarray
        phi' on the mesh; NaN at s = 0 where it is never evaluated.
    residual : float
        Largest relative defect of the first integral identity.
    boundary_value : float
        phi(S).
    n : int
    """

    mesh: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    residual: float
    boundary_value: float
    n: int

    def solution(self):
        return GridFn.radial_fn(self.n, self.mesh, self.phi)

    def to_dict(self):
        return {
            "n": self.n,
            "S": float(self.mesh[-1]),
            "mesh_size": int(self.mesh.size),
            "residual": self.residual,
            "boundary_value": self.boundary_value,
        }


def _power_law_cells(mesh, g):
    """
    Integrals of g over the mesh cells, exact when g is a power of s on each cell.

    The first cell [0, s_1] uses the exponent of cells 1 and 2 and never reads g at
    s = 0. Cells where g vanishes or changes sign fall back to the trapezoid rule.

    Raises
    ------
    SingularDataError
        If g is not integrable at s = 0.
    """
    s0, s1 = mesh[:-1], mesh[1:]
    g0, g1 = g[:-1], g[1:]
    cells = 0.5 * (g0 + g1) * (s1 - s0)

    inner = np.arange(1, mesh.size - 1)
    positive = (g0[inner] > 0) & (g1[inner] > 0)
    idx = inner[positive]
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.log(g1[idx] / g0[idx]) / np.log(s1[idx] / s0[idx])
        flat = np.abs(q + 1.0) < 1e-12
        power = (g1[idx] * s1[idx] - g0[idx] * s0[idx]) / (q + 1.0)
        logarithmic = g0[idx] * s0[idx] * np.log(s1[idx] / s0[idx])
    cells[idx] = np.where(flat, logarithmic, power)

    if mesh.size < 3:
        cells[0] = g[1] * mesh[1]
        return cells
    if g[1] > 0 and g[2] > 0:
        q = np.log(g[2] / g[1]) / np.log(mesh[2] / mesh[1])
        if q <= -1.0:
            raise SingularDataError(
                f"Integrand behaves like s^{q:.3f} at s = 0 and is not integrable there"
            )
        cells[0] = g[1] * mesh[1] / (q + 1.0)
    else:
        cells[0] = 0.5 * g[1] * mesh[1]
    return cells


def solve_radial(n, f, boundary_value, mesh=None):
    """
    Solves the radial Dirichlet problem det(u_{j kbar}) = f, u = boundary_value on
    {|z|^2 = S}, through its exact first integral.

    Parameters
    ----------
    n : int
        Complex dimension.
    f : GridFn or array_like
        Radial density on the mesh in s; with a plain array ``mesh`` is required.
    boundary_value : float
        phi(S).
    mesh : numpy.ndarray, optional

    Returns
    -------
    RadialSolveResult

    Raises
    ------
    DomainError
        Negative density.
    SingularDataError
        Density not integrable against s^(n-1) at s = 0.
    """
    if isinstance(f, GridFn):
        mesh, values = f.mesh, f.values
    else:
        values = np.asarray(f, dtype=float)
        mesh = np.asarray(mesh, dtype=float)
    if np.any(values < 0):
        raise DomainError("The density must be nonnegative")

    integrand = mesh ** (n - 1) * values
    integral = np.concatenate(([0.0], np.cumsum(_power_law_cells(mesh, integrand))))
    rhs = n * integral

    dphi = np.full(mesh.size, np.nan)
    dphi[1:] = rhs[1:] ** (1.0 / n) / mesh[1:]

    cells = _power_law_cells(mesh, np.nan_to_num(dphi, nan=0.0))
    tail = np.concatenate((np.cumsum(cells[::-1])[::-1], [0.0]))
    phi = boundary_value - tail

    with np.errstate(invalid="ignore"):
        lhs = (mesh * np.gradient(phi, mesh, edge_order=2)) ** n
    defect = np.abs(lhs[1:] - rhs[1:]) / (1.0 + np.abs(rhs[1:]))
    return RadialSolveResult(
        mesh=mesh,
        phi=phi,
        dphi=dphi,
        residual=float(np.max(defect)),
        boundary_value=float(phi[-1]),
        n=int(n),
    )
