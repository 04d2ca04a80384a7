import time
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from rich import print
from scipy.sparse.linalg import spsolve

from ..domain.grid import GridFn, shift
from ..utils.errors import ConfigurationError, DomainError, ShapeError, SolverFailureError

METHODS = ("direct", "sor")


@dataclass(eq=False)
class GridSolveResult:
    """
    Attributes
    ----------
    solution : GridFn
        Solution on the interior and the on-boundary grid points.
    residual : float
        Sup norm of Delta_h u / 4 - f, boundary rows scaled the same way.
    iterations : int
        Relaxation sweeps; 0 for the direct solve.
    method : str
    runtime : float
        Wall time in seconds.
    """

    solution: GridFn
    residual: float
    iterations: int
    method: str
    runtime: float

    def to_dict(self):
        return {
            "residual": self.residual,
            "iterations": self.iterations,
            "method": self.method,
            "runtime": self.runtime,
        }


@dataclass(frozen=True)
class ComparisonReport:
    passed: bool
    worst_violation: float


class PoissonSolver:
    """
    Five-point solver for Delta u = 4 f on a domain of C^1 with Dirichlet data.

    Stencil arms leaving the domain use a ghost value extrapolated linearly through
    the boundary crossing, u_ghost = u_P + (phi_B - u_P) / theta, which keeps the
    matrix an M-matrix and the scheme second order.

    Attributes
    ----------
    grid : Grid
    method : str
        ``"direct"`` (sparse LU) or ``"sor"`` (red-black successive over-relaxation).
    omega : float
        Relaxation factor.
    max_iter : int
        Sweep cap of the relaxation.
    tol : float
        Stopping tolerance on the residual.
    verbose : bool

    Methods
    -------
    assemble
        Sparse matrix and right-hand side.
    solve
        Solves for given density and boundary data.
    residual
        Row-scaled residual of a candidate solution.
    """

    def __init__(self, grid, **kwargs):
        if grid.domain.n != 1:
            raise ConfigurationError(
                f"The grid solver handles complex dimension 1 only, got n = {grid.domain.n}"
            )
        self.grid = grid
        self.method = kwargs.get("method", "direct")
        self.omega = kwargs.get("omega", 1.9)
        self.max_iter = int(kwargs.get("max_iter", 100_000))
        self.tol = kwargs.get("tol", 1e-9)
        self.verbose = kwargs.get("verbose", False)
        if self.method not in METHODS:
            raise ConfigurationError(f"Unknown solver method {self.method!r}, expected {METHODS}")

        interior = grid.interior
        self._flat = np.flatnonzero(interior)
        self._number = np.full(interior.size, -1, dtype=np.int64)
        self._number[self._flat] = np.arange(self._flat.size)

    def assemble(self, f, phi_boundary):
        """
        Returns the sparse matrix ``A`` (rows scaled by h^2), the right-hand side and
        the diagonal magnitudes used to scale residuals.
        """
        grid = self.grid
        m = self._flat.size
        h2 = grid.h**2
        interior = grid.interior

        rows, cols, data = [], [], []
        diag = np.full(m, -4.0)
        for axis in range(2):
            for step in (1, -1):
                inside = (interior & shift(interior, axis, step, False)).ravel()
                rows.append(self._number[np.flatnonzero(inside)])
                cols.append(self._number[self._neighbour(axis, step)[inside]])
                data.append(np.ones(int(inside.sum())))

        links = grid.links
        link_rows = self._number[links.index]
        np.add.at(diag, link_rows, 1.0 - 1.0 / links.theta)

        rhs = 4.0 * h2 * f.values.ravel()[self._flat]
        np.add.at(rhs, link_rows, -phi_boundary / links.theta)

        rows.append(np.arange(m))
        cols.append(np.arange(m))
        data.append(diag)
        A = sp.csr_matrix(
            (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(m, m)
        )
        return A, rhs, np.abs(diag)

    def _neighbour(self, axis, step):
        """Flat index of the neighbour ``step * e_axis`` of every grid point, -1 off the grid."""
        flat = np.arange(int(np.prod(self.grid.shape))).reshape(self.grid.shape)
        return shift(flat, axis, step, -1).ravel()

    def residual(self, A, rhs, scale, u):
        return float(np.max(np.abs(A @ u - rhs) / (self.grid.h**2 * scale)))

    def solve(self, f, phi):
        """
        Parameters
        ----------
        f : GridFn
            Nonnegative density on the interior.
        phi : GridFn
            Boundary data; its ``boundary`` samples at the crossings are used.

        Returns
        -------
        GridSolveResult

        Raises
        ------
        DomainError
            Negative density or non-finite boundary data.
        SolverFailureError
            Relaxation did not reach the tolerance within ``max_iter`` sweeps.
        """
        grid = self.grid
        if f.radial or phi.radial or not (grid.same_as(f.grid) and grid.same_as(phi.grid)):
            raise ShapeError("Density and boundary data must live on the solver grid")
        fvals = f.values.ravel()[self._flat]
        if not np.all(np.isfinite(fvals)):
            raise DomainError("The density must be sampled at every interior point")
        if np.any(fvals < 0):
            raise DomainError("The density must be nonnegative")
        if phi.boundary is None or not np.all(np.isfinite(phi.boundary)):
            raise DomainError("Boundary data must be finite at every boundary crossing")

        start = time.perf_counter()
        A, rhs, scale = self.assemble(f, phi.boundary)
        if self.method == "direct":
            u = spsolve(A.tocsc(), rhs)
            iterations = 0
        else:
            u, iterations = self._sor(A, rhs, scale)
        runtime = time.perf_counter() - start
        residual = self.residual(A, rhs, scale, u)

        if self.verbose:
            print(
                f"[bold]{self.method}[/bold] solve on {u.size} unknowns: "
                f"residual {residual:.3e}, {iterations} sweeps, {runtime:.2f}s"
            )

        values = np.full(grid.shape, np.nan)
        values.ravel()[self._flat] = u
        on_boundary = grid.on_boundary & ~grid.interior
        values[on_boundary] = phi.values[on_boundary]
        support = grid.interior | (on_boundary & np.isfinite(phi.values))
        solution = GridFn(values, grid=grid, support=support, boundary=phi.boundary)
        return GridSolveResult(solution, residual, iterations, self.method, runtime)

    def _sor(self, A, rhs, scale):
        """
        Red-black SOR: points of one color only couple to the other color, so each
        half sweep is a vectorized Jacobi step in a fixed order.
        """
        points = np.unravel_index(self._flat, self.grid.shape)
        color = (points[0] + points[1]) % 2
        blocks = []
        for c in (0, 1):
            idx = np.flatnonzero(color == c)
            blocks.append((idx, A[idx], A.diagonal()[idx], rhs[idx]))

        u = np.zeros(rhs.size)
        h2 = self.grid.h**2
        check_every = 10
        for sweep in range(1, self.max_iter + 1):
            for idx, rows, d, b in blocks:
                update = (b - rows @ u) / d
                u[idx] += self.omega * update
            if sweep % check_every == 0:
                res = float(np.max(np.abs(A @ u - rhs) / (h2 * scale)))
                if self.verbose and sweep % (100 * check_every) == 0:
                    print(f"sweep {sweep}: residual {res:.3e}")
                if res <= self.tol:
                    return u, sweep
        res = float(np.max(np.abs(A @ u - rhs) / (h2 * scale)))
        if res <= self.tol:
            return u, self.max_iter
        raise SolverFailureError(
            f"SOR stopped after {self.max_iter} sweeps with residual {res:.3e} > {self.tol:.1e}",
            residual=res,
            iterations=self.max_iter,
        )


def solve_poisson_n1(domain, f, phi, **kwargs):
    """
    Solves Delta u = 4 f in a domain of C^1 with u = phi on the boundary.

    Parameters
    ----------
    domain : Domain
        Must be the domain of ``f.grid``.
    f : GridFn
        Nonnegative density.
    phi : GridFn
        Boundary data sampled at the boundary crossings.
    **kwargs
        ``method``, ``omega``, ``max_iter``, ``tol`` and ``verbose`` of ``PoissonSolver``.

    Returns
    -------
    GridSolveResult
    """
    if f.radial or f.grid.domain.descriptor() != domain.descriptor():
        raise ShapeError("The density must be sampled on a grid of the given domain")
    return PoissonSolver(f.grid, **kwargs).solve(f, phi)


def comparison_check(u, v, tolerance=1e-9):
    """
    Checks v <= u + tolerance at every interior point carried by both functions.

    Returns
    -------
    ComparisonReport
        ``worst_violation`` is max(v - u, 0) over those points.

    Raises
    ------
    ShapeError
        If ``u`` and ``v`` live on different grids.
    """
    if not u.same_grid(v):
        raise ShapeError("Compared solutions live on different grids")
    mask = u.support & v.support
    if not u.radial:
        mask &= u.grid.interior
    excess = v.values[mask] - u.values[mask]
    worst = float(max(excess.max(initial=0.0), 0.0))
    return ComparisonReport(passed=worst <= tolerance, worst_violation=worst)
