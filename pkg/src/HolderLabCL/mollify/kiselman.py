import warnings
from dataclasses import dataclass

import numpy as np
import xarray as xr

from ..domain.grid import GridFn
from ..utils.errors import KernelUnresolvedWarning, ParameterError
from .mollifier import mollify

T_FLOOR = 1.0 / 1024
MIN_T_GRID = 16


@dataclass(eq=False)
class KiselmanResult:
    """
    Kiselman-Legendre transform of a grid function at level c.

    Attributes
    ----------
    transformed : GridFn
        u_{c,eps}, supported where the eps-regularization is defined.
    t_min : numpy.ndarray
        Minimizing scale per grid point, NaN off the support.
    K, c, eps : float
    lam : xarray.DataArray
        lambda(z, t) with dims ``("t", "x0", ...)``.
    upper : GridFn
        The eps-regularization the transform never exceeds.
    t_grid : numpy.ndarray
    """

    transformed: GridFn
    t_min: np.ndarray
    K: float
    c: float
    eps: float
    lam: xr.DataArray
    upper: GridFn
    t_grid: np.ndarray

    @property
    def theta(self):
        """Smallest ratio t_min / eps over the support."""
        ratios = self.t_min[self.transformed.support] / self.eps
        return float(ratios.min()) if ratios.size else np.nan

    def sandwich_violation(self, u):
        """
        Largest violation of u - K eps^2 <= u_{c,eps} <= u_eps over the support;
        nonpositive when both sides hold.
        """
        mask = self.transformed.support
        value = self.transformed.values[mask]
        lower = u.values[mask] - self.K * self.eps**2 - value
        upper = value - self.upper.values[mask]
        return float(max(lower.max(initial=-np.inf), upper.max(initial=-np.inf)))

    def to_dict(self):
        return {
            "K": self.K,
            "c": self.c,
            "eps": self.eps,
            "theta": self.theta,
            "t_grid_size": int(self.t_grid.size),
            "t_floor": float(self.t_grid[0]),
        }


def t_grid(eps, size):
    """Geometric scales in (eps / 1024, eps], the last one equal to eps."""
    return np.geomspace(eps * T_FLOOR, eps, size + 1)[1:]


def kiselman_transform(u, kernel, eps, c, K=0.0, t_grid_size=24):
    """
    Computes u_{c,eps}(z) = inf_t {u_t(z) + K t^2 - K eps^2 - c log(t / eps)}.

    The infimum runs over a geometric grid of ``t_grid_size`` scales with floor
    eps / 1024, and u_t is the kernel regularization at scale t, so that the
    minimizer is the scale at which the regularization is evaluated.

    Parameters
    ----------
    u : GridFn
        Bounded, ideally subharmonic.
    kernel : Kernel
    eps : float
        Largest scale.
    c : float
        Level, positive.
    K : float
        Nonnegative curvature constant; 0 for flat domains.
    t_grid_size : int
        At least 16.

    Returns
    -------
    KiselmanResult

    Raises
    ------
    ParameterError
        Nonpositive level, negative K or too coarse a scale grid.
    DomainError
        If the eps-regularization is empty on the grid.
    """
    if not c > 0:
        raise ParameterError(f"Kiselman level must be positive, got {c}")
    if K < 0:
        raise ParameterError(f"Curvature constant must be nonnegative, got {K}")
    if int(t_grid_size) != t_grid_size or t_grid_size < MIN_T_GRID:
        raise ParameterError(f"The scale grid needs at least {MIN_T_GRID} points, got {t_grid_size}")

    scales = t_grid(eps, int(t_grid_size))
    upper = mollify(u, kernel, eps)
    mask = upper.support

    # Scales below one grid cell regularize to u itself.
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", KernelUnresolvedWarning)
        regularized = np.stack([mollify(u, kernel, t).values for t in scales])
    regularized[:, ~mask] = np.nan
    regularized[-1] = upper.values

    penalty = K * scales**2 - K * eps**2 - c * np.log(scales / eps)
    objective = regularized + penalty.reshape((-1,) + (1,) * u.grid.domain.dim)

    best = np.argmin(np.where(np.isnan(objective), np.inf, objective), axis=0)
    values = np.take_along_axis(objective, best[np.newaxis], axis=0)[0]
    t_min = np.where(mask, scales[best], np.nan)

    grown = regularized + (K * scales**2).reshape(penalty.shape[:1] + (1,) * u.grid.domain.dim)
    lam = np.gradient(grown, np.log(scales), axis=0)
    coords = {"t": scales, **u.grid.coords()}
    lam = xr.DataArray(lam, coords=coords, dims=["t"] + u.grid.dims(), name="lambda")

    transformed = u.with_values(
        np.where(mask, values, np.nan),
        support=mask,
        boundary=None,
        omitted=np.zeros_like(mask),
    )
    return KiselmanResult(transformed, t_min, float(K), float(c), float(eps), lam, upper, scales)
