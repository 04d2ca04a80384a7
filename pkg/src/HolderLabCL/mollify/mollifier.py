import warnings
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy.signal import fftconvolve

from ..domain.grid import ShrunkDomain, integrate, is_subharmonic
from ..utils.errors import (
    DegenerateFitError,
    DomainError,
    KernelUnresolvedWarning,
    NonSubharmonicWarning,
    ParameterError,
    ShapeError,
)
from ..utils.utils import loglog_fit


def _covered(support, footprint):
    """Points whose whole (symmetric) footprint lies inside ``support``."""
    count = fftconvolve(support.astype(float), footprint.astype(float), mode="same")
    return count > footprint.sum() - 0.5


def mollify(u, kernel, eps):
    """
    Regularizes ``u`` by convolution with eta_eps(x) = eps^(-2n) eta(x / eps).

    Parameters
    ----------
    u : GridFn
    kernel : Kernel
    eps : float

    Returns
    -------
    GridFn
        Supported on the grid points of Omega_{R eps} whose whole kernel footprint
        carries samples of ``u``. When R eps is below one grid cell, ``u`` itself.

    Raises
    ------
    DomainError
        If no grid point is left in Omega_{R eps}.
    """
    if u.radial:
        raise ShapeError("Mollification needs a grid function")
    if not eps > 0:
        raise ParameterError(f"Mollification scale must be positive, got {eps}")
    if kernel.n != u.n:
        raise ShapeError(f"Kernel on C^{kernel.n} cannot act on a function on C^{u.n}")

    grid = u.grid
    radius = kernel.support_radius * eps
    if radius < grid.h:
        warnings.warn(
            f"Kernel support {radius:.3g} is below the grid spacing {grid.h:.3g}",
            KernelUnresolvedWarning,
            stacklevel=2,
        )
        return u

    shrunk = ShrunkDomain(grid, radius)
    weights = kernel.weights(grid.h, eps)
    footprint = weights > 0
    mask = shrunk.mask & _covered(u.support, footprint)
    if not mask.any():
        raise DomainError(f"Omega_(R eps) is empty on this grid for eps = {eps}")

    filled = np.where(u.support, u.values, 0.0)
    smoothed = fftconvolve(filled, weights, mode="same")
    values = np.where(mask, smoothed, np.nan)
    return u.with_values(values, support=mask, boundary=None, omitted=np.zeros_like(mask))


@dataclass(eq=False)
class GapTable:
    """
    Regularization gaps u_eps - u per scale.

    Attributes
    ----------
    frame : pandas.DataFrame
        Columns ``eps``, ``sup_gap``, ``l1_gap``, ``sup_slope``, ``l1_slope``.
    sup_slope, l1_slope : float
        Log-log slopes of the gaps against eps; NaN when not fittable.
    subharmonic : bool
        Whether ``u`` passed the discrete sub-mean-value check.
    """

    frame: pd.DataFrame
    sup_slope: float = np.nan
    l1_slope: float = np.nan
    subharmonic: bool = True
    warnings: list = field(default_factory=list)


def _slope(x, y):
    try:
        return loglog_fit(x, y)[0]
    except DegenerateFitError:
        return np.nan


def subharmonic_gap(u, kernel, eps_list, tol=1e-9):
    """
    Sup and L1 norms of u_eps - u over Omega_{R eps} for every eps.

    Parameters
    ----------
    u : GridFn
        Expected subharmonic; otherwise a ``NonSubharmonicWarning`` is raised and
        gaps may be negative.
    kernel : Kernel
    eps_list : sequence of float
    tol : float
        Relative tolerance of the sub-mean-value check.

    Returns
    -------
    GapTable
    """
    subharmonic = is_subharmonic(u, tol)
    notes = []
    if not subharmonic:
        message = "Input violates the discrete sub-mean-value property, gaps may be negative"
        warnings.warn(message, NonSubharmonicWarning, stacklevel=2)
        notes.append(message)

    rows = []
    for eps in sorted(eps_list, reverse=True):
        smooth = mollify(u, kernel, eps)
        gap = smooth - u
        mask = gap.support
        rows.append(
            {
                "eps": float(eps),
                "sup_gap": float(np.max(gap.values[mask])),
                "l1_gap": integrate(gap, np.abs(gap.values)),
            }
        )

    frame = pd.DataFrame(rows, columns=["eps", "sup_gap", "l1_gap"])
    sup_slope = _slope(frame["eps"], frame["sup_gap"])
    l1_slope = _slope(frame["eps"], frame["l1_gap"])
    frame["sup_slope"] = sup_slope
    frame["l1_slope"] = l1_slope
    return GapTable(frame, sup_slope, l1_slope, subharmonic, notes)


@dataclass(frozen=True)
class MonotonicityReport:
    passed: bool
    worst_violation: float


def monotonicity_check(u, kernel, K=0.0, eps_list=(0.05, 0.1, 0.2), tol=1e-9):
    """
    Checks that u_eps + K eps^2 is nondecreasing in eps at every grid point shared by
    all scales.

    Returns
    -------
    MonotonicityReport
        ``worst_violation`` is the largest decrease found, 0 when none.
    """
    scales = sorted(float(e) for e in eps_list)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", KernelUnresolvedWarning)
        smoothed = [mollify(u, kernel, eps) for eps in scales]

    shared = np.logical_and.reduce([s.support for s in smoothed])
    worst = 0.0
    for (e1, s1), (e2, s2) in zip(zip(scales, smoothed), zip(scales[1:], smoothed[1:])):
        lower = s1.values[shared] + K * e1**2
        upper = s2.values[shared] + K * e2**2
        if lower.size:
            worst = max(worst, float(np.max(lower - upper)))
    return MonotonicityReport(passed=worst <= tol, worst_violation=max(worst, 0.0))
