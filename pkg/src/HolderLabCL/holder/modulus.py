import warnings
from dataclasses import dataclass

import numpy as np
import pandas as pd
from dask import compute, delayed
from dask.diagnostics import ProgressBar

from ..domain.grid import overlap_slices
from ..utils.errors import (
    DegenerateFitError,
    ModulusTruncatedWarning,
    ParameterError,
    ShapeError,
)
from ..utils.utils import dyadic_radii, loglog_fit

CHUNK = 64


@dataclass(frozen=True)
class ExponentFit:
    alpha_hat: float
    C_hat: float
    residual: float

    def to_dict(self):
        return {"alpha_hat": self.alpha_hat, "C_hat": self.C_hat, "residual": self.residual}


@dataclass(eq=False)
class ModulusCurve:
    """
    Sampled modulus of continuity omega(r) = sup_{|x - y| <= r} |u(x) - u(y)|.

    Attributes
    ----------
    radii : numpy.ndarray
        Dyadic radii eps0 / 2^k, decreasing.
    omega : numpy.ndarray
        Modulus at every radius.
    mode : str
        ``"exhaustive"``, ``"sampled"`` or ``"given"`` for synthetic curves.
    pair_count : int
        Pairs inspected.
    h : float or None
        Grid spacing of the scanned function.
    alpha_hat, C_hat, residual : float
        Log-log fit over the whole curve, NaN when degenerate.
    degenerate : bool
        Whether the fit failed (constant function, too few radii).
    """

    radii: np.ndarray
    omega: np.ndarray
    mode: str = "given"
    pair_count: int = 0
    h: float = None
    alpha_hat: float = np.nan
    C_hat: float = np.nan
    residual: float = np.nan
    degenerate: bool = False

    @classmethod
    def from_values(cls, radii, omega, mode="given", pair_count=0, h=None):
        """Builds a curve and fills its exponent fit when one exists."""
        curve = cls(np.asarray(radii, dtype=float), np.asarray(omega, dtype=float), mode, pair_count, h)
        try:
            fit = fit_exponent(curve)
            curve.alpha_hat, curve.C_hat, curve.residual = fit.alpha_hat, fit.C_hat, fit.residual
        except DegenerateFitError:
            curve.degenerate = True
        return curve

    def at(self, r):
        """omega at the largest tabulated radius not above ``r``; 0 below the curve."""
        below = self.radii <= r * (1 + 1e-12)
        return float(self.omega[below].max()) if below.any() else 0.0

    def to_frame(self):
        return pd.DataFrame(
            {"k": np.arange(self.radii.size), "r": self.radii, "omega": self.omega}
        )

    def to_dict(self):
        return {
            "mode": self.mode,
            "pair_count": self.pair_count,
            "h": self.h,
            "alpha_hat": self.alpha_hat,
            "C_hat": self.C_hat,
            "residual": self.residual,
            "degenerate": self.degenerate,
        }


def fit_exponent(curve, k_range=None):
    """
    Least-squares slope of log omega against log r.

    Parameters
    ----------
    curve : ModulusCurve
    k_range : tuple of int, optional
        Inclusive range of dyadic indices; the whole curve by default.

    Returns
    -------
    ExponentFit

    Raises
    ------
    DegenerateFitError
        Fewer than three points or a zero modulus in range.
    """
    lo, hi = (0, curve.radii.size - 1) if k_range is None else k_range
    radii = curve.radii[lo : hi + 1]
    omega = curve.omega[lo : hi + 1]
    if radii.size < 3:
        raise DegenerateFitError(f"Exponent fit needs three radii, got {radii.size}")
    if np.any(omega <= 0):
        raise DegenerateFitError("Exponent fit on a vanishing modulus")
    slope, intercept, residual = loglog_fit(radii, omega)
    return ExponentFit(slope, float(np.exp(intercept)), residual)


def _half_space_offsets(dim, reach):
    """Integer offsets m != 0 with |m| <= reach whose first nonzero entry is positive."""
    side = np.arange(-reach, reach + 1)
    offsets = np.stack(np.meshgrid(*([side] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    offsets = offsets[np.einsum("ij,ij->i", offsets, offsets) <= reach**2]
    nonzero = offsets != 0
    first = np.argmax(nonzero, axis=1)
    keep = nonzero.any(axis=1) & (offsets[np.arange(len(offsets)), first] > 0)
    return offsets[keep]


def _scan(values, support, offsets):
    """Largest |u(x + m) - u(x)| over pairs carried by the support, per offset."""
    out = np.zeros(len(offsets))
    for i, m in enumerate(offsets):
        a, b = overlap_slices(values.shape, m)
        both = support[a] & support[b]
        if both.any():
            out[i] = np.max(np.abs(values[b][both] - values[a][both]))
    return out


def _sampled_offsets(dim, radii, h, count, seed):
    """Axis offsets plus ``count`` seeded directions per radius, rounded toward 0."""
    rng = np.random.default_rng(seed)
    per_radius = []
    for r in radii:
        directions = rng.normal(size=(count, dim))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        offsets = np.fix(np.vstack((np.eye(dim), directions)) * (r / h)).astype(np.int64)
        offsets = offsets[np.any(offsets != 0, axis=1)]
        per_radius.append(np.unique(offsets, axis=0))
    return per_radius


def modulus(u, eps0, s_max, exhaustive_limit=129, pair_samples=1_000_000, seed=0, verbose=False):
    """
    Modulus of continuity of a grid function over the dyadic radii eps0 / 2^k.

    Grids with at most ``exhaustive_limit`` points per axis are scanned over
    every lattice offset; larger grids scan every point against a fixed-seed
    sample of offsets per radius, sized so that about ``pair_samples`` pairs are
    inspected. Offset chunks are evaluated in parallel with dask threads and
    reduced by max.

    Parameters
    ----------
    u : GridFn
    eps0 : float
        Largest radius.
    s_max : int
        Depth of the dyadic ladder.
    exhaustive_limit : int
    pair_samples : int
    seed : int
    verbose : bool

    Returns
    -------
    ModulusCurve

    Raises
    ------
    ParameterError
        If no radius is at least two grid cells.
    """
    if u.radial:
        raise ShapeError("The modulus scan needs a grid function")
    if not eps0 > 0 or int(s_max) != s_max or s_max < 0:
        raise ParameterError(f"Invalid dyadic ladder eps0 = {eps0}, s_max = {s_max}")

    h = u.grid.h
    radii = dyadic_radii(eps0, int(s_max))
    resolvable = radii >= 2 * h * (1 - 1e-12)
    if not resolvable.all():
        warnings.warn(
            f"Dropping {int((~resolvable).sum())} radii below two grid cells ({2 * h:.3g})",
            ModulusTruncatedWarning,
            stacklevel=2,
        )
        radii = radii[resolvable]
    if radii.size == 0:
        raise ParameterError(f"No dyadic radius from {eps0} is resolvable at h = {h:.3g}")

    values = np.where(u.support, u.values, 0.0)
    support = u.support
    dim = u.grid.domain.dim
    points = int(support.sum())

    if u.grid.resolution + 1 <= exhaustive_limit:
        mode = "exhaustive"
        reach = int(np.floor(radii[0] / h * (1 + 1e-12)))
        offsets = _half_space_offsets(dim, reach)
        groups = [offsets]
    else:
        mode = "sampled"
        count = max(8, int(pair_samples) // max(1, points * radii.size) - dim)
        groups = _sampled_offsets(dim, radii, h, count, seed)

    tasks = []
    for offsets in groups:
        for start in range(0, len(offsets), CHUNK):
            tasks.append(delayed(_scan)(values, support, offsets[start : start + CHUNK]))
    if verbose:
        with ProgressBar():
            maxima = compute(*tasks, scheduler="threads")
    else:
        maxima = compute(*tasks, scheduler="threads")

    offsets = np.vstack(groups)
    maxima = np.concatenate(maxima)
    lengths = np.linalg.norm(offsets, axis=1) * h

    omega = np.array(
        [maxima[lengths <= r * (1 + 1e-12)].max(initial=0.0) for r in radii]
    )
    return ModulusCurve.from_values(radii, omega, mode, len(offsets) * points, h)
