from dataclasses import dataclass

import numpy as np

from ..domain.grid import norm
from ..utils.errors import ParameterError, PreconditionError, ShapeError


@dataclass(frozen=True)
class StabilityReport:
    """
    Attributes
    ----------
    lhs : float
        max(sup (v - u), 0).
    rhs_norm : float
        L^r norm of max(v - u, 0).
    ratio : float
        lhs / rhs_norm^gamma; 0 when both vanish and inf when only the norm does.
    gamma, r : float
    """

    lhs: float
    rhs_norm: float
    ratio: float
    gamma: float
    r: float

    def to_dict(self):
        return {
            "lhs": self.lhs,
            "rhs_norm": self.rhs_norm,
            "ratio": self.ratio,
            "gamma": self.gamma,
            "r": self.r,
        }


def admissible_gamma(r, n, p):
    """Upper end r / (n p* + r) of the stability exponents, p* = p / (p - 1)."""
    p_star = p / (p - 1)
    return r / (n * p_star + r)


def _boundary_excess(u, v):
    """Largest v - u over boundary crossings and on-boundary grid points."""
    excess = [-np.inf]
    if u.boundary is not None and v.boundary is not None:
        diff = v.boundary - u.boundary
        diff = diff[np.isfinite(diff)]
        if diff.size:
            excess.append(float(diff.max()))
    on = u.grid.on_boundary & u.support & v.support
    if on.any():
        excess.append(float(np.max(v.values[on] - u.values[on])))
    return max(excess)


def stability_check(u, v, r, gamma, p, n=None, tol=1e-9):
    """
    Evaluates both sides of sup (v - u) <= C ||max(v - u, 0)||_{L^r}^gamma.

    Parameters
    ----------
    u : GridFn
        Solution whose density lies in L^p.
    v : GridFn
        Comparison function with v <= u on the boundary.
    r : float
        Norm exponent, at least 1.
    gamma : float
        In [0, r / (n p* + r)).
    p : float
        Integrability exponent of the density of ``u``.
    n : int, optional
        Complex dimension; taken from ``u`` by default.
    tol : float
        Slack of the boundary precondition.

    Returns
    -------
    StabilityReport

    Raises
    ------
    ParameterError
        If r < 1, p <= 1 or gamma is outside its range.
    PreconditionError
        If v exceeds u somewhere on the boundary.
    """
    if u.radial or v.radial or not u.same_grid(v):
        raise ShapeError("Stability check needs two grid functions on one grid")
    n = u.n if n is None else n
    if not r >= 1:
        raise ParameterError(f"The norm exponent must be at least 1, got {r}")
    if not p > 1:
        raise ParameterError(f"The integrability exponent must exceed 1, got {p}")
    upper = admissible_gamma(r, n, p)
    if not 0 <= gamma < upper:
        raise ParameterError(f"gamma must lie in [0, {upper:.6g}), got {gamma}")

    excess = _boundary_excess(u, v)
    if excess > tol:
        raise PreconditionError(f"v exceeds u on the boundary by {excess:.3e}")

    diff = v - u
    positive = diff.with_values(np.maximum(diff.values, 0.0))
    lhs = float(max(np.max(diff.samples, initial=0.0), 0.0))
    rhs_norm = norm(positive, "L1") if r == 1 else norm(positive, "Lp", r)

    if rhs_norm > 0:
        ratio = lhs / rhs_norm**gamma
    else:
        ratio = 0.0 if lhs <= tol else np.inf
    return StabilityReport(lhs, float(rhs_norm), float(ratio), float(gamma), float(r))
