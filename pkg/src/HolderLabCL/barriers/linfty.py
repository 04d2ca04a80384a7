from dataclasses import dataclass
from math import factorial, pi

import numpy as np

from ..domain.grid import GridFn, norm
from ..utils.errors import ParameterError


@dataclass(frozen=True)
class LinftyReport:
    """
    Attributes
    ----------
    lhs : float
        |inf u|.
    inf_phi : float
        |inf phi| over the boundary samples.
    rhs : float
        ||f||_{L^p}^(1/n) |Omega|^delta.
    bound : float
        inf_phi + c_chk rhs.
    passed : bool
    """

    lhs: float
    inf_phi: float
    rhs: float
    bound: float
    passed: bool

    def to_dict(self):
        return {
            "lhs": self.lhs,
            "inf_phi": self.inf_phi,
            "rhs": self.rhs,
            "bound": self.bound,
            "passed": self.passed,
        }


def _boundary_inf(phi):
    if not isinstance(phi, GridFn):
        return float(phi)
    if phi.radial:
        return float(phi.values[-1])
    samples = []
    if phi.boundary is not None:
        samples.append(phi.boundary[np.isfinite(phi.boundary)])
    on = phi.grid.on_boundary & phi.support
    samples.append(phi.values[on])
    samples = np.concatenate(samples)
    return float(samples.min()) if samples.size else 0.0


def _volume(f):
    if f.radial:
        S = float(f.mesh[-1])
        return pi**f.n * S**f.n / factorial(f.n)
    return f.grid.domain.volume


def linfty_check(u, phi, f, p, delta, c_chk=1.0, tol=1e-9):
    """
    Checks |inf u| <= |inf phi| + c_chk ||f||_{L^p}^(1/n) |Omega|^delta.

    Parameters
    ----------
    u : GridFn
        Solution, radial or on a grid.
    phi : GridFn or float
        Boundary data; a radial solution takes its value at s = S.
    f : GridFn
        Density on the same mesh or grid as ``u``.
    p : float
        Integrability exponent, greater than 1.
    delta : float
        In (0, 1 / (n p*)).
    c_chk : float
        Family constant.

    Returns
    -------
    LinftyReport

    Raises
    ------
    ParameterError
        If p <= 1 or delta is out of range.
    """
    if not p > 1:
        raise ParameterError(f"p must exceed 1, got {p}")
    n = u.n
    upper = (p - 1) / (n * p)
    if not 0 < delta < upper:
        raise ParameterError(f"delta must lie in (0, {upper:.6g}), got {delta}")

    lhs = abs(float(np.min(u.samples)))
    inf_phi = abs(_boundary_inf(phi))
    rhs = norm(f, "Lp", p) ** (1.0 / n) * _volume(f) ** delta
    bound = inf_phi + c_chk * rhs
    return LinftyReport(lhs, inf_phi, float(rhs), float(bound), bool(lhs <= bound + tol))
