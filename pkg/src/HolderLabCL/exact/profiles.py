"""Radial plurisubharmonic profiles u(z) = phi(|z|^2) with known Monge-Ampere densities.

Densities are given in the normalization det(d^2 u / dz_j dzbar_k) = f. The operator
(dd^c u)^n = f dmu differs from it by the factor ``ddc_to_det(n)``; that factor only
enters report text.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from math import factorial, pi

import numpy as np
from scipy.interpolate import CubicHermiteSpline, CubicSpline

from ..domain.grid import GridFn
from ..utils.errors import (
    ConfigurationError,
    InadmissibleProfileError,
    ParameterError,
    PreconditionError,
)

DDC_BASE = 4


def ddc_to_det(n):
    """Ratio between the (dd^c u)^n and det(u_{j kbar}) normalizations in dimension n."""
    return DDC_BASE**n * factorial(n)


@dataclass(frozen=True)
class LpMembership:
    in_Lp: bool
    critical_p: float


@dataclass(frozen=True)
class HolderExponent:
    exponent: float
    saturated: bool


class RadialProfile(ABC):
    """
    Profile phi of a radial function u(z) = phi(|z|^2) on C^n.

    Attributes
    ----------
    n : int
        Complex dimension.
    scale : float
        Positive factor multiplying the profile.
    S : float
        Outer end of the radial mesh.
    mesh_size : int
        Number of mesh nodes.

    Methods
    -------
    phi, dphi, ddphi
        Profile and its first two s-derivatives.
    admissibility
        Record of plurisubharmonicity and L^p membership.
    on_grid
        Samples u on a grid.
    scaled
        Copy multiplied by a constant.
    """

    kind = None

    def __init__(self, n=1, scale=1.0, S=1.0, mesh_size=100_001):
        if int(n) != n or n < 1:
            raise ConfigurationError(f"Complex dimension must be a positive integer, got {n}")
        if not scale > 0:
            raise ParameterError(f"Profile scale must be positive, got {scale}")
        self.n = int(n)
        self.scale = float(scale)
        self.S = float(S)
        self.mesh_size = int(mesh_size)

    @property
    def mesh(self):
        return np.linspace(0.0, self.S, self.mesh_size)

    @abstractmethod
    def phi(self, s):
        pass

    @abstractmethod
    def dphi(self, s):
        pass

    @abstractmethod
    def ddphi(self, s):
        pass

    @abstractmethod
    def scaled(self, c):
        pass

    def u(self, points, center=None):
        """u(z) = phi(|z - center|^2) at points of R^{2n}."""
        points = np.asarray(points, dtype=float)
        q = points if center is None else points - center
        return self.phi(np.sum(q * q, axis=-1))

    def on_grid(self, grid):
        """Samples u on the closure of ``grid`` and on its boundary crossings."""
        center = getattr(grid.domain, "center", None)
        return GridFn.from_callable(lambda x: self.u(x, center), grid)

    def density(self, s):
        """Pointwise density phi'^(n-1) (phi' + s phi'') for s > 0."""
        s = np.asarray(s, dtype=float)
        d1 = self.dphi(s)
        return d1 ** (self.n - 1) * (d1 + s * self.ddphi(s))

    def first_cell_average(self, s1):
        """Average of the density over {s < s1} against s^(n-1) ds."""
        return float(self.density(s1))

    def density_on_grid(self, grid):
        """Density as a grid function, singular cells averaged and flagged."""
        center = getattr(grid.domain, "center", None)

        def f(points):
            q = points if center is None else points - center
            s = np.sum(q * q, axis=-1)
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(s > 0, self.density(s), np.inf)

        return GridFn.from_callable(f, grid)

    def monotone(self):
        d1 = self.dphi(self.mesh[1:])
        return bool(np.all(d1 >= -1e-12 * max(1.0, np.max(np.abs(d1)))))

    def admissibility(self, p=None):
        record = {"monotone": self.monotone()}
        if p is not None:
            try:
                record["in_Lp"] = lp_membership(self, p).in_Lp
            except PreconditionError:
                record["in_Lp"] = None
        return record

    def to_dict(self):
        return {
            "n": self.n,
            "kind": self.kind,
            "beta": getattr(self, "beta", None),
            "scale": self.scale,
            "mesh_size": self.mesh_size,
            "S": self.S,
        }


class PowerProfile(RadialProfile):
    """phi(s) = scale * s^beta, so u(z) = scale * |z|^(2 beta)."""

    kind = "power"

    def __init__(self, beta, **kwargs):
        super().__init__(**kwargs)
        if not 0 < beta <= 1:
            raise ParameterError(f"Power profiles need beta in (0, 1], got {beta}")
        self.beta = float(beta)

    def phi(self, s):
        return self.scale * np.asarray(s, dtype=float) ** self.beta

    def dphi(self, s):
        with np.errstate(divide="ignore"):
            return self.scale * self.beta * np.asarray(s, dtype=float) ** (self.beta - 1)

    def ddphi(self, s):
        with np.errstate(divide="ignore"):
            return (
                self.scale
                * self.beta
                * (self.beta - 1)
                * np.asarray(s, dtype=float) ** (self.beta - 2)
            )

    @property
    def density_exponent(self):
        return self.n * (self.beta - 1)

    @property
    def density_coefficient(self):
        return self.scale**self.n * self.beta ** (self.n + 1)

    def density(self, s):
        with np.errstate(divide="ignore"):
            return self.density_coefficient * np.asarray(s, dtype=float) ** self.density_exponent

    def first_cell_average(self, s1):
        q = self.density_exponent
        return self.density_coefficient * self.n * s1**q / (self.n + q)

    def scaled(self, c):
        return PowerProfile(
            self.beta, n=self.n, scale=self.scale * c, S=self.S, mesh_size=self.mesh_size
        )

    def lp_norm(self, p, radius=1.0):
        """Exact L^p norm of the density on the ball of the given radius."""
        exponent = self.n + self.density_exponent * p
        if exponent <= 0:
            return np.inf
        s_max = radius**2
        integral = pi**self.n / factorial(self.n - 1) * s_max**exponent / exponent
        return float(self.density_coefficient * integral ** (1.0 / p))


class QuadraticProfile(RadialProfile):
    """phi(s) = scale * s, so u(z) = scale * |z|^2 and f = scale^n."""

    kind = "quadratic"

    def phi(self, s):
        return self.scale * np.asarray(s, dtype=float)

    def dphi(self, s):
        return np.full(np.shape(s), self.scale)

    def ddphi(self, s):
        return np.zeros(np.shape(s))

    def scaled(self, c):
        return QuadraticProfile(n=self.n, scale=self.scale * c, S=self.S, mesh_size=self.mesh_size)


class TabulatedProfile(RadialProfile):
    """
    Profile known only on a mesh. Derivatives come from a cubic spline through the
    values (or a cubic Hermite spline when phi' is tabulated too), which is one-sided
    at s = 0.
    """

    kind = "tabulated"

    def __init__(self, mesh, values, derivative=None, n=1, scale=1.0):
        mesh = np.asarray(mesh, dtype=float)
        super().__init__(n=n, scale=scale, S=float(mesh[-1]), mesh_size=mesh.size)
        if mesh[0] != 0.0 or np.any(np.diff(mesh) <= 0):
            raise ParameterError("Tabulated mesh must start at s = 0 and increase strictly")
        self._mesh = mesh
        self._values = np.asarray(values, dtype=float)
        self._derivative = None if derivative is None else np.asarray(derivative, dtype=float)
        if self._derivative is None:
            self._spline = CubicSpline(mesh, self._values, bc_type="not-a-knot")
        else:
            self._spline = CubicHermiteSpline(mesh, self._values, self._derivative)
        if not np.isfinite(self._values[0]):
            raise ParameterError("Tabulated profiles need a finite value at s = 0")

    @property
    def mesh(self):
        return self._mesh

    def phi(self, s):
        return self.scale * self._spline(s)

    def dphi(self, s):
        return self.scale * self._spline(s, 1)

    def ddphi(self, s):
        return self.scale * self._spline(s, 2)

    def scaled(self, c):
        return TabulatedProfile(
            self._mesh, self._values, self._derivative, n=self.n, scale=self.scale * c
        )


def ma_density(profile):
    """
    Monge-Ampere density of a radial profile on its mesh.

    Parameters
    ----------
    profile : RadialProfile

    Returns
    -------
    GridFn
        Radial function f(s) = phi'(s)^(n-1) (phi'(s) + s phi''(s)). A singular value at
        s = 0 is replaced by the density's average over the first cell and flagged as
        omitted.

    Raises
    ------
    InadmissibleProfileError
        If phi' takes negative values on the mesh.
    """
    if not profile.monotone():
        raise InadmissibleProfileError(
            f"{profile.kind} profile has a decreasing part, u is not plurisubharmonic"
        )
    mesh = profile.mesh
    values = np.empty(mesh.size)
    with np.errstate(divide="ignore", invalid="ignore"):
        values[1:] = profile.density(mesh[1:])
        at_zero = profile.density(mesh[:1])[0]

    omitted = np.zeros(mesh.size, dtype=bool)
    if np.isfinite(at_zero):
        values[0] = at_zero
    else:
        values[0] = profile.first_cell_average(mesh[1])
        omitted[0] = True
    return GridFn.radial_fn(profile.n, mesh, values, omitted=omitted)


def lp_membership(profile, p):
    """
    Whether the density of a power profile lies in L^p of the unit ball.

    The density s^(n (beta - 1)) is p-integrable against s^(n-1) ds iff
    p (1 - beta) < 1, so the critical exponent is 1 / (1 - beta).
    """
    if not p > 1:
        raise ParameterError(f"L^p membership needs p > 1, got {p}")
    if isinstance(profile, QuadraticProfile):
        return LpMembership(in_Lp=True, critical_p=np.inf)
    if not isinstance(profile, PowerProfile):
        raise PreconditionError("L^p membership is only known in closed form for power profiles")
    if profile.beta == 1:
        return LpMembership(in_Lp=True, critical_p=np.inf)
    critical = 1.0 / (1.0 - profile.beta)
    return LpMembership(in_Lp=bool(p < critical), critical_p=critical)


def true_holder_exponent(profile):
    """
    Exact Holder exponent of u = |z|^(2 beta) on the closed ball, capped at 1.

    Returns
    -------
    HolderExponent
        ``saturated`` is set when 2 beta exceeds 1.
    """
    if isinstance(profile, QuadraticProfile):
        return HolderExponent(exponent=1.0, saturated=True)
    if not isinstance(profile, PowerProfile):
        raise PreconditionError("The exact Holder exponent is only known for power profiles")
    raw = 2.0 * profile.beta
    return HolderExponent(exponent=min(raw, 1.0), saturated=raw > 1.0)


def make_profile(kind, n=1, beta=None, **kwargs):
    """Builds a profile from its JSON form ``{n, kind, beta, mesh_size, S}``."""
    if kind == PowerProfile.kind:
        return PowerProfile(beta, n=n, **kwargs)
    if kind == QuadraticProfile.kind:
        return QuadraticProfile(n=n, **kwargs)
    raise ConfigurationError(f"Unknown profile kind {kind!r}")
