from abc import ABC, abstractmethod
from itertools import product
from math import gamma, pi

import numpy as np
from scipy.integrate import quad

from ..utils.errors import ConfigurationError, ParameterError


def sphere_area(dim):
    """Area of the unit sphere of R^dim."""
    return 2.0 * pi ** (dim / 2) / gamma(dim / 2)


def _smoothstep(t):
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


class Kernel(ABC):
    """
    Radial, radially nonincreasing regularization kernel on R^{2n} with unit mass.

    Attributes
    ----------
    n : int
        Complex dimension.
    dim : int
        Real dimension 2n.
    support_radius : float
        R, eta vanishes outside B_R.
    plateau_radius : float
        Radius a of the ball U = B_a on which eta >= delta; 0 when there is none.
    delta : float
        Lower bound of eta on the plateau.

    Methods
    -------
    profile
        eta as a function of |x|.
    mass
        Quadrature of eta against Lebesgue measure.
    dilated
        Kernel eta_s(x) = s^(-2n) eta(x / s).
    weights
        Discrete weights of eta_eps on a grid.
    """

    kind = None

    def __init__(self, n=1):
        if int(n) != n or n < 1:
            raise ConfigurationError(f"Complex dimension must be a positive integer, got {n}")
        self.n = int(n)
        self.dim = 2 * self.n
        self._norm = None

    @abstractmethod
    def _shape(self, r):
        """Unnormalized radial profile."""
        pass

    def _radial_integral(self, func, upper=None):
        upper = self.support_radius if upper is None else upper
        breaks = [self.plateau_radius] if 0 < self.plateau_radius < upper else None
        value, _ = quad(
            lambda r: float(func(r)) * r ** (self.dim - 1),
            0.0,
            upper,
            points=breaks,
            limit=200,
            epsabs=1e-13,
            epsrel=1e-12,
        )
        return sphere_area(self.dim) * value

    @property
    def normalization(self):
        if self._norm is None:
            self._norm = self._radial_integral(self._shape)
        return self._norm

    def profile(self, r):
        r = np.asarray(r, dtype=float)
        return np.where(r < self.support_radius, self._shape(r), 0.0) / self.normalization

    def __call__(self, points):
        return self.profile(np.linalg.norm(np.asarray(points, dtype=float), axis=-1))

    @property
    def delta(self):
        if self.plateau_radius <= 0:
            return 0.0
        return float(self.profile(self.plateau_radius))

    def mass(self):
        return self._radial_integral(self.profile)

    def dilated(self, s):
        return DilatedKernel(self, s)

    def weights(self, h, eps, subsample=None):
        """
        Cell-averaged weights of eta_eps on the lattice h Z^{2n}, normalized to sum 1.

        Parameters
        ----------
        h : float
            Grid spacing.
        eps : float
            Dilation of the kernel.
        subsample : int, optional
            Per-axis samples per cell; 16 in real dimension 2 and 4 otherwise.

        Returns
        -------
        numpy.ndarray
            Array of odd side ``2 m + 1`` centered on the zero offset.
        """
        if not eps > 0:
            raise ParameterError(f"Kernel dilation must be positive, got {eps}")
        if subsample is None:
            subsample = 16 if self.dim == 2 else 4
        radius = self.support_radius * eps
        m = int(np.ceil(radius / h))
        side = np.arange(-m, m + 1) * h
        frac = ((np.arange(subsample) + 0.5) / subsample - 0.5) * h

        centers = np.stack(np.meshgrid(*([side] * self.dim), indexing="ij"), axis=-1)
        total = np.zeros(centers.shape[:-1])
        for offset in product(frac, repeat=self.dim):
            r = np.linalg.norm(centers + np.asarray(offset), axis=-1)
            total += self.profile(r / eps)
        mass = total.sum()
        if mass <= 0:
            return np.ones((1,) * self.dim)
        return total / mass

    def to_dict(self):
        return {
            "kind": self.kind,
            "n": self.n,
            "support_radius": self.support_radius,
            "plateau_radius": self.plateau_radius,
            "delta": self.delta,
        }


class BallIndicatorKernel(Kernel):
    """Normalized indicator of the unit ball; its ball averages carry no plateau."""

    kind = "ball"
    support_radius = 1.0
    plateau_radius = 0.0

    def _shape(self, r):
        return np.where(np.asarray(r) < 1.0, 1.0, 0.0)


class SmoothBumpKernel(Kernel):
    """exp(-1 / (1 - |x|^2)) on the unit ball, with plateau B_{1/2}."""

    kind = "smooth"
    support_radius = 1.0
    plateau_radius = 0.5

    def _shape(self, r):
        r = np.asarray(r, dtype=float)
        inside = r < 1.0
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(inside, np.exp(-1.0 / np.where(inside, 1.0 - r * r, 1.0)), 0.0)


class PlateauBumpKernel(Kernel):
    """Constant on B_a, smooth monotone decay to 0 on the annulus a < |x| < 1."""

    kind = "plateau"
    support_radius = 1.0

    def __init__(self, n=1, plateau=0.75):
        super().__init__(n)
        if not 0 < plateau < 1:
            raise ParameterError(f"Plateau radius must lie in (0, 1), got {plateau}")
        self.plateau_radius = float(plateau)

    def _shape(self, r):
        r = np.asarray(r, dtype=float)
        return _smoothstep((1.0 - r) / (1.0 - self.plateau_radius))


class DilatedKernel(Kernel):
    """eta_s(x) = s^(-2n) eta(x / s) for a base kernel eta."""

    def __init__(self, base, scale):
        super().__init__(base.n)
        if not scale > 0:
            raise ParameterError(f"Dilation must be positive, got {scale}")
        self.base = base
        self.scale = float(scale)
        self.kind = base.kind
        self.support_radius = base.support_radius * self.scale
        self.plateau_radius = base.plateau_radius * self.scale
        self._norm = 1.0

    def _shape(self, r):
        return self.scale ** (-self.dim) * self.base.profile(np.asarray(r) / self.scale)

    def to_dict(self):
        record = super().to_dict()
        record["base"] = self.base.to_dict()
        record["scale"] = self.scale
        return record


KERNELS = {
    BallIndicatorKernel.kind: BallIndicatorKernel,
    SmoothBumpKernel.kind: SmoothBumpKernel,
    PlateauBumpKernel.kind: PlateauBumpKernel,
}


def make_kernel(kind, n=1, plateau=0.75, scale=None):
    """Builds a kernel from its JSON form ``{kind, n, plateau, scale}``."""
    if kind not in KERNELS:
        raise ConfigurationError(f"Unknown kernel {kind!r}, expected one of {sorted(KERNELS)}")
    kernel = KERNELS[kind](n=n, plateau=plateau) if kind == "plateau" else KERNELS[kind](n=n)
    return kernel if scale is None else kernel.dilated(scale)


def kernel_from_dict(record):
    """Inverse of ``Kernel.to_dict``; also accepts the short ``{kind, n, plateau}`` form."""
    if "base" in record:
        base = kernel_from_dict(record["base"])
        return base.dilated(record["scale"])
    plateau = record.get("plateau", record.get("plateau_radius", 0.75))
    return make_kernel(
        record.get("kind"), n=int(record.get("n", 1)), plateau=plateau, scale=record.get("scale")
    )
