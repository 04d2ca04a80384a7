from abc import ABC, abstractmethod
from math import factorial, pi

import numpy as np
from scipy.optimize import brentq

from ..utils.errors import ConfigurationError, DomainError


def to_complex(points):
    """
    Turns points of R^{2n} with interleaved coordinates (Re z1, Im z1, Re z2, ...)
    into points of C^n.
    """
    points = np.asarray(points, dtype=float)
    return points[..., 0::2] + 1j * points[..., 1::2]


def to_real(z):
    """Inverse of ``to_complex``."""
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape[:-1] + (2 * z.shape[-1],))
    out[..., 0::2] = z.real
    out[..., 1::2] = z.imag
    return out


class Domain(ABC):
    """
    Bounded strictly pseudoconvex domain of C^n, seen as a subset of R^{2n}.

    Attributes
    ----------
    n : int
        Complex dimension.
    dim : int
        Real dimension 2n.

    Methods
    -------
    defining
        Defining function, negative inside, zero on the boundary.
    distance
        Vectorized distance to the boundary (or a lower bound) for interior points.
    bounding_box
        Closed cube containing the closure of the domain.
    crossing_distance
        Distance along a coordinate axis from an interior point to the boundary.
    dist_to_boundary
        Checked distance for a single point.
    descriptor
        JSON shape descriptor.
    """

    kind = None

    def __init__(self, n):
        if int(n) != n or n < 1:
            raise ConfigurationError(f"Complex dimension must be a positive integer, got {n}")
        self.n = int(n)
        self.dim = 2 * self.n

    @abstractmethod
    def defining(self, points):
        """Evaluates the defining function at ``points`` of shape (..., 2n)."""
        pass

    @abstractmethod
    def distance(self, points):
        """Distance to the boundary of interior points, possibly a lower bound."""
        pass

    @abstractmethod
    def bounding_box(self):
        """Returns ``(lo, hi)`` corners of a cube containing the closed domain."""
        pass

    @abstractmethod
    def complex_hessian(self):
        """Complex Hessian (d^2 rho / dz_i dzbar_j) of the defining function."""
        pass

    @abstractmethod
    def descriptor(self):
        pass

    @property
    @abstractmethod
    def diameter(self):
        pass

    @property
    @abstractmethod
    def volume(self):
        pass

    @property
    def tol(self):
        """Absolute tolerance on the defining function used to classify grid points."""
        lo, hi = self.bounding_box()
        return 1e-12 * max(1.0, float(np.max(hi - lo)) ** 2)

    def contains(self, points):
        return self.defining(points) < -self.tol

    def crossing_distance(self, point, axis, step, h):
        """
        Distance t in (0, h] from an interior ``point`` to the boundary along
        ``step * e_axis``, found by root bracketing on the defining function.
        """
        direction = np.zeros(self.dim)
        direction[axis] = step
        point = np.asarray(point, dtype=float)

        def along(t):
            return float(self.defining(point + t * direction))

        end = along(h)
        if end <= 0.0:
            return h
        return brentq(along, 0.0, h, xtol=1e-15 * max(h, 1.0), rtol=4 * np.finfo(float).eps)

    def dist_to_boundary(self, point):
        """
        Distance from an interior point to the boundary.

        Parameters
        ----------
        point : array_like
            Point of R^{2n}.

        Returns
        -------
        float

        Raises
        ------
        DomainError
            If the point is not inside the domain.
        """
        point = np.asarray(point, dtype=float)
        if point.shape != (self.dim,):
            raise DomainError(f"Expected a point of R^{self.dim}, got shape {point.shape}")
        if not self.contains(point):
            raise DomainError(f"Point {point.tolist()} lies outside the domain")
        return float(self.distance(point[None, :])[0])


class Ball(Domain):
    """Euclidean ball of C^n with defining function |z - center|^2 - radius^2."""

    kind = "ball"

    def __init__(self, n=1, radius=1.0, center=None):
        super().__init__(n)
        if not radius > 0:
            raise ConfigurationError(f"Ball radius must be positive, got {radius}")
        self.radius = float(radius)
        self.center = (
            np.zeros(self.dim) if center is None else np.asarray(center, dtype=float)
        )
        if self.center.shape != (self.dim,):
            raise ConfigurationError(
                f"Ball center must have {self.dim} real coordinates, got {self.center.shape}"
            )

    def defining(self, points):
        q = np.asarray(points, dtype=float) - self.center
        return np.sum(q * q, axis=-1) - self.radius**2

    def distance(self, points):
        q = np.asarray(points, dtype=float) - self.center
        return self.radius - np.sqrt(np.sum(q * q, axis=-1))

    def bounding_box(self):
        return self.center - self.radius, self.center + self.radius

    def complex_hessian(self):
        return np.eye(self.n, dtype=complex)

    def crossing_distance(self, point, axis, step, h):
        q = np.asarray(point, dtype=float) - self.center
        qa = step * q[axis]
        disc = qa * qa - (float(q @ q) - self.radius**2)
        return float(min(h, -qa + np.sqrt(max(disc, 0.0))))

    @property
    def diameter(self):
        return 2.0 * self.radius

    @property
    def volume(self):
        return pi**self.n * self.radius ** (2 * self.n) / factorial(self.n)

    def descriptor(self):
        return {
            "kind": self.kind,
            "n": self.n,
            "radius": self.radius,
            "center": self.center.tolist(),
        }


class TaylorDomain(Domain):
    """
    Domain {x : f(x - anchor) < 0} cut out by the quadratic Taylor model f of a
    defining function at a boundary point.

    Attributes
    ----------
    data : TaylorData
        Coefficients (a, b, c) of the model and its ``anchor`` in R^{2n}.
    gradient, hessian : numpy.ndarray
        Real gradient at the anchor and real Hessian of the model.

    Notes
    -----
    ``distance`` is the largest t with ``|grad f(x)| t + |H| t^2 / 2 < |f(x)|``,
    a lower bound on the true distance that is exact on balls.
    """

    kind = "taylor"

    def __init__(self, data, half_width=None):
        super().__init__(data.n)
        self.data = data
        self.anchor = np.asarray(data.anchor, dtype=float)
        self.gradient, self.hessian = data.real_derivatives()
        self._hnorm = float(np.linalg.norm(self.hessian, 2))

        eig = np.linalg.eigvalsh(self.hessian)
        if eig.min() <= 0:
            raise DomainError(
                "The quadratic model has an indefinite real Hessian, its sublevel set is unbounded"
            )
        hinv = np.linalg.inv(self.hessian)
        self._vertex = -hinv @ self.gradient
        level = float(self.gradient @ hinv @ self.gradient)
        widths = np.sqrt(level * np.diag(hinv))
        self._center = self.anchor + self._vertex
        self._half_width = float(widths.max()) if half_width is None else float(half_width)
        self._level = level

    def defining(self, points):
        return self.data.evaluate(np.asarray(points, dtype=float) - self.anchor)

    def distance(self, points):
        w = np.asarray(points, dtype=float) - self.anchor
        g = np.linalg.norm(self.gradient + w @ self.hessian.T, axis=-1)
        f = np.abs(self.data.evaluate(w))
        if self._hnorm == 0:
            return f / g
        return (-g + np.sqrt(g * g + 2.0 * self._hnorm * f)) / self._hnorm

    def bounding_box(self):
        return self._center - self._half_width, self._center + self._half_width

    def complex_hessian(self):
        return np.asarray(self.data.c, dtype=complex)

    @property
    def diameter(self):
        # the ellipsoid's longest axis
        eig = np.linalg.eigvalsh(self.hessian)
        return 2.0 * float(np.sqrt(self._level / eig.min()))

    @property
    def volume(self):
        d = self.dim
        unit = pi ** (d / 2) / factorial(self.n)
        eig = np.linalg.eigvalsh(self.hessian)
        return unit * float(np.prod(np.sqrt(self._level / eig)))

    def descriptor(self):
        return {"kind": self.kind, "n": self.n, "taylor": self.data.to_dict()}


def domain_from_dict(descriptor):
    """Rebuilds a Domain from its JSON shape descriptor."""
    kind = descriptor.get("kind")
    if kind == Ball.kind:
        return Ball(
            n=descriptor["n"],
            radius=descriptor.get("radius", 1.0),
            center=descriptor.get("center"),
        )
    if kind == TaylorDomain.kind:
        from ..barriers.barrier import TaylorData

        return TaylorDomain(TaylorData.from_dict(descriptor["taylor"]))
    raise ConfigurationError(f"Unknown domain kind {kind!r}")
