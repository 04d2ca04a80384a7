from dataclasses import dataclass
from itertools import product
from math import factorial, pi

import numpy as np
import xarray as xr
from scipy.integrate import trapezoid

from ..utils.errors import (
    ConfigurationError,
    DomainError,
    ParameterError,
    ShapeError,
)

INTERIOR = 1
BOUNDARY = 0
EXTERIOR = -1

MIN_RESOLUTION = 8
MAX_GRID_POINTS = 5_000_000


def shift(array, axis, step, fill):
    """
    Returns ``out`` with ``out[i] = array[i + step]`` along ``axis``; entries whose
    source falls off the array take ``fill``.
    """
    out = np.full_like(array, fill)
    size = array.shape[axis]
    if abs(step) >= size:
        return out
    src = [slice(None)] * array.ndim
    dst = [slice(None)] * array.ndim
    if step >= 0:
        dst[axis] = slice(0, size - step)
        src[axis] = slice(step, size)
    else:
        dst[axis] = slice(-step, size)
        src[axis] = slice(0, size + step)
    out[tuple(dst)] = array[tuple(src)]
    return out


def overlap_slices(shape, offset):
    """
    Slices ``(a, b)`` such that ``x[a]`` and ``x[b]`` pair every index i with
    i + offset inside an array of ``shape``.
    """
    a, b = [], []
    for size, m in zip(shape, offset):
        m = int(m)
        if m >= 0:
            a.append(slice(0, size - m))
            b.append(slice(m, size))
        else:
            a.append(slice(-m, size))
            b.append(slice(0, size + m))
    return tuple(a), tuple(b)


@dataclass(frozen=True, eq=False)
class BoundaryLinks:
    """
    Stencil arms leaving the interior.

    Every arm joins an interior grid point to its axis neighbour ``step * e_axis``
    when that neighbour is not interior; ``theta * h`` is the distance to the
    boundary crossing along the arm and ``points`` holds the crossings.
    """

    index: np.ndarray
    axis: np.ndarray
    step: np.ndarray
    theta: np.ndarray
    points: np.ndarray

    def __len__(self):
        return int(self.index.size)


class Grid:
    """
    Uniform Cartesian grid over a Domain's bounding box.

    Attributes
    ----------
    domain : Domain
    resolution : int
        Cells per axis; each axis carries ``resolution + 1`` points.
    h : float
        Grid spacing, the box side over the resolution.
    axes : list of numpy.ndarray
        Coordinates along each real axis.
    points : numpy.ndarray
        All grid points, shape ``shape + (2n,)``.
    classification : numpy.ndarray
        ``INTERIOR``, ``BOUNDARY`` (boundary-adjacent) or ``EXTERIOR`` per point.
    on_boundary : numpy.ndarray
        Points lying on the boundary within the domain tolerance.
    dist : numpy.ndarray
        Distance to the boundary on interior points, NaN elsewhere.
    links : BoundaryLinks
        Interior stencil arms that leave the domain.
    """

    def __init__(self, domain, resolution):
        if int(resolution) != resolution or resolution < MIN_RESOLUTION:
            raise ConfigurationError(
                f"Resolution must be an integer >= {MIN_RESOLUTION}, got {resolution}"
            )
        resolution = int(resolution)
        if (resolution + 1) ** domain.dim > MAX_GRID_POINTS:
            raise ConfigurationError(
                f"Resolution {resolution} in real dimension {domain.dim} exceeds "
                f"{MAX_GRID_POINTS} grid points"
            )

        self.domain = domain
        self.resolution = resolution
        lo, hi = domain.bounding_box()
        self.lo = np.asarray(lo, dtype=float)
        self.h = float(np.max(hi - lo)) / resolution
        self.axes = [self.lo[k] + self.h * np.arange(resolution + 1) for k in range(domain.dim)]
        self.shape = (resolution + 1,) * domain.dim
        self.points = np.stack(np.meshgrid(*self.axes, indexing="ij"), axis=-1)

        rho = domain.defining(self.points)
        tol = domain.tol
        interior = rho < -tol
        self.on_boundary = np.abs(rho) <= tol

        touches = np.zeros(self.shape, dtype=bool)
        for axis in range(domain.dim):
            for step in (1, -1):
                touches |= shift(interior, axis, step, False)
        boundary = (self.on_boundary | touches) & ~interior

        self.classification = np.full(self.shape, EXTERIOR, dtype=np.int8)
        self.classification[boundary] = BOUNDARY
        self.classification[interior] = INTERIOR

        self.dist = np.full(self.shape, np.nan)
        self.dist[interior] = domain.distance(self.points[interior])

        self.links = self._build_links(interior)

    @property
    def interior(self):
        return self.classification == INTERIOR

    @property
    def boundary(self):
        return self.classification == BOUNDARY

    @property
    def closure(self):
        """Grid points of the closed domain: interior and on-boundary points."""
        return self.interior | self.on_boundary

    @property
    def cell_volume(self):
        return self.h**self.domain.dim

    def _build_links(self, interior):
        index, axes, steps, thetas, crossings = [], [], [], [], []
        for axis in range(self.domain.dim):
            for step in (1, -1):
                leaving = interior & ~shift(interior, axis, step, False)
                for flat in np.flatnonzero(leaving):
                    point = self.points.reshape(-1, self.domain.dim)[flat]
                    t = self.domain.crossing_distance(point, axis, step, self.h)
                    theta = min(max(t / self.h, 1e-8), 1.0)
                    crossing = point.copy()
                    crossing[axis] += step * theta * self.h
                    index.append(flat)
                    axes.append(axis)
                    steps.append(step)
                    thetas.append(theta)
                    crossings.append(crossing)

        dim = self.domain.dim
        return BoundaryLinks(
            index=np.asarray(index, dtype=np.int64),
            axis=np.asarray(axes, dtype=np.int64),
            step=np.asarray(steps, dtype=np.int64),
            theta=np.asarray(thetas, dtype=float),
            points=np.asarray(crossings, dtype=float).reshape(-1, dim),
        )

    def same_as(self, other):
        return other is self or (
            other is not None
            and self.resolution == other.resolution
            and self.domain.descriptor() == other.domain.descriptor()
        )

    def shrunk(self, eps):
        return ShrunkDomain(self, eps)

    def coords(self):
        return {f"x{k}": axis for k, axis in enumerate(self.axes)}

    def dims(self):
        return [f"x{k}" for k in range(self.domain.dim)]


class ShrunkDomain:
    """
    Interior grid points at distance more than ``eps`` from the boundary.

    Attributes
    ----------
    grid : Grid
    domain : Domain
        Parent domain.
    eps : float
        Shrink parameter.
    mask : numpy.ndarray
        Membership of every grid point.
    """

    def __init__(self, grid, eps):
        if eps < 0:
            raise ParameterError(f"Shrink parameter must be nonnegative, got {eps}")
        self.grid = grid
        self.domain = grid.domain
        self.eps = float(eps)
        with np.errstate(invalid="ignore"):
            self.mask = grid.interior & (grid.dist > self.eps)

    def __contains__(self, index):
        return bool(self.mask[tuple(index)])

    def __len__(self):
        return int(self.mask.sum())

    @property
    def empty(self):
        return not self.mask.any()


class GridFn:
    """
    Real function sampled on a Grid, or on a radial mesh in s = |z|^2.

    Attributes
    ----------
    values : numpy.ndarray
        Samples; NaN off the support. Radial functions hold one value per mesh node.
    grid : Grid or None
        Grid of a grid function, ``None`` when radial.
    support : numpy.ndarray
        Points carrying a sample.
    boundary : numpy.ndarray or None
        Samples at the boundary crossings ``grid.links.points``.
    omitted : numpy.ndarray
        Singular cells replaced by cell averages, left out of quadrature.
    mesh : numpy.ndarray or None
        Radial mesh in s, strictly increasing from 0.
    n : int
        Complex dimension.

    Methods
    -------
    from_callable
        Samples a function of points on the closure of a grid and on its crossings.
    radial_fn
        Builds a radial function on a mesh.
    with_values
        Same grid, new samples.
    to_dataarray
        Labelled view of the samples.
    """

    def __init__(
        self, values, grid=None, support=None, boundary=None, omitted=None, mesh=None, n=None
    ):
        values = np.asarray(values, dtype=float)
        self.grid = grid
        self.mesh = None if mesh is None else np.asarray(mesh, dtype=float)

        if grid is None and self.mesh is None:
            raise ShapeError("A GridFn needs either a grid or a radial mesh")
        if grid is not None:
            if values.shape != grid.shape:
                raise ShapeError(f"Values of shape {values.shape} do not fit grid {grid.shape}")
            self.n = grid.domain.n
        else:
            if values.shape != self.mesh.shape or self.mesh.ndim != 1:
                raise ShapeError("Radial values must match a one-dimensional mesh")
            if self.mesh[0] != 0.0 or np.any(np.diff(self.mesh) <= 0):
                raise ShapeError("Radial mesh must start at s = 0 and increase strictly")
            if n is None:
                raise ShapeError("A radial GridFn needs its complex dimension")
            self.n = int(n)

        self.support = (
            np.isfinite(values) if support is None else np.asarray(support, dtype=bool)
        )
        if not np.all(np.isfinite(values[self.support])):
            raise DomainError("Grid function samples must be finite on their support")
        self.values = np.where(self.support, values, np.nan)
        self.omitted = (
            np.zeros(values.shape, dtype=bool)
            if omitted is None
            else np.asarray(omitted, dtype=bool) & self.support
        )
        self.boundary = None if boundary is None else np.asarray(boundary, dtype=float)

    @classmethod
    def radial_fn(cls, n, mesh, values, omitted=None):
        return cls(values, mesh=mesh, n=n, omitted=omitted, support=np.ones(len(mesh), bool))

    @classmethod
    def from_callable(cls, func, grid, support=None, subsample=None):
        """
        Samples ``func`` on ``grid``.

        Parameters
        ----------
        func : callable
            Vectorized function of points of shape (..., 2n).
        grid : Grid
        support : numpy.ndarray, optional
            Points to sample; defaults to the closure of the domain.
        subsample : int, optional
            Per-axis subsamples used to average cells where ``func`` is not finite.

        Returns
        -------
        GridFn
            With non-finite samples replaced by cell averages and flagged as omitted.
        """
        support = grid.closure if support is None else np.asarray(support, dtype=bool)
        if subsample is None:
            subsample = 16 if grid.domain.dim == 2 else 4

        values = np.full(grid.shape, np.nan)
        with np.errstate(divide="ignore", invalid="ignore"):
            values[support] = func(grid.points[support])

        singular = support & ~np.isfinite(values)
        if singular.any():
            frac = ((np.arange(subsample) + 0.5) / subsample - 0.5) * grid.h
            offsets = np.array(list(product(frac, repeat=grid.domain.dim)))
            for index in zip(*np.nonzero(singular)):
                cell = grid.points[index] + offsets
                with np.errstate(divide="ignore", invalid="ignore"):
                    samples = func(cell)
                values[index] = float(np.mean(samples[np.isfinite(samples)]))

        with np.errstate(divide="ignore", invalid="ignore"):
            boundary = np.asarray(func(grid.links.points), dtype=float)
        return cls(values, grid=grid, support=support, boundary=boundary, omitted=singular)

    @property
    def radial(self):
        return self.grid is None

    @property
    def h(self):
        return None if self.radial else self.grid.h

    @property
    def domain(self):
        return None if self.radial else self.grid.domain

    @property
    def samples(self):
        return self.values[self.support]

    def with_values(self, values, support=None, boundary=None, omitted=None):
        support = self.support if support is None else support
        return GridFn(
            values,
            grid=self.grid,
            support=support,
            boundary=self.boundary if boundary is None else boundary,
            omitted=self.omitted if omitted is None else omitted,
            mesh=self.mesh,
            n=self.n,
        )

    def same_grid(self, other):
        if self.radial or other.radial:
            return (
                self.radial
                and other.radial
                and self.n == other.n
                and self.mesh.shape == other.mesh.shape
                and np.array_equal(self.mesh, other.mesh)
            )
        return self.grid.same_as(other.grid)

    def _combine(self, other, op):
        if isinstance(other, GridFn):
            if not self.same_grid(other):
                raise ShapeError("Grid functions live on different grids")
            support = self.support & other.support
            with np.errstate(invalid="ignore"):
                values = op(self.values, other.values)
            boundary = None
            if self.boundary is not None and other.boundary is not None:
                boundary = op(self.boundary, other.boundary)
            return GridFn(
                np.where(support, values, np.nan),
                grid=self.grid,
                support=support,
                boundary=boundary,
                omitted=self.omitted | other.omitted,
                mesh=self.mesh,
                n=self.n,
            )
        boundary = None if self.boundary is None else op(self.boundary, other)
        return self.with_values(op(self.values, other), boundary=boundary)

    def __add__(self, other):
        return self._combine(other, np.add)

    def __radd__(self, other):
        return self._combine(other, np.add)

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __mul__(self, other):
        return self._combine(other, np.multiply)

    def __rmul__(self, other):
        return self._combine(other, np.multiply)

    def to_dataarray(self, name="value"):
        if self.radial:
            return xr.DataArray(self.values, coords={"s": self.mesh}, dims=["s"], name=name)
        return xr.DataArray(
            self.values, coords=self.grid.coords(), dims=self.grid.dims(), name=name
        )


def build_grid(domain, resolution):
    """
    Discretizes ``domain`` on a uniform grid.

    Parameters
    ----------
    domain : Domain
    resolution : int
        Cells per axis, at least 8.

    Returns
    -------
    GridFn
        Skeleton with no samples; its ``grid`` carries the classification.

    Raises
    ------
    ConfigurationError
        If the resolution is too small or the grid too large.
    """
    grid = Grid(domain, resolution)
    return GridFn(
        np.full(grid.shape, np.nan),
        grid=grid,
        support=np.zeros(grid.shape, dtype=bool),
        boundary=np.full(len(grid.links), np.nan),
    )


def dist_to_boundary(domain, point):
    return domain.dist_to_boundary(point)


def radial_weights(n, mesh):
    """Density of Lebesgue measure of C^n in the variable s = |z|^2."""
    return pi**n * mesh ** (n - 1) / factorial(n - 1)


def integrate(f, integrand=None):
    """
    Integrates ``integrand`` (defaults to ``f.values``) over the quadrature set of ``f``.

    Grid functions use the cell volume over interior support points that are not
    omitted; radial functions use the trapezoid rule in s against the measure
    density, skipping omitted nodes at the start of the mesh.
    """
    values = f.values if integrand is None else integrand
    if f.radial:
        start = 0
        while start < len(f.mesh) and f.omitted[start]:
            start += 1
        mesh = f.mesh[start:]
        if mesh.size < 2:
            return 0.0
        return float(trapezoid(values[start:] * radial_weights(f.n, mesh), mesh))

    mask = f.support & f.grid.interior & ~f.omitted
    return float(np.sum(values[mask]) * f.grid.cell_volume)


def omitted_volume(f):
    """Measure left out of quadrature by omitted singular cells."""
    if f.radial:
        last = int(np.argmin(f.omitted)) if not f.omitted.all() else len(f.mesh) - 1
        s = f.mesh[last]
        return pi**f.n * s**f.n / factorial(f.n)
    return float(np.sum(f.omitted & f.grid.interior) * f.grid.cell_volume)


def norm(f, kind="sup", p=None):
    """
    Norm of a grid function.

    Parameters
    ----------
    f : GridFn
    kind : {"sup", "L1", "Lp"}
    p : float, optional
        Exponent for ``kind="Lp"``, greater than 1.

    Returns
    -------
    float
    """
    kind = kind.lower()
    if kind == "sup":
        samples = np.abs(f.samples)
        return float(samples.max()) if samples.size else 0.0
    if kind == "l1":
        return integrate(f, np.abs(f.values))
    if kind == "lp":
        if p is None or not p > 1:
            raise ParameterError(f"L^p norm needs p > 1, got {p}")
        return integrate(f, np.abs(f.values) ** p) ** (1.0 / p)
    raise ParameterError(f"Unknown norm kind {kind!r}")


def neighbour_mean(f):
    """
    Mean of the 2 * dim axis neighbours at points whose neighbours all carry a
    sample, NaN elsewhere.
    """
    dim = f.grid.domain.dim
    total = np.zeros(f.grid.shape)
    complete = f.support.copy()
    for axis in range(dim):
        for step in (1, -1):
            total += np.nan_to_num(shift(f.values, axis, step, np.nan))
            complete &= shift(f.support, axis, step, False)
    mean = np.full(f.grid.shape, np.nan)
    mean[complete] = total[complete] / (2 * dim)
    return mean


def submean_violation(f):
    """
    Largest amount by which a sample exceeds the mean of its neighbours; a
    nonpositive value means the discrete sub-mean-value property holds.
    """
    gap = f.values - neighbour_mean(f)
    gap = gap[np.isfinite(gap)]
    return float(gap.max()) if gap.size else 0.0


def is_subharmonic(f, tol=1e-9):
    scale = max(1.0, norm(f, "sup"))
    return submean_violation(f) <= tol * scale
