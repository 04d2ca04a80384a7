"""Densities and boundary data of the Dirichlet problems the lab can solve.

Every entry is a vectorized function of points of R^{2n} (interleaved coordinates)
measured from the domain center. Densities follow the det normalization, so the
"power" density with exponent beta is the one of u = |z|^(2 beta).
"""

import numpy as np

from ..domain.domain import to_complex
from ..domain.grid import GridFn
from ..utils.errors import ConfigurationError, DomainError


def _radius2(points):
    return np.sum(points * points, axis=-1)


def power_density(beta, value=1.0, n=1):
    coefficient = value * beta ** (n + 1)
    exponent = n * (beta - 1.0)

    def f(points):
        s = _radius2(points)
        with np.errstate(divide="ignore"):
            return coefficient * np.where(s > 0, s, 0.0) ** exponent

    return f


def constant_density(value=1.0):
    return lambda points: np.full(np.shape(points)[:-1], float(value))


DENSITIES = {
    "power": lambda instance, n: power_density(instance["density_beta"], instance["density_value"], n),
    "constant": lambda instance, n: constant_density(instance["density_value"]),
    "zero": lambda instance, n: constant_density(0.0),
}


def power_boundary(beta, value=0.0):
    return lambda points: value + _radius2(points) ** beta


def harmonic_boundary(degree):
    """Re(z1^degree), harmonic in z1 and pluriharmonic on C^n."""
    return lambda points: np.real(to_complex(points)[..., 0] ** degree)


BOUNDARIES = {
    "power": lambda instance: power_boundary(instance["boundary_beta"], instance["boundary_value"]),
    "quadratic": lambda instance: power_boundary(1.0, instance["boundary_value"]),
    "constant": lambda instance: constant_density(instance["boundary_value"]),
    "harmonic": lambda instance: harmonic_boundary(int(instance["boundary_degree"])),
}

RADIAL_BOUNDARIES = ("power", "quadratic", "constant")


def density_function(instance, n=1):
    kind = instance["density"]
    if kind not in DENSITIES:
        raise ConfigurationError(f"Unknown density {kind!r}, expected one of {sorted(DENSITIES)}")
    return DENSITIES[kind](instance, n)


def boundary_function(instance):
    kind = instance["boundary"]
    if kind not in BOUNDARIES:
        raise ConfigurationError(
            f"Unknown boundary data {kind!r}, expected one of {sorted(BOUNDARIES)}"
        )
    return BOUNDARIES[kind](instance)


def centered(func, domain):
    center = getattr(domain, "center", None)
    if center is None:
        return func
    return lambda points: func(np.asarray(points) - center)


def density_on_grid(instance, grid):
    """Samples the density of ``instance`` on ``grid``; singular cells are averaged."""
    f = density_function(instance, grid.domain.n)
    fn = GridFn.from_callable(centered(f, grid.domain), grid)
    if np.any(fn.samples < 0):
        raise DomainError("Densities must be nonnegative")
    return fn


def boundary_on_grid(instance, grid):
    return GridFn.from_callable(centered(boundary_function(instance), grid.domain), grid)


def radial_density(instance, n, mesh):
    """
    Density of ``instance`` on a radial mesh in s. A singular value at s = 0 is replaced by
    the density's average over the first cell and flagged as omitted.
    """
    kind = instance["density"]
    omitted = np.zeros(mesh.size, dtype=bool)
    if kind == "power":
        beta, value = instance["density_beta"], instance["density_value"]
        coefficient = value * beta ** (n + 1)
        q = n * (beta - 1.0)
        values = np.empty(mesh.size)
        values[1:] = coefficient * mesh[1:] ** q
        if q < 0:
            values[0] = coefficient * n * mesh[1] ** q / (n + q)
            omitted[0] = True
        else:
            values[0] = coefficient * (1.0 if q == 0 else 0.0)
    elif kind in ("constant", "zero"):
        values = np.full(mesh.size, 0.0 if kind == "zero" else float(instance["density_value"]))
    else:
        raise ConfigurationError(f"Density {kind!r} has no radial form")
    return GridFn.radial_fn(n, mesh, values, omitted=omitted)


def radial_boundary_value(instance, radius):
    if instance["boundary"] not in RADIAL_BOUNDARIES:
        raise ConfigurationError(f"Boundary data {instance['boundary']!r} is not radial")
    point = np.zeros(2)
    point[0] = radius
    return float(boundary_function(instance)(point))
