import numpy as np
import pytest

from HolderLabCL.domain.domain import Ball
from HolderLabCL.domain.grid import Grid, GridFn
from HolderLabCL.exact.profiles import PowerProfile, QuadraticProfile, ma_density
from HolderLabCL.solver.poisson import PoissonSolver, comparison_check, solve_poisson_n1
from HolderLabCL.solver.radial import solve_radial
from HolderLabCL.utils.errors import (
    ConfigurationError,
    DomainError,
    SingularDataError,
    SolverFailureError,
)
from HolderLabCL.utils.utils import loglog_fit


def radius2(x):
    return np.sum(x * x, axis=-1)


def constant(value):
    return lambda x: np.full(x.shape[:-1], float(value))


def interior_error(u, exact, grid):
    mask = grid.interior
    return float(np.max(np.abs(u.values[mask] - exact(grid.points[mask]))))


@pytest.mark.parametrize("n, beta", [(1, 0.5), (1, 0.75), (2, 0.5), (3, 0.9)])
def test_radial_power_profiles_are_recovered(n, beta):
    profile = PowerProfile(beta, n=n, mesh_size=20_001)
    result = solve_radial(n, ma_density(profile), 1.0)
    np.testing.assert_allclose(result.phi, profile.mesh**beta, rtol=1e-8, atol=1e-9)
    assert result.boundary_value == pytest.approx(1.0)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_radial_quadratic_residual(n):
    profile = QuadraticProfile(n=n, mesh_size=10_001)
    result = solve_radial(n, ma_density(profile), 1.0)
    np.testing.assert_allclose(result.phi, profile.mesh, atol=1e-10)
    assert result.residual < 1e-8


def test_radial_solution_is_a_radial_function():
    profile = QuadraticProfile(n=2, mesh_size=101)
    u = solve_radial(2, ma_density(profile), 0.5).solution()
    assert u.radial and u.n == 2
    assert u.values[-1] == pytest.approx(0.5)


def test_radial_rejects_bad_densities():
    mesh = np.linspace(0.0, 1.0, 101)
    with np.errstate(divide="ignore"):
        singular = np.where(mesh > 0, mesh**-1.5, 0.0)
    with pytest.raises(SingularDataError):
        solve_radial(1, singular, 0.0, mesh)
    with pytest.raises(DomainError):
        solve_radial(1, -np.ones(101), 0.0, mesh)


def test_poisson_constant_data(grid64):
    f = GridFn.from_callable(constant(0.0), grid64)
    phi = GridFn.from_callable(constant(3.0), grid64)
    result = solve_poisson_n1(grid64.domain, f, phi)
    np.testing.assert_allclose(result.solution.samples, 3.0, atol=1e-12)
    assert result.method == "direct" and result.iterations == 0


def test_poisson_quadratic_converges(grid64, grid128, grid256):
    errors = []
    for grid in (grid64, grid128, grid256):
        f = GridFn.from_callable(constant(1.0), grid)
        phi = GridFn.from_callable(radius2, grid)
        result = solve_poisson_n1(grid.domain, f, phi)
        errors.append(interior_error(result.solution, radius2, grid))
        assert result.residual < 1e-8
    slope, _, _ = loglog_fit([g.h for g in (grid64, grid128, grid256)], errors)
    assert slope >= 1.8
    assert errors[1] <= 5e-4 and errors[2] <= 5e-4


def test_poisson_singular_density(grid256):
    profile = PowerProfile(0.5)
    f = profile.density_on_grid(grid256)
    phi = profile.on_grid(grid256)
    result = solve_poisson_n1(grid256.domain, f, phi)
    assert interior_error(result.solution, lambda x: profile.u(x), grid256) <= 2e-2


def test_sor_matches_direct(grid32):
    f = GridFn.from_callable(constant(1.0), grid32)
    phi = GridFn.from_callable(lambda x: x[..., 0], grid32)
    direct = solve_poisson_n1(grid32.domain, f, phi)
    sor = solve_poisson_n1(grid32.domain, f, phi, method="sor")
    assert sor.iterations > 0
    np.testing.assert_allclose(sor.solution.samples, direct.solution.samples, atol=1e-7)


def test_sor_failure_is_reported(grid32):
    f = GridFn.from_callable(constant(1.0), grid32)
    phi = GridFn.from_callable(radius2, grid32)
    with pytest.raises(SolverFailureError):
        solve_poisson_n1(grid32.domain, f, phi, method="sor", max_iter=5)


def test_solver_configuration_errors(grid32):
    with pytest.raises(ConfigurationError):
        PoissonSolver(grid32, method="multigrid")
    with pytest.raises(ConfigurationError):
        PoissonSolver(Grid(Ball(n=2), 8))


def test_negative_density_is_rejected(grid32):
    f = GridFn.from_callable(constant(-1.0), grid32)
    phi = GridFn.from_callable(constant(0.0), grid32)
    with pytest.raises(DomainError):
        solve_poisson_n1(grid32.domain, f, phi)


@pytest.mark.parametrize("index", [0, 5, 10])
def test_radial_solver_rejects_a_negative_density_value(index):
    mesh = np.linspace(0.0, 1.0, 11)
    values = np.ones_like(mesh)
    values[index] = -0.5
    with pytest.raises(DomainError):
        solve_radial(1, values, 1.0, mesh=mesh)


def test_larger_density_gives_smaller_solution(grid64):
    phi = GridFn.from_callable(radius2, grid64)
    u = solve_poisson_n1(grid64.domain, GridFn.from_callable(constant(1.0), grid64), phi)
    v = solve_poisson_n1(grid64.domain, GridFn.from_callable(constant(2.0), grid64), phi)
    assert comparison_check(u.solution, v.solution).passed
    assert not comparison_check(v.solution, u.solution).passed


def test_larger_boundary_data_gives_larger_solution(grid64):
    f = GridFn.from_callable(constant(1.0), grid64)
    low = solve_poisson_n1(grid64.domain, f, GridFn.from_callable(radius2, grid64))
    high = solve_poisson_n1(
        grid64.domain, f, GridFn.from_callable(lambda x: radius2(x) + 0.5 + 0.2 * x[..., 0], grid64)
    )
    assert comparison_check(high.solution, low.solution).passed
    report = comparison_check(low.solution, high.solution)
    assert not report.passed and report.worst_violation > 0.1


def test_comparison_with_unequal_densities(grid64):
    phi = GridFn.from_callable(radius2, grid64)
    psi = GridFn.from_callable(lambda x: radius2(x) + 0.1, grid64)
    f = GridFn.from_callable(lambda x: 1.0 + 3.0 * x[..., 0] ** 2, grid64)
    g = GridFn.from_callable(lambda x: 1.0 - 0.5 * radius2(x), grid64)
    # f >= g inside and phi <= psi on the boundary, so u_f <= u_g
    u = solve_poisson_n1(grid64.domain, f, phi)
    v = solve_poisson_n1(grid64.domain, g, psi)
    assert comparison_check(v.solution, u.solution).passed
    assert not comparison_check(u.solution, v.solution).passed
