import numpy as np
import pytest

from HolderLabCL.barriers.barrier import TaylorData
from HolderLabCL.domain.domain import (
    Ball,
    Domain,
    TaylorDomain,
    domain_from_dict,
    to_complex,
    to_real,
)
from HolderLabCL.domain.grid import (
    BOUNDARY,
    EXTERIOR,
    INTERIOR,
    Grid,
    GridFn,
    ShrunkDomain,
    build_grid,
    dist_to_boundary,
    integrate,
    is_subharmonic,
    norm,
)
from HolderLabCL.domain.io import read_gridfn, write_gridfn
from HolderLabCL.utils.errors import ConfigurationError, DomainError, ParameterError, ShapeError


def unit_ball_taylor():
    # |w + e1|^2 - 1 = 2 Re w1 + |w|^2
    return TaylorData(a=[2.0], b=[[0.0]], c=[[1.0]], anchor=[1.0, 0.0])


def test_complex_coordinates_interleave():
    points = np.array([[1.0, 2.0, 3.0, 4.0]])
    z = to_complex(points)
    np.testing.assert_array_equal(z, [[1 + 2j, 3 + 4j]])
    np.testing.assert_array_equal(to_real(z), points)


def test_domain_base_class_is_abstract():
    with pytest.raises(TypeError):
        Domain(n=1)


def test_coarse_grid(disk):
    skeleton = build_grid(disk, 8)
    grid = skeleton.grid
    assert grid.h == pytest.approx(0.25)
    assert grid.shape == (9, 9)
    assert not skeleton.support.any()

    r = np.linalg.norm(grid.points, axis=-1)
    np.testing.assert_array_equal(grid.interior, r < 1 - 1e-9)
    assert set(np.unique(grid.classification)) <= {INTERIOR, BOUNDARY, EXTERIOR}
    assert grid.on_boundary[4, 0] and grid.on_boundary[8, 4]


def test_interior_count_matches_area(disk):
    grid = Grid(disk, 512)
    assert grid.interior.sum() == pytest.approx(np.pi / grid.h**2, rel=0.01)


@pytest.mark.parametrize("resolution", [4, 7, 8.5])
def test_resolution_too_small(disk, resolution):
    with pytest.raises(ConfigurationError):
        Grid(disk, resolution)


def test_grid_too_large():
    with pytest.raises(ConfigurationError):
        Grid(Ball(n=2), 128)


def test_boundary_links(grid64):
    links = grid64.links
    assert len(links) > 0
    assert np.all((links.theta > 0) & (links.theta <= 1))
    np.testing.assert_allclose(np.linalg.norm(links.points, axis=1), 1.0, atol=1e-10)
    # every arm starts at an interior point
    assert grid64.interior.ravel()[links.index].all()


def test_taylor_domain_classifies_like_ball(disk):
    taylor = TaylorDomain(unit_ball_taylor())
    lo, hi = taylor.bounding_box()
    np.testing.assert_allclose(lo, [-1.0, -1.0], atol=1e-12)
    np.testing.assert_allclose(hi, [1.0, 1.0], atol=1e-12)
    assert taylor.diameter == pytest.approx(2.0)
    assert taylor.volume == pytest.approx(np.pi)

    np.testing.assert_array_equal(
        Grid(taylor, 32).classification, Grid(disk, 32).classification
    )


def test_dist_to_boundary(disk):
    assert dist_to_boundary(disk, [0.0, 0.0]) == pytest.approx(1.0)
    assert dist_to_boundary(disk, [0.5, 0.0]) == pytest.approx(0.5)
    d = dist_to_boundary(TaylorDomain(unit_ball_taylor()), [0.9, 0.0])
    assert 0.09 <= d <= 0.11


@pytest.mark.parametrize("point", [[1.0, 0.0], [1.5, 0.2]])
def test_dist_to_boundary_outside(disk, point):
    with pytest.raises(DomainError):
        disk.dist_to_boundary(point)


def test_dist_to_boundary_shape(disk):
    with pytest.raises(DomainError):
        disk.dist_to_boundary([0.0, 0.0, 0.0])


def test_shrunk_domain(grid64):
    shrunk = ShrunkDomain(grid64, 0.5)
    assert not shrunk.empty
    r = np.linalg.norm(grid64.points[shrunk.mask], axis=-1)
    assert r.max() < 0.5
    assert ShrunkDomain(grid64, 1.0).empty
    with pytest.raises(ParameterError):
        ShrunkDomain(grid64, -0.1)


def test_norms_of_constants(grid128):
    one = GridFn.from_callable(lambda x: np.ones(x.shape[:-1]), grid128)
    assert norm(one, "L1") == pytest.approx(np.pi, rel=0.02)
    assert norm(one, "sup") == 1.0
    assert norm(one, "Lp", 2) == pytest.approx(np.sqrt(np.pi), rel=0.02)

    zero = one * 0.0
    for kind, p in (("sup", None), ("L1", None), ("Lp", 3.0)):
        assert norm(zero, kind, p) == 0.0


def test_norm_rejects_bad_exponent(grid32):
    one = GridFn.from_callable(lambda x: np.ones(x.shape[:-1]), grid32)
    with pytest.raises(ParameterError):
        norm(one, "Lp", 1.0)
    with pytest.raises(ParameterError):
        norm(one, "L2")


def test_singular_cells_are_averaged_and_omitted(grid64):
    f = GridFn.from_callable(lambda x: 1.0 / np.linalg.norm(x, axis=-1), grid64)
    center = (32, 32)
    assert f.omitted[center]
    assert f.omitted.sum() == 1
    assert np.isfinite(f.values[center])
    # the mean of 1/|x| over the centre cell is of order 1/h
    assert 1.0 / grid64.h < f.values[center] < 10.0 / grid64.h


def test_integrate_skips_omitted_cells(grid64):
    f = GridFn.from_callable(lambda x: 1.0 / np.linalg.norm(x, axis=-1), grid64)
    # int_{B_1} 1/|x| = 2 pi
    assert integrate(f) == pytest.approx(2 * np.pi, rel=0.05)


def test_arithmetic_needs_a_common_grid(grid32, grid64):
    a = GridFn.from_callable(lambda x: x[..., 0], grid32)
    b = GridFn.from_callable(lambda x: x[..., 0], grid64)
    with pytest.raises(ShapeError):
        a - b
    twice = a + a
    np.testing.assert_allclose(twice.samples, 2 * a.samples)
    np.testing.assert_allclose(twice.boundary, 2 * a.boundary)


def test_subharmonic_check(grid64):
    convex = GridFn.from_callable(lambda x: np.sum(x * x, axis=-1), grid64)
    concave = convex * -1.0
    assert is_subharmonic(convex)
    assert not is_subharmonic(concave)


def test_dataarray_view(grid32):
    f = GridFn.from_callable(lambda x: x[..., 1], grid32)
    da = f.to_dataarray()
    assert da.dims == ("x0", "x1")
    assert float(da.sel(x0=0.0, x1=0.5)) == pytest.approx(0.5)


@pytest.mark.parametrize("suffix", [".csv", ".parquet"])
def test_gridfn_file_round_trip(tmp_path, grid32, suffix):
    f = GridFn.from_callable(lambda x: np.sum(x * x, axis=-1) ** 0.25, grid32)
    csv_path, header = write_gridfn(f, tmp_path / f"u{suffix}")
    assert csv_path.suffix == suffix
    assert header.exists()

    g = read_gridfn(csv_path)
    assert g.grid.same_as(f.grid)
    np.testing.assert_array_equal(g.support, f.support)
    np.testing.assert_array_equal(g.samples, f.samples)
    np.testing.assert_array_equal(g.boundary, f.boundary)


def test_domain_descriptors():
    ball = Ball(n=2, radius=2.0, center=[0.0, 1.0, 0.0, 0.0])
    again = domain_from_dict(ball.descriptor())
    assert again.descriptor() == ball.descriptor()
    assert ball.volume == pytest.approx(np.pi**2 * 16 / 2)

    taylor = TaylorDomain(unit_ball_taylor())
    assert domain_from_dict(taylor.descriptor()).diameter == pytest.approx(2.0)
    with pytest.raises(ConfigurationError):
        domain_from_dict({"kind": "torus"})


@pytest.mark.parametrize("resolution", [32, 64, 128])
def test_shrunk_domains_nest_inside_the_interior(disk, resolution):
    grid = Grid(disk, resolution)
    previous = grid.interior
    for eps in (0.0, 0.1, 0.25, 0.5, 0.9):
        shrunk = ShrunkDomain(grid, eps)
        assert not np.any(shrunk.mask & ~grid.interior)
        assert not np.any(shrunk.mask & ~previous)
        previous = shrunk.mask


def test_integrals_and_norms_are_refinement_consistent(disk):
    # int_{B_1} 1 + |x|^2 = 3 pi / 2 and int_{B_1} (1 + |x|^2)^2 = 7 pi / 3
    exact_l1, exact_l2 = 1.5 * np.pi, np.sqrt(7 * np.pi / 3)
    l1, l2 = [], []
    for resolution in (64, 128, 256):
        f = GridFn.from_callable(lambda x: 1.0 + np.sum(x * x, axis=-1), Grid(disk, resolution))
        l1.append(integrate(f))
        l2.append(norm(f, "Lp", 2))
    np.testing.assert_allclose(l1, exact_l1, rtol=0.03)
    np.testing.assert_allclose(l2, exact_l2, rtol=0.03)
    assert abs(l1[2] - l1[1]) <= 0.03 * exact_l1
    assert abs(l2[2] - l2[1]) <= 0.03 * exact_l2
    assert norm(GridFn.from_callable(lambda x: x[..., 0], Grid(disk, 256)), "L1") == (
        pytest.approx(4.0 / 3.0, rel=0.03)
    )
