import numpy as np
import pytest

from HolderLabCL.domain.grid import GridFn
from HolderLabCL.exact.profiles import PowerProfile
from HolderLabCL.holder.certificate import averaging_mass, verify_lemma21
from HolderLabCL.holder.modulus import ModulusCurve, fit_exponent, modulus
from HolderLabCL.holder.stability import admissible_gamma, stability_check
from HolderLabCL.mollify.kernels import make_kernel
from HolderLabCL.utils.errors import (
    DegenerateFitError,
    KernelInadmissibleError,
    ModulusTruncatedWarning,
    ParameterError,
    PreconditionError,
)


def radius2(x):
    return np.sum(x * x, axis=-1)


def test_fit_exponent_of_power_law():
    radii = 0.25 / 2.0 ** np.arange(6)
    curve = ModulusCurve.from_values(radii, 3.0 * radii**0.7)
    assert curve.alpha_hat == pytest.approx(0.7)
    assert curve.C_hat == pytest.approx(3.0)
    assert curve.residual == pytest.approx(0.0, abs=1e-12)


def test_fit_exponent_with_higher_order_term():
    radii = 2.0 ** -np.arange(3, 9)
    curve = ModulusCurve.from_values(radii, radii + radii**2)
    assert 1.0 <= curve.alpha_hat <= 1.1


def test_fit_exponent_degenerate_cases():
    radii = 0.25 / 2.0 ** np.arange(4)
    with pytest.raises(DegenerateFitError):
        fit_exponent(ModulusCurve(radii, np.zeros(4)))
    with pytest.raises(DegenerateFitError):
        fit_exponent(ModulusCurve(radii, radii), k_range=(0, 1))
    assert ModulusCurve.from_values(radii, np.zeros(4)).degenerate


def test_curve_lookup():
    curve = ModulusCurve.from_values([0.4, 0.2, 0.1], [4.0, 2.0, 1.0])
    assert curve.at(0.3) == 2.0
    assert curve.at(0.05) == 0.0
    assert list(curve.to_frame().columns) == ["k", "r", "omega"]


def test_sampled_modulus_of_cone_power(grid256):
    u = PowerProfile(0.25).on_grid(grid256)
    curve = modulus(u, 0.25, 4)
    assert curve.mode == "sampled"
    np.testing.assert_allclose(curve.omega, curve.radii**0.5, rtol=1e-12)
    assert curve.alpha_hat == pytest.approx(0.5)
    assert curve.C_hat == pytest.approx(1.0)


def test_exhaustive_modulus_of_affine_function(grid64):
    u = GridFn.from_callable(lambda x: 2.0 * x[..., 0], grid64)
    curve = modulus(u, 0.25, 2)
    assert curve.mode == "exhaustive"
    np.testing.assert_allclose(curve.omega, 2.0 * curve.radii)
    assert curve.alpha_hat == pytest.approx(1.0)
    assert curve.C_hat == pytest.approx(2.0)


def test_constant_function_has_degenerate_modulus(grid64):
    u = GridFn.from_callable(lambda x: np.full(x.shape[:-1], 5.0), grid64)
    curve = modulus(u, 0.25, 2)
    assert curve.degenerate
    assert np.isnan(curve.alpha_hat)
    np.testing.assert_array_equal(curve.omega, 0.0)


def test_modulus_is_deterministic(grid256):
    u = GridFn.from_callable(lambda x: np.sin(3 * x[..., 0]) * x[..., 1], grid256)
    first = modulus(u, 0.25, 3, seed=7)
    second = modulus(u, 0.25, 3, seed=7)
    np.testing.assert_array_equal(first.omega, second.omega)


def test_unresolvable_radii_are_dropped(grid64):
    u = GridFn.from_callable(radius2, grid64)
    with pytest.warns(ModulusTruncatedWarning):
        curve = modulus(u, 0.25, 6)
    np.testing.assert_allclose(curve.radii, [0.25, 0.125, 0.0625])
    with pytest.raises(ParameterError), pytest.warns(ModulusTruncatedWarning):
        modulus(u, 0.01, 2)


def test_averaging_mass():
    assert averaging_mass(make_kernel("plateau")) == 0.0
    rescaled = make_kernel("plateau", plateau=0.75).dilated(4.0)
    kappa = averaging_mass(rescaled)
    assert 0 < kappa < 0.5


def test_certificate_of_cone_power(grid128):
    u = PowerProfile(0.25).on_grid(grid128)
    certificate = verify_lemma21(u, make_kernel("plateau", plateau=0.75), 0.5, 0.25)
    assert certificate.passed
    assert certificate.C1 == pytest.approx(1.0, rel=0.05)
    assert certificate.R == pytest.approx(4.0)
    assert certificate.scale == pytest.approx(4.0)
    assert certificate.C == pytest.approx(max(certificate.C3, 2**0.5 * certificate.C4))
    assert certificate.conclusion["holds"].all()
    assert len(certificate.replay) == len(certificate.conclusion) - 1


def test_certificate_of_affine_function(grid64):
    u = GridFn.from_callable(lambda x: x[..., 0] + 2.0 * x[..., 1], grid64)
    certificate = verify_lemma21(u, make_kernel("plateau"), 0.9, 0.25)
    assert certificate.C2 < 1e-9
    assert certificate.C4 == pytest.approx(certificate.C3)
    assert certificate.C == pytest.approx(2**0.9 * certificate.C3)
    assert certificate.passed
    record = certificate.to_dict()
    assert record["passed"] and len(record["conclusion"]) == len(certificate.conclusion)


def test_certificate_rejects_bad_input(grid32):
    u = GridFn.from_callable(radius2, grid32)
    with pytest.raises(KernelInadmissibleError):
        verify_lemma21(u, make_kernel("ball"), 0.5, 0.25)
    with pytest.raises(ParameterError):
        verify_lemma21(u, make_kernel("plateau"), 1.0, 0.25)


def bump(b, rho):
    return lambda x: radius2(x) + b * np.maximum(1.0 - radius2(x) / rho**2, 0.0)


def test_stability_ratio_is_stable_across_bumps(grid128):
    u = GridFn.from_callable(radius2, grid128)
    ratios = []
    for b, rho in [(0.1, 0.3), (0.2, 0.3), (0.4, 0.3), (0.2, 0.2), (0.2, 0.5)]:
        v = GridFn.from_callable(bump(b, rho), grid128)
        report = stability_check(u, v, r=2.0, gamma=0.45, p=2.0)
        assert report.lhs == pytest.approx(b)
        ratios.append(report.ratio)
    assert np.all(np.isfinite(ratios))
    assert max(ratios) / min(ratios) <= 10.0


def test_stability_edge_cases(grid64):
    u = GridFn.from_callable(radius2, grid64)
    report = stability_check(u, u, r=1.0, gamma=0.2, p=2.0)
    assert report.ratio == 0.0 and report.lhs == 0.0
    with pytest.raises(PreconditionError):
        stability_check(u, u + 0.1, r=1.0, gamma=0.2, p=2.0)
    with pytest.raises(ParameterError):
        stability_check(u, u, r=2.0, gamma=0.5, p=2.0)
    with pytest.raises(ParameterError):
        stability_check(u, u, r=0.5, gamma=0.1, p=2.0)


def test_admissible_gamma():
    assert admissible_gamma(2.0, 1, 2.0) == pytest.approx(0.5)
    assert admissible_gamma(1.0, 2, 3.0) == pytest.approx(0.25)
