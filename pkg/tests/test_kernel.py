import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opinionfield.kernel import (
    KernelParams,
    d2phi_dxi2,
    dphi_dxi,
    mean_field_drift,
    mean_field_drift_all,
    phi,
)

FD_STEP_1 = 1e-6
FD_STEP_2 = 1e-4


def central_diff(params, beta, h=FD_STEP_1):
    return (phi(params, beta + h) - phi(params, beta - h)) / (2 * h)


def central_diff2(params, beta, h=FD_STEP_2):
    return (phi(params, beta + h) - 2 * phi(params, beta) + phi(params, beta - h)) / h**2


class TestPhi:
    def test_zero_for_nonpositive_gap(self):
        assert phi(KernelParams(1.0, 0.5), 0.0) == 0.0
        assert phi(KernelParams(1.0, 0.5), -0.3) == 0.0

    def test_peak_value(self):
        # beta - theta2 = 0 makes the exponent exactly -0.01
        assert phi(KernelParams(2.0, 0.5), 0.5) == pytest.approx(2 * np.exp(-0.01), rel=1e-15)

    def test_interior_value(self):
        # exponent -0.01 / (1 - 0.36) = -0.015625
        assert phi(KernelParams(1.0, 0.0), 0.6) == pytest.approx(np.exp(-0.015625), rel=1e-15)

    def test_zero_outside_range(self):
        assert phi(KernelParams(1.0, 0.0), 1.0) == 0.0
        assert phi(KernelParams(1.0, 0.0), 1.5) == 0.0

    def test_vectorized_matches_scalar(self):
        kp = KernelParams(1.2, 0.1)
        betas = np.linspace(-1, 2, 31)
        vec = phi(kp, betas)
        assert vec.shape == betas.shape
        for b, v in zip(betas, vec):
            assert v == phi(kp, b)

    @given(
        st.floats(min_value=0.0, max_value=10.0),
        st.floats(min_value=-2.0, max_value=2.0),
        st.floats(min_value=-5.0, max_value=5.0, allow_nan=False),
    )
    @settings(max_examples=200)
    def test_nonnegative_and_cutoff(self, theta1, theta2, beta):
        value = phi(KernelParams(theta1, theta2), beta)
        assert np.isfinite(value)
        assert value >= 0.0
        if beta <= 0:
            assert value == 0.0

    def test_negative_scale_rejected(self):
        with pytest.raises(ValueError):
            KernelParams(-0.1, 0.0)


class TestDerivatives:
    def test_zero_at_kernel_center(self):
        # factor (beta - theta2) vanishes
        assert dphi_dxi(KernelParams(1.0, 0.3), 0.3, 0.0) == 0.0

    def test_zero_off_support(self):
        assert dphi_dxi(KernelParams(1.0, 0.0), -0.4, 0.0) == 0.0
        assert d2phi_dxi2(KernelParams(1.0, 0.0), -0.2, 0.0) == 0.0

    def test_zero_scale(self):
        assert d2phi_dxi2(KernelParams(0.0, 0.0), 0.5, 0.0) == 0.0

    def test_first_derivative_fd(self):
        kp = KernelParams(1.0, 0.0)
        an = dphi_dxi(kp, 0.6, 0.0)
        assert an == pytest.approx(central_diff(kp, 0.6), rel=1e-6)

    def test_second_derivative_fd(self):
        kp = KernelParams(1.0, 0.0)
        an = d2phi_dxi2(kp, 0.5, 0.0)
        assert an == pytest.approx(central_diff2(kp, 0.5), rel=1e-4)

    def test_fd_sweep_away_from_boundary(self):
        # margins keep the FD stencils off the support boundary and the
        # sign change of the first derivative
        rng = np.random.default_rng(42)
        checked = 0
        while checked < 1000:
            theta1 = rng.uniform(0.1, 5.0)
            theta2 = rng.uniform(-0.5, 0.5)
            xi = rng.uniform(-0.9, 0.9)
            beta = theta2 + xi
            if beta <= 0.05 or abs(xi**2 - 1.0) <= 0.05 or abs(xi) < 1e-2:
                continue
            kp = KernelParams(theta1, theta2)
            d1, f1 = dphi_dxi(kp, beta, 0.0), central_diff(kp, beta)
            d2, f2 = d2phi_dxi2(kp, beta, 0.0), central_diff2(kp, beta)
            assert d1 == pytest.approx(f1, rel=1e-6)
            assert d2 == pytest.approx(f2, rel=1e-4)
            checked += 1


class TestMeanFieldDrift:
    def test_equal_opinions(self):
        assert mean_field_drift(KernelParams(2.0, 0.0), 1, [0.4, 0.4, 0.4]) == 0.0

    def test_single_agent(self):
        assert mean_field_drift(KernelParams(2.0, 0.0), 0, [0.7]) == 0.0

    def test_two_agent_value(self):
        got = mean_field_drift(KernelParams(1.0, 0.0), 0, [0.8, 0.2])
        assert got == pytest.approx(0.5 * np.exp(-0.015625) * 0.6, rel=1e-14)

    def test_translation_invariance(self):
        kp = KernelParams(1.5, 0.1)
        rng = np.random.default_rng(0)
        x = rng.uniform(0, 1, 7)
        base = [mean_field_drift(kp, i, x) for i in range(7)]
        shifted = [mean_field_drift(kp, i, x + 0.37) for i in range(7)]
        assert np.allclose(base, shifted, atol=1e-15)

    def test_antisymmetry_when_both_out_of_support(self):
        # equal opinions: both gaps are 0, outside the support
        kp = KernelParams(1.0, 0.0)
        assert mean_field_drift(kp, 0, [0.5, 0.5]) == -mean_field_drift(kp, 1, [0.5, 0.5])
        # widely separated: both gaps off-support (|gap| >= 1 + theta2)
        far = [0.0, 5.0]
        assert mean_field_drift(kp, 0, far) == 0.0
        assert mean_field_drift(kp, 1, far) == 0.0

    def test_empty_vector_rejected(self):
        with pytest.raises(ValueError):
            mean_field_drift(KernelParams(1.0, 0.0), 0, [])

    def test_drift_all_matches_scalar_and_workers(self):
        kp = KernelParams(2.0, 0.1)
        rng = np.random.default_rng(5)
        x = rng.uniform(0, 1, 23)
        all_drift = mean_field_drift_all(kp, x)
        assert np.array_equal(all_drift, [mean_field_drift(kp, i, x) for i in range(23)])
        assert np.array_equal(all_drift, mean_field_drift_all(kp, x, workers=4))
