import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sharploss import DegradationConfig, DimensionError, box_kernel, degrade, psnr, ssim
from conftest import natural_image
from oracles import loop_psnr, loop_ssim


class TestPSNR:
    def test_analytic_20db(self):
        assert psnr(np.full((8, 8), 0.5), np.full((8, 8), 0.6)) == pytest.approx(20.0, abs=1e-9)

    def test_identical_is_cap(self):
        x = np.random.default_rng(0).random((8, 8))
        assert psnr(x, x) == 99.0

    def test_tiny_mse_capped(self):
        x = np.zeros((10, 10))
        assert psnr(x, x + 1e-7) == 99.0

    def test_returns_python_float(self):
        assert type(psnr(np.zeros((4, 4)), np.ones((4, 4)))) is float

    def test_loop_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            a, b = rng.random((2, 16, 16))
            assert psnr(a, b) == pytest.approx(loop_psnr(a, b), abs=1e-9)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_symmetric(self, seed):
        a, b = np.random.default_rng(seed).random((2, 12, 12))
        assert psnr(a, b) == psnr(b, a)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            psnr(np.zeros((4, 4)), np.zeros((5, 4)))

    def test_decreases_with_noise(self):
        ref = natural_image("camera", size=256)
        values = [psnr(degrade(ref, DegradationConfig(box_kernel(1), s, seed=1234)), ref)
                  for s in (0.01, 0.02, 0.05)]
        assert values[0] > values[1] > values[2]


class TestSSIM:
    def test_identity_is_one(self):
        x = np.random.default_rng(2).random((20, 20))
        assert ssim(x, x) == 1.0

    def test_constant_closed_form(self):
        c1 = 1e-4
        expected = (2 * 0.5 * 0.6 + c1) / (0.5**2 + 0.6**2 + c1)
        assert ssim(np.full((16, 16), 0.5), np.full((16, 16), 0.6)) == pytest.approx(expected, abs=1e-12)

    def test_loop_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            a = rng.random((14, 15))
            b = 0.7 * a + 0.3 * rng.random((14, 15))
            assert ssim(a, b) == pytest.approx(loop_ssim(a, b), abs=1e-9)

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_symmetric_and_bounded(self, seed):
        a, b = np.random.default_rng(seed).random((2, 16, 16))
        s = ssim(a, b)
        assert s == pytest.approx(ssim(b, a), abs=1e-12)
        assert -1.0 <= s <= 1.0

    def test_too_small(self):
        with pytest.raises(DimensionError):
            ssim(np.zeros((10, 30)), np.zeros((10, 30)))

    def test_blur_lowers_ssim(self):
        ref = natural_image("astronaut", size=128)
        a = ssim(degrade(ref, DegradationConfig(box_kernel(3))), ref)
        b = ssim(degrade(ref, DegradationConfig(box_kernel(7))), ref)
        assert 1.0 > a > b
