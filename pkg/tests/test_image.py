import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from PIL import Image

from sharploss import (
    DimensionError,
    ImageFormatError,
    box_kernel,
    convolve,
    convolve_adjoint,
    extract_patches,
    gaussian_kernel,
    load_image,
    save_image,
    spatial_gradients,
    spatial_gradients_adjoint,
)


def naive_gradients(img):
    h, w = img.shape
    gx = np.zeros((h, w))
    gy = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            gx[y, x] = (img[y, min(x + 1, w - 1)] - img[y, max(x - 1, 0)]) / 2
            gy[y, x] = (img[min(y + 1, h - 1), x] - img[max(y - 1, 0), x]) / 2
    return gx, gy


def mirror(p, n):
    # walk back and forth across [0, n-1] without repeating the edge sample
    while p < 0 or p > n - 1:
        p = -p if p < 0 else 2 * (n - 1) - p
    return p


def naive_correlate(img, kernel):
    h, w = img.shape
    k = kernel.shape[0]
    r = k // 2
    out = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            s = 0.0
            for u in range(k):
                for v in range(k):
                    s += kernel[u, v] * img[mirror(y + u - r, h), mirror(x + v - r, w)]
            out[y, x] = s
    return out


class TestRasterIO:
    def test_white_gray_png_loads_as_ones(self, tmp_path):
        path = tmp_path / "white.png"
        Image.fromarray(np.full((5, 7), 255, np.uint8), mode="L").save(path)
        img = load_image(path)
        assert img.shape == (5, 7)
        assert np.all(img == 1.0)

    def test_pure_red_rgb_is_luma_weight(self, tmp_path):
        rgb = np.zeros((4, 4, 3), np.uint8)
        rgb[..., 0] = 255
        path = tmp_path / "red.png"
        Image.fromarray(rgb, mode="RGB").save(path)
        assert np.all(load_image(path) == 0.299)

    @pytest.mark.parametrize("suffix", [".png", ".pgm"])
    def test_roundtrip_is_bit_identical(self, tmp_path, suffix):
        rng = np.random.default_rng(7)
        codes = rng.integers(0, 256, size=(23, 31), dtype=np.uint8)
        src = tmp_path / f"src{suffix}"
        Image.fromarray(codes, mode="L").save(src)
        dst = tmp_path / f"dst{suffix}"
        save_image(load_image(src), dst)
        assert np.array_equal(np.asarray(Image.open(dst)), codes)

    def test_pgm_is_binary_p5(self, tmp_path):
        path = tmp_path / "a.pgm"
        save_image(np.zeros((3, 4)), path)
        assert path.read_bytes().startswith(b"P5")

    def test_save_quantization_rules(self, tmp_path):
        path = tmp_path / "q.pgm"
        save_image(np.array([[0.0, 1.7, 0.5, -0.2]]), path)
        assert np.asarray(Image.open(path)).tolist() == [[0, 255, 128, 0]]

    def test_all_zero_image(self, tmp_path):
        path = tmp_path / "z.png"
        save_image(np.zeros((4, 4)), path)
        assert np.all(np.asarray(Image.open(path)) == 0)

    def test_missing_file_names_path(self, tmp_path):
        path = tmp_path / "nope.png"
        with pytest.raises(OSError, match="nope.png"):
            load_image(path)

    def test_garbage_file_is_format_error(self, tmp_path):
        path = tmp_path / "junk.png"
        path.write_bytes(b"not an image at all")
        with pytest.raises(ImageFormatError, match="junk.png"):
            load_image(path)

    def test_16bit_is_format_error(self, tmp_path):
        path = tmp_path / "deep.png"
        Image.fromarray(np.full((4, 4), 40000, np.uint16)).save(path)
        with pytest.raises(ImageFormatError, match="deep.png"):
            load_image(path)

    def test_unwritable_path(self, tmp_path):
        with pytest.raises(OSError):
            save_image(np.zeros((2, 2)), tmp_path / "missing_dir" / "x.png")


class TestSpatialGradients:
    def test_constant_image(self):
        gx, gy = spatial_gradients(np.full((6, 9), 0.42))
        assert np.all(gx == 0) and np.all(gy == 0)

    def test_horizontal_ramp(self):
        c = 0.25
        img = c * np.tile(np.arange(10.0), (7, 1))
        gx, gy = spatial_gradients(img)
        assert np.all(gx[:, 1:-1] == c)
        assert np.all(gx[:, 0] == c / 2) and np.all(gx[:, -1] == c / 2)
        assert np.all(gy == 0)

    def test_matches_naive_stencil(self):
        img = np.random.default_rng(3).random((16, 16))
        gx, gy = spatial_gradients(img)
        ox, oy = naive_gradients(img)
        assert np.array_equal(gx, ox) and np.array_equal(gy, oy)

    def test_too_small(self):
        with pytest.raises(DimensionError):
            spatial_gradients(np.zeros((1, 5)))

    def test_linear(self):
        rng = np.random.default_rng(4)
        i, j = rng.random((2, 12, 15))
        a, b = 1.7, -0.3
        lhs = spatial_gradients(a * i + b * j)
        gi, gj = spatial_gradients(i), spatial_gradients(j)
        for k in range(2):
            np.testing.assert_allclose(lhs[k], a * gi[k] + b * gj[k], rtol=1e-12, atol=1e-15)

    @settings(max_examples=30, deadline=None)
    @given(h=st.integers(2, 12), w=st.integers(2, 12), seed=st.integers(0, 2**32 - 1))
    def test_adjoint_identity(self, h, w, seed):
        rng = np.random.default_rng(seed)
        img = rng.standard_normal((h, w))
        dgx, dgy = rng.standard_normal((2, h, w))
        gx, gy = spatial_gradients(img)
        lhs = np.sum(gx * dgx) + np.sum(gy * dgy)
        rhs = np.sum(img * spatial_gradients_adjoint(dgx, dgy))
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


class TestPatches:
    def test_16_by_8(self):
        assert extract_patches(np.zeros((16, 16)), 8) == [(0, 0), (8, 0), (0, 8), (8, 8)]

    def test_remainder_discarded(self):
        assert extract_patches(np.zeros((17, 17)), 8) == [(0, 0), (8, 0), (0, 8), (8, 8)]

    def test_too_small_is_empty(self):
        assert extract_patches(np.zeros((7, 7)), 8) == []

    def test_rejects_tiny_patch(self):
        with pytest.raises(ValueError):
            extract_patches(np.zeros((8, 8)), 1)

    @given(h=st.integers(1, 40), w=st.integers(1, 40), d=st.integers(2, 9))
    def test_disjoint_and_inside(self, h, w, d):
        origins = extract_patches(np.zeros((h, w)), d)
        covered = np.zeros((h, w), dtype=int)
        for x, y in origins:
            assert x + d <= w and y + d <= h
            covered[y:y + d, x:x + d] += 1
        assert covered.max(initial=0) <= 1
        assert len(origins) == (h // d) * (w // d)


class TestConvolve:
    def test_identity_kernel(self):
        img = np.random.default_rng(0).random((9, 11))
        assert np.array_equal(convolve(img, box_kernel(1)), img)

    @pytest.mark.parametrize("kernel", [box_kernel(3), box_kernel(5), gaussian_kernel(7, 1.2)])
    def test_constant_image_preserved(self, kernel):
        out = convolve(np.full((12, 10), 0.37), kernel)
        np.testing.assert_allclose(out, 0.37, rtol=0, atol=1e-15)

    def test_box5_matches_naive_mirror(self):
        img = np.random.default_rng(1).random((32, 32))
        k = box_kernel(5)
        np.testing.assert_allclose(convolve(img, k), naive_correlate(img, k.weights), rtol=0, atol=1e-14)

    def test_kernel_wider_than_image(self):
        # mirror extension must keep bouncing when the radius exceeds the image
        img = np.random.default_rng(2).random((3, 4))
        k = box_kernel(9)
        np.testing.assert_allclose(convolve(img, k), naive_correlate(img, k.weights), atol=1e-14)

    def test_asymmetric_kernel_is_correlation(self):
        w = np.zeros((3, 3))
        w[1, 2] = 1.0  # picks the right-hand neighbour
        img = np.random.default_rng(5).random((6, 6))
        out = convolve(img, w)
        assert np.array_equal(out[:, :-1], img[:, 1:])
        assert np.array_equal(out[:, -1], img[:, -2])

    @settings(max_examples=30, deadline=None)
    @given(h=st.integers(1, 14), w=st.integers(1, 14), k=st.sampled_from([1, 3, 5, 7]),
           seed=st.integers(0, 2**32 - 1))
    def test_adjoint_identity(self, h, w, k, seed):
        rng = np.random.default_rng(seed)
        x, y = rng.standard_normal((2, h, w))
        weights = rng.random((k, k))
        weights /= weights.sum()
        lhs = np.sum(convolve(x, weights) * y)
        rhs = np.sum(x * convolve_adjoint(y, weights))
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)
