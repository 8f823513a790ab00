"""2D block systems: assembly structure, exact counts, Hardy ratios."""

import math

import numpy as np
import pytest

import boundcount as bc
from boundcount.errors import MatrixSizeError
from boundcount.potentials import PotentialSpec
from boundcount.verify import random_fourier_spec


def dense_count(sys_):
    return int(np.sum(np.linalg.eigvalsh(sys_.to_dense(max_dimension=100000)) < 0))


class SquaredCosine(PotentialSpec):
    """Generic quadrature path: V = e^{-r^2} (1 + cos theta)^2."""

    label = "squared_cosine"

    def eval_polar(self, r, theta):
        r, theta = np.broadcast_arrays(np.asarray(r, float), np.asarray(theta, float))
        return np.exp(-r * r) * (1.0 + np.cos(theta)) ** 2


# ---------------------------------------------------------------- fourier modes


def test_fourier_modes_radial_vanish():
    spec = bc.gaussian_well(1.0, 1.0)
    vhat = bc.fourier_modes(spec, np.array([0.5, 1.0]), 4)
    assert np.all(vhat[:, 1:] == 0.0)
    assert vhat[:, 0].real == pytest.approx(np.exp(-np.array([0.25, 1.0])))


def test_fourier_modes_single_cosine():
    g = bc.gaussian_profile(1.0, 1.0)
    spec = bc.fourier_sum([(1, g, "cos")])  # V = 2 cos(theta) g(r)
    r = np.array([0.8, 1.7])
    vhat = bc.fourier_modes(spec, r, 3)
    assert vhat[:, 1].real == pytest.approx(g(r))
    assert np.all(vhat[:, [0, 2, 3]] == 0.0)


def test_fourier_modes_squared_cosine_expansion():
    # (1 + cos)^2 = 3/2 + 2 cos + (1/2) cos 2t: modes 3/2 g, g, g/4
    spec = SquaredCosine()
    r = np.array([0.6, 1.1])
    g = np.exp(-r * r)
    vhat = bc.fourier_modes(spec, r, 3, n_theta=64)
    assert vhat[:, 0].real == pytest.approx(1.5 * g, rel=1e-12)
    assert vhat[:, 1].real == pytest.approx(g, rel=1e-12)
    assert vhat[:, 2].real == pytest.approx(0.25 * g, rel=1e-12)
    assert np.abs(vhat[:, 3]) == pytest.approx(0.0, abs=1e-14)
    assert np.abs(vhat.imag) == pytest.approx(0.0, abs=1e-14)


def test_fourier_modes_aliasing_guard():
    spec = SquaredCosine()
    with pytest.raises(bc.ConfigError):
        bc.fourier_modes(spec, np.array([1.0]), 10, n_theta=16)


def test_fourier_modes_sin_convention():
    g = bc.gaussian_profile(1.0, 1.0)
    spec = bc.fourier_sum([(0, g, "cos"), (2, bc.gaussian_profile(0.3, 1.0), "sin")])
    r = np.array([1.0])
    vhat = bc.fourier_modes(spec, r, 2)
    # 2 sin(2 theta) c(r) has Vhat_2 = -i c(r)
    assert vhat[0, 2] == pytest.approx(-1j * 0.3 * math.exp(-1.0))


# ---------------------------------------------------------------- assembly structure


def test_assemble_radial_is_block_diagonal():
    spec = bc.gaussian_well(1.0, 1.0)
    sys_ = bc.assemble_full_2d(spec, 20.0, bc.Grid1D.symmetric(6.0, 121))
    assert sys_.is_block_diagonal
    assert np.all(sys_.pmodes == 0.0) and np.all(sys_.qmodes == 0.0)


def test_assembled_matrix_is_exactly_symmetric():
    rng = np.random.default_rng(21)
    grid = bc.Grid1D.symmetric(5.0, 81)
    for _ in range(3):
        spec = random_fourier_spec(rng)
        sys_ = bc.assemble_full_2d(spec, 9.0, grid)
        A = sys_.to_dense()
        assert np.array_equal(A, A.T)


def test_single_mode_couples_neighbors_only():
    g = bc.gaussian_profile(0.3, 1.0)
    spec = bc.fourier_sum([(0, bc.gaussian_profile(1.0, 1.0), "cos"), (1, g, "cos")])
    grid = bc.Grid1D.symmetric(4.0, 41)
    sys_ = bc.assemble_full_2d(spec, 5.0, grid, channels=3)
    R = sys_.angular_residual(sys_.chan_diag.shape[1] // 2)
    chans = sys_.channels
    # mode-1 potential: only |m - m'| = 1 entries may be nonzero
    for a, (kind_a, m) in enumerate(chans):
        for b, (kind_b, n) in enumerate(chans):
            if abs(m - n) != 1:
                assert R[a, b] == 0.0


def test_coupling_blocks_ignore_radial_changes_bitwise():
    g1 = bc.gaussian_profile(1.0, 1.0)
    g2 = bc.gaussian_profile(2.5, 0.8)  # different radial part
    mode1 = bc.gaussian_profile(0.4, 1.0)
    grid = bc.Grid1D.symmetric(5.0, 101)
    sys_a = bc.assemble_full_2d(bc.fourier_sum([(0, g1, "cos"), (1, mode1, "cos")]),
                                7.0, grid, channels=4)
    sys_b = bc.assemble_full_2d(bc.fourier_sum([(0, g2, "cos"), (1, mode1, "cos")]),
                                7.0, grid, channels=4)
    assert np.array_equal(sys_a.pmodes[:, 1:], sys_b.pmodes[:, 1:])
    assert np.array_equal(sys_a.qmodes[:, 1:], sys_b.qmodes[:, 1:])


def test_coupling_blocks_sampled_path_stability():
    # generic quadrature path: adding a radial bump moves couplings by
    # round-off only
    class WithBump(PotentialSpec):
        label = "bumped"

        def __init__(self, bump):
            self.bump = bump

        def eval_polar(self, r, theta):
            r, theta = np.broadcast_arrays(np.asarray(r, float), np.asarray(theta, float))
            return np.exp(-r * r) * (1.0 + 0.5 * np.cos(theta)) + self.bump * np.exp(-((r - 1) ** 2))

    r = np.array([0.7, 1.3])
    base = bc.fourier_modes(WithBump(0.0), r, 3, n_theta=64)
    bumped = bc.fourier_modes(WithBump(2.0), r, 3, n_theta=64)
    assert np.max(np.abs(base[:, 1:] - bumped[:, 1:])) <= 1e-14


def test_dimension_ceiling_enforced():
    spec = bc.fourier_sum([(0, bc.gaussian_profile(1.0, 1.0), "cos"),
                           (1, bc.gaussian_profile(0.4, 1.0), "cos")])
    with pytest.raises(MatrixSizeError):
        bc.assemble_full_2d(spec, 500.0, bc.Grid1D.symmetric(30.0, 6001))
    # radial systems stay block-diagonal and are exempt from the dense ceiling
    sys_ = bc.assemble_full_2d(bc.gaussian_well(1.0, 1.0), 500.0,
                               bc.Grid1D.symmetric(30.0, 6001))
    assert sys_.is_block_diagonal


# ---------------------------------------------------------------- exact counts


def test_count_full_trivial_zero_potential():
    spec = bc.disk_well(0.0, 1.0)
    grid = bc.Grid1D.symmetric(5.0, 101)
    sys_ = bc.assemble_full_2d(spec, 10.0, grid)
    assert bc.count_full_2d(sys_) == 0
    assert bc.count_tilde(spec, 10.0, grid) == 0


def test_count_radial_trivial_and_weyl_scale():
    dec = bc.decompose(bc.gaussian_well(1.0, 1.0))
    G = bc.effective_potential(dec)
    grid = bc.Grid1D.symmetric(30.0, 6001)
    assert bc.count_radial_2d(G, 0.0, grid) == 0
    assert bc.count_channel(G, 0.0, 0, grid) == 0
    # semiclassical scale: N ~ alpha/4 for the unit Gaussian at alpha = 400
    n = bc.count_radial_2d(G, 400.0, grid)
    assert abs(n - 100.0) <= 15.0


def test_count_full_matches_dense_oracle():
    rng = np.random.default_rng(5)
    grid = bc.Grid1D.symmetric(6.0, 121)
    for _ in range(5):
        spec = random_fourier_spec(rng)
        alpha = float(np.exp(rng.uniform(np.log(2.0), np.log(30.0))))
        sys_ = bc.assemble_full_2d(spec, alpha, grid)
        assert bc.count_full_2d(sys_) == dense_count(sys_)


def test_count_tilde_matches_dense_oracle():
    rng = np.random.default_rng(6)
    grid = bc.Grid1D.symmetric(6.0, 121)
    for _ in range(4):
        spec = random_fourier_spec(rng)
        alpha = float(np.exp(rng.uniform(np.log(2.0), np.log(30.0))))
        sys_ = bc.assemble_full_2d(spec, alpha, grid, constrained=True)
        assert bc.count_full_2d(sys_) == dense_count(sys_)


def test_radial_consistency_exact():
    rng = np.random.default_rng(8)
    grid = bc.Grid1D.symmetric(10.0, 801)
    for _ in range(5):
        prof = bc.gaussian_profile(float(rng.uniform(0.5, 2.5)), float(rng.uniform(0.6, 1.5)))
        spec = bc.RadialPotential(profile=prof)
        alpha = float(np.exp(rng.uniform(np.log(2.0), np.log(80.0))))
        sys_ = bc.assemble_full_2d(spec, alpha, grid, max_dimension=10 ** 6)
        assert bc.count_full_2d(sys_) == bc.count_radial_2d(
            prof, alpha, grid, m_max=sys_.channel_set.m_max)


def test_radial_tilde_equals_constrained_channel_sum():
    prof = bc.gaussian_profile(1.0, 1.0)
    spec = bc.RadialPotential(profile=prof)
    grid = bc.Grid1D.symmetric(10.0, 801)
    dec = bc.decompose(spec)
    G = bc.effective_potential(dec)
    for alpha in (10.0, 60.0):
        m_max = bc.radial_cutoff_m_max(G, alpha, grid)
        tilde = bc.count_tilde(spec, alpha, grid, channels=m_max, max_dimension=10 ** 6)
        ms = [m for k in range(1, m_max + 1) for m in (k, k)]
        expected = bc.count_M(G, alpha, grid) + int(np.sum(bc.count_channels(G, alpha, ms, grid)))
        assert tilde == expected


def test_sandwich_rank_one():
    rng = np.random.default_rng(13)
    grid = bc.Grid1D.symmetric(6.0, 161)
    for _ in range(8):
        spec = random_fourier_spec(rng)
        alpha = float(np.exp(rng.uniform(np.log(1.0), np.log(40.0))))
        sys_ = bc.assemble_full_2d(spec, alpha, grid)
        full = bc.count_full_2d(sys_)
        tilde = bc.count_tilde(spec, alpha, grid, channels=sys_.channel_set)
        assert tilde <= full <= tilde + 1


def test_birman_schwinger_2d_identity():
    rng = np.random.default_rng(17)
    grid = bc.Grid1D.symmetric(6.0, 161)
    for _ in range(8):
        spec = random_fourier_spec(rng)
        alpha = float(np.exp(rng.uniform(np.log(1.0), np.log(40.0))))
        assert bc.birman_schwinger_2d(spec, 1.0 / alpha, grid) == bc.count_tilde(
            spec, alpha, grid)
    assert bc.birman_schwinger_2d(random_fourier_spec(rng), 1e9, grid) == 0


def test_channel_escalation_flags_and_grows():
    spec = bc.fourier_sum([(0, bc.gaussian_profile(1.0, 1.0), "cos"),
                           (2, bc.gaussian_profile(0.45, 1.0), "cos")])
    grid = bc.Grid1D.symmetric(6.0, 161)
    count, m_used, ok = bc.count_2d_auto(spec, 30.0, grid)
    assert ok
    # severely under-truncated channel set undercounts
    under = bc.count_full_2d(bc.assemble_full_2d(spec, 30.0, grid, channels=1))
    assert under <= count


def test_monotone_in_alpha_and_potential():
    spec = bc.fourier_sum([(0, bc.gaussian_profile(1.0, 1.0), "cos"),
                           (1, bc.gaussian_profile(0.3, 1.0), "cos")])
    grid = bc.Grid1D.symmetric(6.0, 161)
    counts = [bc.count_2d_auto(spec, a, grid)[0] for a in (5.0, 10.0, 20.0, 40.0)]
    assert all(b >= a for a, b in zip(counts, counts[1:]))
    bigger = bc.fourier_sum([(0, bc.gaussian_profile(1.3, 1.0), "cos"),
                             (1, bc.gaussian_profile(0.3, 1.0), "cos")])
    assert bc.count_2d_auto(bigger, 20.0, grid)[0] >= counts[2]


# ---------------------------------------------------------------- Hardy ratios


def test_hardy_f0_example_value():
    # continuum ratio is 4/3; deleting the t=0 node costs O(h) of weighted
    # mass, so the discrete value sits just below and converges from there
    f = lambda t: t * np.exp(-t * t)
    coarse = bc.hardy_ratio(f, "F0", bc.Grid1D.symmetric(30.0, 6001))
    fine = bc.hardy_ratio(f, "F0", bc.Grid1D.symmetric(30.0, 30001))
    assert coarse == pytest.approx(4.0 / 3.0, rel=0.01)
    assert abs(fine - 4.0 / 3.0) < abs(coarse - 4.0 / 3.0)
    assert fine == pytest.approx(4.0 / 3.0, rel=2e-3)
    assert coarse <= 4.0 * 1.02


def test_hardy_f1_smooth_channel():
    grid = bc.Grid1D.symmetric(30.0, 6001)
    ratio = bc.hardy_ratio([("cos", 1, lambda t: np.exp(-t * t))], "F1", grid)
    assert ratio <= 1.0 * 1.02
    wide = bc.hardy_ratio([("cos", 1, lambda t: np.exp(-(t / 8.0) ** 2))], "F1", grid)
    assert wide == pytest.approx(1.0, rel=0.05)  # spreading out saturates the bound


def test_hardy_scaling_invariance():
    grid = bc.Grid1D.symmetric(20.0, 2001)
    f = lambda t: t * np.exp(-t * t / 9.0)
    r1 = bc.hardy_ratio(f, "F0", grid)
    r2 = bc.hardy_ratio(lambda t: 2.0 * f(t), "F0", grid)
    assert r2 == pytest.approx(r1, rel=1e-12)


def test_hardy_errors():
    grid = bc.Grid1D.symmetric(20.0, 2001)
    with pytest.raises(ValueError):
        bc.hardy_ratio(lambda t: np.zeros_like(t), "F0", grid)
    with pytest.raises(ValueError):
        bc.hardy_ratio([("cos", 0, lambda t: np.exp(-t * t))], "F1", grid)
    with pytest.raises(ValueError):
        bc.hardy_ratio(lambda t: t, "F2", grid)


# ---------------------------------------------------------------- quadratic form


def test_qform_radial_cross_term_vanishes():
    spec = bc.gaussian_well(1.0, 1.0)
    grid = bc.Grid1D.symmetric(8.0, 401)
    f0 = lambda t: np.exp(-t * t)
    f1 = [("cos", 1, lambda t: t * np.exp(-t * t))]
    lhs, rhs = bc.qform_check(spec, f0, f1, grid)
    b0 = bc.potential_form(spec, [("const", 0, f0)], grid)
    b1 = bc.potential_form(spec, f1, grid)
    assert lhs == pytest.approx(b0 + b1, rel=1e-12)
    assert lhs <= rhs + 1e-12


def test_qform_f1_zero_reduces_to_f0():
    spec = bc.gaussian_well(1.0, 1.0)
    grid = bc.Grid1D.symmetric(6.0, 201)
    f0 = lambda t: np.exp(-t * t)
    lhs, rhs = bc.qform_check(spec, f0, [], grid)
    b0 = bc.potential_form(spec, [("const", 0, f0)], grid)
    assert lhs == pytest.approx(b0, rel=1e-13)
    assert rhs == pytest.approx(2.0 * b0, rel=1e-13)


def test_qform_inequality_random():
    rng = np.random.default_rng(31)
    grid = bc.Grid1D.symmetric(6.0, 201)
    for _ in range(25):
        spec = random_fourier_spec(rng)
        coeffs = rng.normal(size=4)
        f0 = lambda t, c=coeffs: c[0] * np.exp(-t * t) + c[1] * t * np.exp(-t * t / 4)
        f1 = [("cos", 1, lambda t, c=coeffs: c[2] * np.exp(-t * t / 2)),
              ("sin", 2, lambda t, c=coeffs: c[3] * np.exp(-t * t / 3))]
        lhs, rhs = bc.qform_check(spec, f0, f1, grid)
        assert lhs <= rhs + 1e-10 * max(1.0, abs(rhs))
