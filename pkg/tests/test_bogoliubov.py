import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from casimir_cluster.bogoliubov import (
    BogoliubovSet,
    BoundaryKind,
    CavitySpec,
    MotionKind,
    MotionParams,
    beta_discrete_first_order,
    beta_oscillating,
    h_max,
    resonant_pairs,
    resonant_tms_state,
    symplectic_from_bogoliubov,
)
from casimir_cluster.errors import InvalidArgumentError, PerturbativeWarning
from casimir_cluster.gaussian_core import (
    apply_symplectic,
    phase_shift_matrix,
    symplectic_eigenvalues,
    two_mode_squeezer,
    vacuum,
)

GHZ = 2 * math.pi * 1e9
# mpmath, 30 digits
BETA_12 = 0.104756560175784818429754720312
BETA_OSC_25 = 1.05903066748288517048281588376


@pytest.fixture
def squid():
    return CavitySpec.from_fundamental(GHZ, BoundaryKind.QUARTER_WAVE)


class TestCavitySpec:
    def test_half_wave_spectrum(self):
        c = CavitySpec(0.5, 3.0)
        assert c.omega(2) == pytest.approx(2 * math.pi * 3.0 / 0.5)
        assert c.frequency_index(4) == 4

    def test_quarter_wave_spectrum(self, squid):
        assert squid.fundamental_omega == pytest.approx(GHZ)
        assert [squid.omega(k) / GHZ for k in range(4)] == pytest.approx([1, 3, 5, 7])
        assert squid.frequency_index(5) == 11

    @pytest.mark.parametrize("L, c", [(0, 1), (1, -1)])
    def test_rejects_nonpositive(self, L, c):
        with pytest.raises(InvalidArgumentError):
            CavitySpec(L, c)

    def test_half_wave_has_no_mode_zero(self):
        with pytest.raises(InvalidArgumentError):
            CavitySpec(1, 1).omega(0)


class TestMotionParams:
    def test_h_bounds(self):
        with pytest.raises(InvalidArgumentError):
            MotionParams(MotionKind.DISCRETE, h=0.2)
        with pytest.warns(PerturbativeWarning):
            MotionParams(MotionKind.DISCRETE, h=0.05)

    def test_oscillating_checks(self):
        with pytest.raises(InvalidArgumentError):
            MotionParams(MotionKind.OSCILLATING, epsilon=0.1, drive_omega=1, duration_T=1)
        with pytest.warns(PerturbativeWarning):
            MotionParams(MotionKind.OSCILLATING, epsilon=0.01, drive_omega=16 * GHZ,
                         duration_T=1e-9, fundamental_omega=GHZ)

    def test_h_max_consistency(self, squid):
        m = MotionParams(MotionKind.OSCILLATING, epsilon=0.01, drive_omega=16 * GHZ,
                         duration_T=50e-9)
        expected = 0.01 * (16 * GHZ) ** 2 * squid.length_L ** 2 / squid.speed_c ** 2
        assert m.h_max(squid) == pytest.approx(expected)
        assert h_max(0.01, 16 * GHZ, squid.length_L, squid.speed_c) == pytest.approx(expected)


class TestBetaDiscrete:
    def test_even_sum_vanishes(self):
        assert beta_discrete_first_order(1, 3, 0.01) == 0.0

    def test_golden_value(self):
        assert beta_discrete_first_order(1, 2, 1.0) == pytest.approx(BETA_12, rel=1e-14)

    def test_diagonal_rejected(self):
        with pytest.raises(InvalidArgumentError):
            beta_discrete_first_order(2, 2, 0.01)

    def test_vanishes_for_all_even_sums(self):
        for k in range(1, 51):
            for kp in range(1, 51):
                if k != kp and (k + kp) % 2 == 0:
                    assert beta_discrete_first_order(k, kp, 0.01) == 0.0

    @given(st.integers(1, 200), st.integers(1, 200))
    def test_symmetric(self, k, kp):
        if k != kp:
            assert beta_discrete_first_order(k, kp, 0.01) == beta_discrete_first_order(kp, k, 0.01)

    @pytest.mark.parametrize("p", [7, 29, 101])
    def test_peak_at_central_pair(self, p):
        vals = {k: beta_discrete_first_order(k, p - k, 1.0) for k in range(1, p)}
        best = max(vals, key=vals.get)
        assert best in ((p - 1) // 2, (p + 1) // 2)
        assert vals[best] == pytest.approx(math.sqrt(p * p - 1) / p ** 3, rel=1e-14)
        assert vals[best] * p * p == pytest.approx(1.0, rel=1 / p ** 2)


class TestBetaOscillating:
    def test_non_resonant(self):
        assert beta_oscillating(1, 3, 0.01, 1.0, 100.0, 3) == 0.0

    def test_half_wave_instance(self):
        eps, w1, T = 0.01, 2.0, 30.0
        assert beta_oscillating(1, 2, eps, w1, T, 3) == pytest.approx(eps * w1 * T / 2 / math.sqrt(2))

    def test_quarter_wave_golden(self):
        got = beta_oscillating(2, 5, 0.01, GHZ, 50e-9, 16, BoundaryKind.QUARTER_WAVE)
        assert got == pytest.approx(BETA_OSC_25, rel=1e-12)

    def test_argument_order_matters(self):
        a = beta_oscillating(2, 5, 0.01, GHZ, 50e-9, 16, BoundaryKind.QUARTER_WAVE)
        b = beta_oscillating(5, 2, 0.01, GHZ, 50e-9, 16, BoundaryKind.QUARTER_WAVE)
        assert a * b == pytest.approx((0.01 * GHZ * 50e-9 / 2) ** 2)

    @pytest.mark.parametrize("bad", [dict(epsilon=0), dict(omega_fund=-1), dict(T=0)])
    def test_rejects_nonpositive(self, bad):
        args = dict(k=1, kp=2, epsilon=0.01, omega_fund=1.0, T=10.0, p=3)
        args.update(bad)
        with pytest.raises(InvalidArgumentError):
            beta_oscillating(**args)


class TestResonantPairs:
    def test_16ghz_window(self, squid):
        assert resonant_pairs(squid, 16 * GHZ, 5) == [(2, 5), (3, 4)]

    def test_16ghz_wider_cutoff(self, squid):
        assert resonant_pairs(squid, 16 * GHZ, 7) == [(0, 7), (1, 6), (2, 5), (3, 4)]

    def test_12ghz(self, squid):
        assert set(resonant_pairs(squid, 12 * GHZ, 5)) == {(2, 3), (0, 5), (1, 4)}

    def test_none(self, squid):
        assert resonant_pairs(squid, 15 * GHZ, 7) == []

    @pytest.mark.parametrize("harmonic", [4, 8, 12, 16, 20, 24])
    def test_exhaustive_against_double_loop(self, squid, harmonic):
        wd = harmonic * GHZ
        brute = [(k, kp) for k in range(0, 12) for kp in range(k + 1, 12)
                 if (2 * k + 1) + (2 * kp + 1) == harmonic]
        got = resonant_pairs(squid, wd, 11)
        assert got == brute
        for k, kp in got:
            assert abs(squid.omega(k) + squid.omega(kp) - wd) / wd < 1e-9


class TestSymplecticFromBogoliubov:
    def test_identity(self):
        s = symplectic_from_bogoliubov(BogoliubovSet(np.eye(3), np.zeros((3, 3))))
        np.testing.assert_array_equal(s.matrix, np.eye(6))

    def test_block_for_pure_phase(self):
        s = symplectic_from_bogoliubov(BogoliubovSet([[1j]], [[0]]))
        np.testing.assert_allclose(s.matrix, [[0, 1], [-1, 0]], atol=1e-15)

    def test_phase_rotation_convention(self):
        th = 0.8
        s = symplectic_from_bogoliubov(BogoliubovSet([[cmath.exp(1j * th)]], [[0]]))
        np.testing.assert_allclose(s.matrix, phase_shift_matrix(1, 0, th).matrix, atol=1e-15)

    @pytest.mark.parametrize("r, phi", [(0.3, 0.0), (0.8, 0.4), (1.5, 2.0)])
    def test_exact_squeezer_round_trip(self, r, phi):
        beta = cmath.exp(-2j * phi) * math.sinh(r)
        bset = BogoliubovSet(math.cosh(r) * np.eye(2), [[0, beta], [beta, 0]])
        assert bset.identity_residual() < 1e-12
        s = symplectic_from_bogoliubov(bset)
        assert s.residual < 1e-12
        np.testing.assert_allclose(s.matrix, two_mode_squeezer(2, 0, 1, r, phi).matrix, atol=1e-12)

    def test_first_order_set_matches_squeezer_to_first_order(self):
        b = 1e-4
        bset = BogoliubovSet.first_order(2, {(0, 1): b})
        s = symplectic_from_bogoliubov(bset, warn=False)
        np.testing.assert_allclose(s.matrix, two_mode_squeezer(2, 0, 1, b).matrix, atol=b * b)
        assert bset.identity_residual() == pytest.approx(b * b)

    def test_large_first_order_set_warns(self):
        with pytest.warns(PerturbativeWarning):
            symplectic_from_bogoliubov(BogoliubovSet.first_order(2, {(0, 1): 0.1}))

    def test_shape_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            BogoliubovSet(np.eye(2), np.zeros((3, 3)))


class TestResonantTMSState:
    def test_zero_beta_is_vacuum(self):
        np.testing.assert_array_equal(resonant_tms_state(1, 2, 1, 0.0).sigma, np.eye(4))

    def test_linear_in_repetitions(self):
        one = resonant_tms_state(2, 5, 1, 0.01)
        three = resonant_tms_state(2, 5, 3, 0.01)
        np.testing.assert_array_equal(three.sigma[:2, 2:], 3 * one.sigma[:2, 2:])

    def test_first_order_determinant(self):
        r = 0.01 * math.cos(2 * math.pi * 2 / 7)
        det = np.linalg.det(resonant_tms_state(2, 5, 1, 0.01).sigma)
        assert det == pytest.approx((1 - 4 * r * r) ** 2, rel=1e-14)

    def test_second_order_eigenvalues_fall_below_one(self):
        # the (1 + B^2) diagonal with a -2B cross block is not a thermal state:
        # its symplectic eigenvalues are 1 - B^2
        s = resonant_tms_state(2, 5, 10, 0.01, theta=0.0, order="second")
        np.testing.assert_allclose(symplectic_eigenvalues(s.sigma), [1 - 0.01] * 2, atol=1e-12)
        assert not s.is_physical()

    def test_cross_block_agrees_with_exact_squeezer_to_first_order(self):
        B = 1e-3
        exact = apply_symplectic(vacuum(2), two_mode_squeezer(2, 0, 1, B)).sigma
        for order in ("first", "second"):
            approx = resonant_tms_state(1, 2, 1, B, theta=0.0, order=order).sigma
            np.testing.assert_allclose(approx, exact, atol=3 * B * B)

    def test_warns_outside_validity(self):
        with pytest.warns(PerturbativeWarning):
            resonant_tms_state(1, 2, 60, 0.01, theta=0.0)

    def test_invalid(self):
        with pytest.raises(InvalidArgumentError):
            resonant_tms_state(1, 2, 0, 0.01)
        with pytest.raises(InvalidArgumentError):
            resonant_tms_state(1, 2, 1, 0.01, order="third")
