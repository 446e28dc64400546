"""
Hankel positivity tests
"""
import math

import numpy as np
import pytest

from src.core.transforms import p_to_q
from src.generators.state_generator import cat_state, coherent, coherent_mixture, thermal
from src.models.distribution import FactorialMomentSequence, MomentSequence
from src.models.errors import WindowTooShort
from src.models.report import CheckName
from src.models.specs import FIG1_MIXTURE, CatStateSpec
from src.validators.base_validator import BatteryConfig
from src.validators.hankel import (
    build_hankel,
    check_hankel_psd,
    equilibrate,
    hankel_profile,
    psd_decision,
    scan_hankel,
)

pytestmark = pytest.mark.unit


class TestBuildHankel:
    """ハンケル行列の構築のテスト"""

    def test_structure(self):
        q = MomentSequence.from_values([1.0, 2.0, 5.0, 14.0, 42.0])
        pair = build_hankel(q, 2, allow_unshifted_only=True)
        unshifted, shifted = pair.raw_matrices()

        np.testing.assert_allclose(unshifted, [[1, 2, 5], [2, 5, 14], [5, 14, 42]], rtol=1e-12)
        assert shifted is None

    def test_shifted_matrix(self):
        q = MomentSequence.from_values([1.0, 2.0, 5.0, 14.0])
        pair = build_hankel(q, 1)
        _, shifted = pair.raw_matrices()

        np.testing.assert_allclose(shifted, [[2, 5], [5, 14]], rtol=1e-12)

    def test_symmetric_and_gauged(self):
        q = p_to_q(coherent(130.0, 300))
        pair = build_hankel(q, 50)
        matrix = pair.unshifted_matrix()

        assert np.array_equal(matrix, matrix.T)
        assert matrix.max() <= 1.0 + 1e-12
        assert np.all(np.isfinite(matrix))

    def test_window_too_short(self):
        with pytest.raises(WindowTooShort):
            build_hankel(MomentSequence.from_values([1.0, 1.0, 1.0]), 2)

    def test_gamma_source(self):
        pair = build_hankel(FactorialMomentSequence.from_values([1.0, 2.0, 8.0, 48.0]), 1)

        assert pair.source == "gamma"


class TestPSDDecision:
    """半正定値判定のテスト"""

    def test_equilibrate_unit_diagonal(self):
        eq = equilibrate(np.array([[4.0, 2.0], [2.0, 9.0]]))

        np.testing.assert_allclose(np.diag(eq), [1.0, 1.0])
        assert eq[0, 1] == pytest.approx(2.0 / 6.0)

    def test_psd(self):
        assert psd_decision(np.array([[2.0, 1.0], [1.0, 2.0]]), 1e-9).is_psd

    def test_indefinite(self):
        result = psd_decision(np.array([[1.0, 2.0], [2.0, 1.0]]), 1e-9)

        assert not result.is_psd
        assert result.min_eigenvalue == pytest.approx(-1.0)
        assert result.margin < 0

    def test_zero_diagonal_with_coupling(self):
        result = psd_decision(np.array([[0.0, 1e-3], [1e-3, 1.0]]), 1e-9)

        assert not result.is_psd

    def test_scale_free(self):
        """平衡化により対角スケーリングに依存しない"""
        a = np.array([[1.0, 0.999], [0.999, 1.0]])
        d = np.diag([1e-150, 1e150])

        assert psd_decision(a, 1e-9).is_psd == psd_decision(d @ a @ d, 1e-9).is_psd


class TestHankelCheck:
    """ハンケル検査のテスト"""

    def test_schiller_shifted_fails(self, schiller_q):
        report = scan_hankel(schiller_q)
        shifted = [w for w in report.witnesses if w.detail.startswith("L~")]

        assert report.is_nonclassical
        assert shifted[0].indices == (1,)
        assert shifted[0].lhs < 0

    def test_single_pair(self, schiller_q):
        report = check_hankel_psd(build_hankel(schiller_q, 1))

        assert report.is_nonclassical

    @pytest.mark.parametrize("mu", [0.5, 1.0, 10.0, 130.0])
    def test_poisson_psd(self, mu):
        nmax = int(mu + 10 * np.sqrt(mu)) + 20
        report = scan_hankel(p_to_q(coherent(mu, nmax)))

        assert not report.is_nonclassical
        assert report.tests_run[0].max_order == min(50, nmax // 2)

    def test_mixture_psd(self):
        assert not scan_hankel(p_to_q(coherent_mixture(FIG1_MIXTURE, 200))).is_nonclassical

    def test_thermal_psd(self):
        assert not scan_hankel(p_to_q(thermal(2.0, 60))).is_nonclassical

    def test_hamburger_only(self, schiller_q):
        report = scan_hankel(schiller_q, BatteryConfig(hamburger_only=True))

        assert all(not w.detail.startswith("L~") for w in report.witnesses)

    def test_gamma_matrices(self):
        gamma = FactorialMomentSequence.from_values([1.0, 1.0, 1.5, 1.5])
        report = scan_hankel(gamma)

        assert report.witnesses[0].check == CheckName.HANKEL_GAMMA
        assert report.witnesses[0].detail == "M~ min eigenvalue"
        assert report.witnesses[0].indices == (1,)

    def test_capped_order(self):
        q = p_to_q(coherent(10.0, 60))
        report = scan_hankel(q, BatteryConfig(max_hankel_order=5))

        assert report.tests_run[0].max_order == 5


class TestHankelProfile:
    def test_min_eigenvalues_non_increasing(self):
        profile = hankel_profile(p_to_q(thermal(1.0, 30)), max_order=8)
        mins = [entry.unshifted_min for entry in profile]

        assert len(profile) == 9
        assert all(b <= a + 1e-12 for a, b in zip(mins, mins[1:]))
        assert profile[-1].shifted_min is not None

    @pytest.mark.parametrize("seq_factory", [
        lambda schiller_q: schiller_q,
        lambda schiller_q: p_to_q(cat_state(CatStateSpec(intensity=4.0, theta=math.pi / 3), 40)),
        lambda schiller_q: _dented_mixture(30, dent=5, factor=0.3),
        lambda schiller_q: _dented_mixture(40, dent=12, factor=0.5),
    ], ids=["schiller", "cat", "dented-5", "dented-12"])
    def test_failure_persists_in_order(self, schiller_q, seq_factory):
        """一度破れた行列は、それより大きい次数でも破れ続ける"""
        seq = seq_factory(schiller_q)
        profile = hankel_profile(seq)
        for key in ("unshifted_min", "shifted_min"):
            mins = [getattr(entry, key) for entry in profile if getattr(entry, key) is not None]
            assert all(b <= a + 1e-12 for a, b in zip(mins, mins[1:])), key

        failed = set()
        for N in range(seq.nmax // 2 + 1):
            pair = build_hankel(seq, N, allow_unshifted_only=True)
            present = {"L min eigenvalue"}
            if pair.shifted_matrix() is not None:
                present.add("L~ min eigenvalue")
            labels = {w.detail for w in check_hankel_psd(pair).witnesses}
            assert failed & present <= labels, N
            failed |= labels
        assert failed


def _dented_mixture(nmax, dent, factor):
    q = p_to_q(coherent_mixture(FIG1_MIXTURE, nmax)).values()
    q[dent] *= factor
    return MomentSequence.from_values(q)
