import math

import pytest
from hypothesis import given, strategies as st

from treeconsensus.errors import InvalidJudgmentError
from treeconsensus.pcm import Judgment, build_pcm
from treeconsensus.scales import (
    MISSING,
    Scale,
    ScaleRegistry,
    UnifiedScale,
    hartley_weight,
    pcm_scale_weight,
    to_unified,
    tree_scale_weight,
)


class TestHartleyWeight:
    def test_two_grades(self):
        assert hartley_weight(Scale(2)) == 1.0

    def test_nine_grades(self):
        assert hartley_weight(Scale(9)) == pytest.approx(math.log2(9), abs=1e-12)

    def test_missing_is_zero(self):
        assert hartley_weight(MISSING) == 0.0

    def test_strictly_increasing(self):
        weights = [hartley_weight(Scale(n)) for n in range(2, 30)]
        assert all(a < b for a, b in zip(weights, weights[1:]))

    def test_rejects_degenerate_scale(self):
        with pytest.raises(InvalidJudgmentError):
            Scale(1)


class TestToUnified:
    def test_endpoint_low(self):
        assert to_unified(1, Scale(5), UnifiedScale(9)) == 1

    def test_midpoint(self):
        # round((3-1) * (9-1) / (5-1)) + 1 computed independently
        expected = round((3 - 1) * (9 - 1) / (5 - 1)) + 1
        assert to_unified(3, Scale(5), UnifiedScale(9)) == expected == 5

    def test_identity_when_scales_coincide(self):
        assert to_unified(7, Scale(7), UnifiedScale(7)) == 7

    def test_real_grades_map_continuously(self):
        assert to_unified(1.75, Scale(5), UnifiedScale(9)) == pytest.approx(2.5)

    def test_grade_out_of_range(self):
        with pytest.raises(InvalidJudgmentError):
            to_unified(6, Scale(5), UnifiedScale(9))
        with pytest.raises(InvalidJudgmentError):
            to_unified(0, Scale(5), UnifiedScale(9))

    def test_source_scale_cannot_exceed_unified(self):
        with pytest.raises(InvalidJudgmentError):
            to_unified(2, Scale(9), UnifiedScale(7))

    def test_monotone_and_endpoint_fixed_exhaustively(self):
        # every (N, N_max) pair up to 16, as the contract promises
        for n_max in range(2, 17):
            unified = UnifiedScale(n_max)
            for n in range(2, n_max + 1):
                scale = Scale(n)
                mapped = [to_unified(g, scale, unified) for g in range(1, n + 1)]
                assert mapped[0] == 1
                assert mapped[-1] == n_max
                assert all(a <= b for a, b in zip(mapped, mapped[1:]))
                assert all(1 <= g <= n_max for g in mapped)


class TestTreeScaleWeight:
    def test_uniform_scales(self):
        weight = tree_scale_weight([Scale(9)] * 3)
        assert weight == pytest.approx(math.log2(9), abs=1e-12)

    def test_mixed_scales_against_log_domain_oracle(self):
        scales = [Scale(7), Scale(9), Scale(9)]
        oracle = math.exp(
            sum(math.log(math.log2(s.grades)) for s in scales) / len(scales)
        )
        assert tree_scale_weight(scales) == pytest.approx(oracle, rel=1e-12)

    def test_missing_edge_kills_the_tree(self):
        assert tree_scale_weight([Scale(9), MISSING, Scale(9)]) == 0.0

    @given(st.permutations([2, 3, 5, 7, 9, 9]))
    def test_permutation_invariant(self, ns):
        base = tree_scale_weight([Scale(n) for n in [2, 3, 5, 7, 9, 9]])
        assert tree_scale_weight([Scale(n) for n in ns]) == pytest.approx(base, rel=1e-12)


def _pcm_with_cell_scales(cell_scales, n, unified):
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    judgments = [
        Judgment("e", i, j, 1, scale)
        for (i, j), scale in zip(pairs, cell_scales)
    ]
    return build_pcm(judgments, n, unified, expert="e")


class TestPcmScaleWeight:
    def test_uniform_nine_grades(self, unified):
        pcm = _pcm_with_cell_scales([Scale(9)] * 6, 4, unified)
        assert pcm_scale_weight(pcm) == pytest.approx(math.log2(9), abs=1e-12)

    def test_mixed_scales_log_domain_oracle(self, unified):
        scales = [Scale(9)] * 5 + [Scale(7)]
        pcm = _pcm_with_cell_scales(scales, 4, unified)
        oracle = math.log2(9) ** (5 / 6) * math.log2(7) ** (1 / 6)
        assert pcm_scale_weight(pcm) == pytest.approx(oracle, rel=1e-12)

    def test_complete_binary_scale(self, unified):
        pcm = _pcm_with_cell_scales([Scale(2)] * 6, 4, unified)
        assert pcm_scale_weight(pcm) == pytest.approx(1.0, abs=1e-12)

    def test_missing_cells_excluded_by_default(self, unified):
        incomplete = _pcm_with_cell_scales([Scale(9)] * 3, 4, unified)
        assert incomplete.pair_count() == 3
        assert pcm_scale_weight(incomplete) == pytest.approx(math.log2(9), abs=1e-12)

    def test_strict_policy_zeroes_incomplete(self, unified):
        incomplete = _pcm_with_cell_scales([Scale(9)] * 3, 4, unified)
        assert pcm_scale_weight(incomplete, strict_missing=True) == 0.0

    def test_empty_pcm_weighs_nothing(self, unified):
        empty = _pcm_with_cell_scales([], 3, unified)
        assert pcm_scale_weight(empty) == 0.0


class TestScaleRegistry:
    def test_defaults(self):
        assert ScaleRegistry().grade_counts() == [2, 3, 5, 7, 9]

    def test_unified_is_most_detailed(self):
        assert ScaleRegistry().unified() == UnifiedScale(9)

    def test_extensible(self):
        registry = ScaleRegistry()
        registry.register(17)
        assert registry.unified() == UnifiedScale(17)

    def test_unregistered_scale_rejected(self):
        with pytest.raises(InvalidJudgmentError):
            ScaleRegistry().get(6)
