import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from treeconsensus.errors import InvalidJudgmentError, JudgmentConflictError
from treeconsensus.pcm import (
    ComparisonGraph,
    Judgment,
    build_pcm,
    check_completeness,
)
from treeconsensus.scales import Scale, ScaleRegistry

REG = ScaleRegistry()
UNI = REG.unified()
S9 = REG.get(9)


class TestBuildPCM:
    def test_empty_judgments_give_diagonal_only(self):
        pcm = build_pcm([], 3, UNI, expert="e")
        assert pcm.pair_count() == 0
        a = pcm.to_array()
        assert np.allclose(np.diag(a), 1.0)
        assert np.isnan(a[0, 1])

    def test_reciprocal_autofilled(self):
        pcm = build_pcm([Judgment("e", 0, 1, 2, S9)], 3, UNI)
        assert pcm.value(0, 1) == 2.0
        assert pcm.value(1, 0) == 0.5

    def test_direction_inverts_ratio(self):
        pcm = build_pcm([Judgment("e", 0, 1, 2, S9, "<")], 3, UNI)
        assert pcm.value(0, 1) == 0.5

    def test_conflicting_duplicates_rejected(self):
        with pytest.raises(JudgmentConflictError) as err:
            build_pcm(
                [Judgment("e", 0, 1, 2, S9), Judgment("e", 1, 0, 3, S9)],
                3, UNI,
            )
        assert err.value.pair == (0, 1)

    def test_agreeing_duplicates_tolerated(self):
        pcm = build_pcm(
            [Judgment("e", 0, 1, 2, S9), Judgment("e", 1, 0, 2, S9, "<")],
            3, UNI,
        )
        assert pcm.value(0, 1) == 2.0

    def test_grades_converted_through_unified_scale(self):
        # grade 3 of 5 maps to unified grade 5
        pcm = build_pcm([Judgment("e", 0, 1, 3, REG.get(5))], 3, UNI)
        assert pcm.value(0, 1) == 5.0

    def test_out_of_range_pair_rejected(self):
        with pytest.raises(InvalidJudgmentError):
            build_pcm([Judgment("e", 0, 7, 2, S9)], 3, UNI)

    def test_mixed_experts_rejected(self):
        with pytest.raises(InvalidJudgmentError):
            build_pcm(
                [Judgment("a", 0, 1, 2, S9), Judgment("b", 1, 2, 2, S9)],
                3, UNI,
            )

    @given(st.lists(
        st.tuples(
            st.integers(0, 4), st.integers(0, 4),
            st.integers(1, 9), st.booleans(),
        ).filter(lambda t: t[0] != t[1]),
        max_size=10, unique_by=lambda t: frozenset((t[0], t[1])),
    ))
    @settings(deadline=None)
    def test_reciprocity_always_holds(self, raw):
        judgments = [
            Judgment("e", i, j, g, S9, ">" if forward else "<")
            for i, j, g, forward in raw
        ]
        pcm = build_pcm(judgments, 5, UNI, expert="e")
        for i, j, value, _ in pcm.upper_triangle():
            assert pcm.value(j, i) == pytest.approx(1.0 / value, rel=1e-12)
        # round-trip of each input judgment's unified value
        for judgment in judgments:
            expected = float(judgment.grade)
            if judgment.direction == "<":
                expected = 1.0 / expected
            assert pcm.value(judgment.i, judgment.j) == pytest.approx(expected, rel=1e-12)

    def test_with_cell_replaces_and_mirrors(self):
        pcm = build_pcm([Judgment("e", 0, 1, 2, S9)], 3, UNI)
        revised = pcm.with_cell(0, 1, 3.5, S9)
        assert revised.value(0, 1) == 3.5
        assert revised.value(1, 0) == pytest.approx(1 / 3.5)
        assert pcm.value(0, 1) == 2.0  # original untouched


def _pcm_from_pairs(expert, pairs, n):
    return build_pcm([Judgment(expert, i, j, 2, S9) for i, j in pairs], n, UNI,
                     expert=expert)


class TestCompleteness:
    def test_paper_chain_of_three_experts(self):
        # three experts provide only a12, a23, a34 respectively; the union
        # graph chains all four alternatives together
        pcms = [
            _pcm_from_pairs("e1", [(0, 1)], 4),
            _pcm_from_pairs("e2", [(1, 2)], 4),
            _pcm_from_pairs("e3", [(2, 3)], 4),
        ]
        report = check_completeness(pcms)
        assert report.union_connected
        assert report.complete
        assert report.suggested_edges == []
        assert report.connected == {"e1": False, "e2": False, "e3": False}

    def test_no_judgments_at_all(self):
        report = check_completeness([_pcm_from_pairs("e", [], 4)])
        assert not report.union_connected
        assert len(report.components) == 4
        assert len(report.suggested_edges) == 3

    def test_two_islands_suggest_bridge(self):
        pcms = [
            _pcm_from_pairs("e1", [(0, 1)], 4),
            _pcm_from_pairs("e2", [(2, 3)], 4),
        ]
        report = check_completeness(pcms)
        assert not report.union_connected
        assert report.components == [[0, 1], [2, 3]]
        assert report.suggested_edges == [(0, 2)]
        # oracle: adding the suggested comparisons must connect the union graph
        edges = set()
        for pcm in pcms:
            edges |= pcm.graph().edges
        edges |= set(report.suggested_edges)
        assert ComparisonGraph(4, frozenset(edges)).is_connected()

    def test_invariant_under_expert_permutation(self):
        pcms = [
            _pcm_from_pairs("e1", [(0, 1), (1, 2)], 5),
            _pcm_from_pairs("e2", [(3, 4)], 5),
        ]
        fwd = check_completeness(pcms)
        rev = check_completeness(list(reversed(pcms)))
        assert fwd.union_connected == rev.union_connected
        assert fwd.components == rev.components
        assert fwd.suggested_edges == rev.suggested_edges

    def test_equivariant_under_alternative_relabeling(self):
        pcms = [
            _pcm_from_pairs("e1", [(0, 1)], 4),
            _pcm_from_pairs("e2", [(2, 3)], 4),
        ]
        base = check_completeness(pcms)
        # relabel by the cycle 0 -> 3 -> 2 -> 1 -> 0
        perm = {0: 3, 1: 0, 2: 1, 3: 2}
        relabeled = [
            _pcm_from_pairs("e1", [(perm[0], perm[1])], 4),
            _pcm_from_pairs("e2", [(perm[2], perm[3])], 4),
        ]
        mapped = check_completeness(relabeled)
        base_components = sorted(
            tuple(sorted(perm[v] for v in comp)) for comp in base.components)
        assert base_components == sorted(
            tuple(comp) for comp in mapped.components)
        assert mapped.union_connected == base.union_connected
        assert len(mapped.suggested_edges) == len(base.suggested_edges)
        # the suggestions connect the relabeled graph just as well
        edges = {(min(a, b), max(a, b))
                 for pcm in relabeled for a, b in pcm.graph().edges}
        edges |= {tuple(sorted(e)) for e in mapped.suggested_edges}
        assert ComparisonGraph(4, frozenset(edges)).is_connected()

    def test_mixed_sizes_rejected(self):
        with pytest.raises(ValueError):
            check_completeness([
                _pcm_from_pairs("e1", [(0, 1)], 3),
                _pcm_from_pairs("e2", [(0, 1)], 4),
            ])
