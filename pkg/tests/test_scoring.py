"""Binarization, OR-rule consensus, label matrices, and score totals."""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from modelbench import published
from modelbench.scoring import (ACCEPTABLE, UNACCEPTABLE, LabelMatrix,
                                RubricScore, ScoringError, append_score,
                                binarize, build_label_matrix, load_scores,
                                or_consensus, total_score)


def make_score(rater="grok", dataset="g14-datahub", values=(4, 4, 4, 4, 4),
               kind="llm_judge", **kw) -> RubricScore:
    return RubricScore(rater_id=rater, rater_kind=kind, dataset_id=dataset,
                       scores={f"C{i+1}": v for i, v in enumerate(values)}, **kw)


def reference_scores() -> list[RubricScore]:
    out = []
    for rater, per_ds in published.SCORES.items():
        kind = "human" if rater in published.HUMAN_RATERS else "llm_judge"
        for ds, scores in per_ds.items():
            out.append(RubricScore(rater_id=rater, rater_kind=kind,
                                   dataset_id=ds, scores=dict(scores)))
    return out


class TestBinarize:
    def test_boundary_three_unacceptable(self):
        assert binarize(3) == UNACCEPTABLE

    def test_boundary_four_acceptable(self):
        assert binarize(4) == ACCEPTABLE

    def test_out_of_range(self):
        with pytest.raises(ScoringError):
            binarize(6)

    @given(st.integers(1, 5), st.integers(1, 5))
    def test_monotone(self, s, t):
        if s <= t:
            order = {UNACCEPTABLE: 0, ACCEPTABLE: 1}
            assert order[binarize(s)] <= order[binarize(t)]


class TestOrConsensus:
    def test_mixed_is_acceptable(self):
        assert or_consensus([UNACCEPTABLE, ACCEPTABLE]) == ACCEPTABLE

    def test_both_low_is_unacceptable(self):
        assert or_consensus([UNACCEPTABLE, UNACCEPTABLE]) == UNACCEPTABLE

    def test_singleton(self):
        assert or_consensus([ACCEPTABLE]) == ACCEPTABLE

    def test_empty_rejected(self):
        with pytest.raises(ScoringError):
            or_consensus([])

    @given(st.lists(st.sampled_from([ACCEPTABLE, UNACCEPTABLE]),
                    min_size=1, max_size=6))
    def test_commutative_associative_idempotent(self, labels):
        assert or_consensus(labels) == or_consensus(list(reversed(labels)))
        assert or_consensus(labels + labels) == or_consensus(labels)
        if len(labels) > 1:
            left = or_consensus([or_consensus(labels[:1]), or_consensus(labels[1:])])
            assert left == or_consensus(labels)


class TestRubricScore:
    def test_missing_criterion_rejected(self):
        with pytest.raises(ScoringError):
            RubricScore(rater_id="x", rater_kind="human", dataset_id="d",
                        scores={"C1": 4, "C2": 4, "C3": 4, "C4": 4})

    def test_out_of_range_rejected(self):
        with pytest.raises(ScoringError):
            make_score(values=(4, 4, 4, 4, 6))

    def test_needs_justification_boundary(self):
        assert make_score(values=(3, 4, 4, 4, 4)).needs_justification()
        assert not make_score(values=(4, 4, 4, 4, 4)).needs_justification()

    def test_json_round_trip(self):
        s = make_score(justification="solid", calibration=True)
        assert RubricScore.from_json(s.to_json()) == s


class TestTotals:
    def test_grok_g14(self):
        s = RubricScore(rater_id="grok", rater_kind="llm_judge",
                        dataset_id="g14-datahub",
                        scores=dict(published.SCORES["grok"]["g14-datahub"]))
        assert total_score(s) == 24

    def test_mistral_pacemaker(self):
        s = RubricScore(rater_id="mistral", rater_kind="llm_judge",
                        dataset_id="Pacemaker",
                        scores=dict(published.SCORES["mistral"]["Pacemaker"]))
        assert total_score(s) == 17

    def test_lower_bound(self):
        assert total_score(make_score(values=(1, 1, 1, 1, 1),
                                      justification="x")) == 5

    def test_all_reference_totals(self):
        # Totals column of the published score table
        expected = {
            "grok": [24, 25, 18, 25, 25, 22, 22, 17],
            "mistral": [20, 21, 19, 22, 20, 21, 21, 17],
            "A1": [21, 22, 21, 22, 21, 22, 22, 16],
            "A2": [23, 22, 21, 24, 20, 20, 20, 15],
        }
        for rater, totals in expected.items():
            for ds, want in zip(published.DATASET_ORDER, totals):
                s = RubricScore(rater_id=rater, rater_kind="human",
                                dataset_id=ds,
                                scores=dict(published.SCORES[rater][ds]))
                assert total_score(s) == want, (rater, ds)


class TestLabelMatrix:
    def test_forty_items_per_rater(self):
        matrix = build_label_matrix(reference_scores(),
                                    ["grok", "mistral", "A1", "A2"],
                                    dataset_order=published.DATASET_ORDER)
        assert len(matrix.items) == 40
        for col in matrix.columns.values():
            assert len(col) == 40

    def test_acceptable_counts_match_table(self):
        matrix = build_label_matrix(reference_scores(),
                                    ["grok", "mistral", "A1", "A2"],
                                    dataset_order=published.DATASET_ORDER)
        counts = {r: matrix.column(r).count(ACCEPTABLE)
                  for r in ("grok", "mistral", "A1", "A2")}
        assert counts == {"grok": 34, "mistral": 36, "A1": 35, "A2": 34}

    def test_single_rater_single_dataset(self):
        matrix = build_label_matrix([make_score()], ["grok"])
        assert len(matrix.items) == 5

    def test_missing_cell_names_rater_and_dataset(self):
        scores = [s for s in reference_scores()
                  if not (s.rater_id == "A2" and s.dataset_id == "Pacemaker")]
        with pytest.raises(ScoringError, match="A2.*Pacemaker"):
            build_label_matrix(scores, ["grok", "mistral", "A1", "A2"],
                               dataset_order=published.DATASET_ORDER)

    def test_calibration_scores_excluded(self):
        scores = [make_score(), make_score(dataset="g04-recycling",
                                           values=(1, 1, 1, 1, 1),
                                           justification="low", calibration=True)]
        matrix = build_label_matrix(scores, ["grok"])
        assert len(matrix.items) == 5

    def test_or_consensus_columns(self):
        matrix = build_label_matrix(reference_scores(),
                                    ["grok", "mistral", "A1", "A2"],
                                    dataset_order=published.DATASET_ORDER)
        llm = matrix.consensus(["grok", "mistral"])
        human = matrix.consensus(["A1", "A2"])
        assert llm.count(ACCEPTABLE) == 36
        assert human.count(ACCEPTABLE) == 36


class TestScoreStore:
    def test_append_and_load(self, tmp_path):
        path = tmp_path / "scores.jsonl"
        s1 = make_score()
        s2 = make_score(rater="A1", kind="human", values=(3, 4, 4, 4, 4),
                        justification="weak coverage")
        append_score(path, s1)
        append_score(path, s2)
        assert load_scores(path) == [s1, s2]

    def test_load_missing_file(self, tmp_path):
        assert load_scores(tmp_path / "nope.jsonl") == []
