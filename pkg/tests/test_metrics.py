import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agcn.metrics import (MetricInputError, PredictionSet, ap_all, average_precision, metric_report,
                          mean_average_precision, per_class_ap, prf_overall, prf_per_class,
                          read_report_kv, threshold_decisions, topk_decisions)
from oracles import ap_all_oracle, ap_oracle, map_oracle, random_instance

HAND_TRUTHS = np.array([[1, 0], [1, 1], [0, 1]])
HAND_DECISIONS = np.array([[1, 1], [1, 0], [0, 1]])


class TestAveragePrecision:
    def test_perfect(self):
        assert average_precision([0.9, 0.8, 0.1, 0.0], [1, 1, 0, 0]) == 1.0

    def test_single_positive_rank_two(self):
        assert average_precision([0.9, 0.8, 0.7], [0, 1, 0]) == 0.5

    def test_seed_21_oracle(self):
        rng = np.random.default_rng(21)
        s = rng.random(50)
        t = rng.random(50) < 0.3
        assert abs(average_precision(s, t) - ap_oracle(s, t)) < 1e-12

    def test_ties_broken_by_index(self):
        # the positive at index 1 ranks behind index 0 on a tie
        assert average_precision([0.5, 0.5], [0, 1]) == 0.5
        assert average_precision([0.5, 0.5], [1, 0]) == 1.0

    def test_no_positive(self):
        with pytest.raises(MetricInputError):
            average_precision([0.1, 0.2], [0, 0])

    def test_shape_mismatch(self):
        with pytest.raises(MetricInputError):
            average_precision([0.1, 0.2], [1])

    def test_random_ranking_expectation(self):
        rng = np.random.default_rng(3)
        n, b = 40, 6
        truths = np.zeros(n, dtype=bool)
        truths[:b] = True
        aps = np.array([average_precision(rng.random(n), rng.permutation(truths)) for _ in range(1000)])
        assert aps.mean() >= b / n - 3 * aps.std(ddof=1) / np.sqrt(len(aps))

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_monotone_invariance(self, seed):
        rng = np.random.default_rng(seed)
        s = rng.standard_normal(30)
        t = rng.random(30) < 0.4
        t[0] = True
        base = average_precision(s, t)
        assert average_precision(np.exp(s), t) == base
        assert average_precision(3 * s - 7, t) == base
        assert 0 <= base <= 1


class TestMeanAP:
    def test_perfect(self):
        s = np.array([[0.9, 0.1], [0.2, 0.8]])
        assert mean_average_precision(PredictionSet(s, [[1, 0], [0, 1]])) == 1.0

    def test_arithmetic(self):
        s = np.array([[0.9, 0.9], [0.8, 0.1], [0.1, 0.0]])
        t = np.array([[0, 1], [1, 0], [0, 0]])
        assert mean_average_precision(PredictionSet(s, t)) == 0.75

    def test_five_class_oracle(self):
        rng = np.random.default_rng(5)
        s = rng.random((30, 5))
        t = (rng.random((30, 5)) < 0.3).astype(int)
        t[0] = 1
        assert abs(mean_average_precision(PredictionSet(s, t)) - map_oracle(s, t)) < 1e-12

    def test_class_without_positives_excluded(self):
        s = np.array([[0.9, 0.3], [0.1, 0.7]])
        aps, skipped = per_class_ap(PredictionSet(s, [[1, 0], [0, 0]]))
        assert skipped == [1] and np.isnan(aps[1])
        assert mean_average_precision(PredictionSet(s, [[1, 0], [0, 0]])) == 1.0


class TestPRF:
    def test_hand_case(self):
        pred = PredictionSet(np.zeros((3, 2)), HAND_TRUTHS, HAND_DECISIONS)
        o, c = prf_overall(pred), prf_per_class(pred)
        assert (o.precision, o.recall, o.f1) == (0.75, 0.75, 0.75)
        assert (c.precision, c.recall, c.f1) == (0.75, 0.75, 0.75)

    def test_perfect(self):
        pred = PredictionSet(np.zeros((3, 2)), HAND_TRUTHS, HAND_TRUTHS)
        assert prf_overall(pred).f1 == 1.0 and prf_per_class(pred).f1 == 1.0

    def test_all_zero_decisions_flagged(self):
        pred = PredictionSet(np.zeros((3, 2)), HAND_TRUTHS, np.zeros((3, 2), dtype=int))
        o = prf_overall(pred)
        assert (o.precision, o.recall, o.f1) == (0.0, 0.0, 0.0)
        assert any("OP" in f for f in o.flags)

    def test_non_binary_rejected(self):
        with pytest.raises(MetricInputError):
            PredictionSet(np.zeros((1, 2)), [[1, 2]])

    def test_sample_order_irrelevant(self, rng):
        s, t = random_instance(rng)
        d = threshold_decisions(s, 0.5)
        perm = rng.permutation(len(s))
        a = prf_per_class(PredictionSet(s, t, d))
        b = prf_per_class(PredictionSet(s[perm], t[perm], d[perm]))
        assert (a.precision, a.recall, a.f1) == (b.precision, b.recall, b.f1)


class TestTopK:
    def test_all(self):
        assert topk_decisions([[0.3, 0.1, 0.2]], 3).tolist() == [[1, 1, 1]]

    def test_one(self):
        assert topk_decisions([0.1, 0.9, 0.5], 1).tolist() == [[0, 1, 0]]

    def test_tie(self):
        assert topk_decisions([0.5, 0.5, 0.2], 1).tolist() == [[1, 0, 0]]

    def test_k_out_of_range(self):
        with pytest.raises(MetricInputError):
            topk_decisions([0.5, 0.5], 3)


class TestAPAll:
    def test_perfect(self):
        assert ap_all(PredictionSet([[0.9, 0.1], [0.2, 0.8]], [[1, 0], [0, 1]])) == 1.0

    def test_single_cell_reduction(self):
        s, t = [[0.4, 0.2, 0.9]], [[0, 1, 1]]
        assert ap_all(PredictionSet(s, t)) == average_precision([0.4, 0.2, 0.9], [0, 1, 1])

    def test_seed_17_oracle(self):
        rng = np.random.default_rng(17)
        s = rng.random((4, 5))
        t = (rng.random((4, 5)) < 0.4).astype(int)
        t[0, 0] = 1
        assert abs(ap_all(PredictionSet(s, t)) - ap_all_oracle(s, t)) < 1e-12


def test_oracle_agreement_with_ties():
    rng = np.random.default_rng(99)
    for _ in range(40):
        s, t = random_instance(rng, n_max=20, c_max=4, tie_grid=4)
        rep = metric_report(s, t, top_k=None)
        assert abs(rep["mAP"] - map_oracle(s, t)) < 1e-12
        assert abs(rep["AP_all"] - ap_all_oracle(s, t)) < 1e-12


class TestReport:
    def test_keys(self, rng):
        s, t = random_instance(rng, c_max=6)
        rep = metric_report(s, t, top_k=3)
        for k in ("mAP", "CP", "CR", "CF1", "OP", "OR", "OF1", "AP_all"):
            assert k in rep.values
        topk = [k for k in rep.values if k.startswith("top3_")]
        assert sorted(topk) == sorted(f"top3_{k}" for k in ("CP", "CR", "CF1", "OP", "OR", "OF1"))
        for v in rep.values.values():
            assert 0.0 <= v <= 1.0

    def test_topk_threshold_flag(self):
        s = np.array([[0.4, 0.3, 0.1, 0.05]])
        t = np.array([[1, 0, 0, 0]])
        plain = metric_report(s, t, top_k=1)
        gated = metric_report(s, t, top_k=1, topk_threshold=True)
        assert plain["top1_OR"] == 1.0 and gated["top1_OR"] == 0.0

    def test_skipped_classes_listed(self):
        rep = metric_report([[0.9, 0.2], [0.1, 0.3]], [[1, 0], [0, 0]], labels=["cat", "dog"])
        assert rep.skipped_classes == ["dog"]
        assert "skipped (no positives): dog" in rep.to_table()

    def test_kv_round_trip(self, tmp_path, rng):
        s, t = random_instance(rng)
        rep = metric_report(s, t)
        path = tmp_path / "r.txt"
        path.write_text(rep.to_kv())
        kv = read_report_kv(path)
        assert all(float(kv[k]) == v for k, v in rep.values.items())

    def test_empty(self):
        with pytest.raises(MetricInputError):
            metric_report(np.zeros((0, 2)), np.zeros((0, 2)))
