import math

import numpy as np
import pytest

import gfa


def test_preprocessing_examples():
    out = gfa.threshold_top_genes(np.array([5.0, -3.0, 1.0, -7.0, 0.0]), 1, 1)
    assert list(out) == [5.0, 0.0, 0.0, -7.0, 0.0]
    values, ids = gfa.merge_replicates(np.array([[1.0, 3.0], [3.0, 5.0], [7.0, 7.0]]), ["a", "a", "b"])
    assert ids == ["a", "b"]
    assert values.tolist() == [[2.0, 4.0], [7.0, 7.0]]


def test_select_chain_flags_outlier():
    selected, outlier = gfa.select_chain([-99.0, -100.0, -101.0, -5000.0])
    assert selected == 1
    assert outlier == [False, False, False, True]


def test_classify_and_bh():
    act = np.array([[1, 1, 0], [0, 1, 0]], dtype=np.int32)
    kinds = gfa.classify(act, ["chemistry", "biology"])
    assert [k for k, _ in kinds] == ["view-specific", "shared", "inactive"]
    q = gfa.benjamini_hochberg([0.01, 0.04, 0.03])
    assert q == pytest.approx([0.03, 0.04, 0.04])


def test_similarity_curve_third():
    edges = [("a", "t1"), ("b", "t1"), ("t1", "t2"), ("t2", "t3"), ("t3", "c")]
    lengths, values = gfa.similarity_curve(edges, ["a", "b", "c"], [["a", "b", "c"]], [16])
    assert lengths == [16]
    assert values[0] == 1.0 / 3.0


def test_fit_small_synthetic():
    act = np.array([[1, 1, 0], [1, 0, 1]], dtype=np.int32)
    data = gfa.generate_synthetic(60, [6, 6], act, 3.0, 1)
    assert data["views"][0].shape == (60, 6)
    config = gfa.ModelConfig()
    config.num_components = 5
    schedule = gfa.SamplingSchedule()
    schedule.n_chains = 2
    schedule.burn_in = 100
    schedule.n_samples = 50
    schedule.thinning = 5
    schedule.seed = 3
    res = gfa.fit(data["views"], ["chemistry", "biology"], config, schedule)
    assert res["retained"] == 10
    assert res["scores"].shape == (60, 5)
    assert len(res["kinds"]) == 5
    assert all(math.isfinite(m) for m in res["chain_means"])
    again = gfa.fit(data["views"], ["chemistry", "biology"], config, schedule)
    assert np.array_equal(res["scores"], again["scores"])


def test_errors_are_translated():
    with pytest.raises(ValueError):
        gfa.threshold_top_genes(np.array([1.0]), -1, 0)
    config = gfa.ModelConfig()
    config.num_components = 0
    with pytest.raises(ValueError):
        config.validate()
