import numpy as np
import pytest

import vasum


@pytest.fixture(scope="module")
def synthetic():
    return vasum.make_synthetic_dataset(videos=6, dim=8, users=3, seed=2)


def test_dataset_round_trip(tmp_path, synthetic):
    vasum.write_dataset(synthetic, tmp_path / "d")
    assert vasum.validate_dataset(tmp_path / "d") == []
    loaded = vasum.load_dataset(tmp_path / "d")
    assert len(loaded) == 6
    a, b = synthetic["video_1"], loaded["video_1"]
    assert np.array_equal(a.features, b.features)
    assert a.user_summaries.shape == (3, a.n_frames)
    with pytest.raises(KeyError):
        loaded["missing"]


def test_model_scores_and_attention(synthetic):
    video = synthetic["video_2"]
    model = vasum.Model.initialize(8, 8, seed=1)
    scores = model.predict(video.features)
    assert scores.shape == (len(video.picks),)
    assert np.all((scores > 0) & (scores < 1))
    att = model.attention(video.features)
    np.testing.assert_allclose(att.sum(axis=1), 1.0, atol=1e-12)

    perm = np.random.default_rng(0).permutation(len(video.picks))
    np.testing.assert_allclose(model.predict(video.features[perm]), scores[perm], atol=1e-12)


def test_checkpoint(tmp_path):
    model = vasum.Model.initialize(5, 3, attention="add", seed=4)
    model.save(tmp_path / "m.ckpt")
    again = vasum.Model.load(tmp_path / "m.ckpt")
    x = np.random.default_rng(1).normal(size=(7, 5))
    np.testing.assert_allclose(again.predict(x), model.predict(x), atol=1e-6)


def test_summary_budget(synthetic):
    video = synthetic["video_3"]
    s = vasum.summarize(video, video.gt_score)
    assert s["selected_frames"] <= int(0.15 * video.n_frames)
    assert s["mask"].sum() == s["selected_frames"]


def test_kts_and_knapsack():
    x = np.zeros((10, 3))
    x[:4, 0] = 1
    x[4:, 1] = 1
    assert vasum.kts(x, 3) == [4]
    assert vasum.knapsack_select([0.9, 0.1, 0.8], [10, 10, 10], 20) == [0, 2]
    with pytest.raises(vasum.ParameterError):
        vasum.kts(x, 10)


def test_fscore():
    assert vasum.fscore([1, 1, 0, 0], [1, 1, 0, 0])["f"] == pytest.approx(100.0)
    assert vasum.fscore([1, 1, 0, 0], [0, 0, 1, 1])["f"] == 0.0
    users = [[1, 0, 0, 0], [1, 1, 0, 0]]
    assert vasum.evaluate_video([1, 1, 0, 0], users, "max")["f"] == pytest.approx(100.0)


def test_cross_validate(synthetic):
    out = vasum.cross_validate(synthetic, folds=2, epochs=2, lr=1e-3, jobs=2)
    assert len(out["fold_f"]) == 2
    assert 0.0 <= out["mean_f"] <= 100.0
    assert out["models"][0].input_dim == 8
