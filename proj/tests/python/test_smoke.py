import json

import numpy as np
import pytest

import skelwarp


def brute_force_dtw(a, b):
    best = np.inf
    stack = [(0, 0, (a[0] - b[0]) ** 2)]
    while stack:
        i, j, acc = stack.pop()
        if i == len(a) - 1 and j == len(b) - 1:
            best = min(best, acc)
            continue
        for di, dj in ((1, 0), (0, 1), (1, 1)):
            ni, nj = i + di, j + dj
            if ni < len(a) and nj < len(b):
                stack.append((ni, nj, acc + (a[ni] - b[nj]) ** 2))
    return best


def test_dtw_matches_brute_force():
    rng = np.random.default_rng(0)
    for _ in range(300):
        a = rng.integers(-3, 4, rng.integers(1, 6)).astype(float)
        b = rng.integers(-3, 4, rng.integers(1, 6)).astype(float)
        dist, src, base = skelwarp.dtw(a, b)
        assert dist == brute_force_dtw(a, b)
        assert skelwarp.dtw_distance(a, b) == dist
        assert (src[0], base[0]) == (0, 0)
        assert (src[-1], base[-1]) == (len(a) - 1, len(b) - 1)
        assert sum((a[i] - b[j]) ** 2 for i, j in zip(src, base)) == dist


def test_warp_identity_and_length():
    rng = np.random.default_rng(1)
    s = rng.normal(size=17)
    assert np.array_equal(skelwarp.warp_signal(s, s), s)
    assert skelwarp.warp_signal(rng.normal(size=9), s).shape == (17,)


@pytest.mark.filterwarnings("ignore:Level value")
@pytest.mark.parametrize(
    "name,order,levels,n",
    [(f, o, l, n) for (f, o) in [("db", 4), ("coif", 2), ("sym", 4)] for l in (1, 3, 5) for n in (16, 37, 100)],
)
def test_wavedec_matches_pywt(name, order, levels, n):
    pywt = pytest.importorskip("pywt")
    x = np.sin(0.3 * np.arange(n)) + 0.05 * np.arange(n)
    ours = skelwarp.wavedec(x, name, order, levels)
    ref = pywt.wavedec(x, f"{name}{order}", mode="symmetric", level=levels)
    assert len(ours) == len(ref)
    for a, b in zip(ours, ref):
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-9)


@pytest.mark.parametrize("window,order", [(5, 2), (11, 3), (7, 0)])
def test_savgol_matches_scipy(window, order):
    signal = pytest.importorskip("scipy.signal")
    x = np.random.default_rng(2).normal(size=40)
    np.testing.assert_allclose(
        skelwarp.savgol_filter(x, window, order),
        signal.savgol_filter(x, window, order, mode="interp"),
        rtol=0,
        atol=1e-9,
    )


def test_median_filter_and_error_kinds():
    assert list(skelwarp.median_filter(np.array([1.0, 9.0, 2.0, 3.0, 4.0]), 3)) == [1, 2, 3, 3, 4]
    with pytest.raises(skelwarp.Error) as info:
        skelwarp.median_filter(np.zeros(5), 4)
    assert info.value.kind == "InvalidWindow"


def test_forest_on_separable_data():
    rng = np.random.default_rng(3)
    x = rng.uniform(-1, 1, size=(200, 1))
    y = [1 if v < 0 else 2 for v in x[:, 0]]
    forest = skelwarp.train_forest(x, y, n_trees=50, seed=7)
    test = rng.uniform(-1, 1, size=(500, 1))
    truth = np.where(test[:, 0] < 0, 1, 2)
    assert np.mean(np.array(forest.predict(test)) == truth) >= 0.98
    again = skelwarp.train_forest(x, y, n_trees=50, seed=7, jobs=2)
    assert again.to_json() == forest.to_json()
    proba = np.array(forest.predict_proba(test[:5]))
    np.testing.assert_allclose(proba.sum(axis=1), 1.0)


def test_end_to_end(tmp_path):
    manifest = skelwarp.write_synthetic(tmp_path / "data", classes=3, subjects=3, reps=2, seed=4)
    config = json.dumps({"forest": {"n_trees": 40}, "protocol": {"repeats": 1}})
    report = skelwarp.evaluate(manifest, config)
    assert report["schema"] == "skelwarp.report"
    assert len(report["folds"]) == 3
    assert report["accuracy"] >= 0.9

    model = skelwarp.train(manifest, config)
    model.save(tmp_path / "model")
    loaded = skelwarp.load_model(tmp_path / "model")
    label, name = loaded.predict_file(tmp_path / "data" / "s1_c2_r1.csv")
    assert (label, name) == (2, "class2")
    assert loaded.feature_dimension == model.feature_dimension

    with pytest.raises(skelwarp.Error) as info:
        skelwarp.train(manifest, '{"forest": {"n_tree": 3}}')
    assert info.value.kind == "ConfigError"
    with pytest.raises(skelwarp.Error) as info:
        skelwarp.load_model(tmp_path / "nothing")
    assert info.value.kind == "CorruptBundle"
