import numpy as np
import pytest

from conftest import make_grasp
from taxelgrid.errors import ConfigInvalid, ZeroVariance
from taxelgrid.imaging import TactileImage
from taxelgrid.pipeline import (
    PipelineConfig,
    augment_dataset,
    flatten_dataset,
    flatten_sample,
    parallel_map,
    preprocess,
    preprocess_dataset,
    preprocess_sample,
    worker_count,
)
from taxelgrid.samples import GraspSample, PreprocessedSample


def test_preprocess_shapes_paper_config():
    rng = np.random.default_rng(0)
    sample = make_grasp(rng)
    img, label = preprocess(sample, PipelineConfig("d1", "mean", "channels"))
    assert isinstance(img, TactileImage)
    assert img.shape == (12, 11, 3)
    assert label == sample.label


def test_preprocess_shapes_d3_min_horizontal():
    rng = np.random.default_rng(1)
    img, _ = preprocess(make_grasp(rng),
                        PipelineConfig("d3", "min", "horizontal"))
    assert img.shape == (4, 21, 1)


def test_preprocess_constant_reading_raises():
    sample = GraspSample(
        fingers=(np.zeros(24), np.ones(24), np.full(24, 2.0)),
        label="stable", object_id="o", orientation="palm_down", sample_id="s",
    )
    with pytest.raises(ZeroVariance):
        preprocess(sample, PipelineConfig())


def test_preprocess_deterministic():
    rng = np.random.default_rng(2)
    sample = make_grasp(rng)
    cfg = PipelineConfig("d2", "mean", "vertical")
    a, _ = preprocess(sample, cfg)
    b, _ = preprocess(sample, cfg)
    assert np.array_equal(a.data, b.data)


def test_preprocess_sample_carries_bookkeeping():
    rng = np.random.default_rng(3)
    sample = make_grasp(rng, label="slippery", object_id="objX",
                        sample_id="s42")
    pre = preprocess_sample(sample, PipelineConfig())
    assert (pre.label, pre.object_id, pre.sample_id) == \
        ("slippery", "objX", "s42")
    assert pre.provenance == "original"


def test_flatten_sample_zscores_each_finger():
    rng = np.random.default_rng(4)
    sample = make_grasp(rng)
    pre = flatten_sample(sample)
    assert pre.x.shape == (72,)
    for f in range(3):
        chunk = pre.x[24 * f : 24 * (f + 1)]
        assert abs(chunk.mean()) < 1e-9
        assert abs(chunk.std() - 1.0) < 1e-9


def test_pipeline_config_validation():
    with pytest.raises(ConfigInvalid):
        PipelineConfig(fill="median")
    with pytest.raises(ConfigInvalid):
        PipelineConfig(compose="diagonal")


def test_parallel_map_matches_sequential(monkeypatch):
    items = list(range(40))
    fn = lambda v: v * v
    sequential = [fn(v) for v in items]
    monkeypatch.setenv("TAXELGRID_THREADS", "3")
    assert worker_count() == 3
    assert parallel_map(fn, items) == sequential


def test_worker_count_validation(monkeypatch):
    monkeypatch.setenv("TAXELGRID_THREADS", "zero?")
    with pytest.raises(ConfigInvalid):
        worker_count()
    monkeypatch.setenv("TAXELGRID_THREADS", "-4")
    assert worker_count() == 1
    monkeypatch.delenv("TAXELGRID_THREADS")
    assert worker_count() == 1


def test_preprocess_dataset_parallel_identical(monkeypatch):
    rng = np.random.default_rng(5)
    samples = [make_grasp(rng, sample_id=f"s{i}") for i in range(12)]
    cfg = PipelineConfig("d1", "mean", "channels")
    seq = preprocess_dataset(samples, cfg)
    monkeypatch.setenv("TAXELGRID_THREADS", "4")
    par = preprocess_dataset(samples, cfg)
    assert [p.sample_id for p in par] == [p.sample_id for p in seq]
    for a, b in zip(seq, par):
        assert np.array_equal(a.x, b.x)


# ------------------------------------------------------------- augment

def preprocessed(rng, n, shape=(6, 5, 1)):
    out = []
    for i in range(n):
        out.append(PreprocessedSample(
            x=rng.normal(0, 1, shape),
            label="stable" if i % 2 == 0 else "slippery",
            object_id=f"obj{i % 3}",
            sample_id=f"s{i}",
        ))
    return out


def test_augment_cardinality_paper_scale():
    rng = np.random.default_rng(6)
    data = preprocessed(rng, 2064)
    out = augment_dataset(data, seed=3)
    assert len(out) == 8256 == 4 * len(data)


def test_augment_empty():
    assert augment_dataset([], seed=0) == []


def test_augment_deterministic():
    rng = np.random.default_rng(7)
    data = preprocessed(rng, 10)
    a = augment_dataset(data, seed=9)
    b = augment_dataset(data, seed=9)
    assert len(a) == len(b) == 40
    for s, t in zip(a, b):
        assert s.sample_id == t.sample_id
        assert np.array_equal(s.x, t.x)
    c = augment_dataset(data, seed=10)
    assert any(not np.array_equal(s.x, t.x) for s, t in zip(a, c))


def test_augment_preserves_labels_and_objects():
    rng = np.random.default_rng(8)
    data = preprocessed(rng, 6)
    out = augment_dataset(data, seed=1)
    n = len(data)
    provs = ["original", "flip_vertical", "flip_horizontal", "rotated"]
    for block, prov in enumerate(provs):
        for i, s in enumerate(out[block * n : (block + 1) * n]):
            assert s.label == data[i].label
            assert s.object_id == data[i].object_id
            assert s.provenance == prov
            if prov != "original":
                assert s.sample_id == f"{data[i].sample_id}:{prov}"


def test_augment_geometry():
    rng = np.random.default_rng(9)
    data = preprocessed(rng, 4)
    out = augment_dataset(data, seed=2)
    n = len(data)
    for i, s in enumerate(data):
        assert np.array_equal(out[n + i].x, s.x[::-1, :, :])
        assert np.array_equal(out[2 * n + i].x, s.x[:, ::-1, :])
