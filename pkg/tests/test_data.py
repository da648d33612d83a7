"""Tests for datasets, IDX files and the four partitioning schemes."""

import json

import numpy as np
import pytest

from fedtransfer.data import (
    Dataset,
    HeterogeneityControls,
    Partition,
    label_tv_distance,
    load_idx,
    load_partition,
    make_synthetic,
    partition_dirichlet,
    partition_iid,
    partition_max_classes,
    partition_unbalanced,
    save_partition,
    train_eval_split,
    write_idx,
)
from fedtransfer.data.partitioners import DirichletPartitioner
from fedtransfer.errors import (
    IdxFormatError,
    IdxMismatchError,
    InvalidArgumentError,
    PartitionExhaustedError,
)


def _ten_class(samples_per_class: int = 100, seed: int = 0) -> Dataset:
    return make_synthetic(10, samples_per_class, 12, 3.0, seed)


def _check_invariants(partition: Partition, n: int) -> None:
    union = np.sort(np.concatenate(partition.assignments))
    assert np.array_equal(union, np.arange(n)), "assignments must cover 0..n-1 exactly once"
    assert abs(partition.weights.sum() - 1.0) <= 1e-12, "weights must sum to 1"
    assert all(a.size >= 1 for a in partition.assignments), "no client may be empty"


def test_make_synthetic_minimal_dataset():
    """One sample per class gives n = 2 with both labels present."""
    ds = make_synthetic(2, 1, 2, 10.0, 0)
    assert ds.n == 2
    assert set(ds.labels.tolist()) == {0, 1}
    assert ds.features.min() >= 0.0 and ds.features.max() <= 1.0


def test_make_synthetic_is_deterministic():
    """The same arguments produce bit-identical datasets."""
    a = make_synthetic(3, 100, 5, 4.0, 7)
    b = make_synthetic(3, 100, 5, 4.0, 7)
    assert np.array_equal(a.features, b.features)
    assert np.array_equal(a.labels, b.labels)
    c = make_synthetic(3, 100, 5, 4.0, 8)
    assert not np.array_equal(a.features, c.features), "a different seed should change the data"


def test_make_synthetic_rejects_bad_sizes():
    """Non-positive sizes are invalid arguments."""
    with pytest.raises(InvalidArgumentError):
        make_synthetic(1, 10, 2, 1.0, 0)
    with pytest.raises(InvalidArgumentError):
        make_synthetic(2, 0, 2, 1.0, 0)
    with pytest.raises(InvalidArgumentError):
        make_synthetic(2, 10, 1, 1.0, 0)


def test_dataset_rejects_out_of_range_values():
    """Features outside [0, 1] and labels outside [0, C) are rejected."""
    with pytest.raises(InvalidArgumentError):
        Dataset(np.array([[1.5, 0.0]]), np.array([0]), 2)
    with pytest.raises(InvalidArgumentError):
        Dataset(np.array([[0.5, 0.0]]), np.array([2]), 2)


def test_train_eval_split_is_disjoint():
    """Held-out rows never appear in the training part."""
    ds = make_synthetic(2, 50, 3, 2.0, 0)
    train, held_out = train_eval_split(ds, 0.2, seed=3)
    assert train.n + held_out.n == ds.n
    assert held_out.n == 20
    rows = {tuple(r) for r in train.features}
    assert not any(tuple(r) in rows for r in held_out.features)


def test_idx_scaling(tmp_path):
    """Pixels {0, 255} load as features {0.0, 1.0}."""
    images = np.zeros((2, 28, 28), dtype=np.uint8)
    images[1] = 255
    write_idx(tmp_path / "img.idx", tmp_path / "lab.idx", images, [0, 1])
    ds = load_idx(tmp_path / "img.idx", tmp_path / "lab.idx")
    assert ds.n == 2
    assert ds.dim == 28 * 28
    assert set(np.unique(ds.features).tolist()) == {0.0, 1.0}


def test_idx_gzip_roundtrip(tmp_path):
    """Gzipped IDX files are read transparently."""
    images = np.arange(12, dtype=np.uint8).reshape(3, 2, 2)
    write_idx(tmp_path / "img.gz", tmp_path / "lab.gz", images, [0, 1, 2])
    ds = load_idx(tmp_path / "img.gz", tmp_path / "lab.gz")
    assert np.allclose(ds.features[2], np.array([8, 9, 10, 11]) / 255.0)
    assert ds.num_classes == 3


def test_idx_truncated_file(tmp_path):
    """A truncated image body raises a format error."""
    images = np.zeros((2, 4, 4), dtype=np.uint8)
    write_idx(tmp_path / "img.idx", tmp_path / "lab.idx", images, [0, 1])
    raw = (tmp_path / "img.idx").read_bytes()
    (tmp_path / "img.idx").write_bytes(raw[:-5])
    with pytest.raises(IdxFormatError):
        load_idx(tmp_path / "img.idx", tmp_path / "lab.idx")


def test_idx_bad_magic(tmp_path):
    """Swapped files fail the magic-number check."""
    images = np.zeros((2, 4, 4), dtype=np.uint8)
    write_idx(tmp_path / "img.idx", tmp_path / "lab.idx", images, [0, 1])
    with pytest.raises(IdxFormatError):
        load_idx(tmp_path / "lab.idx", tmp_path / "img.idx")


def test_idx_count_mismatch(tmp_path):
    """10 images with 9 labels is a mismatch error."""
    images = np.zeros((10, 4, 4), dtype=np.uint8)
    write_idx(tmp_path / "img.idx", tmp_path / "lab.idx", images, list(range(9)))
    with pytest.raises(IdxMismatchError):
        load_idx(tmp_path / "img.idx", tmp_path / "lab.idx")


def test_partition_iid_sizes():
    """IID chunks differ in size by at most one."""
    ds = make_synthetic(2, 50, 2, 2.0, 0)
    part = partition_iid(ds, 100, seed=1)
    assert part.sizes.tolist() == [1] * 100

    small = make_synthetic(2, 5, 2, 2.0, 0)
    part = partition_iid(small, 3, seed=1)
    assert sorted(part.sizes.tolist(), reverse=True) == [4, 3, 3]
    _check_invariants(part, small.n)


def test_partition_iid_class_proportions():
    """Every IID client mirrors the global label distribution."""
    ds = _ten_class()
    part = partition_iid(ds, 10, seed=5)
    global_props = ds.class_counts() / ds.n
    for idx in part.assignments:
        props = np.bincount(ds.labels[idx], minlength=10) / idx.size
        assert np.max(np.abs(props - global_props)) <= 0.15


def test_partition_iid_rejects_bad_client_count():
    """N > n and N < 1 are invalid."""
    ds = make_synthetic(2, 2, 2, 2.0, 0)
    with pytest.raises(InvalidArgumentError):
        partition_iid(ds, 5, seed=0)
    with pytest.raises(InvalidArgumentError):
        partition_iid(ds, 0, seed=0)


def test_partition_dirichlet_large_alpha_is_balanced():
    """alpha = 1e6 gives every client a near 50/50 class mix."""
    ds = make_synthetic(2, 500, 4, 2.0, 0)
    part = partition_dirichlet(ds, 10, 1e6, seed=2)
    for idx in part.assignments:
        frac = np.mean(ds.labels[idx] == 0)
        assert abs(frac - 0.5) <= 0.05, f"class-0 fraction {frac} too far from 0.5"


def test_partition_dirichlet_small_alpha_concentrates_classes():
    """alpha = 0.05 leaves clients with few distinct classes."""
    ds = _ten_class()
    part = partition_dirichlet(ds, 10, 0.05, seed=4)
    _check_invariants(part, ds.n)
    distinct = [np.unique(ds.labels[a]).size for a in part.assignments]
    assert np.mean(distinct) < 4


def test_partition_dirichlet_errors():
    """alpha <= 0 is invalid and an impossible min_size exhausts the retries."""
    ds = _ten_class()
    with pytest.raises(InvalidArgumentError):
        partition_dirichlet(ds, 10, 0.0, seed=0)
    with pytest.raises(PartitionExhaustedError):
        DirichletPartitioner(alpha=0.01, min_size=90, max_retries=3)(ds, 10, 0)


def test_partition_unbalanced_sizes():
    """sgm = 0 is an IID split; sgm = 2 is heavily skewed; sizes always sum to n."""
    ds = make_synthetic(2, 1000, 3, 2.0, 0)
    flat = partition_unbalanced(ds, 20, 0.0, seed=0)
    assert flat.sizes.max() - flat.sizes.min() <= 1

    skewed = partition_unbalanced(ds, 20, 2.0, seed=0)
    assert skewed.sizes.sum() == ds.n
    assert skewed.sizes.max() / skewed.sizes.min() > 5
    _check_invariants(skewed, ds.n)

    with pytest.raises(InvalidArgumentError):
        partition_unbalanced(ds, 20, -0.1, seed=0)


def test_partition_max_classes_single_class_shards():
    """C = 1 on balanced 10-class data puts one class on most clients."""
    ds = _ten_class()
    part = partition_max_classes(ds, 10, 1, seed=3)
    distinct = part.metadata["distinct_classes"]
    assert max(distinct) <= 2
    assert sum(1 for d in distinct if d == 1) >= 8

    full = partition_max_classes(ds, 10, 10, seed=3)
    _check_invariants(full, ds.n)


def test_partition_max_classes_range():
    """C outside [1, num_classes] is rejected."""
    ds = _ten_class()
    with pytest.raises(InvalidArgumentError):
        partition_max_classes(ds, 10, 11, seed=0)
    with pytest.raises(InvalidArgumentError):
        partition_max_classes(ds, 10, 0, seed=0)


@pytest.mark.parametrize(
    "controls",
    [
        HeterogeneityControls(scheme="iid"),
        HeterogeneityControls(scheme="dirichlet", alpha=0.3),
        HeterogeneityControls(scheme="unbalanced", sgm=1.0),
        HeterogeneityControls(scheme="max_classes", max_classes=3),
    ],
)
def test_every_scheme_is_deterministic_and_valid(controls):
    """Same seed gives the same partition, and invariants always hold."""
    ds = _ten_class(samples_per_class=60, seed=1)
    a = controls.partition(ds, 12, seed=9)
    b = controls.partition(ds, 12, seed=9)
    _check_invariants(a, ds.n)
    assert a.to_dict() == b.to_dict()


def test_heterogeneity_ordering_in_alpha():
    """Label TV distance shrinks as alpha grows (majority over 5 seeds)."""
    ds = _ten_class()
    alphas = [0.1, 1.0, 10.0, 1e6]
    for lo, hi in zip(alphas, alphas[1:]):
        votes = 0
        for seed in range(5):
            tv_lo = label_tv_distance(ds.labels, partition_dirichlet(ds, 10, lo, seed), 10)
            tv_hi = label_tv_distance(ds.labels, partition_dirichlet(ds, 10, hi, seed), 10)
            votes += tv_hi <= tv_lo
        assert votes >= 3, f"alpha {hi} should be less heterogeneous than {lo}"


def test_partition_json_roundtrip(tmp_path):
    """A saved partition loads back with identical assignments and weights."""
    ds = _ten_class(samples_per_class=20)
    part = partition_dirichlet(ds, 5, 0.5, seed=1)
    save_partition(part, tmp_path / "sub" / "partition.json")
    loaded = load_partition(tmp_path / "sub" / "partition.json")
    assert loaded.to_dict() == part.to_dict()


def test_partition_rejects_overlap():
    """Overlapping index lists violate the disjoint-cover invariant."""
    with pytest.raises(InvalidArgumentError):
        Partition.from_assignments([[0, 1], [1, 2]], 3)


def test_partition_select_renormalizes():
    """A client subset keeps its indices and has weights summing to one."""
    part = Partition.from_assignments([[0], [1, 2], [3, 4, 5]], 6)
    sub = part.select([1, 2])
    assert np.isclose(sub.weights.sum(), 1.0)
    assert sub.weights.tolist() == [0.4, 0.6]
    assert sub.metadata["selected_clients"] == [1, 2]


def test_load_partition_revalidates_cover(tmp_path):
    """A saved partition edited to drop a sample no longer loads."""
    ds = _ten_class(samples_per_class=20)
    part = partition_dirichlet(ds, 5, 0.5, seed=1)
    path = save_partition(part, tmp_path / "partition.json")
    data = json.loads(path.read_text(encoding="utf-8"))
    biggest = max(range(5), key=lambda k: len(data["assignments"][k]))
    data["assignments"][biggest] = data["assignments"][biggest][1:]
    path.write_text(json.dumps(data), encoding="utf-8")
    with pytest.raises(InvalidArgumentError):
        load_partition(path)


def test_from_assignments_metadata_is_optional_and_copied():
    assert Partition.from_assignments([[0], [1]], 2).metadata == {}
    meta = {"scheme": "manual"}
    part = Partition.from_assignments([[0], [1]], 2, metadata=meta)
    part.metadata["extra"] = 1
    assert meta == {"scheme": "manual"}
