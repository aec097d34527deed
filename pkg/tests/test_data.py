from pathlib import Path

import numpy as np
import pytest

from app.data import (
    FORMAT_TAG,
    UNLABELED,
    Dataset,
    DomainSpec,
    VariantPolicy,
    augment,
    batch_iter,
    build_benchmark,
    default_domain_specs,
    export_dataset,
    generate_dataset,
    import_dataset,
    sample_variant,
)
from app.train import nearest_centroid_accuracy
from app.types import ConfigurationError, TrainConfig


def test_generation_is_deterministic(micro_config: TrainConfig) -> None:
    a, b = build_benchmark(micro_config), build_benchmark(micro_config)
    np.testing.assert_array_equal(a.x, b.x)
    np.testing.assert_array_equal(a.y, b.y)
    np.testing.assert_array_equal(a.d, b.d)
    other = build_benchmark(micro_config.model_copy(update={"seed": 1}))
    assert not np.array_equal(a.x, other.x)


def test_classes_are_balanced_per_domain(micro_dataset: Dataset, micro_config: TrainConfig) -> None:
    assert micro_dataset.domains == (0, 1, 2)
    assert micro_dataset.input_dim == micro_config.input_dim
    for d in micro_dataset.domains:
        counts = np.bincount(micro_dataset.domain(d).y, minlength=micro_config.n_classes)
        assert counts.tolist() == [8, 8, 8]


def test_single_domain_is_rejected() -> None:
    specs = default_domain_specs(1, distractor_dims=2)
    with pytest.raises(ConfigurationError):
        generate_dataset(3, 1, 10, specs, seed=0)


def test_mismatched_distractor_dims_are_rejected() -> None:
    specs = [DomainSpec(domain_id=0, distractor_offset=(1.0,)), DomainSpec(domain_id=1)]
    with pytest.raises(ConfigurationError):
        generate_dataset(3, 2, 6, specs, seed=0)


def test_distractors_carry_the_domain_not_the_class() -> None:
    specs = default_domain_specs(2, distractor_dims=3, noise_scale=0.0)
    dataset = generate_dataset(3, 2, 9, specs, seed=0)
    for spec in specs:
        tail = dataset.domain(spec.domain_id).x[:, 2:]
        np.testing.assert_array_equal(tail, np.broadcast_to(spec.distractor_offset, tail.shape))


def test_default_benchmark_is_separable_within_each_domain() -> None:
    dataset = build_benchmark(TrainConfig())
    for d in dataset.domains:
        part = dataset.domain(d)
        assert nearest_centroid_accuracy(part.x, part.y) > 0.9


def test_batches_are_balanced_over_domains(micro_dataset: Dataset) -> None:
    batches = list(batch_iter(micro_dataset, 6, seed=3))
    assert len(batches) == 12
    for batch in batches:
        assert len(batch) == 6
        assert np.bincount(batch.d).tolist() == [2, 2, 2]
        assert batch.x_plus.shape == batch.x.shape
    seen = np.sort(np.concatenate([b.index for b in batches]))
    np.testing.assert_array_equal(seen, np.arange(len(micro_dataset)))


def test_batching_is_deterministic_in_seed(micro_dataset: Dataset) -> None:
    first = [b.index for b in batch_iter(micro_dataset, 6, seed=(0, 1))]
    second = [b.index for b in batch_iter(micro_dataset, 6, seed=(0, 1))]
    assert all(np.array_equal(a, b) for a, b in zip(first, second))


@pytest.mark.parametrize("batch_size", [0, 4, 7])
def test_batch_size_must_split_over_domains(batch_size: int, micro_dataset: Dataset) -> None:
    with pytest.raises(ConfigurationError):
        next(batch_iter(micro_dataset, batch_size, seed=0))


def test_smaller_domains_are_cycled() -> None:
    dataset = Dataset(np.zeros((6, 2)), [0, 1, 0, 1, 0, 1], [0, 0, 0, 0, 1, 1])
    batches = list(batch_iter(dataset, 2, seed=0))
    assert len(batches) == 4
    assert all(np.bincount(b.d).tolist() == [1, 1] for b in batches)


def test_same_class_variant(micro_dataset: Dataset, rng: np.random.Generator) -> None:
    policy = VariantPolicy(p_same_class=1.0)
    for i in range(10):
        anchor = micro_dataset[i]
        variant = sample_variant(anchor, micro_dataset, policy, rng)
        assert variant.y == anchor.y
        assert any(np.array_equal(variant.x, row) for row in micro_dataset.x)


def test_augmented_variant(micro_dataset: Dataset, rng: np.random.Generator) -> None:
    policy = VariantPolicy(p_same_class=0.0, jitter=0.0, dropout_rate=0.0)
    anchor = micro_dataset[0]
    variant = sample_variant(anchor, micro_dataset, policy, rng)
    np.testing.assert_array_equal(variant.x, anchor.x)
    assert (variant.y, variant.d) == (anchor.y, anchor.d)


def test_unlabeled_anchor_is_always_augmented(micro_dataset: Dataset, rng: np.random.Generator) -> None:
    unlabeled = micro_dataset.without_labels()
    anchor = unlabeled[0]
    assert anchor.y is None
    variant = sample_variant(anchor, unlabeled, VariantPolicy(p_same_class=1.0, jitter=0.0, dropout_rate=0.0), rng)
    np.testing.assert_array_equal(variant.x, anchor.x)
    assert variant.y is None


def test_augment_dropout_zeroes_everything(rng: np.random.Generator) -> None:
    out = augment(np.ones(5), VariantPolicy(jitter=0.5, dropout_rate=1.0), rng)
    np.testing.assert_array_equal(out, np.zeros(5))


def test_csv_round_trip_keeps_unlabeled_rows(tmp_path: Path, micro_dataset: Dataset) -> None:
    mixed = Dataset.concat([micro_dataset.without_domain(2), micro_dataset.domain(2).without_labels()])
    path = export_dataset(mixed, tmp_path / "data" / "dataset.csv")
    assert path.read_text().splitlines()[0] == FORMAT_TAG
    loaded = import_dataset(path)
    np.testing.assert_array_equal(loaded.x, mixed.x)
    np.testing.assert_array_equal(loaded.y, mixed.y)
    np.testing.assert_array_equal(loaded.d, mixed.d)
    assert int((loaded.y == UNLABELED).sum()) == 24


def test_csv_with_unknown_tag(tmp_path: Path) -> None:
    path = tmp_path / "dataset.csv"
    path.write_text("# other v2\nx0,y,d\n0.0,1,0\n")
    with pytest.raises(ConfigurationError) as info:
        import_dataset(path)
    assert info.value.line == 1
