from pathlib import Path

import numpy as np
import pytest

from app.autodiff import Graph
from app.data import Dataset, VariantPolicy, batch_iter
from app.model import memory_encode
from app.train import (
    SGDMomentum,
    TrainState,
    VariantRegistry,
    compute_losses,
    cosine_lr,
    evaluate,
    msda_train_set,
    predict_logits,
    run_dg,
    seed_means,
    split_domains,
    summary_table,
    target_domains,
    train_step,
    warm_up_banks,
    write_run_csv,
)
from app.types import (
    ConfigurationError,
    ContractError,
    DimensionError,
    LossComponent,
    MethodVariant,
    RunResult,
    TrainConfig,
)
from app.verification import oracles
from tests.fixtures.micro import tiny_config


def _warm_state(config: TrainConfig, train_set: Dataset) -> TrainState:
    state = TrainState.create(config, train_set.domains, total_steps=10, seed=(config.seed,))
    return warm_up_banks(state, train_set, VariantPolicy.from_config(config), np.random.default_rng(5))


def test_cosine_schedule_endpoints() -> None:
    assert cosine_lr(0, 11, 0.1) == 0.1
    assert cosine_lr(5, 11, 0.1) == pytest.approx(0.05)
    assert cosine_lr(10, 11, 0.1) == 0.0
    assert cosine_lr(15, 11, 0.1) == 0.0
    assert cosine_lr(3, 0, 0.1) == 0.1
    assert cosine_lr(0, 1, 0.1) == 0.1


@pytest.mark.parametrize("total", [2, 5, 20])
def test_short_schedules_end_at_zero(total: int) -> None:
    assert cosine_lr(total - 1, total, 0.05) == 0.0
    assert cosine_lr(total - 2, total, 0.05) > 0.0


def test_sgd_momentum_updates_in_place() -> None:
    params = {"w": np.array([1.0]), "frozen": np.array([2.0])}
    sgd = SGDMomentum(params, lr=0.1, momentum=0.5)
    sgd.step({"w": np.array([1.0])})
    sgd.step({"w": np.array([1.0])})
    assert params["w"][0] == pytest.approx(0.75)
    assert params["frozen"][0] == 2.0


def test_sgd_momentum_rejects_bad_input() -> None:
    with pytest.raises(ConfigurationError):
        SGDMomentum({"w": np.ones(2)}, lr=0.0)
    with pytest.raises(DimensionError):
        SGDMomentum({"w": np.ones(2)}, lr=0.1).step({"w": np.ones(3)})


def test_variant_registry() -> None:
    assert VariantRegistry.get(MethodVariant.VANILLA).components == {LossComponent.CLS}
    assert VariantRegistry.get("steam").components == set(LossComponent)
    assert VariantRegistry.get(MethodVariant.DOMAIN_CLASSIFIER).uses_domain_head
    assert not VariantRegistry.get(MethodVariant.L2_MATCHING).uses_semantic_bank
    with pytest.raises(KeyError):
        VariantRegistry.get("not-a-variant")


def test_schedule_is_flat_without_annealing() -> None:
    config = tiny_config(cosine_annealing=False)
    state = TrainState.create(config, (0, 1), total_steps=10, seed=(0,))
    state.step = 7
    assert state.learning_rate == config.lr


def test_only_enabled_banks_exist() -> None:
    vanilla = TrainState.create(tiny_config(variant=MethodVariant.VANILLA), (0, 1), total_steps=1, seed=(0,))
    assert vanilla.style_bank is None and vanilla.semantic_bank is None
    steam = TrainState.create(tiny_config(), (0, 1), total_steps=1, seed=(0,))
    assert steam.style_bank is not None and steam.semantic_bank is not None


def test_warm_up_fills_every_bank(micro_config: TrainConfig, micro_dataset: Dataset) -> None:
    state = _warm_state(micro_config, micro_dataset.without_domain(2))
    assert state.style_bank.is_full
    assert state.semantic_bank.is_full
    assert state.step == 0


def test_train_step_blends_memory_and_pushes_pre_update_features(
    micro_config: TrainConfig, micro_dataset: Dataset
) -> None:
    sources = micro_dataset.without_domain(2)
    state = _warm_state(micro_config, sources)
    policy = VariantPolicy.from_config(micro_config)
    batch = next(batch_iter(sources, micro_config.batch_size, seed=0, policy=policy))
    before = {k: v.copy() for k, v in state.memory.named_arrays().items()}
    expected_semantic = memory_encode(state.memory, batch.x_plus).c
    expected_style = memory_encode(state.memory, batch.x).s

    state, breakdown = train_step(state, batch)

    alpha = micro_config.alpha
    encoder = state.params.encoder_arrays()
    for name, array in state.memory.named_arrays().items():
        np.testing.assert_allclose(array, alpha * before[name] + (1 - alpha) * encoder[name], atol=1e-15)
    np.testing.assert_array_equal(state.semantic_bank.snapshot(), expected_semantic)
    for d in sources.domains:
        np.testing.assert_array_equal(state.style_bank.snapshot(d)[-2:], expected_style[batch.d == d])
    assert state.step == 1
    values = breakdown.values()
    assert values.total == pytest.approx(values.l_cls + values.l_s + values.l_c + values.l_o)


def test_unlabeled_rows_stay_out_of_classification(micro_config: TrainConfig, micro_dataset: Dataset) -> None:
    sources = micro_dataset.without_domain(2)
    train_set = msda_train_set(sources, micro_dataset.domain(2).without_labels())
    state = _warm_state(micro_config, train_set)
    batch = next(batch_iter(train_set, 6, seed=0, policy=VariantPolicy.from_config(micro_config)))
    labeled = batch.labeled
    assert labeled.sum() == 4
    expected = oracles.cross_entropy(predict_logits(state.params, batch.x[labeled]), batch.y[labeled])
    _, breakdown = train_step(state, batch)
    assert breakdown.l_cls.item() == pytest.approx(expected, abs=1e-10)
    assert len(state.style_bank.snapshot(2)) == micro_config.bank_size


def test_labeled_target_is_rejected_for_adaptation(micro_dataset: Dataset) -> None:
    with pytest.raises(ContractError):
        msda_train_set(micro_dataset.without_domain(2), micro_dataset.domain(2))


def test_batch_without_labels_is_rejected(micro_config: TrainConfig, micro_dataset: Dataset) -> None:
    unlabeled = micro_dataset.without_domain(2).without_labels()
    state = _warm_state(micro_config, micro_dataset.without_domain(2))
    batch = next(batch_iter(unlabeled, micro_config.batch_size, seed=0))
    with pytest.raises(ContractError):
        compute_losses(state, batch, Graph())


def test_classification_loss_decreases() -> None:
    config = tiny_config(variant=MethodVariant.VANILLA, epochs=8, per_domain=60, target_domain=0)
    (result,) = run_dg(config)
    first, last = result.epochs[0].losses.l_cls, result.epochs[-1].losses.l_cls
    assert last < first
    assert result.epochs[-1].losses.l_s == 0.0


def test_run_dg_covers_every_target(micro_config: TrainConfig, micro_dataset: Dataset) -> None:
    results = run_dg(micro_config.model_copy(update={"epochs": 1}), micro_dataset)
    assert [r.target_domain for r in results] == [0, 1, 2]
    for r in results:
        assert len(r.epochs) == 1
        assert 0.0 <= r.target_acc <= 1.0
        assert r.style is not None
        assert r.target_eval.total == 24


def test_runs_are_reproducible(tmp_path: Path) -> None:
    config = tiny_config(epochs=1, target_domain=1)
    first = write_run_csv(run_dg(config), tmp_path / "a.csv")
    second = write_run_csv(run_dg(config), tmp_path / "b.csv")
    assert first.read_bytes() == second.read_bytes()


def test_target_domains() -> None:
    assert target_domains(tiny_config()) == [0, 1, 2]
    assert target_domains(tiny_config(target_domain=2)) == [2]
    with pytest.raises(ConfigurationError):
        target_domains(tiny_config(n_domains=2))


def test_split_domains_is_per_domain(micro_dataset: Dataset, rng: np.random.Generator) -> None:
    keep, held = split_domains(micro_dataset, 0.25, rng)
    assert np.bincount(held.d).tolist() == [6, 6, 6]
    assert len(keep) + len(held) == len(micro_dataset)


def test_evaluate_contracts(micro_config: TrainConfig, micro_dataset: Dataset) -> None:
    params = TrainState.create(micro_config, (0, 1), total_steps=1, seed=(0,)).params
    result = evaluate(params, micro_dataset)
    assert sum(map(sum, result.confusion)) == len(micro_dataset)
    assert result.accuracy == pytest.approx(np.trace(np.array(result.confusion)) / len(micro_dataset))
    with pytest.raises(ContractError):
        evaluate(params, micro_dataset.subset(np.array([], dtype=int)))
    with pytest.raises(ContractError):
        evaluate(params, micro_dataset.without_labels())


def _result(target: int, seed: int, acc: float) -> RunResult:
    return RunResult(
        variant=MethodVariant.STEAM, mode="dg", target_domain=target, seed=seed, target_acc=acc, source_acc=1.0
    )


def test_summary_table_reports_mean_and_sd() -> None:
    runs = [_result(0, 0, 0.5), _result(0, 1, 0.7), _result(1, 0, 0.9), _result(1, 1, 0.9)]
    table = summary_table(runs)
    assert list(table.columns) == ["0", "1", "avg"]
    assert table.loc["steam", "0"] == "60.0 ± 14.1"
    assert table.loc["steam", "1"] == "90.0 ± 0.0"
    assert table.loc["steam", "avg"] == "75.0 ± 7.1"
    assert seed_means(runs) == {("steam", 0): pytest.approx(0.7), ("steam", 1): pytest.approx(0.8)}
