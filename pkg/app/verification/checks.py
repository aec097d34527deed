"""Named correctness checks run by the ``verify`` subcommand.

Every check returns an observed error that passes when it is at most the
registered tolerance. Gradient checks report the worst
``|analytic - numeric| / (atol + rtol * |numeric|)`` ratio, so their
tolerance is 1.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Mapping, Optional

import numpy as np

from app.autodiff import Graph, Tensor, check_gradients, ops
from app.banks import FeatureQueue, SemanticBank, StyleBankSet
from app.data import Dataset, VariantPolicy, batch_iter, build_benchmark
from app.losses import (
    classification_loss,
    domain_classifier_loss,
    jury_distribution,
    jury_loss,
    l2_matching_loss,
    orthogonality_loss,
    plain_infonce_loss,
    style_contrastive,
)
from app.model import MemoryParams, classify, encode, init_params, momentum_update
from app.train import (
    TrainState,
    compute_losses,
    cosine_lr,
    evaluate,
    nearest_centroid_accuracy,
    train_step,
    warm_up_banks,
)
from app.types import DESIGN_VARIANTS, EXTENDED_ABLATION_VARIANTS, LossComponent, MethodVariant

from . import oracles
from .micro import MICRO_BANK, MICRO_DOMAINS, MICRO_TAU, build_micro, micro_config, unit_rows

logger = logging.getLogger("steam.verification")

GRAD_SEEDS = 20
ORACLE_INSTANCES = 100
QUEUE_SCRIPTS = 10_000


@dataclass(frozen=True)
class CheckResult:
    name: str
    tolerance: float
    observed: float
    passed: bool


CheckFn = Callable[[], float]


@dataclass(frozen=True)
class Check:
    name: str
    tolerance: float
    fn: CheckFn

    def run(self) -> CheckResult:
        try:
            observed = float(self.fn())
        except Exception:
            logger.exception("check raised", extra={"check": self.name})
            observed = math.inf
        return CheckResult(
            name=self.name,
            tolerance=self.tolerance,
            observed=observed,
            passed=bool(observed <= self.tolerance),
        )


class CheckRegistry:
    """Catalogue of checks in registration order."""

    _registry: Dict[str, Check] = {}

    @classmethod
    def get(cls, name: str) -> Check:
        check = cls._registry.get(name)
        if check is None:
            raise KeyError(f"Unknown check: {name}")
        return check

    @classmethod
    def register(cls, name: str, tolerance: float) -> Callable[[CheckFn], CheckFn]:
        def decorator(fn: CheckFn) -> CheckFn:
            cls._registry[name] = Check(name=name, tolerance=tolerance, fn=fn)
            return fn

        return decorator

    @classmethod
    def names(cls) -> tuple[str, ...]:
        return tuple(cls._registry)


def run_checks(names: Optional[Iterable[str]] = None) -> list[CheckResult]:
    picked = CheckRegistry.names() if names is None else tuple(names)
    results = []
    for name in picked:
        result = CheckRegistry.get(name).run()
        logger.debug("check done", extra={"check": name, "observed": result.observed, "passed": result.passed})
        results.append(result)
    return results


# helpers


def _rng(stream: int, seed: int) -> np.random.Generator:
    return np.random.default_rng([stream, seed])


def _over_seeds(stream: int, n: int, fn: Callable[[np.random.Generator], float]) -> float:
    return max(fn(_rng(stream, s)) for s in range(n))


def _worst(loss_fn: Callable[[Graph], Tensor], arrays: Mapping[str, np.ndarray], rtol: float = 1e-4) -> float:
    return max(r.worst for r in check_gradients(loss_fn, arrays, rtol=rtol))


def _style_bank(rng: np.random.Generator, domains: Iterable[int], size: int, dim: int) -> StyleBankSet:
    bank = StyleBankSet(domains, size, dim)
    for d in bank.domains:
        bank.push_rows(np.full(size, d), unit_rows(rng, size, dim))
    return bank


def _semantic_bank(rng: np.random.Generator, size: int, dim: int) -> SemanticBank:
    bank = SemanticBank(size, dim)
    bank.push_rows(unit_rows(rng, size, dim))
    return bank


def _clear_of_zero(rng: np.random.Generator, shape: tuple[int, ...], margin: float = 0.05) -> np.ndarray:
    x = rng.standard_normal(shape)
    return x + np.where(x >= 0, margin, -margin)


# gradient checks


@CheckRegistry.register("gradcheck_matmul", 1.0)
def _gradcheck_matmul() -> float:
    def one(rng: np.random.Generator) -> float:
        arrays = {"a": rng.standard_normal((3, 4)), "b": rng.standard_normal((4, 2))}
        return _worst(
            lambda g: ops.sum(ops.matmul(g.param("a", arrays["a"]), g.param("b", arrays["b"]))),
            arrays,
            rtol=1e-6,
        )

    return _over_seeds(1, GRAD_SEEDS, one)


@CheckRegistry.register("gradcheck_primitives", 1.0)
def _gradcheck_primitives() -> float:
    def one(rng: np.random.Generator) -> float:
        arrays = {"x": _clear_of_zero(rng, (3, 4))}

        def loss(g: Graph) -> Tensor:
            t = g.param("x", arrays["x"])
            stacked = ops.concat_rows([ops.relu(t), ops.exp(ops.scale(t, 0.3))])
            wide = ops.concat_cols([t, ops.sub(t, 1.0)])
            terms = [
                ops.mean(ops.mul(stacked, stacked)),
                ops.sum(ops.log(ops.add(ops.mul(t, t), 1.0))),
                ops.scale(ops.sum(ops.sum_rows(ops.matmul(ops.transpose(wide), wide))), 0.1),
                ops.sum(ops.mul(ops.take_rows(t, np.array([0, 2, 2])), ops.take_rows(t, np.array([1, 1, 0])))),
            ]
            total = terms[0]
            for term in terms[1:]:
                total = ops.add(total, term)
            return total

        return _worst(loss, arrays)

    return _over_seeds(2, GRAD_SEEDS, one)


@CheckRegistry.register("gradcheck_normalize_rows", 1.0)
def _gradcheck_normalize_rows() -> float:
    def one(rng: np.random.Generator) -> float:
        arrays = {"x": rng.standard_normal((4, 3))}
        weights = rng.standard_normal((4, 3))
        return _worst(lambda g: ops.sum(ops.mul(ops.normalize_rows(g.param("x", arrays["x"])), weights)), arrays)

    return _over_seeds(3, GRAD_SEEDS, one)


@CheckRegistry.register("gradcheck_cosine_similarity", 1.0)
def _gradcheck_cosine() -> float:
    def one(rng: np.random.Generator) -> float:
        arrays = {"a": rng.standard_normal(5), "b": rng.standard_normal(5)}
        return _worst(
            lambda g: ops.cosine_similarity(g.param("a", arrays["a"]), g.param("b", arrays["b"])),
            arrays,
            rtol=1e-6,
        )

    return _over_seeds(4, GRAD_SEEDS, one)


@CheckRegistry.register("gradcheck_softmax_rows", 1.0)
def _gradcheck_softmax() -> float:
    def one(rng: np.random.Generator) -> float:
        arrays = {"x": rng.standard_normal((3, 5))}
        weights = rng.standard_normal((3, 5))

        def loss(g: Graph) -> Tensor:
            x = g.param("x", arrays["x"])
            probs = ops.sum(ops.mul(ops.softmax_rows(x, 0.5), weights))
            logs = ops.sum(ops.mul(ops.log_softmax_rows(x, 0.5), weights))
            return ops.add(probs, logs)

        return _worst(loss, arrays)

    return _over_seeds(5, GRAD_SEEDS, one)


@CheckRegistry.register("gradcheck_style_loss", 1.0)
def _gradcheck_style() -> float:
    def one(rng: np.random.Generator) -> float:
        bank = _style_bank(rng, MICRO_DOMAINS, MICRO_BANK, 3)
        arrays = {"s": rng.standard_normal((4, 3))}
        ids = np.array([0, 0, 1, 1])
        return _worst(lambda g: style_contrastive(g.param("s", arrays["s"]), ids, bank, MICRO_TAU), arrays)

    return _over_seeds(6, GRAD_SEEDS, one)


@CheckRegistry.register("gradcheck_jury_loss", 1.0)
def _gradcheck_jury() -> float:
    def one(rng: np.random.Generator) -> float:
        bank = _semantic_bank(rng, MICRO_BANK, 3)
        c_mem = unit_rows(rng, 4, 3)
        arrays = {"c": rng.standard_normal((4, 3))}
        return _worst(lambda g: jury_loss(g.param("c", arrays["c"]), c_mem, bank, MICRO_TAU), arrays)

    return _over_seeds(7, GRAD_SEEDS, one)


@CheckRegistry.register("gradcheck_classification_loss", 1.0)
def _gradcheck_classification() -> float:
    def one(rng: np.random.Generator) -> float:
        labels = rng.integers(0, 3, 4)
        arrays = {"logits": rng.standard_normal((4, 3))}
        return _worst(lambda g: classification_loss(g.param("logits", arrays["logits"]), labels), arrays)

    return _over_seeds(8, GRAD_SEEDS, one)


@CheckRegistry.register("gradcheck_orthogonality_loss", 1.0)
def _gradcheck_orthogonality() -> float:
    def one(rng: np.random.Generator) -> float:
        arrays = {"h_c": rng.standard_normal((4, 3)), "h_s": rng.standard_normal((4, 3))}
        return _worst(
            lambda g: orthogonality_loss(g.param("h_c", arrays["h_c"]), g.param("h_s", arrays["h_s"])),
            arrays,
        )

    return _over_seeds(9, GRAD_SEEDS, one)


@CheckRegistry.register("gradcheck_domain_classifier_loss", 1.0)
def _gradcheck_domain_classifier() -> float:
    def one(rng: np.random.Generator) -> float:
        ids = np.array([0, 0, 1, 1])
        arrays = {
            "s": rng.standard_normal((4, 3)),
            "w": rng.standard_normal((3, 2)),
            "b": rng.standard_normal(2),
        }
        return _worst(
            lambda g: domain_classifier_loss(
                g.param("s", arrays["s"]), ids, g.param("w", arrays["w"]), g.param("b", arrays["b"]), MICRO_DOMAINS
            ),
            arrays,
        )

    return _over_seeds(10, GRAD_SEEDS, one)


@CheckRegistry.register("gradcheck_l2_matching_loss", 1.0)
def _gradcheck_l2() -> float:
    def one(rng: np.random.Generator) -> float:
        c_mem = unit_rows(rng, 4, 3)
        arrays = {"c": rng.standard_normal((4, 3))}
        return _worst(lambda g: l2_matching_loss(g.param("c", arrays["c"]), c_mem), arrays)

    return _over_seeds(11, GRAD_SEEDS, one)


@CheckRegistry.register("gradcheck_infonce_loss", 1.0)
def _gradcheck_infonce() -> float:
    def one(rng: np.random.Generator) -> float:
        bank = _semantic_bank(rng, MICRO_BANK, 3)
        c_mem = unit_rows(rng, 4, 3)
        arrays = {"c": rng.standard_normal((4, 3))}
        return _worst(lambda g: plain_infonce_loss(g.param("c", arrays["c"]), c_mem, bank, MICRO_TAU), arrays)

    return _over_seeds(12, GRAD_SEEDS, one)


@CheckRegistry.register("gradcheck_full_step_steam", 1.0)
def _gradcheck_full_step() -> float:
    def one(seed: int) -> float:
        micro = build_micro(seed)
        return _worst(micro.total, micro.arrays)

    return max(one(s) for s in range(GRAD_SEEDS))


@CheckRegistry.register("gradcheck_full_step_variants", 1.0)
def _gradcheck_full_step_variants() -> float:
    variants = [v for v in (*EXTENDED_ABLATION_VARIANTS, *DESIGN_VARIANTS) if v is not MethodVariant.STEAM]
    worst = 0.0
    for variant in dict.fromkeys(variants):
        for seed in range(3):
            micro = build_micro(seed, variant)
            worst = max(worst, _worst(micro.total, micro.arrays))
    return worst


# oracle equivalence


def _oracle_instances(stream: int, fn: Callable[[np.random.Generator], float]) -> float:
    return _over_seeds(stream, ORACLE_INSTANCES, fn)


@CheckRegistry.register("oracle_style_loss", 1e-10)
def _oracle_style() -> float:
    def one(rng: np.random.Generator) -> float:
        domains = (0, 1, 2)
        bank = _style_bank(rng, domains, 4, 3)
        style = rng.standard_normal((4, 3))
        ids = rng.integers(0, 3, 4)
        tau = float(rng.uniform(0.05, 1.0))
        expected = oracles.style_loss(style, ids, {d: bank.snapshot(d) for d in domains}, tau)
        return abs(style_contrastive(Tensor(style), ids, bank, tau).item() - expected)

    return _oracle_instances(20, one)


@CheckRegistry.register("oracle_jury_distribution", 1e-10)
def _oracle_jury_distribution() -> float:
    def one(rng: np.random.Generator) -> float:
        bank = _semantic_bank(rng, 5, 3).snapshot()
        c = rng.standard_normal(3)
        tau = float(rng.uniform(0.05, 1.0))
        got = jury_distribution(c, bank, tau).data
        return float(np.max(np.abs(got - np.array(oracles.jury_distribution(c, bank, tau)))))

    return _oracle_instances(21, one)


@CheckRegistry.register("oracle_jury_loss", 1e-10)
def _oracle_jury() -> float:
    def one(rng: np.random.Generator) -> float:
        bank = _semantic_bank(rng, 5, 3)
        c_enc = rng.standard_normal((4, 3))
        c_mem = unit_rows(rng, 4, 3)
        tau = float(rng.uniform(0.05, 1.0))
        got = jury_loss(Tensor(c_enc), c_mem, bank, tau).item()
        return abs(got - oracles.jury_loss(c_enc, c_mem, bank.snapshot(), tau))

    return _oracle_instances(22, one)


@CheckRegistry.register("oracle_classification_loss", 1e-10)
def _oracle_classification() -> float:
    def one(rng: np.random.Generator) -> float:
        logits = 3.0 * rng.standard_normal((6, 4))
        labels = rng.integers(0, 4, 6)
        return abs(classification_loss(Tensor(logits), labels).item() - oracles.cross_entropy(logits, labels))

    return _oracle_instances(23, one)


@CheckRegistry.register("oracle_orthogonality_loss", 1e-10)
def _oracle_orthogonality() -> float:
    def one(rng: np.random.Generator) -> float:
        h_c = rng.standard_normal((5, 3))
        h_s = rng.standard_normal((5, 3))
        return abs(orthogonality_loss(Tensor(h_c), Tensor(h_s)).item() - oracles.orthogonality(h_c, h_s))

    return _oracle_instances(24, one)


@CheckRegistry.register("oracle_l2_matching_loss", 1e-10)
def _oracle_l2() -> float:
    def one(rng: np.random.Generator) -> float:
        c_enc = rng.standard_normal((4, 3))
        c_mem = unit_rows(rng, 4, 3)
        return abs(l2_matching_loss(Tensor(c_enc), c_mem).item() - oracles.l2_matching(c_enc, c_mem))

    return _oracle_instances(25, one)


@CheckRegistry.register("oracle_infonce_loss", 1e-10)
def _oracle_infonce() -> float:
    def one(rng: np.random.Generator) -> float:
        bank = _semantic_bank(rng, 5, 3)
        c_enc = rng.standard_normal((4, 3))
        c_mem = unit_rows(rng, 4, 3)
        tau = float(rng.uniform(0.05, 1.0))
        got = plain_infonce_loss(Tensor(c_enc), c_mem, bank, tau).item()
        return abs(got - oracles.infonce(c_enc, c_mem, bank.snapshot(), tau))

    return _oracle_instances(26, one)


@CheckRegistry.register("oracle_domain_classifier_loss", 1e-10)
def _oracle_domain_classifier() -> float:
    def one(rng: np.random.Generator) -> float:
        domains = (1, 3, 4)
        style = rng.standard_normal((6, 3))
        weight = rng.standard_normal((3, 3))
        bias = rng.standard_normal(3)
        ids = rng.choice(domains, 6)
        got = domain_classifier_loss(Tensor(style), ids, Tensor(weight), Tensor(bias), domains).item()
        targets = [domains.index(int(d)) for d in ids]
        return abs(got - oracles.cross_entropy(style @ weight + bias, targets))

    return _oracle_instances(27, one)


@CheckRegistry.register("oracle_softmax_rows", 1e-10)
def _oracle_softmax() -> float:
    def one(rng: np.random.Generator) -> float:
        x = rng.standard_normal((3, 5))
        tau = float(rng.uniform(0.05, 2.0))
        expected = np.array([oracles.softmax(row, tau) for row in x])
        return float(np.max(np.abs(ops.softmax_rows(x, tau).data - expected)))

    return _oracle_instances(28, one)


@CheckRegistry.register("oracle_encode_forward", 1e-12)
def _oracle_encode() -> float:
    def one(rng: np.random.Generator) -> float:
        params = init_params(4, (5, 6), 4, 3, 3, rng)
        x = rng.standard_normal((5, 4))
        enc = encode(params, x)
        z, c, s = oracles.encode(params, x)
        return float(max(np.max(np.abs(enc.z.data - z)), np.max(np.abs(enc.c.data - c)), np.max(np.abs(enc.s.data - s))))

    return _oracle_instances(29, one)


@CheckRegistry.register("oracle_classify", 1e-12)
def _oracle_classify() -> float:
    def one(rng: np.random.Generator) -> float:
        params = init_params(4, (5,), 4, 3, 3, rng)
        c = rng.standard_normal((5, 3))
        return float(np.max(np.abs(classify(params.classifier, c).data - oracles.classify(params, c))))

    return _oracle_instances(30, one)


@CheckRegistry.register("oracle_nearest_centroid", 0.0)
def _oracle_nearest_centroid() -> float:
    def one(rng: np.random.Generator) -> float:
        labels = np.repeat(np.arange(3), 7)
        features = rng.standard_normal((21, 3)) + labels[:, None]
        return abs(nearest_centroid_accuracy(features, labels) - oracles.nearest_centroid_accuracy(features, labels))

    return _oracle_instances(31, one)


@CheckRegistry.register("oracle_accuracy_counter", 0.0)
def _oracle_accuracy() -> float:
    def one(rng: np.random.Generator) -> float:
        params = init_params(4, (5,), 4, 3, 3, rng)
        split = Dataset(rng.standard_normal((20, 4)), rng.integers(0, 3, 20), np.zeros(20))
        logits = classify(params.classifier, encode(params, split.x).c).data
        return abs(evaluate(params, split).accuracy - oracles.accuracy(logits, split.y))

    return _oracle_instances(32, one)


# closed forms


@CheckRegistry.register("closed_form_style_equal_similarity", 1e-9)
def _closed_style() -> float:
    domains, size = (0, 1, 2), 2
    bank = StyleBankSet(domains, size, 3)
    e1 = np.array([1.0, 0.0, 0.0])
    for d in domains:
        bank.push_rows(np.full(size, d), np.tile(e1, (size, 1)))
    style = np.tile(2.0 * e1, (3, 1))
    got = style_contrastive(Tensor(style), np.array([0, 1, 2]), bank, 0.07).item()
    return abs(got - math.log(1 + size * (len(domains) - 1)))


@CheckRegistry.register("closed_form_jury_uniform_bank", 1e-9)
def _closed_jury() -> float:
    size = 4
    bank = SemanticBank(size, 3)
    bank.push_rows(np.tile(np.array([0.0, 1.0, 0.0]), (size, 1)))
    rng = _rng(40, 0)
    got = jury_loss(Tensor(rng.standard_normal((3, 3))), unit_rows(rng, 3, 3), bank, 0.07).item()
    return abs(got - math.log(size))


@CheckRegistry.register("closed_form_classification_zero_logits", 1e-12)
def _closed_classification() -> float:
    n_classes = 7
    got = classification_loss(Tensor(np.zeros((5, n_classes))), np.arange(5)).item()
    return abs(got - math.log(n_classes))


@CheckRegistry.register("closed_form_orthogonality_disjoint_rows", 0.0)
def _closed_orthogonality() -> float:
    rng = _rng(41, 0)
    h_c = np.zeros((4, 3))
    h_s = np.zeros((4, 3))
    h_c[:2] = rng.standard_normal((2, 3))
    h_s[2:] = rng.standard_normal((2, 3))
    return abs(orthogonality_loss(Tensor(h_c), Tensor(h_s)).item())


@CheckRegistry.register("closed_form_softmax_uniform_row", 1e-15)
def _closed_softmax() -> float:
    return float(np.max(np.abs(ops.softmax_rows(np.ones((1, 4)), 0.07).data - 0.25)))


@CheckRegistry.register("cosine_schedule_endpoints", 1e-3)
def _cosine_endpoints() -> float:
    base = 0.05
    worst = 0.0
    for total in (2, 20, 100):
        if cosine_lr(0, total, base) != base:
            return math.inf
        worst = max(worst, cosine_lr(total - 1, total, base) / base)
    return worst


# mechanism invariants


@CheckRegistry.register("queue_fifo_replay", 0.0)
def _queue_replay() -> float:
    rng = _rng(50, 0)
    mismatches = 0
    for _ in range(QUEUE_SCRIPTS):
        capacity = int(rng.integers(1, 7))
        queue = FeatureQueue(capacity, 3)
        model = oracles.QueueModel(capacity)
        for v in unit_rows(rng, int(rng.integers(0, 16)), 3):
            queue.push(v)
            model.push(v)
        expected = np.array(model.items).reshape(-1, 3)
        if len(queue) > capacity or not np.array_equal(queue.snapshot(), expected):
            mismatches += 1
    return float(mismatches)


@CheckRegistry.register("style_bank_domain_isolation", 0.0)
def _bank_isolation() -> float:
    rng = _rng(51, 0)
    mismatches = 0
    for _ in range(200):
        bank = StyleBankSet((0, 1, 2), 4, 3)
        models = {d: oracles.QueueModel(4) for d in bank.domains}
        for d, v in zip(rng.integers(0, 3, 30), unit_rows(rng, 30, 3)):
            bank.push_style(int(d), v)
            models[int(d)].push(v)
        for d, model in models.items():
            if not np.array_equal(bank.snapshot(d), np.array(model.items).reshape(-1, 3)):
                mismatches += 1
            others = {
                tuple(row) for other in bank.domains if other != d for row in bank.snapshot(other)
            }
            if {tuple(row) for row in bank.negatives_for(d)} != others:
                mismatches += 1
    return float(mismatches)


@CheckRegistry.register("momentum_update_exact", 1e-15)
def _momentum_exact() -> float:
    rng = _rng(52, 0)
    params = init_params(2, (2,), 2, 2, 2, rng)
    memory = MemoryParams.mirror(params)
    for array in (*params.encoder_arrays().values(), *memory.named_arrays().values()):
        array[...] = rng.uniform(-1, 1, array.shape)
    before = {k: v.copy() for k, v in memory.named_arrays().items()}
    alpha = 1.0 - 1e-3
    momentum_update(memory, params, alpha)
    encoder = params.encoder_arrays()
    return max(
        float(np.max(np.abs(memory.named_arrays()[k] - (before[k] + (1.0 - alpha) * (encoder[k] - before[k])))))
        for k in before
    )


@CheckRegistry.register("momentum_geometric_decay", 1e-9)
def _momentum_decay() -> float:
    rng = _rng(53, 0)
    params = init_params(3, (4,), 3, 2, 2, rng)
    memory = MemoryParams.mirror(params)
    for array in memory.named_arrays().values():
        array += rng.standard_normal(array.shape)
    alpha = 0.9

    def gap() -> float:
        encoder = params.encoder_arrays()
        return math.sqrt(sum(float(np.sum((m - encoder[k]) ** 2)) for k, m in memory.named_arrays().items()))

    worst, previous = 0.0, gap()
    for _ in range(100):
        momentum_update(memory, params, alpha)
        current = gap()
        worst = max(worst, abs(current / previous - alpha))
        previous = current
    return worst


@CheckRegistry.register("no_gradient_to_memory_or_banks", 0.0)
def _memory_and_banks_untouched() -> float:
    """One training epoch at micro scale, checking every step.

    Memory weights must equal the momentum blend of their previous value and
    the freshly updated encoder, bit for bit. Bank rows that survive a step
    must be unchanged and read-only. No graph leaf may alias memory storage.
    """
    config = micro_config(per_domain=12, bank_size=6, seed=3)
    dataset = build_benchmark(config).without_domain(config.n_domains - 1)
    policy = VariantPolicy.from_config(config)
    state = TrainState.create(config, dataset.domains, total_steps=10, seed=(3,))
    warm_up_banks(state, dataset, policy, _rng(54, 0))
    encoder_names = set(state.params.named_arrays())

    violations = 0
    for batch in batch_iter(dataset, config.batch_size, [54, 1], policy):
        graph = Graph()
        compute_losses(state, batch, graph)
        leaves = graph.params
        violations += len(set(leaves) - encoder_names)
        memory_arrays = list(state.memory.named_arrays().values())
        violations += sum(
            np.shares_memory(leaf.data, m) for leaf in leaves.values() for m in memory_arrays
        )

        memory_before = {k: v.copy() for k, v in state.memory.named_arrays().items()}
        style_before = {d: state.style_bank.snapshot(d) for d in state.style_bank.domains}
        semantic_before = state.semantic_bank.snapshot()
        train_step(state, batch)

        encoder = state.params.encoder_arrays()
        alpha = config.alpha
        for k, m in state.memory.named_arrays().items():
            violations += int(not np.array_equal(m, alpha * memory_before[k] + (1.0 - alpha) * encoder[k]))

        pushed = {int(d): int(np.sum(batch.d == d)) for d in np.unique(batch.d)}
        for d, before in style_before.items():
            violations += _survivor_violations(before, state.style_bank.snapshot(d), pushed.get(d, 0))
        violations += _survivor_violations(semantic_before, state.semantic_bank.snapshot(), len(batch))
    return float(violations)


def _survivor_violations(before: np.ndarray, after: np.ndarray, pushed: int) -> int:
    kept = max(len(after) - pushed, 0)
    survivors = after[:kept]
    expected = before[len(before) - kept :] if kept else before[:0]
    return int(not np.array_equal(survivors, expected)) + int(after.flags.writeable)


@CheckRegistry.register("loss_gradient_additivity", 1e-12)
def _additivity() -> float:
    worst = 0.0
    for seed in range(5):
        micro = build_micro(seed)
        graph = Graph()
        graph.backward(micro.total(graph))
        combined = graph.grads()
        summed = {k: np.zeros_like(v) for k, v in combined.items()}
        for slot in LossComponent:
            part = Graph()
            part.backward(micro.losses(part).component(slot))
            for k, g in part.grads().items():
                summed[k] += g
        worst = max(worst, max(float(np.max(np.abs(combined[k] - summed[k]))) for k in combined))
    return worst
