"""Plain-loop reference computations.

Each function transcribes its formula term by term with Python loops and
``math``, independent of the vectorized code it is compared against.
"""

from __future__ import annotations

import math
from typing import Mapping, Sequence

import numpy as np

from app.model import EncoderParams


def _dot(a: Sequence[float], b: Sequence[float]) -> float:
    return sum(x * y for x, y in zip(a, b))


def _norm(a: Sequence[float]) -> float:
    return math.sqrt(_dot(a, a))


def cosine(a: Sequence[float], b: Sequence[float]) -> float:
    return _dot(a, b) / (_norm(a) * _norm(b))


def softmax(row: Sequence[float], tau: float) -> list[float]:
    exps = [math.exp(v / tau) for v in row]
    total = sum(exps)
    return [e / total for e in exps]


def style_loss(style: np.ndarray, domain_ids: Sequence[int], banks: Mapping[int, np.ndarray], tau: float) -> float:
    total, pairs = 0.0, 0
    for s, d in zip(style, domain_ids):
        negatives = 0.0
        for other, rows in banks.items():
            if other == d:
                continue
            for u in rows:
                negatives += math.exp(cosine(s, u) / tau)
        for v in banks[int(d)]:
            positive = math.exp(cosine(s, v) / tau)
            total += -math.log(positive / (positive + negatives))
            pairs += 1
    return total / pairs


def jury_distribution(c: Sequence[float], bank: np.ndarray, tau: float) -> list[float]:
    return softmax([cosine(c, v) for v in bank], tau)


def jury_loss(c_enc: np.ndarray, c_mem: np.ndarray, bank: np.ndarray, tau: float) -> float:
    total = 0.0
    for c, c_plus in zip(c_enc, c_mem):
        p_enc = jury_distribution(c, bank, tau)
        p_mem = jury_distribution(c_plus, bank, tau)
        for pm, pe in zip(p_mem, p_enc):
            total -= pm * math.log(pe)
    return total / len(c_enc)


def cross_entropy(logits: np.ndarray, labels: Sequence[int]) -> float:
    total = 0.0
    for row, y in zip(logits, labels):
        total -= math.log(softmax(row, 1.0)[int(y)])
    return total / len(labels)


def orthogonality(h_c: np.ndarray, h_s: np.ndarray) -> float:
    rows, kc = h_c.shape
    ks = h_s.shape[1]
    total = 0.0
    for a in range(kc):
        for b in range(ks):
            entry = sum(h_c[i][a] * h_s[i][b] for i in range(rows))
            total += entry * entry
    return total


def l2_matching(c_enc: np.ndarray, c_mem: np.ndarray) -> float:
    total = 0.0
    for c, c_plus in zip(c_enc, c_mem):
        n = _norm(c)
        total += sum((ci / n - pi) ** 2 for ci, pi in zip(c, c_plus))
    return total / len(c_enc)


def infonce(c_enc: np.ndarray, c_mem: np.ndarray, bank: np.ndarray, tau: float) -> float:
    total = 0.0
    for c, c_plus in zip(c_enc, c_mem):
        positive = math.exp(cosine(c, c_plus) / tau)
        negatives = sum(math.exp(cosine(c, v) / tau) for v in bank)
        total -= math.log(positive / (positive + negatives))
    return total / len(c_enc)


def dense(x: Sequence[float], weight: np.ndarray, bias: np.ndarray) -> list[float]:
    out = []
    for j in range(weight.shape[1]):
        acc = float(bias[j])
        for i, xi in enumerate(x):
            acc += xi * weight[i][j]
        out.append(acc)
    return out


def encode(params: EncoderParams, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    zs, cs, ss = [], [], []
    for row in x:
        z = list(row)
        for layer in params.backbone:
            z = [max(v, 0.0) for v in dense(z, layer.weight, layer.bias)]
        zs.append(z)
        cs.append(dense(z, params.semantic.weight, params.semantic.bias))
        ss.append(dense(z, params.style.weight, params.style.bias))
    return np.array(zs), np.array(cs), np.array(ss)


def classify(params: EncoderParams, c: np.ndarray) -> np.ndarray:
    return np.array([dense(row, params.classifier.weight, params.classifier.bias) for row in c])


def nearest_centroid_accuracy(features: np.ndarray, labels: Sequence[int]) -> float:
    groups = sorted(set(int(v) for v in labels))
    centroids = {}
    for g in groups:
        members = [f for f, y in zip(features, labels) if int(y) == g]
        centroids[g] = [sum(col) / len(members) for col in zip(*members)]
    correct = 0
    for f, y in zip(features, labels):
        best, best_dist = None, math.inf
        for g in groups:
            dist = sum((a - b) ** 2 for a, b in zip(f, centroids[g]))
            if dist < best_dist:
                best, best_dist = g, dist
        correct += best == int(y)
    return correct / len(labels)


def accuracy(logits: np.ndarray, labels: Sequence[int]) -> float:
    correct = 0
    for row, y in zip(logits, labels):
        best = 0
        for k in range(1, len(row)):
            if row[k] > row[best]:
                best = k
        correct += best == int(y)
    return correct / len(labels)


class QueueModel:
    """List model of a bounded FIFO."""

    def __init__(self, capacity: int) -> None:
        self.capacity = capacity
        self.items: list[np.ndarray] = []

    def push(self, v: np.ndarray) -> None:
        self.items.append(v)
        if len(self.items) > self.capacity:
            self.items.pop(0)
