"""Linear-chain CRF: L2-penalized training, Viterbi decoding, (de)serialization.

Weights are laid out as ``F x L`` unigram state weights (feature, label)
followed by ``L x L`` transition weights (previous label, label).
"""
from __future__ import annotations

import base64
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import sparse
from scipy.optimize import minimize
from scipy.special import logsumexp

from ..errors import EmptyCorpus, InvalidGoldLabel, NonFiniteObjective
from .schema import LabelSchema, allowed_transitions, check_gold
from .templates import FeatureTemplate, expand_features, parse_templates

log = logging.getLogger(__name__)

FORMAT = "clintime-crf"
VERSION = 1


@dataclass
class CrfModel:
    labels: list
    feature_index: dict
    weights: np.ndarray
    templates: list
    hyper: dict = field(default_factory=lambda: {"c": 1.0, "eta": 1e-4})
    schema: str = "BIO"
    history: list = field(default_factory=list, compare=False)

    def __post_init__(self):
        n_f, n_l = len(self.feature_index), len(self.labels)
        if self.weights.shape != (n_f * n_l + n_l * n_l,):
            raise ValueError("weight vector does not match |features|*|labels| + |labels|^2")
        if not self.hyper.get("c", 0) > 0:
            raise ValueError("hyper-parameter c must be positive")

    @property
    def state_weights(self) -> np.ndarray:
        n_f, n_l = len(self.feature_index), len(self.labels)
        return self.weights[: n_f * n_l].reshape(n_f, n_l)

    @property
    def transitions(self) -> np.ndarray:
        n_l = len(self.labels)
        return self.weights[-n_l * n_l:].reshape(n_l, n_l)

    # -- scoring -----------------------------------------------------------

    def emissions(self, matrix) -> np.ndarray:
        feats = expand_features(matrix, self.templates)
        W = self.state_weights
        out = np.zeros((len(feats), len(self.labels)))
        for t, fs in enumerate(feats):
            idx = [self.feature_index[f] for f in fs if f in self.feature_index]
            if idx:
                out[t] = W[idx].sum(axis=0)
        return out

    def constraint_masks(self):
        """Additive (start, transition, end) masks: 0 where allowed, -inf elsewhere."""
        ok = allowed_transitions(self.schema)
        L = self.labels
        start = np.array([0.0 if (None, b) in ok else -np.inf for b in L])
        end = np.array([0.0 if (a, None) in ok else -np.inf for a in L])
        trans = np.array([[0.0 if (a, b) in ok else -np.inf for b in L] for a in L])
        return start, trans, end

    def decode(self, matrix, constrained: bool = False) -> list[str]:
        if len(matrix) == 0:
            return []
        E = self.emissions(matrix)
        T = self.transitions.copy()
        start = np.zeros(len(self.labels))
        end = np.zeros(len(self.labels))
        if constrained:
            ms, mt, me = self.constraint_masks()
            start, T, end = start + ms, T + mt, end + me
        path = viterbi(E, T, start, end)
        return [self.labels[k] for k in path]

    # -- persistence -----------------------------------------------------

    def to_json(self) -> str:
        features = sorted(self.feature_index, key=self.feature_index.get)
        payload = {
            "format": FORMAT,
            "version": VERSION,
            "schema": self.schema,
            "labels": list(self.labels),
            "hyper": self.hyper,
            "templates": [str(t) for t in self.templates],
            "features": features,
            "weights": base64.b64encode(self.weights.astype("<f8").tobytes()).decode("ascii"),
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "CrfModel":
        payload = json.loads(text)
        if payload.get("format") != FORMAT or payload.get("version") != VERSION:
            raise ValueError("not a clintime CRF model file (or unsupported version)")
        weights = np.frombuffer(base64.b64decode(payload["weights"]), dtype="<f8").astype(np.float64)
        return cls(
            labels=payload["labels"],
            feature_index={f: i for i, f in enumerate(payload["features"])},
            weights=weights,
            templates=parse_templates("\n".join(payload["templates"])),
            hyper=payload["hyper"],
            schema=payload["schema"],
        )

    def save(self, path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8", newline="\n")

    @classmethod
    def load(cls, path) -> "CrfModel":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def viterbi(E: np.ndarray, T: np.ndarray, start=None, end=None) -> list[int]:
    """Best label-index path; ties go to the lowest label index."""
    n, L = E.shape
    start = np.zeros(L) if start is None else start
    end = np.zeros(L) if end is None else end
    delta = E[0] + start
    back = np.zeros((n, L), dtype=np.int64)
    for t in range(1, n):
        cand = delta[:, None] + T  # prev x cur
        back[t] = np.argmax(cand, axis=0)
        delta = cand[back[t], np.arange(L)] + E[t]
    delta = delta + end
    best = [int(np.argmax(delta))]
    for t in range(n - 1, 0, -1):
        best.append(int(back[t, best[-1]]))
    return best[::-1]


class _Batch:
    """Training corpus packed as a sparse design matrix plus padded index arrays."""

    def __init__(self, feats: list[list[list[str]]], gold: list[list[int]], feature_index: dict, n_labels: int):
        self.n_labels = n_labels
        self.n_features = len(feature_index)
        self.lengths = np.array([len(s) for s in feats], dtype=np.int64)
        rows, cols = [], []
        r = 0
        for sent in feats:
            for tok in sent:
                for f in tok:
                    j = feature_index.get(f)
                    if j is not None:
                        rows.append(r)
                        cols.append(j)
                r += 1
        self.n_tokens = r
        data = np.ones(len(rows))
        self.X = sparse.csr_matrix((data, (rows, cols)), shape=(r, self.n_features))
        self.Xt = self.X.T.tocsr()
        self.y = np.array([lab for s in gold for lab in s], dtype=np.int64)
        S, Tm = len(feats), int(self.lengths.max()) if len(feats) else 0
        self.S, self.Tmax = S, Tm
        self.pos = np.full((S, Tm), -1, dtype=np.int64)  # padded -> flat token index
        offset = 0
        for s, n in enumerate(self.lengths):
            self.pos[s, :n] = np.arange(offset, offset + n)
            offset += n
        self.mask = self.pos >= 0
        yp = np.zeros((S, Tm), dtype=np.int64)
        yp[self.mask] = self.y[self.pos[self.mask]]
        self.y_pad = yp
        # gold transition counts
        self.gold_trans = np.zeros((n_labels, n_labels))
        pm = self.mask[:, 1:] & self.mask[:, :-1]
        np.add.at(self.gold_trans, (yp[:, :-1][pm], yp[:, 1:][pm]), 1.0)

    def padded(self, flat: np.ndarray) -> np.ndarray:
        out = np.zeros((self.S, self.Tmax) + flat.shape[1:])
        out[self.mask] = flat[self.pos[self.mask]]
        return out


def _forward_backward(E: np.ndarray, T: np.ndarray, lengths: np.ndarray, mask: np.ndarray):
    """Log-space alpha/beta over a padded batch. Returns (log_alpha, log_beta, logZ)."""
    S, Tm, L = E.shape
    alpha = np.zeros((S, Tm, L))
    beta = np.zeros((S, Tm, L))
    alpha[:, 0] = E[:, 0]
    for t in range(1, Tm):
        alpha[:, t] = logsumexp(alpha[:, t - 1, :, None] + T[None], axis=1) + E[:, t]
    for t in range(Tm - 2, -1, -1):
        nxt = logsumexp(T[None] + (E[:, t + 1] + beta[:, t + 1])[:, None, :], axis=2)
        live = (t + 1 < lengths)[:, None]
        beta[:, t] = np.where(live, nxt, 0.0)
    last = alpha[np.arange(S), lengths - 1]
    logZ = logsumexp(last, axis=1)
    return alpha, beta, logZ


def objective(weights: np.ndarray, batch: _Batch, c: float):
    """Negated penalized log-likelihood and its gradient (for minimization)."""
    F, L = batch.n_features, batch.n_labels
    W = weights[: F * L].reshape(F, L)
    T = weights[F * L:].reshape(L, L)
    flat_E = batch.X @ W
    E = batch.padded(flat_E)
    alpha, beta, logZ = _forward_backward(E, T, batch.lengths, batch.mask)

    gold_state = flat_E[np.arange(batch.n_tokens), batch.y].sum()
    gold_trans = (batch.gold_trans * T).sum()
    loglik = gold_state + gold_trans - logZ.sum()

    node = np.exp(alpha + beta - logZ[:, None, None])
    node[~batch.mask] = 0.0
    flat_node = node[batch.mask]  # row order equals flat token order
    order = batch.pos[batch.mask]
    marg = np.empty_like(flat_node)
    marg[order] = flat_node
    marg[np.arange(batch.n_tokens), batch.y] -= 1.0
    gW = batch.Xt @ marg

    pair = alpha[:, :-1, :, None] + T[None, None] + (E[:, 1:] + beta[:, 1:])[:, :, None, :] - logZ[:, None, None, None]
    pm = batch.mask[:, 1:]
    exp_trans = np.exp(pair[pm]).sum(axis=0) if pm.any() else np.zeros((L, L))
    gT = exp_trans - batch.gold_trans

    penalty = weights @ weights / (2.0 * c)
    f = -loglik + penalty
    g = np.concatenate([gW.ravel(), gT.ravel()]) + weights / c
    if not np.isfinite(f) or not np.all(np.isfinite(g)):
        raise NonFiniteObjective(f"objective {f} or its gradient is not finite")
    return f, g


def build_feature_index(feats) -> dict:
    index = {}
    for sent in feats:
        for tok in sent:
            for f in tok:
                if f not in index:
                    index[f] = len(index)
    return index


def prepare(sentences, schema: LabelSchema | str, templates: Sequence[FeatureTemplate]):
    """Expand features and index gold labels. Returns (labels, feature_index, batch)."""
    kind = schema.kind if isinstance(schema, LabelSchema) else schema
    labels = sorted(LabelSchema(kind).labels)
    lab_index = {lab: i for i, lab in enumerate(labels)}
    feats, gold = [], []
    for matrix, seq in sentences:
        if len(matrix) != len(seq):
            raise InvalidGoldLabel("gold sequence length differs from the token count")
        if len(seq) == 0:
            continue
        check_gold(seq, kind)
        feats.append(expand_features(matrix, templates))
        gold.append([lab_index[s] for s in seq])
    if not feats:
        raise EmptyCorpus("no non-empty training sentences")
    index = build_feature_index(feats)
    return labels, index, _Batch(feats, gold, index, len(labels))


def train(
    sentences,
    schema: LabelSchema | str,
    templates: Sequence[FeatureTemplate],
    hyper: dict | None = None,
    optimizer: str = "lbfgs",
    max_iter: int = 1000,
    seed: int = 0,
) -> CrfModel:
    """Fit a CRF by maximizing  sum log p(y|x) - ||w||^2 / (2c).

    ``sentences`` is a sequence of ``(feature_matrix, gold_labels)`` pairs.
    Training stops once the relative objective change drops below ``eta``.
    """
    hyper = {"c": 1.0, "eta": 1e-4, **(hyper or {})}
    kind = schema.kind if isinstance(schema, LabelSchema) else schema
    labels, index, batch = prepare(sentences, kind, templates)
    n_w = len(index) * len(labels) + len(labels) ** 2
    c, eta = float(hyper["c"]), float(hyper["eta"])
    history = []

    if optimizer == "lbfgs":
        w0 = np.zeros(n_w)
        history.append(-float(objective(w0, batch, c)[0]))

        def record(intermediate_result):
            history.append(-float(intermediate_result.fun))

        res = minimize(
            objective, w0, args=(batch, c), jac=True, method="L-BFGS-B", callback=record,
            options={"maxcor": 10, "ftol": eta, "gtol": 1e-10, "maxiter": max_iter},
        )
        weights = res.x
        log.info("L-BFGS stopped after %d iterations: %s", res.nit, res.message)
    elif optimizer == "sgd":
        weights = _sgd(sentences, kind, templates, labels, index, c, eta, max_iter, seed, history)
    else:
        raise ValueError(f"unknown optimizer {optimizer!r}")

    return CrfModel(
        labels=labels, feature_index=index, weights=weights, templates=list(templates),
        hyper={"c": c, "eta": eta}, schema=kind, history=history,
    )


def _sgd(sentences, kind, templates, labels, index, c, eta, max_epochs, seed, history):
    lab_index = {lab: i for i, lab in enumerate(labels)}
    per_sentence = []
    for matrix, seq in sentences:
        if len(seq):
            feats = [expand_features(matrix, templates)]
            per_sentence.append(_Batch(feats, [[lab_index[s] for s in seq]], index, len(labels)))
    full = prepare(sentences, kind, templates)[2]
    n = len(per_sentence)
    w = np.zeros(len(index) * len(labels) + len(labels) ** 2)
    rng = np.random.default_rng(seed)
    prev = -objective(w, full, c)[0]
    history.append(prev)
    step = 0
    for _ in range(max_epochs):
        for k in rng.permutation(n):
            lr = 0.1 / (1.0 + step / n)
            # per-sentence share of the penalty keeps the full-batch objective
            _, g = objective(w, per_sentence[k], c * n)
            w -= lr * g
            step += 1
        cur = -objective(w, full, c)[0]
        history.append(cur)
        if abs(cur - prev) / max(abs(cur), 1.0) < eta:
            break
        prev = cur
    return w


def log_partition(model: CrfModel, matrix) -> float:
    E = model.emissions(matrix)[None]
    n = np.array([E.shape[1]])
    _, _, logZ = _forward_backward(E, model.transitions, n, np.ones((1, E.shape[1]), bool))
    return float(logZ[0])


def path_score(model: CrfModel, matrix, labels: Sequence[str]) -> float:
    E = model.emissions(matrix)
    idx = [model.labels.index(lab) for lab in labels]
    T = model.transitions
    score = sum(E[t, k] for t, k in enumerate(idx))
    score += sum(T[a, b] for a, b in zip(idx, idx[1:]))
    return float(score)
