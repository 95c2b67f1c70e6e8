"""Candidate pools, diversity-constrained member selection and majority voting."""

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .embeddings import encode
from .errors import DataError, SelectionError
from .labels import LABEL_INDEX, LABELS, NUM_CLASSES
from .model import forward, predict_label
from .persist import load_model, save_model
from .train import TrainConfig, evaluate_params, train_network
from .nadam import NadamConfig

log = logging.getLogger(__name__)

MANIFEST_VERSION = 1
PAPER_K = 10
PAPER_THRESHOLD = 0.95


@dataclass
class Candidate:
    model_path: str
    init_seed: int
    dev_recall: float
    dev_predictions: list


@dataclass
class Member:
    model_path: str
    init_seed: int
    dev_recall: float
    max_prior_agreement: float


@dataclass
class EnsembleManifest:
    members: list
    threshold: float = PAPER_THRESHOLD
    config: dict = field(default_factory=dict)

    @property
    def k(self):
        return len(self.members)

    @property
    def even_k(self):
        return self.k % 2 == 0


def agreement(a, b):
    """Fraction of positions where two label sequences agree."""
    if len(a) != len(b):
        raise DataError(f"label sequences differ in length ({len(a)} vs {len(b)})")
    if len(a) == 0:
        raise DataError("agreement of empty sequences is undefined")
    return sum(x == y for x, y in zip(a, b)) / len(a)


def select_members(candidates, k=PAPER_K, threshold=PAPER_THRESHOLD):
    """Greedy walk down the recall ranking, skipping near-duplicates.

    Candidates are ranked by dev recall (descending, lower seed first on
    ties). One is accepted when its dev-prediction agreement with every
    already accepted member is at most ``threshold``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    ranked = sorted(candidates, key=lambda c: (-c.dev_recall, c.init_seed))
    members, chosen = [], []
    for cand in ranked:
        prior = [agreement(cand.dev_predictions, c.dev_predictions) for c in chosen]
        if any(a > threshold for a in prior):
            continue
        chosen.append(cand)
        members.append(Member(cand.model_path, cand.init_seed, cand.dev_recall,
                              max(prior, default=0.0)))
        if len(members) == k:
            break
    if len(members) < k:
        raise SelectionError(
            f"only {len(members)} of {len(candidates)} candidates are mutually diverse "
            f"at threshold {threshold}; {k} required", len(members))
    if k % 2 == 0:
        log.info("ensemble size %d is even; ties are broken by summed probability", k)
    return EnsembleManifest(members, threshold)


def vote_tally(member_labels):
    counts = [0] * NUM_CLASSES
    for label in member_labels:
        counts[LABEL_INDEX[label]] += 1
    return counts


def majority_vote(member_labels, member_probs):
    """Label with most votes; ties by summed probability, then class order."""
    counts = vote_tally(member_labels)
    top = max(counts)
    tied = [c for c in range(NUM_CLASSES) if counts[c] == top]
    if len(tied) > 1:
        mass = np.sum(np.asarray(member_probs, dtype=float), axis=0)
        best = max(mass[c] for c in tied)
        tied = [c for c in tied if mass[c] == best]
    return LABELS[tied[0]]


def _check_compatible(hypers):
    first = hypers[0]
    for h in hypers[1:]:
        if (h.d, h.maxl, h.classes) != (first.d, first.maxl, first.classes):
            raise DataError(f"member hyperparameters disagree: {first} vs {h}")


def vote_models(models, inputs):
    """Majority-vote a list of ``(params, hyper)`` over a ``(n, d, maxl)`` batch.

    Returns ``(labels, tallies)`` with tallies ordered negative/neutral/positive.
    """
    labels, tallies = [], []
    for x in inputs:
        probs = [forward(params, x)[0] for params, _ in models]
        member_labels = [predict_label(p) for p in probs]
        labels.append(majority_vote(member_labels, probs))
        tallies.append(vote_tally(member_labels))
    return labels, tallies


def load_members(manifest, base_dir="."):
    models = []
    for m in manifest.members:
        path = m.model_path if os.path.isabs(m.model_path) else os.path.join(base_dir, m.model_path)
        models.append(load_model(path))
    _check_compatible([h for _, h in models])
    return models


def ensemble_predict(manifest, table, token_seqs, base_dir="."):
    """Predict a label per token sequence with every member and vote."""
    models = load_members(manifest, base_dir)
    hyper = models[0][1]
    if table.dim != hyper.d:
        raise DataError(f"embedding dimension {table.dim} != model dimension {hyper.d}")
    return vote_models(models, encode(table, token_seqs, hyper.maxl))


def _train_candidate(job):
    index, hyper, train_data, dev_data, seed, train_config, nadam_config, path, echo = job
    params, history = train_network(hyper, train_data, dev_data, seed, train_config, nadam_config)
    save_model(params, hyper, path, config=echo)
    pred, recall, _ = evaluate_params(params, dev_data)
    return Candidate(path, seed, recall, [LABELS[p] for p in pred])


def candidate_shuffle_seed(shuffle_seed, init_seed):
    return int(np.random.SeedSequence([shuffle_seed, init_seed]).generate_state(1)[0])


def generate_candidates(hyper, train_data, dev_data, n_candidates, seed_base, out_dir,
                        train_config=TrainConfig(), nadam_config=NadamConfig(),
                        jobs=1, config_echo=None):
    """Train ``n_candidates`` networks with seeds ``seed_base ..`` and rank them by dev recall."""
    if n_candidates < 1:
        raise ValueError("n_candidates must be >= 1")
    os.makedirs(out_dir, exist_ok=True)
    work = []
    for i in range(n_candidates):
        seed = seed_base + i
        tc = replace(train_config, shuffle_seed=candidate_shuffle_seed(train_config.shuffle_seed, seed))
        path = os.path.join(out_dir, f"candidate_{i:03d}.svt")
        work.append((i, hyper, train_data, dev_data, seed, tc, nadam_config, path, config_echo))

    def _failed(i, exc):
        return RuntimeError(f"training candidate {i} (seed {seed_base + i}) failed: {exc}")

    candidates = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_train_candidate, job) for job in work]
            for i, fut in enumerate(futures):
                try:
                    candidates.append(fut.result())
                except Exception as exc:
                    raise _failed(i, exc) from exc
    else:
        for i, job in enumerate(work):
            try:
                candidates.append(_train_candidate(job))
            except Exception as exc:
                raise _failed(i, exc) from exc
            log.info("candidate %d seed %d dev avg_recall %.4f", i, job[4], candidates[-1].dev_recall)
    return sorted(candidates, key=lambda c: (-c.dev_recall, c.init_seed))


def manifest_to_dict(manifest):
    return {
        "version": MANIFEST_VERSION,
        "k": manifest.k,
        "threshold": manifest.threshold,
        "class_order": list(LABELS),
        "even_k": manifest.even_k,
        "config": {k: manifest.config[k] for k in sorted(manifest.config)},
        "members": [
            {"model_path": m.model_path, "init_seed": m.init_seed,
             "dev_recall": m.dev_recall, "max_prior_agreement": m.max_prior_agreement}
            for m in manifest.members
        ],
    }


def save_manifest(manifest, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest_to_dict(manifest), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_manifest(path):
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: not a manifest ({exc})") from None
    if data.get("version") != MANIFEST_VERSION:
        raise DataError(f"{path}: unsupported manifest version {data.get('version')}")
    if data.get("class_order") != list(LABELS):
        raise DataError(f"{path}: unexpected class order {data.get('class_order')}")
    members = [Member(m["model_path"], m["init_seed"], m["dev_recall"], m["max_prior_agreement"])
               for m in data["members"]]
    if len(members) != data["k"]:
        raise DataError(f"{path}: k={data['k']} but {len(members)} members listed")
    return EnsembleManifest(members, data["threshold"], data.get("config", {}))
