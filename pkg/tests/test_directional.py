"""
End-to-end runs on synthetic benchmarks: exact recognition without noise, and the
qualitative method orderings that hold under warping and with more base data.
The long runs are marked slow and excluded from the default test selection.
"""
import time
from pathlib import Path

import numpy as np
import pytest

from config import PRETRAIN_MANIFEST_NAME
from core.feature_schemas import Split
from core.manifest_io import load_manifest, load_split
from core.rng import RngStream
from fixtures.builders import NOISELESS_BENCHMARK, build_benchmark, fast_config, untrained_model
from harness.evaluator import evaluate
from harness.reports import write_reports
from harness.splits import build_splits
from protocols.embedding import EmbeddingParams
from protocols.method_schemas import Method
from protocols.training import pretrain_embedding, template_loss, train_model


ALL_METHODS = [method.value for method in Method]

SEEDS = range(5)

MEDIUM_BENCHMARK = {
    'n_classes_per_split': (20, 5, 10),
    'videos_per_class': 20,
    'c_in': 16,
    't': 8,
    'prototype_length': 32,
    'noise_sigma': 0.3,
}

# time-constant class and video components: pooled features separate classes only after a learned projection
OFFSET_BENCHMARK = {
    **MEDIUM_BENCHMARK,
    'class_offset': 1.0,
    'offset_channels': 4,
    'video_offset': 0.6,
}

MEDIUM_TRAINING = {
    'embed_dim': 16,
    'train_steps': 300,
    'eval_every': 100,
    'epochs': 5,
    'episodes_per_epoch': 100,
    'val_episodes': 100,
    'iters_adapt': 100,
}

CLASSIFIER_TRAINING = {**MEDIUM_TRAINING, 'train_steps': 2000}

# the head has to fit the support set exactly within its few test-time steps
EXACT_ADAPTATION = {'iters_adapt': 100, 'lr_adapt': 0.05}


def trained_accuracy(manifest, method: str, seed: int, episodes: int, k_shot: int = 1, **overrides) -> float:
    cfg = fast_config(method, seed=seed, k_shot=k_shot, **overrides)
    model = train_model(manifest, cfg)
    return evaluate(model, cfg, load_split(manifest, Split.test), episodes, seed=seed).mean_accuracy


@pytest.fixture(scope='module')
def noiseless(tmp_path_factory):
    return build_benchmark(tmp_path_factory.mktemp('noiseless'), **{**NOISELESS_BENCHMARK, 'seed': 3})


@pytest.mark.parametrize('method', ALL_METHODS)
def test_noiseless_benchmark_is_solved(noiseless, method):
    assert trained_accuracy(noiseless, method, seed=0, episodes=200, **EXACT_ADAPTATION) == 1.0


@pytest.mark.slow
@pytest.mark.parametrize('method', ALL_METHODS)
def test_noiseless_benchmark_is_solved_long(noiseless, method):
    assert trained_accuracy(noiseless, method, seed=0, episodes=2000, **EXACT_ADAPTATION) == 1.0


@pytest.mark.slow
def test_alignment_pays_under_warping(tmp_path):
    manifest = build_benchmark(tmp_path, **{**MEDIUM_BENCHMARK, 'warp_strength': 0.8, 'seed': 11})
    gaps = [
        trained_accuracy(manifest, 'otam-lite', seed, 2000, **MEDIUM_TRAINING)
        - trained_accuracy(manifest, 'meta-baseline', seed, 2000, **MEDIUM_TRAINING)
        for seed in SEEDS
    ]
    assert np.mean(gaps) >= 0.03, gaps


@pytest.mark.slow
def test_baseline_plus_beats_baseline(tmp_path):
    manifest = build_benchmark(tmp_path, **{**OFFSET_BENCHMARK, 'warp_strength': 0.3, 'seed': 12})
    plus = np.array([trained_accuracy(manifest, 'baseline-plus', seed, 2000, **CLASSIFIER_TRAINING) for seed in SEEDS])
    base = np.array([trained_accuracy(manifest, 'baseline', seed, 2000, **CLASSIFIER_TRAINING) for seed in SEEDS])
    assert plus.mean() >= base.mean(), (plus, base)
    assert np.sum(plus >= base) >= 4, (plus, base)


@pytest.mark.slow
def test_more_base_data_helps(tmp_path):
    full = build_benchmark(tmp_path, **{**OFFSET_BENCHMARK, 'videos_per_class': 60,
                                          'warp_strength': 0.3, 'seed': 13})
    gaps = []
    for seed in SEEDS:
        uncapped = build_splits(full, (20, 5, 10), seed=seed)
        capped = build_splits(full, (20, 5, 10), {Split.train: 10}, seed=seed)
        gaps.append(trained_accuracy(uncapped, 'baseline-plus', seed, 2000, k_shot=5, **CLASSIFIER_TRAINING)
                    - trained_accuracy(capped, 'baseline-plus', seed, 2000, k_shot=5, **CLASSIFIER_TRAINING))
    assert np.mean(gaps) >= 0.03, gaps


@pytest.mark.slow
def test_full_evaluation_speed_and_determinism(tmp_path):
    manifest = build_benchmark(tmp_path / 'bench', n_classes_per_split=(0, 0, 10), videos_per_class=20,
                               c_in=32, t=8, prototype_length=32)
    split = load_split(manifest, Split.test)
    model = untrained_model('baseline-plus', 32, embed_dim=16, iters_adapt=100)

    started = time.perf_counter()
    serial = evaluate(model, model.config, split, 10000, seed=1, threads=0)
    assert time.perf_counter() - started < 60.0

    threaded = evaluate(model, model.config, split, 10000, seed=1, threads=4)
    write_reports([serial], tmp_path / 'serial.json')
    write_reports([threaded], tmp_path / 'threaded.json')
    assert (tmp_path / 'serial.json').read_bytes() == (tmp_path / 'threaded.json').read_bytes()


@pytest.mark.slow
def test_pretrained_embedding_lowers_initial_loss(tmp_path):
    manifest = build_benchmark(tmp_path, **{**OFFSET_BENCHMARK, 'warp_strength': 0.3,
                                              'pretrain_classes': 20, 'seed': 14})
    pretrain = load_manifest(Path(manifest.root_dir) / PRETRAIN_MANIFEST_NAME)
    for seed in SEEDS:
        cfg = fast_config('baseline', seed=seed, embed_dim=16, pretrain_steps=1000)
        pretrained = pretrain_embedding(pretrain, cfg, manifest)
        scratch = EmbeddingParams.random(manifest.feature_dim, 16, RngStream(seed).child(0))
        moved = np.linalg.norm(pretrained.W_e - scratch.W_e) / np.linalg.norm(scratch.W_e)
        assert moved > 0.2, f'seed {seed}: pretraining left the embedding at its init ({moved:.3f})'
        assert template_loss(manifest, pretrained) < template_loss(manifest, scratch), f'seed {seed}'
