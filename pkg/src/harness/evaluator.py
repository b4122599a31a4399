import logging
import time
from concurrent.futures import ThreadPoolExecutor
from functools import partial

import numpy as np

from config import DEFAULT_TEST_EPISODES, THREADS
from core.rng import RngStream
from harness.episodes import SplitData, check_capacity, sample_episode
from harness.reports import EvalReport, mean_and_ci95
from protocols.adaptation import adapt_and_predict
from protocols.method_schemas import MethodConfig
from protocols.model import TrainedModel
from shared.exceptions import DataValidationError


logger = logging.getLogger(__name__)

PROGRESS_EVERY = 1000


def run_episode(model: TrainedModel, cfg: MethodConfig, split: SplitData, seed: int, index: int) -> int:
    """1 if the query of episode `index` is classified correctly. The episode owns substream `index`."""
    generator = RngStream(seed, index).generator()
    episode = sample_episode(split, cfg.n_way, cfg.k_shot, generator)
    return int(adapt_and_predict(model, episode, cfg, generator) == episode.query_label)


def accuracy_vector(model: TrainedModel, cfg: MethodConfig, split: SplitData, n_episodes: int,
                    seed: int, threads: int = 0) -> np.ndarray:
    """Per-episode 0/1 accuracies in episode order; identical for any worker count."""
    check_capacity(split, cfg.n_way, cfg.k_shot)
    task = partial(run_episode, model, cfg, split, seed)

    if threads <= 0:
        results = []
        for index in range(n_episodes):
            results.append(task(index))
            if (index + 1) % PROGRESS_EVERY == 0:
                logger.info('%d/%d episodes, running accuracy %.4f', index + 1, n_episodes, np.mean(results))
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(task, range(n_episodes)))
    return np.array(results, dtype=np.float64)


def evaluate(model: TrainedModel, cfg: MethodConfig, split: SplitData, n_episodes: int = DEFAULT_TEST_EPISODES,
             seed: int = 0, threads: int = THREADS) -> EvalReport:
    if model.method != cfg.method_kind:
        raise DataValidationError(f'model method {model.method.value} does not match config {cfg.method_kind.value}')

    started = time.perf_counter()
    accuracies = accuracy_vector(model, cfg, split, n_episodes, seed, threads)
    mean, ci95 = mean_and_ci95(accuracies)
    report = EvalReport(
        method=cfg.method_kind.value,
        n_way=cfg.n_way,
        k_shot=cfg.k_shot,
        episodes=n_episodes,
        mean_accuracy=mean,
        ci95_halfwidth=ci95,
        seed=seed,
        fingerprint=cfg.fingerprint(),
        wall_time=time.perf_counter() - started,
    )
    logger.info('evaluated %s in %.1fs: %.4f +- %.4f', report.method, report.wall_time, mean, ci95)
    return report
