"""
Built-in property checks: DTW against exhaustive enumeration, finite-difference
gradient checks of every training path, imprinting argmax equivalence and the
confidence-interval formula.
"""
import logging
import statistics
from dataclasses import dataclass

import numpy as np

from align.dtw import DistanceMatrix, dtw, dtw_bruteforce
from core.rng import RngStream
from harness.reports import mean_and_ci95
from heads.imprint import imprint
from heads.linear import linear_forward
from protocols.gradcheck import classification_grad_error, metric_grad_error
from protocols.method_schemas import Method


logger = logging.getLogger(__name__)

GRAD_TOLERANCE = 1e-4
DTW_TOLERANCE = 1e-9


@dataclass(frozen=True)
class PropertyResult:
    name: str
    passed: bool
    detail: str


def check_dtw_oracle(generator: np.random.Generator, cases: int = 1000) -> PropertyResult:
    for case in range(cases):
        rows, cols = generator.integers(2, 5, size=2)
        distances = DistanceMatrix(generator.uniform(0.0, 2.0, (rows, cols)))
        cost, path = dtw(distances)
        expected = dtw_bruteforce(distances)
        if abs(cost - expected) > DTW_TOLERANCE:
            return PropertyResult('dtw-oracle', False, f'case {case}: dp cost {cost} != brute force {expected}')
        if not path.is_admissible(rows, cols) or abs(path.cost(distances) - cost) > DTW_TOLERANCE:
            return PropertyResult('dtw-oracle', False, f'case {case}: path is not admissible or misses the cost')
    return PropertyResult('dtw-oracle', True, f'{cases} random matrices agree')


def check_gradients(generator: np.random.Generator, points: int = 20) -> list[PropertyResult]:
    checks = {
        'grad-classification': lambda: classification_grad_error(generator),
        'grad-cosine-classifier': lambda: classification_grad_error(generator, cosine_head=True, dropout_p=0.0),
        'grad-meta-baseline': lambda: metric_grad_error(Method.meta_baseline, generator),
        'grad-cmn-lite': lambda: metric_grad_error(Method.cmn_lite, generator),
        'grad-otam-lite': lambda: metric_grad_error(Method.otam_lite, generator),
    }
    results = []
    for name, check in checks.items():
        worst = max(check() for _ in range(points))
        results.append(PropertyResult(name, worst < GRAD_TOLERANCE, f'max relative error {worst:.2e} over {points} points'))
    return results


def check_imprint_argmax(generator: np.random.Generator, episodes: int = 1000,
                         n_way: int = 5, logit_dim: int = 16) -> PropertyResult:
    for episode in range(episodes):
        support = generator.standard_normal((n_way, logit_dim))
        query = generator.standard_normal(logit_dim)
        head = imprint(list(zip(support, range(n_way))), n_way)
        by_head = int(np.argmax(linear_forward(head, query)))
        templates = support / np.linalg.norm(support, axis=1, keepdims=True)
        by_cosine = int(np.argmax(templates @ query / np.linalg.norm(query)))
        if by_head != by_cosine:
            return PropertyResult('imprint-argmax', False, f'episode {episode}: head {by_head} != cosine {by_cosine}')
    return PropertyResult('imprint-argmax', True, f'{episodes} random episodes agree')


def check_confidence_interval(generator: np.random.Generator, vectors: int = 100) -> PropertyResult:
    for number in range(vectors):
        accuracies = generator.integers(0, 2, size=int(generator.integers(2, 500))).astype(float)
        _, ci95 = mean_and_ci95(accuracies)
        expected = 1.96 * statistics.stdev(accuracies.tolist()) / np.sqrt(len(accuracies))
        if abs(ci95 - expected) > 1e-12:
            return PropertyResult('ci95', False, f'vector {number}: {ci95} != {expected}')
    return PropertyResult('ci95', True, f'{vectors} random vectors agree')


def run_selftest(seed: int = 0, grad_points: int = 20) -> list[PropertyResult]:
    root = RngStream(seed)
    results = [check_dtw_oracle(root.child(0).generator())]
    results += check_gradients(root.child(1).generator(), grad_points)
    results.append(check_imprint_argmax(root.child(2).generator()))
    results.append(check_confidence_interval(root.child(3).generator()))
    for result in results:
        logger.info('%s: %s (%s)', result.name, 'ok' if result.passed else 'FAILED', result.detail)
    return results
