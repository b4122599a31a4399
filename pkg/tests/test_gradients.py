import numpy as np
import pytest

from protocols.gradcheck import classification_grad_error, metric_grad_error, numeric_grad, relative_error
from protocols.method_schemas import Method


POINTS = 100
TOLERANCE = 1e-4

CLASSIFICATION_CASES = [
    {'cosine_head': False, 'dropout_p': 0.0},
    {'cosine_head': False, 'dropout_p': 0.5},
    {'cosine_head': True, 'dropout_p': 0.0},
]

METRIC_CASES = [
    {'method': Method.meta_baseline},
    {'method': Method.cmn_lite},
    {'method': Method.otam_lite},
    {'method': Method.otam_lite, 'normalize': True},
]


@pytest.fixture
def generator():
    return np.random.default_rng(31)


@pytest.fixture
def classification_case(request):
    return request.param


@pytest.fixture
def metric_case(request):
    return request.param


def test_numeric_grad_of_quadratic():
    x = np.array([1.0, -2.0, 0.5])
    assert np.allclose(numeric_grad(lambda v: float(np.sum(v ** 2)), x), 2 * x, atol=1e-8)
    assert relative_error(np.zeros(2), np.zeros(2)) == 0.0


@pytest.mark.parametrize('classification_case', CLASSIFICATION_CASES, indirect=True)
def test_classification_gradients(classification_case, generator):
    worst = max(classification_grad_error(generator, **classification_case) for _ in range(POINTS))
    assert worst < TOLERANCE, f'classification gradient relative error {worst:.2e} for {classification_case}'


@pytest.mark.parametrize('metric_case', METRIC_CASES, indirect=True)
def test_metric_gradients(metric_case, generator):
    worst = max(metric_grad_error(generator=generator, **metric_case) for _ in range(POINTS))
    assert worst < TOLERANCE, f'episode loss gradient relative error {worst:.2e} for {metric_case}'
