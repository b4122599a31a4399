import numpy as np

import usecases.selftest_uc as selftest_uc
from harness.selftest import PropertyResult, check_confidence_interval, check_dtw_oracle, run_selftest
from usecases.selftest_uc import SelftestUC


def test_all_properties_hold():
    results = run_selftest(seed=1, grad_points=5)
    assert [result.name for result in results] == [
        'dtw-oracle', 'grad-classification', 'grad-cosine-classifier', 'grad-meta-baseline',
        'grad-cmn-lite', 'grad-otam-lite', 'imprint-argmax', 'ci95',
    ]
    assert all(result.passed for result in results), [r for r in results if not r.passed]


def test_single_checks():
    assert check_dtw_oracle(np.random.default_rng(0), cases=50).passed
    assert check_confidence_interval(np.random.default_rng(0), vectors=10).passed


def test_failure_names_the_property(monkeypatch):
    def broken(seed, grad_points):
        return [PropertyResult('dtw-oracle', True, 'ok'), PropertyResult('grad-otam-lite', False, 'max relative error 1e-2')]

    monkeypatch.setattr(selftest_uc, 'run_selftest', broken)
    response = SelftestUC({}).exec()
    assert not response
    assert response.exit_code == 1
    assert response.messages == ['grad-otam-lite: max relative error 1e-2']
