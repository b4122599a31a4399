import numpy as np

from core.rng import RngStream, as_generator
from heads.linear import LinearHead, dropout_mask, linear_forward, mean_softmax_xent
from heads.optim import AdamState, adam_step
from shared.exceptions import CoverageError, DataValidationError


def head_loss_and_grads(head: LinearHead, features: np.ndarray, labels: np.ndarray,
                        mask: np.ndarray | None = None) -> tuple[float, dict[str, np.ndarray]]:
    """Mean cross-entropy of a linear head with its gradients w.r.t. W and b."""
    inputs = features if mask is None else features * mask
    loss, grad_logits = mean_softmax_xent(linear_forward(head, inputs), labels)
    return loss, {'W': grad_logits.T @ inputs, 'b': grad_logits.sum(axis=0)}


def _augmented_grads(weights: np.ndarray, inputs: np.ndarray, onehot: np.ndarray) -> np.ndarray:
    """Gradient w.r.t. [W | b] for inputs carrying a trailing column of ones"""
    logits = inputs @ weights.T
    probs = np.exp(logits - logits.max(axis=1, keepdims=True))
    grad_logits = (probs / probs.sum(axis=1, keepdims=True) - onehot) / inputs.shape[0]
    return grad_logits.T @ inputs


def train_head(features: np.ndarray, labels: np.ndarray, init: LinearHead, iters: int, lr: float,
               dropout_p: float = 0.0, rng: RngStream | np.random.Generator | None = None) -> LinearHead:
    """Full-batch Adam on mean cross-entropy for exactly `iters` steps."""
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if features.shape[0] == 0:
        raise CoverageError('empty training set')
    missing = sorted(set(range(init.n_out)) - set(labels.tolist()))
    if missing:
        raise CoverageError(f'no training sample for class {missing[0]}')
    if iters <= 0:
        return init

    # validates shapes and labels once
    head_loss_and_grads(init, features, labels)

    onehot = np.eye(init.n_out)[labels]
    if dropout_p > 0.0 and rng is None:
        raise DataValidationError('dropout during head training needs an rng')
    generator = as_generator(rng) if dropout_p > 0.0 else None
    state = AdamState(lr=lr)
    # W and b share one Adam block: [W | b] against inputs with a ones column
    params = {'Wb': np.hstack([init.W, init.b[:, None]])}
    augmented = np.hstack([features, np.ones((features.shape[0], 1))])
    for _ in range(iters):
        inputs = augmented
        if generator is not None:
            mask = dropout_mask(generator, dropout_p, features.shape)
            inputs = np.hstack([features * mask, augmented[:, -1:]])
        params = adam_step(state, params, {'Wb': _augmented_grads(params['Wb'], inputs, onehot)})
    return LinearHead(params['Wb'][:, :-1], params['Wb'][:, -1])
