from dataclasses import dataclass, field

import numpy as np

from shared.exceptions import ShapeError


@dataclass
class AdamState:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    first_moment: dict[str, np.ndarray] = field(default_factory=dict)
    second_moment: dict[str, np.ndarray] = field(default_factory=dict)


def adam_step(state: AdamState, params: dict[str, np.ndarray],
              grads: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
    """One bias-corrected Adam update; returns new parameter arrays and advances the state."""
    for name, value in params.items():
        if name not in grads or grads[name].shape != value.shape:
            got = grads[name].shape if name in grads else None
            raise ShapeError(f'gradient shape {got} does not match parameter "{name}" {value.shape}')

    state.step += 1
    correction1 = 1.0 - state.beta1 ** state.step
    correction2 = 1.0 - state.beta2 ** state.step

    updated = {}
    for name, value in params.items():
        grad = grads[name]
        first = state.first_moment.get(name)
        second = state.second_moment.get(name)
        if first is None:
            first = np.zeros_like(value)
            second = np.zeros_like(value)
        first = state.beta1 * first + (1.0 - state.beta1) * grad
        second = state.beta2 * second + (1.0 - state.beta2) * (grad * grad)
        state.first_moment[name] = first
        state.second_moment[name] = second

        denom = np.sqrt(second / correction2) + state.eps
        updated[name] = value - state.lr * (first / correction1) / denom
    return updated
