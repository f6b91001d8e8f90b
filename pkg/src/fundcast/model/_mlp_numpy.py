"""Pure-numpy training kernels for the one-hidden-layer sigmoid classifier.

Mirror of the compiled extension `_mlp_kernel`; both expose the same
functions with the same signatures so the caller can swap them freely.
Probabilities are clamped to [eps, 1-eps] only inside the loss; gradients
use the exact sigmoid + cross-entropy simplification (p - y).
"""

from __future__ import annotations

import numpy as np

CLAMP_EPS = 1e-7

# activation ids shared with the compiled kernel
ACT_RELU = 0
ACT_TANH = 1


def _hidden(z: np.ndarray, activation_id: int) -> np.ndarray:
    if activation_id == ACT_RELU:
        return np.maximum(z, 0.0)
    return np.tanh(z)


def forward_proba(W1, b1, W2, b2, X, activation_id):
    """Sigmoid output probabilities for a batch."""
    h = _hidden(X @ W1 + b1, activation_id)
    z = h @ W2 + b2[0]
    return 1.0 / (1.0 + np.exp(-z))


def bce_loss(p, y):
    """Mean binary cross entropy with probabilities clamped inside the log."""
    pc = np.clip(p, CLAMP_EPS, 1.0 - CLAMP_EPS)
    return float(-np.mean(y * np.log(pc) + (1.0 - y) * np.log(1.0 - pc)))


def batch_loss_and_grads(W1, b1, W2, b2, X, y, activation_id):
    """Loss plus analytic gradients of the batch-mean BCE."""
    B = X.shape[0]
    hpre = X @ W1 + b1
    h = _hidden(hpre, activation_id)
    z = h @ W2 + b2[0]
    p = 1.0 / (1.0 + np.exp(-z))
    loss = bce_loss(p, y)
    dz = (p - y) / B
    dW2 = h.T @ dz
    db2 = np.array([dz.sum()])
    dh = np.outer(dz, W2)
    if activation_id == ACT_RELU:
        dh = np.where(hpre > 0.0, dh, 0.0)
    else:
        dh = dh * (1.0 - h * h)
    dW1 = X.T @ dh
    db1 = dh.sum(axis=0)
    return loss, dW1, db1, dW2, db2


def _adam(param, grad, m, v, t, lr, beta1, beta2, eps):
    m *= beta1
    m += (1.0 - beta1) * grad
    v *= beta2
    v += (1.0 - beta2) * grad * grad
    mhat = m / (1.0 - beta1**t)
    vhat = v / (1.0 - beta2**t)
    param -= lr * mhat / (np.sqrt(vhat) + eps)


def step_batch(
    W1, b1, W2, b2,
    mW1, vW1, mb1, vb1, mW2, vW2, mb2, vb2,
    X, y,
    t, lr, beta1, beta2, eps, activation_id,
):
    """One fused forward/backward/Adam step; mutates params and state."""
    loss, dW1, db1, dW2, db2 = batch_loss_and_grads(W1, b1, W2, b2, X, y, activation_id)
    _adam(W1, dW1, mW1, vW1, t, lr, beta1, beta2, eps)
    _adam(b1, db1, mb1, vb1, t, lr, beta1, beta2, eps)
    _adam(W2, dW2, mW2, vW2, t, lr, beta1, beta2, eps)
    _adam(b2, db2, mb2, vb2, t, lr, beta1, beta2, eps)
    return loss
