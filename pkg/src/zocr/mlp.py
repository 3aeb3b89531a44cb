"""Three-layer log-sigmoid network and its full-batch trainer.

Every layer computes ``a = logsig(W @ a_prev + b)``. Training minimizes the
mean squared error against one-hot targets by gradient descent with momentum
and an adaptive learning rate: a step that raises the error by more than
``max_perf_inc`` is discarded and the rate shrinks, an improving step grows
the rate.
"""

import hashlib
import logging
from dataclasses import dataclass, field

import numpy as np

log = logging.getLogger(__name__)


class TrainingDiverged(RuntimeError):
    pass


@dataclass(frozen=True)
class NetworkConfig:
    input_dim: int = 69
    hidden: tuple = (100, 100)
    output_dim: int = 26
    seed: int = 0

    def __post_init__(self):
        if self.input_dim < 1:
            raise ValueError("input_dim must be >= 1")
        if len(self.hidden) != 2 or min(self.hidden) < 1:
            raise ValueError("hidden must be two widths >= 1")
        if self.output_dim < 2:
            raise ValueError("output_dim must be >= 2")

    @property
    def dims(self):
        return (self.input_dim, *self.hidden, self.output_dim)


@dataclass(frozen=True)
class TrainConfig:
    goal_mse: float = 1e-6
    max_epochs: int = 1_000_000
    lr0: float = 0.01
    momentum: float = 0.9
    lr_inc: float = 1.05
    lr_dec: float = 0.7
    max_perf_inc: float = 1.04
    normalize_inputs: bool = False
    soft_targets: bool = False

    def __post_init__(self):
        if not self.goal_mse > 0:
            raise ValueError("goal_mse must be > 0")
        if self.max_epochs < 0:
            raise ValueError("max_epochs must be >= 0")
        if not self.lr0 > 0:
            raise ValueError("lr0 must be > 0")
        if not 0 <= self.momentum < 1:
            raise ValueError("momentum must satisfy 0 <= momentum < 1")
        if not 0 < self.lr_dec < 1 < self.lr_inc:
            raise ValueError("need 0 < lr_dec < 1 < lr_inc")
        if not self.max_perf_inc >= 1:
            raise ValueError("max_perf_inc must be >= 1")


@dataclass
class NetworkParams:
    weights: list
    biases: list

    @property
    def dims(self):
        return (self.weights[0].shape[1], *(w.shape[0] for w in self.weights))

    def arrays(self):
        for w, b in zip(self.weights, self.biases):
            yield w
            yield b

    def copy(self):
        return NetworkParams([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def zeros_like(self):
        return NetworkParams([np.zeros_like(w) for w in self.weights],
                             [np.zeros_like(b) for b in self.biases])

    def digest(self):
        """SHA-256 over the raw bytes of every array, for change detection."""
        h = hashlib.sha256()
        for a in self.arrays():
            h.update(np.ascontiguousarray(a, dtype=np.float64).tobytes())
        return h.hexdigest()


@dataclass
class TrainState:
    lr: float
    prev_delta: NetworkParams
    epoch: int = 0
    mse_history: list = field(default_factory=list)
    lr_history: list = field(default_factory=list)
    accepted: list = field(default_factory=list)
    initial_mse: float = float("nan")
    stop_reason: str = ""

    @property
    def final_mse(self):
        return self.mse_history[-1] if self.mse_history else self.initial_mse


def init_params(cfg):
    """Uniform weights in +-1/sqrt(fan_in), zero biases, from ``cfg.seed``."""
    rng = np.random.default_rng(cfg.seed)
    dims = cfg.dims
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return NetworkParams(weights, biases)


def logsig(x):
    """Numerically stable 1 / (1 + exp(-x))."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out if out.ndim else float(out)


def _as_batch(params, inputs):
    x = np.asarray(inputs, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    d = params.weights[0].shape[1]
    if x.ndim != 2 or x.shape[1] != d:
        got = x.shape[-1] if x.ndim else 0
        raise ValueError(f"input dimension mismatch: network expects {d} features, got {got}")
    return x, single


def forward(params, inputs):
    """Activations ``[a1, a2, a3]`` for one vector or a batch of row vectors."""
    a, single = _as_batch(params, inputs)
    acts = []
    for w, b in zip(params.weights, params.biases):
        a = logsig(a @ w.T + b)
        acts.append(a)
    return [act[0] for act in acts] if single else acts


def classify(params, inputs):
    """Argmax of the output layer; the lowest index wins ties."""
    out = forward(params, inputs)[-1]
    return np.argmax(out, axis=-1) if out.ndim > 1 else int(np.argmax(out))


def one_hot(labels, n, soft=False):
    lo, hi = (0.05, 0.95) if soft else (0.0, 1.0)
    t = np.full((len(labels), n), lo)
    t[np.arange(len(labels)), np.asarray(labels, dtype=int)] = hi
    return t


def _check_batch(inputs, targets):
    x = np.asarray(inputs, dtype=np.float64)
    t = np.asarray(targets, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    if t.ndim == 1:
        t = t[None, :]
    if len(x) == 0:
        raise ValueError("empty training set")
    if len(x) != len(t):
        raise ValueError(f"{len(x)} inputs but {len(t)} targets")
    return x, t


def _mse(out, t):
    return float(np.mean((t - out) ** 2))


def batch_mse(params, inputs, targets):
    x, t = _check_batch(inputs, targets)
    out = forward(params, x)[-1]
    if out.shape != t.shape:
        raise ValueError(f"targets have {t.shape[1]} columns, network outputs {out.shape[1]}")
    return _mse(out, t)


def _backprop(params, x, t, acts):
    m, n = t.shape
    delta = (-2.0 / (m * n)) * (t - acts[-1]) * acts[-1] * (1.0 - acts[-1])
    inputs = [x, *acts[:-1]]
    gw = [None] * 3
    gb = [None] * 3
    for i in (2, 1, 0):
        gw[i] = delta.T @ inputs[i]
        gb[i] = delta.sum(axis=0)
        if i:
            a = inputs[i]
            delta = (delta @ params.weights[i]) * a * (1.0 - a)
    return NetworkParams(gw, gb)


def gradients(params, inputs, targets):
    """Exact gradient of ``batch_mse`` with respect to every weight and bias."""
    x, t = _check_batch(inputs, targets)
    return _backprop(params, x, t, forward(params, x))


def adapt(mse, cand_mse, lr, cfg):
    """Accept/reject rule; returns ``(accepted, new_lr)``."""
    if cand_mse > cfg.max_perf_inc * mse:
        return False, lr * cfg.lr_dec
    return True, (lr * cfg.lr_inc if cand_mse < mse else lr)


def _step(params, state, cfg, x, t, acts, mse):
    grad = _backprop(params, x, t, acts)
    mc = cfg.momentum
    scale = (1.0 - mc) * state.lr
    delta = NetworkParams(
        [mc * dp - scale * g for dp, g in zip(state.prev_delta.weights, grad.weights)],
        [mc * dp - scale * g for dp, g in zip(state.prev_delta.biases, grad.biases)],
    )
    cand = NetworkParams([w + d for w, d in zip(params.weights, delta.weights)],
                         [b + d for b, d in zip(params.biases, delta.biases)])
    cand_acts = forward(cand, x)
    cand_mse = _mse(cand_acts[-1], t)
    if not np.isfinite(cand_mse):
        raise TrainingDiverged(f"non-finite MSE at epoch {state.epoch + 1} (lr={state.lr:g})")

    state.epoch += 1
    accepted, state.lr = adapt(mse, cand_mse, state.lr, cfg)
    if not accepted:
        state.prev_delta = params.zeros_like()
        state.accepted.append(False)
        state.mse_history.append(mse)
        state.lr_history.append(state.lr)
        return params, acts, mse
    state.prev_delta = delta
    state.accepted.append(True)
    state.mse_history.append(cand_mse)
    state.lr_history.append(state.lr)
    return cand, cand_acts, cand_mse


def new_state(params, cfg):
    return TrainState(lr=cfg.lr0, prev_delta=params.zeros_like())


def train_epoch(params, state, cfg, inputs, targets):
    """One adaptive momentum step; returns ``(params, state)``.

    A rejected step returns the very same ``params`` object unchanged.
    """
    x, t = _check_batch(inputs, targets)
    acts = forward(params, x)
    mse = _mse(acts[-1], t)
    if not state.mse_history and np.isnan(state.initial_mse):
        state.initial_mse = mse
    params, _, _ = _step(params, state, cfg, x, t, acts, mse)
    return params, state


def train(cfg, tcfg, inputs, targets, params=None, progress=None):
    """Train until the MSE goal or the epoch cap; returns ``(params, state)``.

    ``progress``, if given, is called as ``progress(state)`` after each epoch.
    """
    x, t = _check_batch(inputs, targets)
    if params is None:
        params = init_params(cfg)
    counts = np.bincount(t.argmax(axis=1), minlength=t.shape[1])
    if (counts == 0).any():
        log.warning("classes without training samples: %s", np.flatnonzero(counts == 0).tolist())
    state = new_state(params, tcfg)
    acts = forward(params, x)
    mse = _mse(acts[-1], t)
    if not np.isfinite(mse):
        raise TrainingDiverged("non-finite MSE at initialization")
    state.initial_mse = mse
    while True:
        if mse <= tcfg.goal_mse:
            state.stop_reason = "goal reached"
            break
        if state.epoch >= tcfg.max_epochs:
            state.stop_reason = "max epochs"
            break
        params, acts, mse = _step(params, state, tcfg, x, t, acts, mse)
        if progress is not None:
            progress(state)
    return params, state
