"""Fully connected Q-network in plain numpy.

Fixed topology (affine -> ReLU repeated, final affine, no output
activation) with manual backprop, Huber loss on the taken action's
Q-value, global gradient-norm clipping and Adam. Parameters default to
float32; tests may build float64 twins for tighter oracle tolerances.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

DEFAULT_DIMS = (13, 256, 256, 256, 6)

CHECKPOINT_MAGIC = b"JQN1"
ADAM_MAGIC = b"ADM1"
CHECKPOINT_VERSION = 1


class CheckpointFormatError(ValueError):
    """Raised on malformed checkpoint bytes; carries the byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


@dataclass
class Network:
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple([self.weights[0].shape[0]] + [w.shape[1] for w in self.weights])

    @property
    def dtype(self) -> np.dtype:
        return self.weights[0].dtype

    def copy(self) -> "Network":
        return Network([w.copy() for w in self.weights], [b.copy() for b in self.biases])


@dataclass
class Gradients:
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def flat_arrays(self) -> list[np.ndarray]:
        return self.weights + self.biases


@dataclass
class AdamState:
    m_weights: list[np.ndarray]
    v_weights: list[np.ndarray]
    m_biases: list[np.ndarray]
    v_biases: list[np.ndarray]
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_network(cls, net: Network) -> "AdamState":
        return cls(
            m_weights=[np.zeros_like(w) for w in net.weights],
            v_weights=[np.zeros_like(w) for w in net.weights],
            m_biases=[np.zeros_like(b) for b in net.biases],
            v_biases=[np.zeros_like(b) for b in net.biases],
        )


def init_params(seed: int, dims: tuple[int, ...] = DEFAULT_DIMS,
                dtype: type = np.float32) -> Network:
    """Fan-in scaled uniform weights (bound sqrt(6/fan_in)), zero biases."""
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(dims, dims[1:]):
        bound = np.sqrt(6.0 / fan_in)
        weights.append(rng.uniform(-bound, bound, (fan_in, fan_out)).astype(dtype))
        biases.append(np.zeros(fan_out, dtype=dtype))
    return Network(weights, biases)


def forward(net: Network, obs_batch: np.ndarray) -> np.ndarray:
    """Q-values for a batch; accepts a single observation as a 1-D array."""
    x = np.asarray(obs_batch, dtype=net.dtype)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.shape[1] != net.weights[0].shape[0]:
        raise ValueError(f"input width {x.shape[1]} != network input {net.weights[0].shape[0]}")
    h = x
    last = len(net.weights) - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        h = h @ w + b
        if i != last:
            np.maximum(h, 0.0, out=h)
    return h[0] if single else h


def huber_loss(pred: np.ndarray, target: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Huber loss (delta=1) and its derivative w.r.t. pred, elementwise."""
    e = np.asarray(pred) - np.asarray(target)
    small = np.abs(e) <= 1.0
    loss = np.where(small, 0.5 * e * e, np.abs(e) - 0.5)
    grad = np.clip(e, -1.0, 1.0)
    return loss, grad


def backward(net: Network, obs_batch: np.ndarray, actions: np.ndarray,
             targets: np.ndarray) -> tuple[float, Gradients]:
    """Mean Huber loss over the batch and its gradients.

    Only the Q-value of each transition's action receives upstream
    gradient; all other outputs get zero.
    """
    x = np.asarray(obs_batch, dtype=net.dtype)
    actions = np.asarray(actions, dtype=np.int64)
    targets = np.asarray(targets, dtype=net.dtype)
    batch = x.shape[0]
    if actions.shape != (batch,) or targets.shape != (batch,):
        raise ValueError("actions/targets must be 1-D of batch length")

    # Forward pass, caching post-activation layer inputs.
    activations = [x]
    h = x
    last = len(net.weights) - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        h = h @ w + b
        if i != last:
            np.maximum(h, 0.0, out=h)
        activations.append(h)

    q_taken = h[np.arange(batch), actions]
    losses, dq = huber_loss(q_taken, targets)
    mean_loss = float(np.mean(losses.astype(np.float64)))

    # Upstream gradient of the mean loss, nonzero only at taken actions.
    delta = np.zeros_like(h)
    delta[np.arange(batch), actions] = dq / batch

    grad_w = [np.empty(0)] * len(net.weights)
    grad_b = [np.empty(0)] * len(net.biases)
    for i in range(last, -1, -1):
        grad_w[i] = activations[i].T @ delta
        grad_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = delta @ net.weights[i].T
            delta *= activations[i] > 0  # ReLU mask
    return mean_loss, Gradients(grad_w, grad_b)


def global_norm(grads: Gradients) -> float:
    total = 0.0
    for a in grads.flat_arrays():
        total += float(np.sum(a.astype(np.float64) ** 2))
    return float(np.sqrt(total))


def clip_global_norm(grads: Gradients, max_norm: float = 10.0) -> Gradients:
    """Rescale all gradients jointly so their L2 norm stays under max_norm."""
    norm = global_norm(grads)
    if norm <= max_norm or norm == 0.0:
        return grads
    scale = max_norm / norm
    return Gradients([w * scale for w in grads.weights],
                     [b * scale for b in grads.biases])


def adam_step(net: Network, adam: AdamState, grads: Gradients, lr: float = 5e-5) -> None:
    """Bias-corrected Adam update, in place on the network and state."""
    adam.t += 1
    bc1 = 1.0 - adam.beta1 ** adam.t
    bc2 = 1.0 - adam.beta2 ** adam.t
    for params, gs, ms, vs in (
        (net.weights, grads.weights, adam.m_weights, adam.v_weights),
        (net.biases, grads.biases, adam.m_biases, adam.v_biases),
    ):
        for p, g, m, v in zip(params, gs, ms, vs):
            m *= adam.beta1
            m += (1.0 - adam.beta1) * g
            v *= adam.beta2
            v += (1.0 - adam.beta2) * g * g
            p -= lr * (m / bc1) / (np.sqrt(v / bc2) + adam.eps)


# ---------------------------------------------------------------------------
# Checkpoint serialization
#
# "JQN1" | u32 version | u32 layer count | per layer:
#   u32 rows | u32 cols | rows*cols f32 weights (row-major) | cols f32 biases
# optionally followed by "ADM1" | u64 t | first moments then second moments,
# each in the same per-layer layout. All integers and floats little-endian.
# ---------------------------------------------------------------------------


def _pack_layers(weights: list[np.ndarray], biases: list[np.ndarray]) -> bytes:
    out = [struct.pack("<I", len(weights))]
    for w, b in zip(weights, biases):
        rows, cols = w.shape
        out.append(struct.pack("<II", rows, cols))
        out.append(np.ascontiguousarray(w, dtype="<f4").tobytes())
        out.append(np.ascontiguousarray(b, dtype="<f4").tobytes())
    return b"".join(out)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.offset = 0

    def take(self, n: int, what: str) -> bytes:
        if self.offset + n > len(self.data):
            raise CheckpointFormatError(f"truncated checkpoint while reading {what}", self.offset)
        chunk = self.data[self.offset:self.offset + n]
        self.offset += n
        return chunk

    def u32(self, what: str) -> int:
        return struct.unpack("<I", self.take(4, what))[0]

    def u64(self, what: str) -> int:
        return struct.unpack("<Q", self.take(8, what))[0]


def _unpack_layers(r: _Reader) -> tuple[list[np.ndarray], list[np.ndarray]]:
    n_layers = r.u32("layer count")
    if n_layers == 0 or n_layers > 1024:
        raise CheckpointFormatError(f"implausible layer count {n_layers}", r.offset - 4)
    weights, biases = [], []
    for i in range(n_layers):
        rows = r.u32(f"layer {i} rows")
        cols = r.u32(f"layer {i} cols")
        if rows == 0 or cols == 0:
            raise CheckpointFormatError(f"layer {i} has zero dimension", r.offset - 8)
        w = np.frombuffer(r.take(4 * rows * cols, f"layer {i} weights"), dtype="<f4")
        b = np.frombuffer(r.take(4 * cols, f"layer {i} biases"), dtype="<f4")
        weights.append(w.reshape(rows, cols).copy())
        biases.append(b.copy())
    for prev, cur in zip(weights, weights[1:]):
        if prev.shape[1] != cur.shape[0]:
            raise CheckpointFormatError(
                f"layer shape chain broken: {prev.shape} -> {cur.shape}", r.offset)
    return weights, biases


def save_checkpoint(net: Network, path: str, adam: AdamState | None = None) -> None:
    blob = [CHECKPOINT_MAGIC, struct.pack("<I", CHECKPOINT_VERSION),
            _pack_layers(net.weights, net.biases)]
    if adam is not None:
        blob.append(ADAM_MAGIC)
        blob.append(struct.pack("<Q", adam.t))
        blob.append(_pack_layers(adam.m_weights, adam.m_biases))
        blob.append(_pack_layers(adam.v_weights, adam.v_biases))
    with open(path, "wb") as f:
        f.write(b"".join(blob))


def load_checkpoint(path: str) -> tuple[Network, AdamState | None]:
    with open(path, "rb") as f:
        r = _Reader(f.read())
    if r.take(4, "magic") != CHECKPOINT_MAGIC:
        raise CheckpointFormatError("bad magic bytes", 0)
    version = r.u32("version")
    if version != CHECKPOINT_VERSION:
        raise CheckpointFormatError(f"unsupported version {version}", 4)
    net = Network(*_unpack_layers(r))
    adam = None
    if r.offset < len(r.data):
        if r.take(4, "adam magic") != ADAM_MAGIC:
            raise CheckpointFormatError("bad trailing block tag", r.offset - 4)
        t = r.u64("adam t")
        m_w, m_b = _unpack_layers(r)
        v_w, v_b = _unpack_layers(r)
        adam = AdamState(m_w, v_w, m_b, v_b, t=t)
    if r.offset != len(r.data):
        raise CheckpointFormatError("trailing bytes after checkpoint", r.offset)
    return net, adam
