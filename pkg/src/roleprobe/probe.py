"""Binary subject/object probe: 64-hidden-unit two-level perceptron.

Forward pass is sigmoid(w2 . relu(W1 x + b1) + b2), read as the probability
that the input embedding fills the subject role. Training is plain
mini-batch gradient descent on binary cross-entropy with seeded per-epoch
shuffling; no adaptive optimizer state, so runs are bit-reproducible.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .errors import TrainingDivergedError

HIDDEN = 64
PROB_FLOOR = 1e-12
LOGIT_CLIP = 700.0  # exp stays inside float64 range


@dataclass
class ProbeModel:
    W1: np.ndarray  # (HIDDEN, d)
    b1: np.ndarray  # (HIDDEN,)
    w2: np.ndarray  # (HIDDEN,)
    b2: float
    seed: int
    layer_name: str

    @property
    def dim(self) -> int:
        return self.W1.shape[1]

    def copy(self) -> "ProbeModel":
        return ProbeModel(
            W1=self.W1.copy(),
            b1=self.b1.copy(),
            w2=self.w2.copy(),
            b2=float(self.b2),
            seed=self.seed,
            layer_name=self.layer_name,
        )


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 20
    learning_rate: float = 0.05
    batch_size: int = 32
    seed: int = 0


def init_probe(dim: int, seed: int, layer_name: str = "") -> ProbeModel:
    """Uniform(-a, a) weights with a = sqrt(6 / (fan_in + fan_out)); zero biases."""
    rng = np.random.default_rng(seed)
    a1 = np.sqrt(6.0 / (dim + HIDDEN))
    a2 = np.sqrt(6.0 / (HIDDEN + 1))
    return ProbeModel(
        W1=rng.uniform(-a1, a1, size=(HIDDEN, dim)),
        b1=np.zeros(HIDDEN),
        w2=rng.uniform(-a2, a2, size=HIDDEN),
        b2=0.0,
        seed=seed,
        layer_name=layer_name,
    )


def _sigmoid(z: np.ndarray) -> np.ndarray:
    p = 1.0 / (1.0 + np.exp(-np.clip(z, -LOGIT_CLIP, LOGIT_CLIP)))
    return np.clip(p, PROB_FLOOR, 1.0 - PROB_FLOOR)


def forward(model: ProbeModel, x: np.ndarray) -> float:
    """Subject probability for one embedding vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.dim,):
        raise ValueError(f"expected vector of shape ({model.dim},), got {x.shape}")
    h = np.maximum(model.W1 @ x + model.b1, 0.0)
    return float(_sigmoid(np.array([model.w2 @ h + model.b2]))[0])


def predict_batch(model: ProbeModel, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(probabilities, hard labels); subject (1) iff p strictly > 0.5."""
    xs = np.asarray(xs, dtype=np.float64)
    if xs.size == 0:
        return np.zeros(0), np.zeros(0, dtype=np.int64)
    if xs.ndim != 2 or xs.shape[1] != model.dim:
        raise ValueError(f"expected batch of shape (n, {model.dim}), got {xs.shape}")
    h = np.maximum(xs @ model.W1.T + model.b1, 0.0)
    probs = _sigmoid(h @ model.w2 + model.b2)
    return probs, (probs > 0.5).astype(np.int64)


def bce_loss(probs: np.ndarray, labels: np.ndarray) -> float:
    return float(-np.mean(labels * np.log(probs) + (1 - labels) * np.log(1 - probs)))


def _batch_gradients(model, X, y):
    """Mean-over-batch gradients of binary cross-entropy.

    Overflow is not a crash path: non-finite losses surface as
    TrainingDivergedError in train(), so numpy warnings stay quiet here.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        Z1 = X @ model.W1.T + model.b1
        H = np.maximum(Z1, 0.0)
        probs = _sigmoid(H @ model.w2 + model.b2)
        loss = bce_loss(probs, y)
        dlogit = (probs - y) / len(y)
        db2 = float(np.sum(dlogit))
        dw2 = H.T @ dlogit
        dH = np.outer(dlogit, model.w2)
        dZ1 = dH * (Z1 > 0)
        dW1 = dZ1.T @ X
        db1 = dZ1.sum(axis=0)
    return loss, dW1, db1, dw2, db2


def train(
    model: ProbeModel, X: np.ndarray, y: np.ndarray, cfg: TrainConfig
) -> tuple[ProbeModel, list[float]]:
    """Train a copy of the model; returns it plus per-epoch mean batch loss."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(X) == 0:
        raise ValueError("training data is empty")
    if X.ndim != 2 or X.shape[1] != model.dim:
        raise ValueError(f"expected data of shape (n, {model.dim}), got {X.shape}")
    trained = model.copy()
    rng = np.random.default_rng(cfg.seed)
    history: list[float] = []
    n = len(X)
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        epoch_losses = []
        for batch_no, start in enumerate(range(0, n, cfg.batch_size)):
            idx = order[start : start + cfg.batch_size]
            loss, dW1, db1, dw2, db2 = _batch_gradients(trained, X[idx], y[idx])
            if not np.isfinite(loss):
                raise TrainingDivergedError(epoch=epoch, batch=batch_no)
            lr = cfg.learning_rate
            trained.W1 -= lr * dW1
            trained.b1 -= lr * db1
            trained.w2 -= lr * dw2
            trained.b2 -= lr * db2
            epoch_losses.append(loss)
        history.append(float(np.mean(epoch_losses)))
    return trained, history


def gradient_check(model: ProbeModel, x: np.ndarray, label: float, eps: float) -> float:
    """Max relative error between analytic and central-difference gradients.

    Relative error per parameter is |a - n| / max(1e-8, |a| + |n|). Each
    perturbed parameter touches exactly one hidden pre-activation (W1, b1)
    or only the output logit (w2, b2), so every perturbed loss evaluates in
    closed form and the differences vectorize over all parameters at once.
    """
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    y = float(label)
    _, dW1, db1, dw2, db2 = _batch_gradients(model, x.reshape(1, -1), np.array([y]))
    analytic = np.concatenate([dW1.ravel(), db1, dw2, [db2]])

    z1 = model.W1 @ x + model.b1
    h = np.maximum(z1, 0.0)
    logit = float(model.w2 @ h + model.b2)

    def loss_at(logits: np.ndarray) -> np.ndarray:
        probs = _sigmoid(logits)
        return -(y * np.log(probs) + (1.0 - y) * np.log(1.0 - probs))

    def unit_shift_losses(delta) -> np.ndarray:
        # delta broadcasts against (HIDDEN, 1): additive shift of one z1 entry
        h_new = np.maximum(z1[:, None] + delta, 0.0)
        return loss_at(logit + model.w2[:, None] * (h_new - h[:, None]))

    num_W1 = (unit_shift_losses(eps * x) - unit_shift_losses(-eps * x)) / (2.0 * eps)
    num_b1 = (unit_shift_losses(eps) - unit_shift_losses(-eps)) / (2.0 * eps)
    num_w2 = (loss_at(logit + eps * h) - loss_at(logit - eps * h)) / (2.0 * eps)
    num_b2 = (loss_at(np.array(logit + eps)) - loss_at(np.array(logit - eps))) / (2.0 * eps)
    numeric = np.concatenate([num_W1.ravel(), num_b1.ravel(), num_w2, [float(num_b2)]])

    denom = np.maximum(1e-8, np.abs(analytic) + np.abs(numeric))
    return float(np.max(np.abs(analytic - numeric) / denom))


def save_probe(model: ProbeModel, cfg: TrainConfig, path_prefix: str | Path) -> None:
    """Write {prefix}.json (manifest) and {prefix}.bin (float32 parameters).

    Blob layout: W1 row-major, then b1, w2, b2, all little-endian float32.
    """
    prefix = Path(path_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    manifest = {
        "layer_name": model.layer_name,
        "d": model.dim,
        "seed": model.seed,
        "cfg": asdict(cfg),
    }
    prefix.with_suffix(".json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    blob = np.concatenate(
        [model.W1.ravel(), model.b1, model.w2, [model.b2]]
    ).astype("<f4")
    prefix.with_suffix(".bin").write_bytes(blob.tobytes())


def load_probe(path_prefix: str | Path) -> tuple[ProbeModel, TrainConfig]:
    prefix = Path(path_prefix)
    manifest = json.loads(prefix.with_suffix(".json").read_text(encoding="utf-8"))
    d = manifest["d"]
    blob = np.frombuffer(prefix.with_suffix(".bin").read_bytes(), dtype="<f4")
    expected = HIDDEN * d + HIDDEN + HIDDEN + 1
    if blob.size != expected:
        raise ValueError(
            f"probe blob has {blob.size} floats, expected {expected} for d={d}"
        )
    W1 = blob[: HIDDEN * d].reshape(HIDDEN, d).astype(np.float64)
    b1 = blob[HIDDEN * d : HIDDEN * d + HIDDEN].astype(np.float64)
    w2 = blob[HIDDEN * d + HIDDEN : HIDDEN * d + 2 * HIDDEN].astype(np.float64)
    b2 = float(blob[-1])
    model = ProbeModel(
        W1=W1,
        b1=b1,
        w2=w2,
        b2=b2,
        seed=manifest["seed"],
        layer_name=manifest["layer_name"],
    )
    return model, TrainConfig(**manifest["cfg"])
