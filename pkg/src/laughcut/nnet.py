"""Minimal float64 neural network kernel on numpy.

Layers are described by LayerSpec records; Network runs a tape-based
forward/backward with analytic gradients. Losses (triplet hinge,
softmax cross-entropy), bias-corrected Adam, a central-difference
gradient checker, and a byte-stable binary checkpoint format live
here too. Everything is deterministic given the construction seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import erf

_SQRT2 = np.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)
_L2_EPS = 1e-12

_NET_MAGIC = b"LCNET001"
_MAT_MAGIC = b"LCMAT001"

LAYER_KINDS = ("linear", "wn_linear", "gelu", "relu", "l2norm", "dropout")


@dataclass(frozen=True)
class LayerSpec:
    kind: str
    in_dim: int | None = None
    out_dim: int | None = None
    p: float | None = None     # dropout rate, only for kind="dropout"


def gelu(x: np.ndarray) -> np.ndarray:
    """Exact GELU: 0.5 * x * (1 + erf(x / sqrt(2)))."""
    x = np.asarray(x, dtype=np.float64)
    return 0.5 * x * (1.0 + erf(x / _SQRT2))


def gelu_grad(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    cdf = 0.5 * (1.0 + erf(x / _SQRT2))
    pdf = _INV_SQRT_2PI * np.exp(-0.5 * x * x)
    return cdf + x * pdf


def l2_normalize(v: np.ndarray) -> np.ndarray:
    """Row-wise L2 normalization with a 1e-12 small-norm guard."""
    v = np.asarray(v, dtype=np.float64)
    norms = np.linalg.norm(v, axis=-1, keepdims=True)
    return v / np.maximum(norms, _L2_EPS)


class Network:
    """A feedforward stack of LayerSpec layers with float64 params."""

    def __init__(self, specs: list[LayerSpec], seed: int = 0):
        self.specs = list(specs)
        self.seed = int(seed)
        init_rng = np.random.default_rng(
            np.random.SeedSequence(self.seed, spawn_key=(0,)))
        self._dropout_rng = np.random.default_rng(
            np.random.SeedSequence(self.seed, spawn_key=(1,)))
        self.params: list[dict[str, np.ndarray]] = []
        for i, spec in enumerate(self.specs):
            if spec.kind not in LAYER_KINDS:
                raise ValueError(f"layer {i}: unknown kind {spec.kind!r}")
            if spec.kind in ("linear", "wn_linear"):
                if not spec.in_dim or not spec.out_dim:
                    raise ValueError(f"layer {i}: {spec.kind} needs "
                                     "in_dim and out_dim")
                limit = np.sqrt(6.0 / spec.in_dim)
                if spec.kind == "linear":
                    self.params.append({
                        "W": init_rng.uniform(-limit, limit,
                                              (spec.in_dim, spec.out_dim)),
                        "b": np.zeros(spec.out_dim),
                    })
                else:
                    self.params.append({
                        "v": init_rng.uniform(-limit, limit,
                                              (spec.out_dim, spec.in_dim)),
                        "g": np.ones(spec.out_dim),
                        "b": np.zeros(spec.out_dim),
                    })
            elif spec.kind == "dropout":
                if spec.p is None or not (0.0 <= spec.p < 1.0):
                    raise ValueError(f"layer {i}: dropout needs p in [0, 1)")
                self.params.append({})
            else:
                self.params.append({})

    def num_params(self) -> int:
        return sum(p.size for layer in self.params for p in layer.values())

    def forward(self, x: np.ndarray, train: bool = False) \
            -> tuple[np.ndarray, list]:
        """Run the stack on a [batch, dim] input; returns (out, tape)."""
        h = np.asarray(x, dtype=np.float64)
        if h.ndim != 2:
            raise ValueError(f"expected [batch, dim] input, got {h.shape}")
        tape = []
        for spec, params in zip(self.specs, self.params):
            if spec.kind == "linear":
                tape.append(("linear", h))
                h = h @ params["W"] + params["b"]
            elif spec.kind == "wn_linear":
                v, g = params["v"], params["g"]
                norms = np.linalg.norm(v, axis=1)
                u = v / norms[:, None]
                w_hat = g[:, None] * u
                tape.append(("wn_linear", h, norms, u, w_hat))
                h = h @ w_hat.T + params["b"]
            elif spec.kind == "gelu":
                tape.append(("gelu", h))
                h = gelu(h)
            elif spec.kind == "relu":
                tape.append(("relu", h))
                h = np.maximum(h, 0.0)
            elif spec.kind == "l2norm":
                norms = np.linalg.norm(h, axis=1, keepdims=True)
                safe = np.maximum(norms, _L2_EPS)
                y = h / safe
                tape.append(("l2norm", norms, safe, y))
                h = y
            elif spec.kind == "dropout":
                if train and spec.p > 0.0:
                    mask = self._dropout_rng.random(h.shape) >= spec.p
                    scale = 1.0 / (1.0 - spec.p)
                    tape.append(("dropout", mask, scale))
                    h = h * mask * scale
                else:
                    tape.append(("dropout", None, 1.0))
        return h, tape

    def backward(self, tape: list, dy: np.ndarray) \
            -> tuple[np.ndarray, list[dict[str, np.ndarray]]]:
        """Backpropagate dy through a forward tape.

        Returns (dx, grads) with grads mirroring self.params.
        """
        grads: list[dict[str, np.ndarray]] = [{} for _ in self.specs]
        d = np.asarray(dy, dtype=np.float64)
        for i in range(len(self.specs) - 1, -1, -1):
            cache = tape[i]
            kind = cache[0]
            if kind == "linear":
                _, x = cache
                grads[i]["W"] = x.T @ d
                grads[i]["b"] = d.sum(axis=0)
                d = d @ self.params[i]["W"].T
            elif kind == "wn_linear":
                _, x, norms, u, w_hat = cache
                g = self.params[i]["g"]
                d_what = d.T @ x
                grads[i]["b"] = d.sum(axis=0)
                grads[i]["g"] = np.sum(d_what * u, axis=1)
                proj = grads[i]["g"][:, None] * u
                grads[i]["v"] = (g / norms)[:, None] * (d_what - proj)
                d = d @ w_hat
            elif kind == "gelu":
                _, x = cache
                d = d * gelu_grad(x)
            elif kind == "relu":
                _, x = cache
                d = d * (x > 0.0)
            elif kind == "l2norm":
                _, norms, safe, y = cache
                inner = np.sum(d * y, axis=1, keepdims=True)
                # Below the guard the map is linear scaling by 1/eps.
                guarded = norms < _L2_EPS
                d = np.where(guarded, d / _L2_EPS, (d - inner * y) / safe)
            elif kind == "dropout":
                _, mask, scale = cache
                if mask is not None:
                    d = d * mask * scale
        return d, grads


def triplet_loss(fa, fp, fn, alpha: float = 1.0):
    """Hinge triplet loss on squared Euclidean distances.

    loss = max(0, ||fa-fp||^2 - ||fa-fn||^2 + alpha). Accepts single
    vectors or [batch, dim] matrices; returns per-row losses and the
    exact subgradients (zero where the hinge is inactive, including
    at the kink).
    """
    single = np.asarray(fa).ndim == 1
    fa = np.atleast_2d(np.asarray(fa, dtype=np.float64))
    fp = np.atleast_2d(np.asarray(fp, dtype=np.float64))
    fn = np.atleast_2d(np.asarray(fn, dtype=np.float64))
    if fa.shape != fp.shape or fa.shape != fn.shape:
        raise ValueError("triplet inputs must share a shape")
    d_ap = np.sum((fa - fp) ** 2, axis=1)
    d_an = np.sum((fa - fn) ** 2, axis=1)
    margin = d_ap - d_an + alpha
    loss = np.maximum(margin, 0.0)
    active = (margin > 0.0)[:, None]
    dfa = 2.0 * (fn - fp) * active
    dfp = 2.0 * (fp - fa) * active
    dfn = 2.0 * (fa - fn) * active
    if single:
        return float(loss[0]), dfa[0], dfp[0], dfn[0]
    return loss, dfa, dfp, dfn


def softmax_ce(logits: np.ndarray, labels: np.ndarray):
    """Mean cross-entropy over a batch, with d(loss)/d(logits).

    Log-sum-exp is max-shifted for stability; the gradient is
    (softmax - onehot) / batch.
    """
    z = np.asarray(logits, dtype=np.float64)
    y = np.asarray(labels)
    if z.ndim != 2 or y.shape != (z.shape[0],):
        raise ValueError("logits must be [batch, classes] with one label "
                         "per row")
    if np.any(y < 0) or np.any(y >= z.shape[1]):
        raise ValueError("label out of range")
    shifted = z - z.max(axis=1, keepdims=True)
    log_norm = np.log(np.sum(np.exp(shifted), axis=1, keepdims=True))
    log_probs = shifted - log_norm
    batch = z.shape[0]
    loss = float(-log_probs[np.arange(batch), y].mean())
    grad = np.exp(log_probs)
    grad[np.arange(batch), y] -= 1.0
    return loss, grad / batch


class AdamState:
    """First/second moment buffers plus the shared step counter."""

    def __init__(self, network: Network):
        self.t = 0
        self.m = [{k: np.zeros_like(v) for k, v in layer.items()}
                  for layer in network.params]
        self.v = [{k: np.zeros_like(v) for k, v in layer.items()}
                  for layer in network.params]


def adam_step(network: Network, grads: list[dict], state: AdamState,
              lr: float, beta1: float = 0.9, beta2: float = 0.999,
              eps: float = 1e-8) -> None:
    """One bias-corrected Adam update, in place."""
    state.t += 1
    t = state.t
    for i, layer in enumerate(network.params):
        for name, param in layer.items():
            g = grads[i].get(name)
            if g is None:
                continue
            if not np.all(np.isfinite(g)):
                raise ValueError(f"non-finite gradient for layer{i}.{name}")
            m = state.m[i][name]
            v = state.v[i][name]
            m *= beta1
            m += (1.0 - beta1) * g
            v *= beta2
            v += (1.0 - beta2) * g * g
            m_hat = m / (1.0 - beta1 ** t)
            v_hat = v / (1.0 - beta2 ** t)
            param -= lr * m_hat / (np.sqrt(v_hat) + eps)


def grad_check(network: Network, loss_fn, h: float = 1e-5,
               sample_limit: int = 1000, seed: int = 0) -> float:
    """Max relative error between analytic and central-difference grads.

    loss_fn(network) must return (scalar_loss, grads) evaluated in a
    deterministic (eval-mode) pass. Networks above 1e5 parameters are
    subsampled to sample_limit random coordinates.
    """
    _, analytic = loss_fn(network)
    coords = []
    for i, layer in enumerate(network.params):
        for name, param in layer.items():
            for flat in range(param.size):
                coords.append((i, name, flat))
    if network.num_params() > 100_000 and len(coords) > sample_limit:
        rng = np.random.default_rng(seed)
        picks = rng.choice(len(coords), size=sample_limit, replace=False)
        coords = [coords[j] for j in picks]
    worst = 0.0
    for i, name, flat in coords:
        param = network.params[i][name]
        idx = np.unravel_index(flat, param.shape)
        orig = param[idx]
        param[idx] = orig + h
        loss_plus = loss_fn(network)[0]
        param[idx] = orig - h
        loss_minus = loss_fn(network)[0]
        param[idx] = orig
        numeric = (loss_plus - loss_minus) / (2.0 * h)
        a = float(analytic[i][name][idx])
        if abs(a) < 1e-8 and abs(numeric) < 1e-8:
            continue
        rel = abs(a - numeric) / max(abs(a), abs(numeric), 1e-4)
        worst = max(worst, rel)
    return worst


def _spec_to_dict(spec: LayerSpec) -> dict:
    return {"kind": spec.kind, "in_dim": spec.in_dim,
            "out_dim": spec.out_dim, "p": spec.p}


def save_network(network: Network, path: str | Path) -> None:
    """Byte-stable checkpoint: JSON header + little-endian f64 payload."""
    entries = []
    payload = bytearray()
    for i, layer in enumerate(network.params):
        for name in sorted(layer):
            arr = np.ascontiguousarray(layer[name], dtype="<f8")
            entries.append({"layer": i, "name": name,
                            "shape": list(arr.shape)})
            payload += arr.tobytes()
    header = json.dumps({
        "version": 1,
        "seed": network.seed,
        "specs": [_spec_to_dict(s) for s in network.specs],
        "params": entries,
    }, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_NET_MAGIC)
        fh.write(len(header).to_bytes(8, "little"))
        fh.write(header)
        fh.write(bytes(payload))


def load_network(path: str | Path) -> Network:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != _NET_MAGIC:
            raise ValueError(f"{path}: not a network checkpoint")
        header_len = int.from_bytes(fh.read(8), "little")
        header = json.loads(fh.read(header_len).decode("utf-8"))
        if header.get("version") != 1:
            raise ValueError(f"{path}: unsupported checkpoint version "
                             f"{header.get('version')!r}")
        specs = [LayerSpec(**s) for s in header["specs"]]
        net = Network(specs, seed=header.get("seed", 0))
        for entry in header["params"]:
            shape = tuple(entry["shape"])
            count = int(np.prod(shape)) if shape else 1
            raw = fh.read(count * 8)
            arr = np.frombuffer(raw, dtype="<f8").reshape(shape).copy()
            net.params[entry["layer"]][entry["name"]] = arr
    return net


def save_matrix(matrix: np.ndarray, path: str | Path) -> None:
    """Byte-stable 2-D float64 matrix container (e.g. embeddings)."""
    arr = np.ascontiguousarray(np.asarray(matrix, dtype="<f8"))
    if arr.ndim != 2:
        raise ValueError("save_matrix expects a 2-D array")
    header = json.dumps({"version": 1, "shape": list(arr.shape)},
                        separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_MAT_MAGIC)
        fh.write(len(header).to_bytes(8, "little"))
        fh.write(header)
        fh.write(arr.tobytes())


def load_matrix(path: str | Path) -> np.ndarray:
    with open(path, "rb") as fh:
        if fh.read(8) != _MAT_MAGIC:
            raise ValueError(f"{path}: not a matrix file")
        header_len = int.from_bytes(fh.read(8), "little")
        header = json.loads(fh.read(header_len).decode("utf-8"))
        if header.get("version") != 1:
            raise ValueError(f"{path}: unsupported matrix version")
        shape = tuple(header["shape"])
        raw = fh.read(int(np.prod(shape)) * 8)
    return np.frombuffer(raw, dtype="<f8").reshape(shape).copy()
