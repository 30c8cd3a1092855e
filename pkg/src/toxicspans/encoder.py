"""A small transformer encoder for token classification, in plain numpy.

Blocks follow the BERT arrangement (post-norm residuals, GELU feed-forward,
learned positions). The classification head is multi-depth: for every
token it concatenates the hidden outputs of the blocks listed in
``EncoderConfig.depth_set`` (always in ascending block order), applies
dropout and a linear layer. Block 0 is the embedding output.

Gradients are computed by hand in :func:`backward`; the test suite checks
them against central finite differences.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Dict

import numpy as np
from scipy.special import erf

from .loss import smoothed_ce_with_grad

__all__ = [
    "EncoderConfig",
    "Parameters",
    "backward",
    "forward",
    "init_parameters",
    "parameter_shapes",
    "predict_labels",
]

Parameters = Dict[str, np.ndarray]

LN_EPS = 1e-12
INIT_STD = 0.02
BLOCK_PARAMS = (
    "wq", "bq", "wk", "bk", "wv", "bv", "wo", "bo",
    "ln1_g", "ln1_b", "w1", "b1", "w2", "b2", "ln2_g", "ln2_b",
)


@dataclass(frozen=True)
class EncoderConfig:
    vocab_size: int
    hidden_dim: int = 32
    num_blocks: int = 3
    num_heads: int = 4
    ff_dim: int = 0
    max_len: int = 128
    depth_set: tuple[int, ...] = field(default=())
    dropout_rate: float = 0.25
    num_classes: int = 2

    def __post_init__(self) -> None:
        if not self.ff_dim:
            object.__setattr__(self, "ff_dim", 4 * self.hidden_dim)
        depth = self.depth_set or (self.num_blocks,)
        object.__setattr__(self, "depth_set", tuple(sorted(set(int(k) for k in depth))))
        problems = []
        if self.vocab_size < 1:
            problems.append("vocab_size must be positive")
        if self.hidden_dim < 1 or self.num_heads < 1 or self.hidden_dim % self.num_heads:
            problems.append(f"num_heads={self.num_heads} must divide hidden_dim={self.hidden_dim}")
        if self.num_blocks < 1:
            problems.append("num_blocks must be at least 1")
        if self.max_len < 1:
            problems.append("max_len must be positive")
        bad = [k for k in self.depth_set if not 0 <= k <= self.num_blocks]
        if bad:
            problems.append(f"depth_set entries {bad} outside 1..{self.num_blocks} (0 = embeddings)")
        if not 0.0 <= self.dropout_rate < 1.0:
            problems.append(f"dropout_rate must lie in [0, 1), got {self.dropout_rate}")
        if self.num_classes < 2:
            problems.append("num_classes must be at least 2")
        if problems:
            raise ValueError("; ".join(problems))

    @classmethod
    def last_n(cls, n: int, **kwargs) -> EncoderConfig:
        """Config whose head reads the top ``n`` blocks."""
        blocks = kwargs.get("num_blocks", cls.__dataclass_fields__["num_blocks"].default)
        if not 1 <= n <= blocks:
            raise ValueError(f"last-{n} needs 1 <= n <= num_blocks={blocks}")
        return cls(depth_set=tuple(range(blocks - n + 1, blocks + 1)), **kwargs)

    @property
    def head_dim(self) -> int:
        """Input width of the classifier: one hidden vector per selected block."""
        return len(self.depth_set) * self.hidden_dim

    def to_dict(self) -> dict:
        d = asdict(self)
        d["depth_set"] = list(self.depth_set)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> EncoderConfig:
        d = dict(d)
        if "depth_set" in d:
            d["depth_set"] = tuple(d["depth_set"])
        return cls(**d)


def parameter_shapes(config: EncoderConfig) -> dict[str, tuple[int, ...]]:
    d, f = config.hidden_dim, config.ff_dim
    shapes = {"tok_emb": (config.vocab_size, d), "pos_emb": (config.max_len, d)}
    per_block = {
        "wq": (d, d), "bq": (d,), "wk": (d, d), "bk": (d,),
        "wv": (d, d), "bv": (d,), "wo": (d, d), "bo": (d,),
        "ln1_g": (d,), "ln1_b": (d,),
        "w1": (d, f), "b1": (f,), "w2": (f, d), "b2": (d,),
        "ln2_g": (d,), "ln2_b": (d,),
    }
    for i in range(1, config.num_blocks + 1):
        for name in BLOCK_PARAMS:
            shapes[f"block{i}.{name}"] = per_block[name]
    shapes["cls_w"] = (config.head_dim, config.num_classes)
    shapes["cls_b"] = (config.num_classes,)
    return shapes


def init_parameters(config: EncoderConfig, seed: int, dtype=np.float32) -> Parameters:
    """Weights ~ N(0, 0.02), biases 0, layer-norm gains 1."""
    rng = np.random.default_rng(seed)
    params: Parameters = {}
    for name, shape in parameter_shapes(config).items():
        leaf = name.rsplit(".", 1)[-1]
        if leaf.endswith("_g"):
            value = np.ones(shape)
        elif leaf.startswith("b") or leaf.endswith("_b"):
            value = np.zeros(shape)
        else:
            value = rng.normal(0.0, INIT_STD, size=shape)
        params[name] = value.astype(dtype)
    return params


# -- building blocks ---------------------------------------------------------

def _gelu(x):
    cdf = 0.5 * (1.0 + erf(x / math.sqrt(2.0)))
    return x * cdf, cdf


def _gelu_grad(x, cdf):
    return cdf + x * np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def _layer_norm(x, gain, bias):
    mu = x.mean(axis=-1, keepdims=True)
    xc = x - mu
    rstd = 1.0 / np.sqrt((xc * xc).mean(axis=-1, keepdims=True) + LN_EPS)
    xhat = xc * rstd
    return xhat * gain + bias, (xhat, rstd, gain)


def _layer_norm_back(dy, cache):
    xhat, rstd, gain = cache
    dgain = (dy * xhat).sum(axis=(0, 1))
    dbias = dy.sum(axis=(0, 1))
    dxhat = dy * gain
    dx = rstd * (
        dxhat
        - dxhat.mean(axis=-1, keepdims=True)
        - xhat * (dxhat * xhat).mean(axis=-1, keepdims=True)
    )
    return dx, dgain, dbias


def _masked_softmax(scores, key_mask):
    # key_mask broadcasts as (B, 1, 1, T); a row with no visible key is all zeros
    s = np.where(key_mask, scores, -np.inf)
    top = s.max(axis=-1, keepdims=True)
    top = np.where(np.isfinite(top), top, 0.0)
    e = np.exp(s - top)
    total = e.sum(axis=-1, keepdims=True)
    return e / np.where(total == 0, 1.0, total)


def _split_heads(x, heads):
    b, t, d = x.shape
    return x.reshape(b, t, heads, d // heads).transpose(0, 2, 1, 3)


def _merge_heads(x):
    b, h, t, dh = x.shape
    return x.transpose(0, 2, 1, 3).reshape(b, t, h * dh)


def _block_forward(x, p, key_mask, heads):
    scale = 1.0 / math.sqrt(x.shape[-1] // heads)
    q = _split_heads(x @ p["wq"] + p["bq"], heads)
    k = _split_heads(x @ p["wk"] + p["bk"], heads)
    v = _split_heads(x @ p["wv"] + p["bv"], heads)
    probs = _masked_softmax((q @ k.swapaxes(-1, -2)) * scale, key_mask)
    ctx = _merge_heads(probs @ v)
    h1, ln1 = _layer_norm(x + ctx @ p["wo"] + p["bo"], p["ln1_g"], p["ln1_b"])
    u = h1 @ p["w1"] + p["b1"]
    act, cdf = _gelu(u)
    h2, ln2 = _layer_norm(h1 + act @ p["w2"] + p["b2"], p["ln2_g"], p["ln2_b"])
    cache = dict(x=x, q=q, k=k, v=v, probs=probs, ctx=ctx, h1=h1, u=u, act=act, cdf=cdf,
                 ln1=ln1, ln2=ln2, scale=scale)
    return h2, cache


def _block_backward(dh2, p, c, heads):
    g = {}
    dr2, g["ln2_g"], g["ln2_b"] = _layer_norm_back(dh2, c["ln2"])
    g["w2"] = np.einsum("btf,btd->fd", c["act"], dr2)
    g["b2"] = dr2.sum(axis=(0, 1))
    du = (dr2 @ p["w2"].T) * _gelu_grad(c["u"], c["cdf"])
    g["w1"] = np.einsum("btd,btf->df", c["h1"], du)
    g["b1"] = du.sum(axis=(0, 1))
    dh1 = dr2 + du @ p["w1"].T

    dr1, g["ln1_g"], g["ln1_b"] = _layer_norm_back(dh1, c["ln1"])
    g["wo"] = np.einsum("bti,btj->ij", c["ctx"], dr1)
    g["bo"] = dr1.sum(axis=(0, 1))
    dctx = _split_heads(dr1 @ p["wo"].T, heads)
    probs = c["probs"]
    dprobs = dctx @ c["v"].swapaxes(-1, -2)
    dv = probs.swapaxes(-1, -2) @ dctx
    dscores = probs * (dprobs - (dprobs * probs).sum(axis=-1, keepdims=True)) * c["scale"]
    dq = _merge_heads(dscores @ c["k"])
    dk = _merge_heads(dscores.swapaxes(-1, -2) @ c["q"])
    dv = _merge_heads(dv)

    x = c["x"]
    dx = dr1.copy()
    for name, dproj in (("q", dq), ("k", dk), ("v", dv)):
        g["w" + name] = np.einsum("bti,btj->ij", x, dproj)
        g["b" + name] = dproj.sum(axis=(0, 1))
        dx += dproj @ p["w" + name].T
    return dx, g


def _block_params(params: Parameters, i: int) -> dict[str, np.ndarray]:
    return {name: params[f"block{i}.{name}"] for name in BLOCK_PARAMS}


def _check_inputs(config: EncoderConfig, token_ids, mask):
    token_ids = np.asarray(token_ids)
    if token_ids.ndim != 2:
        raise ValueError(f"token_ids must be batch x length, got shape {token_ids.shape}")
    if token_ids.shape[1] > config.max_len:
        raise ValueError(f"sequence length {token_ids.shape[1]} exceeds max_len {config.max_len}")
    if token_ids.size and (token_ids.min() < 0 or token_ids.max() >= config.vocab_size):
        raise ValueError(f"token id outside vocabulary of size {config.vocab_size}")
    if mask is None:
        mask = np.ones(token_ids.shape, dtype=bool)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != token_ids.shape:
        raise ValueError(f"mask shape {mask.shape} != token_ids shape {token_ids.shape}")
    return token_ids, mask


def _forward(params, config, token_ids, mask, train_mode, seed):
    token_ids, mask = _check_inputs(config, token_ids, mask)
    t = token_ids.shape[1]
    key_mask = mask[:, None, None, :]
    x = params["tok_emb"][token_ids] + params["pos_emb"][:t]
    hidden = [x]
    caches = []
    for i in range(1, config.num_blocks + 1):
        x, cache = _block_forward(x, _block_params(params, i), key_mask, config.num_heads)
        hidden.append(x)
        caches.append(cache)

    feats = np.concatenate([hidden[k] for k in config.depth_set], axis=-1)
    keep = None
    p = config.dropout_rate
    if train_mode and p > 0:
        rng = np.random.default_rng(seed)
        keep = (rng.random(feats.shape) >= p).astype(feats.dtype) / feats.dtype.type(1.0 - p)
        feats = feats * keep
    logits = feats @ params["cls_w"] + params["cls_b"]
    state = dict(token_ids=token_ids, mask=mask, feats=feats, keep=keep, caches=caches)
    return logits, tuple(hidden), state


def forward(
    params: Parameters,
    config: EncoderConfig,
    token_ids,
    mask=None,
    train_mode: bool = False,
    seed: int = 0,
) -> tuple[np.ndarray, tuple[np.ndarray, ...]]:
    """Return ``(logits, hidden)``.

    ``logits`` is ``(batch, T, num_classes)``. ``hidden`` holds the
    embedding output followed by each block's output, ``num_blocks + 1``
    arrays of shape ``(batch, T, hidden_dim)``. Dropout on the head
    features is only applied with ``train_mode=True`` and is seeded.
    """
    logits, hidden, _ = _forward(params, config, token_ids, mask, train_mode, seed)
    return logits, hidden


def backward(
    params: Parameters,
    config: EncoderConfig,
    token_ids,
    mask,
    labels,
    epsilon: float = 0.0,
    train_mode: bool = True,
    seed: int = 0,
) -> tuple[float, Parameters]:
    """Loss and exact gradients of the smoothed token cross-entropy.

    Masked positions are padding: they are hidden from attention and
    carry no loss.
    """
    logits, hidden, state = _forward(params, config, token_ids, mask, train_mode, seed)
    loss, dlogits = smoothed_ce_with_grad(logits, np.asarray(labels), state["mask"], epsilon)
    grads: Parameters = {}

    feats = state["feats"]
    grads["cls_w"] = np.einsum("bti,btc->ic", feats, dlogits)
    grads["cls_b"] = dlogits.sum(axis=(0, 1))
    dfeats = dlogits @ params["cls_w"].T
    if state["keep"] is not None:
        dfeats = dfeats * state["keep"]

    d = config.hidden_dim
    dhidden = [np.zeros_like(hidden[0]) for _ in hidden]
    for slot, k in enumerate(config.depth_set):
        dhidden[k] += dfeats[..., slot * d:(slot + 1) * d]

    for i in range(config.num_blocks, 0, -1):
        dx, g = _block_backward(
            dhidden[i], _block_params(params, i), state["caches"][i - 1], config.num_heads
        )
        dhidden[i - 1] += dx
        for name, value in g.items():
            grads[f"block{i}.{name}"] = value

    dx0 = dhidden[0]
    token_ids = state["token_ids"]
    grads["tok_emb"] = np.zeros_like(params["tok_emb"])
    np.add.at(grads["tok_emb"], token_ids.ravel(), dx0.reshape(-1, d))
    grads["pos_emb"] = np.zeros_like(params["pos_emb"])
    grads["pos_emb"][: token_ids.shape[1]] = dx0.sum(axis=0)
    return loss, {name: grads[name] for name in params}


def predict_labels(params: Parameters, config: EncoderConfig, token_ids, mask=None) -> np.ndarray:
    """Argmax label per token, ties going to class 0; masked positions are -1."""
    logits, _ = forward(params, config, token_ids, mask, train_mode=False)
    _, mask = _check_inputs(config, token_ids, mask)
    labels = logits.argmax(axis=-1).astype(np.int64)
    labels[~mask] = -1
    return labels
