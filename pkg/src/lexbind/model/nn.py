"""Primitive layers with explicit forward/backward pairs.

Shapes follow [batch, time, feature]; attention internals use
[batch, head, time, head_dim].  Each forward returns its output plus an
opaque cache consumed by the matching backward.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

NEG_INF = -np.inf
LN_EPS = 1e-5


def sinusoid_positions(max_len: int, dim: int, dtype) -> np.ndarray:
    """Fixed sinusoidal position table: sin on even dims, cos on odd dims."""
    pos = np.arange(max_len, dtype=np.float64)[:, None]
    i = np.arange(0, dim, 2, dtype=np.float64)[None, :]
    angles = pos / np.power(10000.0, i / dim)
    table = np.zeros((max_len, dim), dtype=np.float64)
    table[:, 0::2] = np.sin(angles)
    table[:, 1::2] = np.cos(angles[:, : table[:, 1::2].shape[1]])
    return table.astype(dtype)


def dropout_fwd(x, rate: float, rng: Optional[np.random.Generator], train: bool):
    if not train or rate <= 0.0:
        return x, None
    keep = 1.0 - rate
    mask = (rng.random(x.shape) < keep).astype(x.dtype) / keep
    return x * mask, mask


def dropout_bwd(dy, mask):
    if mask is None:
        return dy
    return dy * mask


def layernorm_fwd(x, gain, bias):
    mu = x.mean(-1, keepdims=True)
    xc = x - mu
    var = (xc * xc).mean(-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + LN_EPS)
    xhat = xc * inv
    return gain * xhat + bias, (xhat, inv, gain)


def layernorm_bwd(dy, cache):
    xhat, inv, gain = cache
    dgain = (dy * xhat).reshape(-1, xhat.shape[-1]).sum(0)
    dbias = dy.reshape(-1, xhat.shape[-1]).sum(0)
    dxhat = dy * gain
    dx = inv * (
        dxhat
        - dxhat.mean(-1, keepdims=True)
        - xhat * (dxhat * xhat).mean(-1, keepdims=True)
    )
    return dx, dgain, dbias


def softmax_last(x):
    m = x.max(-1, keepdims=True)
    # rows that are fully masked would yield -inf max; callers guarantee at
    # least one unmasked key per row
    e = np.exp(x - m)
    return e / e.sum(-1, keepdims=True)


def _split_heads(x, heads: int):
    b, t, d = x.shape
    return x.reshape(b, t, heads, d // heads).transpose(0, 2, 1, 3)


def _merge_heads(x):
    b, h, t, dk = x.shape
    return x.transpose(0, 2, 1, 3).reshape(b, t, h * dk)


def attention_fwd(
    xq,
    xkv,
    p: dict,
    prefix: str,
    heads: int,
    key_mask=None,
    causal: bool = False,
    attn_dropout: float = 0.0,
    rng: Optional[np.random.Generator] = None,
    train: bool = False,
):
    """Multi-head scaled dot-product attention.

    key_mask: bool [batch, Tk], True at real tokens.  Masked scores become
    -inf before the softmax so excluded positions carry exactly zero weight.
    Returns (out, cache, attn) with attn of shape [batch, heads, Tq, Tk].
    """
    wq, wk, wv, wo = (p[prefix + n] for n in ("wq", "wk", "wv", "wo"))
    bq, bk, bv, bo = (p[prefix + n] for n in ("bq", "bk", "bv", "bo"))
    q = xq @ wq + bq
    k = xkv @ wk + bk
    v = xkv @ wv + bv
    qh, kh, vh = _split_heads(q, heads), _split_heads(k, heads), _split_heads(v, heads)
    dk_dim = qh.shape[-1]
    scale = 1.0 / math.sqrt(dk_dim)
    scores = (qh @ kh.swapaxes(-1, -2)) * scale

    tq, tk = scores.shape[-2], scores.shape[-1]
    keep = None
    if key_mask is not None:
        keep = np.broadcast_to(key_mask[:, None, None, :], scores.shape)
    if causal:
        tri = np.tril(np.ones((tq, tk), dtype=bool))[None, None]
        keep = tri if keep is None else keep & tri
    if keep is not None:
        scores = np.where(keep, scores, NEG_INF)

    attn = softmax_last(scores)
    attn_d, drop_mask = dropout_fwd(attn, attn_dropout, rng, train)
    ctx = _merge_heads(attn_d @ vh)
    out = ctx @ wo + bo
    cache = (xq, xkv, qh, kh, vh, attn, attn_d, drop_mask, ctx, prefix, heads, scale)
    return out, cache, attn


def attention_bwd(dout, cache, p: dict, grads: dict):
    """Accumulates parameter grads into `grads`; returns (dxq, dxkv)."""
    xq, xkv, qh, kh, vh, attn, attn_d, drop_mask, ctx, prefix, heads, scale = cache
    wq, wk, wv, wo = (p[prefix + n] for n in ("wq", "wk", "wv", "wo"))
    d = dout.shape[-1]

    dout2 = dout.reshape(-1, d)
    grads[prefix + "wo"] += ctx.reshape(-1, d).T @ dout2
    grads[prefix + "bo"] += dout2.sum(0)
    dctx = _split_heads(dout @ wo.T, heads)

    dattn_d = dctx @ vh.swapaxes(-1, -2)
    dvh = attn_d.swapaxes(-1, -2) @ dctx
    dattn = dropout_bwd(dattn_d, drop_mask)
    dscores = attn * (dattn - (dattn * attn).sum(-1, keepdims=True))
    dqh = (dscores @ kh) * scale
    dkh = (dscores.swapaxes(-1, -2) @ qh) * scale

    dq = _merge_heads(dqh)
    dk = _merge_heads(dkh)
    dv = _merge_heads(dvh)
    xq2 = xq.reshape(-1, d)
    xkv2 = xkv.reshape(-1, d)
    grads[prefix + "wq"] += xq2.T @ dq.reshape(-1, d)
    grads[prefix + "bq"] += dq.reshape(-1, d).sum(0)
    grads[prefix + "wk"] += xkv2.T @ dk.reshape(-1, d)
    grads[prefix + "bk"] += dk.reshape(-1, d).sum(0)
    grads[prefix + "wv"] += xkv2.T @ dv.reshape(-1, d)
    grads[prefix + "bv"] += dv.reshape(-1, d).sum(0)
    dxq = dq @ wq.T
    dxkv = dk @ wk.T + dv @ wv.T
    return dxq, dxkv


def ffn_fwd(x, p: dict, prefix: str):
    w1, b1, w2, b2 = (p[prefix + n] for n in ("w1", "b1", "w2", "b2"))
    u = x @ w1 + b1
    r = np.maximum(u, 0.0)
    out = r @ w2 + b2
    return out, (x, u > 0.0, r, prefix)


def ffn_bwd(dout, cache, p: dict, grads: dict):
    x, pos, r, prefix = cache
    w1, w2 = p[prefix + "w1"], p[prefix + "w2"]
    d_in = x.shape[-1]
    d_ff = r.shape[-1]
    dout2 = dout.reshape(-1, dout.shape[-1])
    grads[prefix + "w2"] += r.reshape(-1, d_ff).T @ dout2
    grads[prefix + "b2"] += dout2.sum(0)
    dr = dout @ w2.T
    du = dr * pos
    du2 = du.reshape(-1, d_ff)
    grads[prefix + "w1"] += x.reshape(-1, d_in).T @ du2
    grads[prefix + "b1"] += du2.sum(0)
    return du @ w1.T
