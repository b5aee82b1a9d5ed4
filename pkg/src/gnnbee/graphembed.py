"""Two-layer GCN over the normalized dependency adjacency, plus the head/dependent MLPs."""
from __future__ import annotations

import math

import torch
from torch import nn

from .errors import AlignmentError, ShapeError


def seeded_generator(seed):
    g = torch.Generator()
    g.manual_seed(int(seed))
    return g


def uniform_init_(tensor, fan_in, generator):
    bound = 1.0 / math.sqrt(fan_in)
    with torch.no_grad():
        tensor.uniform_(-bound, bound, generator=generator)
    return tensor


def gcn_layer(h, a_hat, w):
    """ReLU(Â · H · W)."""
    n, k = h.shape
    if a_hat.shape != (n, n):
        raise ShapeError(f"adjacency {tuple(a_hat.shape)} does not match {n} nodes")
    if w.shape[0] != k:
        raise ShapeError(f"weight {tuple(w.shape)} does not accept width {k}")
    return torch.relu(a_hat @ h @ w)


class GCN(nn.Module):
    def __init__(self, in_dim, hidden_dim=None, out_dim=None, bias=False, seed=0):
        super().__init__()
        hidden_dim = hidden_dim or in_dim
        out_dim = out_dim or in_dim
        self.w1 = nn.Parameter(torch.empty(in_dim, hidden_dim))
        self.w2 = nn.Parameter(torch.empty(hidden_dim, out_dim))
        if bias:
            self.b1 = nn.Parameter(torch.empty(hidden_dim))
            self.b2 = nn.Parameter(torch.empty(out_dim))
        else:
            self.b1 = self.b2 = None
        self.reset_parameters(seed)

    @property
    def out_dim(self):
        return self.w2.shape[1]

    def reset_parameters(self, seed):
        g = seeded_generator(seed)
        uniform_init_(self.w1, self.w1.shape[0], g)
        uniform_init_(self.w2, self.w2.shape[0], g)
        if self.b1 is not None:
            uniform_init_(self.b1, self.w1.shape[0], g)
            uniform_init_(self.b2, self.w2.shape[0], g)

    def layer(self, h, a_hat, w, b):
        if b is None:
            return gcn_layer(h, a_hat, w)
        return torch.relu(a_hat @ h @ w + b)

    def forward(self, h, a_hat):
        h = self.layer(h, a_hat, self.w1, self.b1)
        return self.layer(h, a_hat, self.w2, self.b2)


def embed(c, a_hat, gcn):
    """Graph-aware token vectors; ``gcn=None`` (no-graph mode) returns ``c`` untouched."""
    if gcn is None:
        return c
    if a_hat is None or a_hat.shape[0] != c.shape[0]:
        got = None if a_hat is None else a_hat.shape[0]
        raise AlignmentError(f"parse covers {got} tokens, encoder produced {c.shape[0]}")
    return gcn(c, a_hat)


class MLP(nn.Module):
    """One ReLU hidden layer followed by a linear output layer."""

    def __init__(self, in_dim, hidden_dim, out_dim, generator=None):
        super().__init__()
        self.hidden = nn.Linear(in_dim, hidden_dim)
        self.out = nn.Linear(hidden_dim, out_dim)
        if generator is not None:
            for lin in (self.hidden, self.out):
                uniform_init_(lin.weight, lin.in_features, generator)
                uniform_init_(lin.bias, lin.in_features, generator)

    def forward(self, x):
        return self.out(torch.relu(self.hidden(x)))


class HeadDependentNetworks(nn.Module):
    """Independent MLPs giving head (trigger) and dependent (argument) views of a token."""

    def __init__(self, in_dim, hidden_dim, out_dim, seed=0):
        super().__init__()
        g = seeded_generator(seed)
        self.mlp_h = MLP(in_dim, hidden_dim, out_dim, g)
        self.mlp_d = MLP(in_dim, hidden_dim, out_dim, g)

    def head(self, x):
        return self.mlp_h(x)

    def dep(self, x):
        return self.mlp_d(x)


def mention_vectors(rep, spans):
    """Mean of token rows over each inclusive ``(start, end)`` span."""
    if not spans:
        return rep.new_zeros((0, rep.shape[1]))
    return torch.stack([rep[s:e + 1].mean(dim=0) for s, e in spans])


def mean_pairwise_cosine(x):
    n = x.shape[0]
    if n < 2:
        return 1.0
    unit = x / x.norm(dim=1, keepdim=True).clamp_min(1e-12)
    sim = unit @ unit.T
    return float((sim.sum() - sim.diagonal().sum()) / (n * (n - 1)))


def smoothing_profile(c, a_hat, depth, seed=0):
    """Mean pairwise cosine similarity of node vectors after 0..depth random GCN layers.

    A diagnostic for oversmoothing; weights are square and seeded.
    """
    g = seeded_generator(seed)
    h = c
    out = [mean_pairwise_cosine(h)]
    d = c.shape[1]
    for _ in range(depth):
        w = uniform_init_(torch.empty(d, d, dtype=c.dtype), d, g)
        h = a_hat @ h @ w
        out.append(mean_pairwise_cosine(h))
    return out
