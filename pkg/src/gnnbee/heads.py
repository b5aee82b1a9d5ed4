"""Tagging head and argument-role pair head."""
from __future__ import annotations

import torch
from torch import nn

from .graphembed import seeded_generator, uniform_init_

CONCAT = "concat"
BIAFFINE = "biaffine"

# ReLU-rectified logits with a non-positive pre-activation get no gradient.
# A rare class (e.g. an I- tag) is pushed down on every other token early in
# training and can go dead everywhere; a generous positive starting bias keeps
# every class trainable long enough to be learned. Softmax is shift-invariant,
# so the constant itself does not change the model.
LOGIT_BIAS_INIT = 3.0


class Vocab:
    """Ordered label list with index lookup."""

    def __init__(self, labels):
        self.labels = list(labels)
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self.index) != len(self.labels):
            raise ValueError("duplicate labels in vocabulary")

    def __len__(self):
        return len(self.labels)

    def __getitem__(self, i):
        return self.labels[i]

    def __contains__(self, label):
        return label in self.index

    def __eq__(self, other):
        return isinstance(other, Vocab) and self.labels == other.labels

    def encode(self, labels):
        return [self.index[lab] for lab in labels]


def softmax64(logits):
    """Softmax computed and returned in float64, so emitted distributions sum to 1 to ~1e-15."""
    return torch.softmax(logits, dim=-1, dtype=torch.float64)


def tag_distribution(rep, weight, bias):
    """softmax(ReLU(W_s · rep + b_s)) over the last axis."""
    return softmax64(torch.relu(rep @ weight.T + bias))


def pair_logits(h, d, weight=None, bias=None, mode=CONCAT, tensor=None, vec=None):
    if mode == CONCAT:
        return torch.relu(torch.cat([h, d], dim=-1) @ weight.T + bias)
    if mode == BIAFFINE:
        bilinear = torch.einsum("...i,rij,...j->...r", h, tensor, d)
        return bilinear + (h @ vec + d @ vec).unsqueeze(-1)
    raise ValueError(f"unknown pair mode {mode!r}")


def pair_distribution(h, d, weight=None, bias=None, mode=CONCAT, tensor=None, vec=None):
    """Role distribution for a (head, dependent) pair.

    ``concat``: softmax(ReLU(W_r · [h; d] + b_r)).
    ``biaffine``: softmax over roles of h·A[role]·d + b·h + b·d.
    """
    return softmax64(pair_logits(h, d, weight, bias, mode, tensor, vec))


class TagHead(nn.Module):
    def __init__(self, in_dim, n_tags, seed=0):
        super().__init__()
        self.linear = nn.Linear(in_dim, n_tags)
        g = seeded_generator(seed)
        uniform_init_(self.linear.weight, in_dim, g)
        nn.init.constant_(self.linear.bias, LOGIT_BIAS_INIT)

    def logits(self, rep):
        return torch.relu(self.linear(rep))

    def forward(self, rep):
        return softmax64(self.logits(rep))


class PairHead(nn.Module):
    def __init__(self, rep_dim, n_roles, mode=CONCAT, seed=0):
        super().__init__()
        if mode not in (CONCAT, BIAFFINE):
            raise ValueError(f"unknown pair mode {mode!r}")
        self.mode = mode
        g = seeded_generator(seed)
        if mode == CONCAT:
            self.linear = nn.Linear(2 * rep_dim, n_roles)
            uniform_init_(self.linear.weight, 2 * rep_dim, g)
            nn.init.constant_(self.linear.bias, LOGIT_BIAS_INIT)
        else:
            self.tensor = nn.Parameter(torch.empty(n_roles, rep_dim, rep_dim))
            self.vec = nn.Parameter(torch.empty(rep_dim))
            uniform_init_(self.tensor, rep_dim, g)
            uniform_init_(self.vec, rep_dim, g)

    def logits(self, h, d):
        if self.mode == CONCAT:
            return pair_logits(h, d, self.linear.weight, self.linear.bias, CONCAT)
        return pair_logits(h, d, mode=BIAFFINE, tensor=self.tensor, vec=self.vec)

    def forward(self, h, d):
        return softmax64(self.logits(h, d))
