"""Per-token contextual vectors: a seeded toy encoder and a pretrained transformer adapter."""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
import torch
from torch import nn

from .errors import AlignmentError, EncoderLengthError


class TrainScope(str, Enum):
    HEADS_ONLY = "heads_only"
    LAST_LAYER = "last_encoder_layer_plus_heads"
    ALL = "all"


@dataclass
class SubwordAlignment:
    """``pieces[i]`` lists the subword rows that make up token ``i``."""

    pieces: list

    def validate(self, n_pieces=None):
        seen = -1
        for i, rows in enumerate(self.pieces):
            if not rows:
                raise AlignmentError(f"token {i} has no subword pieces")
            for r in rows:
                if r <= seen:
                    raise AlignmentError(f"piece {r} of token {i} is out of order or shared")
                seen = r
        if n_pieces is not None and seen >= n_pieces:
            raise AlignmentError(f"alignment refers to piece {seen} but only {n_pieces} exist")


def pool_subwords(piece_vectors, alignment: SubwordAlignment):
    """Token vector = vector of its first subword piece."""
    alignment.validate(piece_vectors.shape[0])
    first = torch.tensor([rows[0] for rows in alignment.pieces], dtype=torch.long)
    return piece_vectors.index_select(0, first)


def sinusoidal_positions(n, dim):
    pos = np.arange(n, dtype=np.float64)[:, None]
    rate = np.exp(-math.log(10000.0) * (np.arange(0, dim, 2) / dim))
    pe = np.zeros((n, dim))
    pe[:, 0::2] = np.sin(pos * rate)
    pe[:, 1::2] = np.cos(pos * rate[: dim // 2])
    return pe


class TokenEncoder(nn.Module):
    """Interface: ``encode(tokens)`` returns an ``n x dim`` tensor."""

    dim: int
    max_len: int

    def encode(self, tokens, sentence_id=None):
        raise NotImplementedError

    def set_trainable_scope(self, policy):
        pass

    def delta_state(self):
        """Parameters that training may change, by name."""
        return {}

    def load_delta_state(self, state):
        if state:
            raise ValueError(f"{type(self).__name__} has no trainable parameters")

    def _check_length(self, n, sentence_id):
        if n > self.max_len:
            raise EncoderLengthError(
                f"sentence {sentence_id!r} needs {n} positions, encoder max_len is {self.max_len}")


class ToyEncoder(TokenEncoder):
    """Seeded hash embedding of the token string plus a sinusoidal position code.

    No trainable parameters; a pure function of (token, position, seed).
    """

    def __init__(self, dim=64, seed=0, max_len=512):
        super().__init__()
        self.dim = dim
        self.seed = seed
        self.max_len = max_len
        self._cache = {}
        self._positions = torch.from_numpy(sinusoidal_positions(max_len, dim)).float()

    def token_vector(self, token):
        vec = self._cache.get(token)
        if vec is None:
            digest = hashlib.blake2b(f"{self.seed}\x00{token}".encode("utf-8"), digest_size=8).digest()
            rng = np.random.default_rng(int.from_bytes(digest, "little"))
            vec = torch.from_numpy(rng.standard_normal(self.dim)).float()
            self._cache[token] = vec
        return vec

    def encode(self, tokens, sentence_id=None):
        if not tokens:
            raise ValueError("cannot encode an empty token list")
        self._check_length(len(tokens), sentence_id)
        emb = torch.stack([self.token_vector(t) for t in tokens])
        return emb + self._positions[: len(tokens)]


def _layer_stack(model):
    enc = getattr(model, "encoder", None)
    layers = getattr(enc, "layer", None) or getattr(enc, "layers", None)
    if isinstance(layers, nn.ModuleList) and len(layers):
        return layers
    stacks = [m for m in model.modules() if isinstance(m, nn.ModuleList) and len(m)]
    if not stacks:
        raise ValueError("cannot locate the transformer block stack")
    return max(stacks, key=len)


class PretrainedEncoder(TokenEncoder):
    """Adapter around a Hugging Face encoder with first-subword pooling."""

    def __init__(self, model, tokenizer, max_len=512, train_scope=TrainScope.LAST_LAYER):
        super().__init__()
        self.model = model
        self.tokenizer = tokenizer
        self.max_len = max_len
        self.dim = model.config.hidden_size
        self.set_trainable_scope(train_scope)

    @classmethod
    def from_pretrained(cls, model_name, max_len=512, train_scope=TrainScope.LAST_LAYER):
        from transformers import AutoModel, AutoTokenizer

        return cls(AutoModel.from_pretrained(model_name), AutoTokenizer.from_pretrained(model_name),
                   max_len, train_scope)

    def align(self, tokens):
        tok = self.tokenizer
        ids = [tok.cls_token_id]
        pieces = []
        for word in tokens:
            wp = tok.tokenize(word) or [tok.unk_token]
            start = len(ids)
            ids.extend(tok.convert_tokens_to_ids(wp))
            pieces.append(list(range(start, len(ids))))
        ids.append(tok.sep_token_id)
        return ids, SubwordAlignment(pieces)

    def encode(self, tokens, sentence_id=None):
        if not tokens:
            raise ValueError("cannot encode an empty token list")
        ids, alignment = self.align(tokens)
        self._check_length(len(ids), sentence_id)
        input_ids = torch.tensor([ids], dtype=torch.long)
        out = self.model(input_ids=input_ids, attention_mask=torch.ones_like(input_ids))
        return pool_subwords(out.last_hidden_state[0], alignment)

    def last_layer(self):
        return _layer_stack(self.model)[-1]

    def set_trainable_scope(self, policy):
        policy = TrainScope(policy)
        self.scope = policy
        for p in self.model.parameters():
            p.requires_grad_(policy is TrainScope.ALL)
        if policy is TrainScope.LAST_LAYER:
            for p in self.last_layer().parameters():
                p.requires_grad_(True)

    def delta_state(self):
        return {n: p.detach().clone() for n, p in self.model.named_parameters() if p.requires_grad}

    def load_delta_state(self, state):
        params = dict(self.model.named_parameters())
        with torch.no_grad():
            for name, value in state.items():
                params[name].copy_(value)


def build_encoder(kind="toy", model_name=None, max_len=512, train_scope=TrainScope.LAST_LAYER,
                  dim=64, seed=0):
    if kind == "toy":
        return ToyEncoder(dim=dim, seed=seed, max_len=max_len)
    if kind == "pretrained":
        if not model_name:
            raise ValueError("encoder.model_name is required for a pretrained encoder")
        return PretrainedEncoder.from_pretrained(model_name, max_len, train_scope)
    raise ValueError(f"unknown encoder kind {kind!r}")
