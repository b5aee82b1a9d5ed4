import numpy as np
import pytest
import torch

from gnnbee.depgraph import DepEdge, build_adjacency, normalize_adjacency
from gnnbee.errors import AlignmentError, ShapeError
from gnnbee.graphembed import GCN, embed, gcn_layer, mention_vectors, smoothing_profile


def a_hat(n, edges):
    return torch.from_numpy(normalize_adjacency(build_adjacency(n, [DepEdge(*e) for e in edges])))


def test_two_node_chain():
    out = gcn_layer(torch.eye(2, dtype=torch.float64), a_hat(2, [(0, 1)]), torch.eye(2, dtype=torch.float64))
    torch.testing.assert_close(out, torch.full((2, 2), 0.5, dtype=torch.float64))


def test_shape_errors():
    with pytest.raises(ShapeError):
        gcn_layer(torch.zeros(3, 2), torch.eye(2), torch.zeros(2, 2))
    with pytest.raises(ShapeError):
        gcn_layer(torch.zeros(2, 3), torch.eye(2), torch.zeros(2, 2))


def test_permutation_equivariance():
    g = torch.Generator().manual_seed(1)
    n, d = 6, 5
    h = torch.randn(n, d, generator=g, dtype=torch.float64)
    a = a_hat(n, [(0, 1), (1, 2), (2, 3), (1, 4), (4, 5)])
    gcn = GCN(d, 7, d, seed=3).double()
    perm = torch.randperm(n, generator=g)
    p = torch.eye(n, dtype=torch.float64)[perm]
    torch.testing.assert_close(gcn(p @ h, p @ a @ p.T), p @ gcn(h, a))


def test_two_hop_receptive_field():
    n, d = 5, 4
    a = a_hat(n, [(0, 1), (1, 2), (2, 3), (3, 4)])
    gcn = GCN(d, d, d, seed=0).double()
    h = torch.ones(n, d, dtype=torch.float64, requires_grad=True)
    out = gcn(h, a)
    grad = torch.autograd.grad(out[0].sum(), h)[0]
    assert grad[3:].abs().max() == 0  # tokens 3 and 4 are more than two arcs from token 0
    assert grad[:3].abs().max() > 0


def test_no_graph_pass_through():
    c = torch.randn(4, 3)
    assert embed(c, None, None) is c


def test_embed_alignment_error():
    with pytest.raises(AlignmentError):
        embed(torch.randn(4, 3), torch.eye(3), GCN(3, seed=0))


def test_gcn_seed_determinism():
    a, b, c = GCN(4, seed=5), GCN(4, seed=5), GCN(4, seed=6)
    assert torch.equal(a.w1, b.w1) and not torch.equal(a.w1, c.w1)


def test_mention_vectors_mean():
    rep = torch.arange(12.0).reshape(4, 3)
    torch.testing.assert_close(mention_vectors(rep, [(1, 2), (3, 3)]),
                               torch.tensor([[4.5, 5.5, 6.5], [9.0, 10.0, 11.0]]))


def test_smoothing_profile_increases_on_dense_graph():
    n = 8
    edges = [(0, i) for i in range(1, n)] + [(i, i + 1) for i in range(1, n - 1)]
    prof = smoothing_profile(torch.randn(n, 16, dtype=torch.float64), a_hat(n, edges), 4, seed=0)
    assert prof[-1] > prof[0]


def test_single_node_identity():
    out = gcn_layer(torch.tensor([[1.0, 2.0]]), torch.ones(1, 1), torch.eye(2))
    torch.testing.assert_close(out, torch.tensor([[1.0, 2.0]]))


def test_negative_preactivation_gives_zero():
    h = torch.rand(3, 2) + 0.1
    out = gcn_layer(h, a_hat(3, [(0, 1), (1, 2)]).float(), -torch.ones(2, 2))
    assert torch.equal(out, torch.zeros(3, 2))


def test_identity_adjacency_is_per_token():
    gcn = GCN(4, seed=1)
    h = torch.randn(5, 4)
    out = gcn(h, torch.eye(5))
    for i in range(5):
        torch.testing.assert_close(out[i:i + 1], gcn(h[i:i + 1], torch.eye(1)))


def test_head_dependent_mlps():
    from gnnbee.graphembed import MLP, HeadDependentNetworks

    net = HeadDependentNetworks(4, 6, 3, seed=0)
    assert not any(a is b for a in net.mlp_h.parameters() for b in net.mlp_d.parameters())
    mlp = MLP(4, 6, 3)
    for p in mlp.parameters():
        torch.nn.init.zeros_(p)
    assert torch.equal(mlp(torch.randn(2, 4)), torch.zeros(2, 3))
    rep = torch.randn(4, 3)
    torch.testing.assert_close(mention_vectors(rep, [(2, 2)])[0], rep[2])
