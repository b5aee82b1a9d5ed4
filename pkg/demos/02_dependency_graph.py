"""The normalized dependency adjacency and what two GCN layers do with it.

Direction and labels of dependency arcs are dropped; self loops are added
and the matrix is scaled symmetrically by degree. Its spectrum stays in
[-1, 1], so repeated propagation cannot blow up, but it does pull node
vectors together (oversmoothing), fastest around high-degree tokens.
"""
import numpy as np
import torch

from gnnbee.depgraph import DepGraph, parse_conllu
from gnnbee.graphembed import smoothing_profile

conllu = """1\tTRAF2\t_\t_\t_\t_\t2\tnsubj\t_\t_
2\tinhibits\t_\t_\t_\t_\t0\troot\t_\t_
3\tthe\t_\t_\t_\t_\t4\tdet\t_\t_
4\tphosphorylation\t_\t_\t_\t_\t2\tobj\t_\t_
5\tof\t_\t_\t_\t_\t6\tcase\t_\t_
6\tIkB\t_\t_\t_\t_\t4\tnmod\t_\t_
"""
n, edges = parse_conllu(conllu)
graph = DepGraph.from_edges(n, edges)
np.set_printoptions(precision=3, suppress=True)
print(graph.a_norm)
print("eigenvalues:", np.linalg.eigvalsh(graph.a_norm))

# Two layers reach two arcs: token 0 (TRAF2) sees 'phosphorylation' (2 arcs)
# but not 'IkB' (3 arcs).
reach = np.linalg.matrix_power(graph.a_norm, 2)[0]
print("two-hop reach of TRAF2:", (reach > 0).astype(int))

# Mean pairwise cosine similarity after 0..6 random propagation layers.
c = torch.randn(n, 32, dtype=torch.float64, generator=torch.Generator().manual_seed(0))
profile = smoothing_profile(c, torch.from_numpy(graph.a_norm), depth=6)
print("cosine similarity by depth:", " ".join(f"{x:.2f}" for x in profile))
