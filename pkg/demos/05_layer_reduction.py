# # Reducing a multiplex by greedy aggregation
#
# At every step the two most similar current layers are summed.  The
# distinguishability q = 1 - mean(h_layer) / h_aggregate, with h the Von
# Neumann entropy of the trace-normalised Laplacian, says how much is lost.

# %%
import numpy as np

from eatsim import EmbedConfig, greedy_reduce, rewiring_ladder, von_neumann_entropy
from eatsim.multiplex import LayerGraph

tri = LayerGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
print("entropy of a triangle (bits):", von_neumann_entropy(tri))

# %%
net = rewiring_ladder(300, 2, (0.1, 0.3, 0.5, 0.7, 0.9), seed=0)
for metric in ("eatsim", "jsd"):
    rep = greedy_reduce(net, metric, EmbedConfig())
    print(metric, "q:", np.round(rep.q_trajectory, 4).tolist())
    names = ["+".join(rep.layer_names[i] for i in a) + " <- " + "+".join(rep.layer_names[i] for i in b)
             for a, b, _ in rep.merge_sequence[:3]]
    print("   first merges:", names)

# %% [markdown]
# The merge tree and the best cut.

# %%
rep = greedy_reduce(net, "eatsim", EmbedConfig())
print(rep.dendrogram())
print("optimal m:", rep.optimal_m, rep.named_grouping())
