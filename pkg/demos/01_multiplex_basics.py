# # Multiplex networks and the giant mutually connected component
#
# A multiplex is a list of layers over one shared node set.  Files use the
# extended edge list format: `layer node_a node_b [weight]` per line.

# %%
import numpy as np

from eatsim import LayerGraph, MultiplexNetwork, gmcc, parse_multiplex
from eatsim.multiplex import MutualComponentTracker, connected_components

net = parse_multiplex("""
# layer a b
road  A B
road  B C
road  C D
rail  A B
rail  C D
""".splitlines())
print(net.layer_names, net.node_labels)

# %% [markdown]
# Both layers are connected on {A, B} and on {C, D}, but only the road layer
# joins the two halves.  The GMCC needs connectivity inside the set in every
# layer, so it is one of the two pairs (ties go to the smallest id).

# %%
print("road components:", [c.tolist() for c in connected_components(net[0])])
print("rail components:", [c.tolist() for c in connected_components(net[1])])
print("GMCC:", gmcc(net).tolist())

# %% [markdown]
# Removing nodes one at a time is cheap with the tracker, which only
# re-splits the cell that lost a node.

# %%
gen = np.random.default_rng(0)
n = 200
layers = []
for _ in range(2):
    iu, ju = np.triu_indices(n, 1)
    keep = gen.random(iu.size) < 0.03
    layers.append(LayerGraph(n, np.column_stack([iu[keep], ju[keep]])))
big = MultiplexNetwork(n, tuple(layers))

tracker = MutualComponentTracker(big)
sizes = [tracker.largest_size]
for node in gen.permutation(n)[:120]:
    tracker.remove(int(node))
    sizes.append(tracker.largest_size)
print("GMCC size every 20 removals:", sizes[::20])
