# # Similarity along a rewiring ladder
#
# One BA graph is rewired with increasing probability p.  Each rewired copy
# is embedded and compared with the original.  D mixes the pairwise-distance
# loss (PED) and the post-alignment anchor loss (AED); EATSim = 1 - D.

# %%
import numpy as np
from scipy.stats import spearmanr

from eatsim import EmbedConfig, edge_overlap, rewiring_ladder
from eatsim.experiments import rewiring_curve

N = 400  # the full-size run uses N=1000
probs = (0.05, 0.2, 0.35, 0.5, 0.65, 0.8, 0.95)
curve = rewiring_curve(N, 2, probs, seed=0, cfg=EmbedConfig())
print(" p     PED    AED   EATSim")
for p, r in curve:
    print(f"{p:.2f}  {r.ped:.3f}  {r.aed:.3f}  {r.eatsim:.3f}")
print("Spearman(p, EATSim):", round(spearmanr(probs, [r.eatsim for _, r in curve])[0], 3))

# %% [markdown]
# Edge overlap is the obvious baseline.  It falls roughly like 1 - p.

# %%
net = rewiring_ladder(N, 2, probs, seed=0)
print([round(edge_overlap(net[0], layer), 2) for layer in net.layers[1:]])

# %% [markdown]
# omega trades the two losses.  omega=1 keeps only PED, omega=0 only AED.

# %%
from eatsim import eatsim
for omega in (0.0, 0.5, 1.0):
    r = eatsim(net[0], net[3], EmbedConfig(), omega)
    print(f"omega={omega}: D={r.dissimilarity:.3f}")
