"""Embedding-based interlayer similarity for multiplex networks."""

from .embedding import (EmbedConfig, EmbeddingMatrix, WalkCorpus, embed_layer, generate_walks,
                        load_embedding, save_embedding, train_skipgram)
from .generators import (GmmParams, RewireParams, edge_overlap, generate_ba, generate_gmm,
                         rewire, rewiring_ladder)
from .multiplex import (LayerGraph, MultiplexNetwork, MutualComponentTracker, ParseError,
                        ValidationError, connected_components, gmcc, load_multiplex,
                        parse_multiplex, save_multiplex)
from .reducibility import (ReductionReport, ReductionState, aggregate, distinguishability_q,
                           greedy_reduce, replay_merges, von_neumann_entropy)
from .robustness import (AttackParams, AttackTrace, RobustnessResult, attack_priority, delta_n,
                         omega_score, reshuffle_mapping, targeted_attack)
from .similarity import (AlignmentResult, NumericError, SimilarityResult, aed_loss, eatsim,
                         embedding_similarity, euclidean_distance, jsd_distance, ped_loss,
                         procrustes_align, similarity_matrix)

__version__ = "0.1.0"
