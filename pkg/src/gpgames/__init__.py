"""Graphical potential games: decomposition, random-field correspondence and update bounds."""
from __future__ import annotations

__version__ = "0.1.0"

from ._check import (
    CapExceeded,
    Check,
    GPGError,
    NotAPotentialGame,
    NotGraphLocal,
    RejectedMove,
)
from .decomposition import (
    LocalDecomposition,
    NeighborOffsets,
    decompose,
    extract_offsets,
    reconstruct,
    synthesize_game,
    synthesize_with_offsets,
)
from .game import (
    Game,
    Potential,
    StrategySpace,
    exact_potential,
    is_graphical,
    normalize,
    pure_nash,
)
from .graph import Graph, clique_degree, generate, maximal_cliques, sphere_sizes
from .mrf import Distribution, global_markov, pairwise_markov, psi, psi_inverse

__all__ = [
    "CapExceeded", "Check", "Distribution", "GPGError", "Game", "Graph", "LocalDecomposition",
    "NeighborOffsets", "NotAPotentialGame", "NotGraphLocal", "Potential", "RejectedMove", "StrategySpace",
    "clique_degree", "decompose", "exact_potential", "extract_offsets", "generate", "global_markov",
    "is_graphical", "maximal_cliques", "normalize", "pairwise_markov", "psi", "psi_inverse", "pure_nash",
    "reconstruct", "sphere_sizes", "synthesize_game", "synthesize_with_offsets",
]
