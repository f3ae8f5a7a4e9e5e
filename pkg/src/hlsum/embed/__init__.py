from hlsum.embed.tsne import (
    Embedding,
    EmbeddingError,
    TsneConfig,
    conditional_affinities,
    kl_divergence,
    kl_gradient,
    pairwise_sq_dists,
    symmetrize,
    tsne_embed,
)

__all__ = [
    "Embedding",
    "EmbeddingError",
    "TsneConfig",
    "conditional_affinities",
    "kl_divergence",
    "kl_gradient",
    "pairwise_sq_dists",
    "symmetrize",
    "tsne_embed",
]
