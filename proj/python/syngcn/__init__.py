"""GCN-based word embedding toolkit.

Train embeddings from dependency parses (SynGCN), specialize any
pre-trained embeddings with semantic relations (SemGCN), and run the
intrinsic evaluations, all backed by the C++ core.
"""

from ._core import (
    DataError,
    Vocabulary,
    build_vocabulary,
    eval_analogy,
    eval_similarity,
    load_embeddings,
    nearest_neighbors,
    retrofit,
    save_embeddings,
    train,
)

__all__ = [
    "DataError",
    "Vocabulary",
    "build_vocabulary",
    "eval_analogy",
    "eval_similarity",
    "load_embeddings",
    "nearest_neighbors",
    "retrofit",
    "save_embeddings",
    "train",
]
