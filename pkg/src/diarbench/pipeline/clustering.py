"""Average-linkage agglomerative clustering under cosine distance."""

from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.spatial.distance import squareform

from .embedding import SpeakerEmbedding


def cosine_distances(vectors: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    unit = np.divide(vectors, norms, out=np.zeros_like(vectors), where=norms > 0)
    dist = np.clip(1.0 - unit @ unit.T, 0.0, 2.0)
    np.fill_diagonal(dist, 0.0)
    return (dist + dist.T) / 2


def cluster(embeddings: Sequence[SpeakerEmbedding], threshold: float) -> list[int]:
    """Cluster ids aligned with ``embeddings``.

    Inputs are processed in ``(window_index, speaker_index)`` order and ids
    are numbered by first appearance in that order.
    """
    if not embeddings:
        raise ValueError("need at least one embedding")
    order = sorted(range(len(embeddings)), key=lambda i: (embeddings[i].window_index, embeddings[i].speaker_index))
    labels = [0] * len(embeddings)
    if len(embeddings) == 1:
        return labels
    vectors = np.stack([embeddings[i].vector for i in order])
    tree = linkage(squareform(cosine_distances(vectors), checks=False), method="average")
    raw = fcluster(tree, t=threshold, criterion="distance")
    renumber: dict[int, int] = {}
    for pos, i in enumerate(order):
        labels[i] = renumber.setdefault(int(raw[pos]), len(renumber))
    return labels
