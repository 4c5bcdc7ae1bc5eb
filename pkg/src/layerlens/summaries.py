"""Cluster summary labels over linguistic features, with certainty scores.

The certainty of a summary rewards labels that are both exhaustive (the
cluster holds most occurrences of the label in the selection) and pure
(most cluster members carry the label):

    certainty = (c_in / c_total)^2 * (c_in / cluster_size)^2

For n-grams a point counts once per distinct n-gram it exhibits.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum

from .corpus import Dataset, FeatureKind, TokenOccurrence
from .errors import EmptyClusterError, OutOfRangeError, UnknownFeatureError

NGRAM_LENGTHS = (2, 3)


class CertaintyBand(Enum):
    GREEN = "green"
    YELLOW = "yellow"
    RED = "red"


@dataclass
class ClusterSummary:
    space: str  # "2d" | "hd"
    layer: int
    cluster_id: int
    feature: FeatureKind
    label: str
    certainty: float
    support: int


def context_window(occ: TokenOccurrence) -> list[str]:
    """Up to five tokens: two before, the token, two after, lowercased."""
    return [t.lower() for t in (*occ.context_before, occ.token, *occ.context_after)]


def extract_feature_values(occ: TokenOccurrence, feature: FeatureKind) -> list[str]:
    """Feature values of one occurrence.

    Ingested kinds give a singleton list; NGRAM enumerates every contiguous
    bigram then trigram of the context window. Raises UNKNOWN_FEATURE when
    the occurrence lacks the annotation.
    """
    if feature == FeatureKind.NGRAM:
        window = context_window(occ)
        grams = []
        for size in NGRAM_LENGTHS:
            for start in range(len(window) - size + 1):
                grams.append(" ".join(window[start : start + size]))
        return grams
    if feature == FeatureKind.TOKEN_INDEX:
        return [str(occ.token_index)]
    if feature in occ.annotations:
        return [occ.annotations[feature]]
    raise UnknownFeatureError(f"occurrence {occ.id} has no {feature.value!r} annotation")


def _point_values(occ: TokenOccurrence, feature: FeatureKind) -> set[str]:
    """Distinct values a point contributes (absent annotation: none)."""
    if feature not in (FeatureKind.NGRAM, FeatureKind.TOKEN_INDEX) and feature not in occ.annotations:
        return set()
    return set(extract_feature_values(occ, feature))


def summarize_cluster(
    member_ids: list[int],
    feature: FeatureKind,
    dataset: Dataset,
    universe_ids: list[int],
    space: str = "2d",
    layer: int = 0,
    cluster_id: int = 0,
) -> ClusterSummary:
    """Modal feature value of a cluster plus its certainty.

    ``universe_ids`` is the full session selection; it is the denominator
    scope for "occurrences of the label". Modal ties break to the
    lexicographically smallest label.
    """
    if not member_ids:
        raise EmptyClusterError("cannot summarize an empty cluster")
    if feature not in dataset.features_present():
        raise UnknownFeatureError(f"feature {feature.value!r} not present in dataset")
    occ_by_id = dataset.occurrences
    in_counts: Counter[str] = Counter()
    for pid in member_ids:
        for value in _point_values(occ_by_id[pid], feature):
            in_counts[value] += 1
    if not in_counts:
        raise UnknownFeatureError(
            f"no {feature.value!r} values among cluster members"
        )
    top = max(in_counts.values())
    label = min(v for v, c in in_counts.items() if c == top)
    c_in = in_counts[label]
    c_total = sum(
        1 for pid in universe_ids if label in _point_values(occ_by_id[pid], feature)
    )
    cluster_size = len(member_ids)
    certainty = (c_in / c_total) ** 2 * (c_in / cluster_size) ** 2
    return ClusterSummary(space, layer, cluster_id, feature, label, certainty, c_in)


def certainty_band(certainty: float) -> CertaintyBand:
    """Uniform tripartition of [0, 1] into green/yellow/red."""
    if not (0.0 <= certainty <= 1.0):
        raise OutOfRangeError(f"certainty {certainty} outside [0, 1]")
    if certainty >= 2.0 / 3.0:
        return CertaintyBand.GREEN
    if certainty >= 1.0 / 3.0:
        return CertaintyBand.YELLOW
    return CertaintyBand.RED
