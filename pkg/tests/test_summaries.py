import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from layerlens.corpus import FeatureKind
from layerlens.errors import EmptyClusterError, OutOfRangeError, UnknownFeatureError
from layerlens.summaries import (
    CertaintyBand,
    certainty_band,
    extract_feature_values,
    summarize_cluster,
)

from conftest import make_dataset, make_occurrence


def test_pos_passthrough():
    occ = make_occurrence(0, "cell", pos="NOUN")
    assert extract_feature_values(occ, FeatureKind.POS) == ["NOUN"]


def test_ngram_boundary_window():
    occ = make_occurrence(0, "cell", before=["of"], after=["block"])
    grams = extract_feature_values(occ, FeatureKind.NGRAM)
    assert grams == ["of cell", "cell block", "of cell block"]


def test_ngram_full_window_lowercased():
    occ = make_occurrence(0, "Cell", before=["The", "big"], after=["IS", "here"])
    grams = extract_feature_values(occ, FeatureKind.NGRAM)
    assert "big cell" in grams
    assert "the big cell" in grams
    assert all(g == g.lower() for g in grams)
    assert len(grams) == 4 + 3


def test_token_index_stringified():
    occ = make_occurrence(0, "cell", before=["a", "b"])
    assert extract_feature_values(occ, FeatureKind.TOKEN_INDEX) == ["2"]


def test_missing_annotation_raises():
    occ = make_occurrence(0, "cell", pos="NOUN")
    with pytest.raises(UnknownFeatureError):
        extract_feature_values(occ, FeatureKind.SENSE)


def test_certainty_pure_and_exhaustive():
    dataset = make_dataset([("cell", "NOUN")] * 5)
    summary = summarize_cluster([0, 1, 2, 3, 4], FeatureKind.POS, dataset, list(range(5)))
    assert summary.label == "NOUN"
    assert summary.certainty == 1.0
    assert summary.support == 5


def test_certainty_half_of_label_mass():
    dataset = make_dataset([("cell", "NOUN")] * 8)
    summary = summarize_cluster([0, 1, 2, 3], FeatureKind.POS, dataset, list(range(8)))
    assert summary.certainty == pytest.approx(0.25)


def test_modal_tie_breaks_lexicographically():
    pairs = [("cell", "VERB")] * 5 + [("cell", "NOUN")] * 5
    dataset = make_dataset(pairs)
    summary = summarize_cluster(list(range(10)), FeatureKind.POS, dataset, list(range(10)))
    assert summary.label == "NOUN"
    assert summary.support == 5
    assert summary.certainty == pytest.approx((5 / 5) ** 2 * (5 / 10) ** 2)


def test_empty_cluster_rejected():
    dataset = make_dataset([("cell", "NOUN")])
    with pytest.raises(EmptyClusterError):
        summarize_cluster([], FeatureKind.POS, dataset, [0])


def test_unknown_feature_dataset_level():
    dataset = make_dataset([("cell", "NOUN")] * 3)
    with pytest.raises(UnknownFeatureError):
        summarize_cluster([0, 1], FeatureKind.SYNCAT, dataset, [0, 1, 2])


def test_ngram_counts_per_point():
    # both members repeat the same window; each contributes once per n-gram
    dataset = make_dataset([("cell", None), ("cell", None), ("post", None)])
    summary = summarize_cluster([0, 1], FeatureKind.NGRAM, dataset, [0, 1, 2])
    assert summary.support == 2
    assert summary.certainty == 1.0  # both occurrences of the modal n-gram are inside


def test_certainty_monotone_in_cluster_count():
    # growing c_in with fixed c_total and cluster size can only help
    def certainty(c_in, c_total, size):
        return (c_in / c_total) ** 2 * (c_in / size) ** 2

    for c_total, size in ((10, 8), (5, 5), (7, 3)):
        values = [certainty(c, c_total, size) for c in range(1, min(c_total, size) + 1)]
        assert values == sorted(values)


def test_permutation_invariance():
    pairs = [("cell", "NOUN"), ("cell", "VERB"), ("cell", "NOUN"), ("post", "ADJ")]
    dataset = make_dataset(pairs)
    a = summarize_cluster([0, 1, 2], FeatureKind.POS, dataset, list(range(4)))
    b = summarize_cluster([2, 0, 1], FeatureKind.POS, dataset, list(range(4)))
    assert (a.label, a.certainty, a.support) == (b.label, b.certainty, b.support)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.sampled_from(["NOUN", "VERB", "ADJ"]), min_size=1, max_size=12),
    st.data(),
)
def test_certainty_in_unit_interval(pos_list, data):
    dataset = make_dataset([("w", p) for p in pos_list])
    n = len(pos_list)
    member_count = data.draw(st.integers(min_value=1, max_value=n))
    members = data.draw(
        st.lists(
            st.integers(min_value=0, max_value=n - 1),
            min_size=member_count,
            max_size=member_count,
            unique=True,
        )
    )
    summary = summarize_cluster(members, FeatureKind.POS, dataset, list(range(n)))
    assert 0.0 <= summary.certainty <= 1.0
    band = certainty_band(summary.certainty)
    assert isinstance(band, CertaintyBand)


def test_bands():
    assert certainty_band(1.0) == CertaintyBand.GREEN
    assert certainty_band(0.5) == CertaintyBand.YELLOW
    assert certainty_band(0.0) == CertaintyBand.RED
    assert certainty_band(2 / 3) == CertaintyBand.GREEN
    assert certainty_band(1 / 3) == CertaintyBand.YELLOW
    with pytest.raises(OutOfRangeError):
        certainty_band(1.5)
