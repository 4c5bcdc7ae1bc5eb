import numpy as np
import pytest

from layerlens import kernels
from layerlens.corpus import Dataset, EmbeddingTensor, FeatureKind, TokenOccurrence


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    kernels.warmup()


def make_occurrence(i, token, pos=None, sense=None, before=None, after=None):
    before = before if before is not None else ["in", "the"]
    after = after if after is not None else ["of", "it"]
    words = before + [token] + after
    ann = {}
    if pos is not None:
        ann[FeatureKind.POS] = pos
    if sense is not None:
        ann[FeatureKind.SENSE] = sense
    return TokenOccurrence(
        id=i,
        token=token,
        sentence_id=i,
        token_index=len(before),
        context_before=before,
        context_after=after,
        sentence=" ".join(words),
        annotations=ann,
    )


def make_dataset(tokens_pos, n_layers=2, dim=4, seed=0, name="tiny"):
    """Dataset from a list of (token, pos) pairs with random embeddings."""
    rng = np.random.default_rng(seed)
    occurrences = [make_occurrence(i, tok, pos) for i, (tok, pos) in enumerate(tokens_pos)]
    values = rng.normal(size=(n_layers, len(occurrences), dim)).astype(np.float32)
    return Dataset(name, occurrences, EmbeddingTensor(n_layers, len(occurrences), dim, values))


@pytest.fixture
def tiny_dataset():
    return make_dataset([("cell", "NOUN"), ("cell", "NOUN"), ("strike", "VERB")])
