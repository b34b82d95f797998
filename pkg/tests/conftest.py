import numpy as np
import pytest

from imbapipe.dataset import encode_labels, fit_normalizer, normalize_matrix
from imbapipe.fixtures import POSITIVE_LABEL, make_degotalls_like, make_signal_fixture


@pytest.fixture(scope="session")
def degotalls():
    """Encoded degotalls-like fixture (6004 x 37, 65 positives), seed 0."""
    return encode_labels(make_degotalls_like(seed=0), [POSITIVE_LABEL])


@pytest.fixture(scope="session")
def degotalls_normalized(degotalls):
    """(normalized matrix, target) for the degotalls-like fixture."""
    params = fit_normalizer(degotalls)
    X = normalize_matrix(degotalls.features, params.mean, params.std)
    return X, degotalls.target


@pytest.fixture(scope="session")
def signal():
    """Encoded signal fixture: 400 x 20, 3 informative features, 25% positive."""
    return encode_labels(make_signal_fixture(seed=5), [POSITIVE_LABEL])


@pytest.fixture(scope="session")
def signal_normalized(signal):
    params = fit_normalizer(signal)
    X = normalize_matrix(signal.features, params.mean, params.std)
    return X, signal.target


def balanced_blobs(n_per_class=60, d=4, gap=4.0, seed=0):
    """Two well-separated Gaussian blobs, balanced classes."""
    rng = np.random.default_rng(seed)
    X0 = rng.normal(0.0, 1.0, size=(n_per_class, d))
    X1 = rng.normal(gap, 1.0, size=(n_per_class, d))
    X = np.vstack([X0, X1])
    y = np.concatenate([np.zeros(n_per_class, dtype=np.int64), np.ones(n_per_class, dtype=np.int64)])
    perm = rng.permutation(len(y))
    return X[perm], y[perm]
