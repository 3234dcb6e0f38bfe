import numpy as np
import pytest

from treeconsensus.engine import EngineConfig
from treeconsensus.pcm import Judgment, build_pcm
from treeconsensus.scales import ScaleRegistry


@pytest.fixture(scope="session")
def registry():
    return ScaleRegistry()


@pytest.fixture(scope="session")
def unified(registry):
    return registry.unified()


@pytest.fixture(scope="session")
def scale9(registry):
    return registry.get(9)


def consistent_pcm(w, expert, scale, unified, n=None):
    """Complete PCM with cells w_i / w_j, exactly consistent by construction."""
    w = np.asarray(w, dtype=float)
    n = n or w.size
    judgments = []
    for i in range(n):
        for j in range(i + 1, n):
            ratio = w[i] / w[j]
            direction = ">" if ratio >= 1 else "<"
            magnitude = ratio if ratio >= 1 else 1.0 / ratio
            judgments.append(Judgment(expert, i, j, float(magnitude), scale, direction))
    return build_pcm(judgments, n, unified, expert=expert)


@pytest.fixture
def make_consistent_pcm(scale9, unified):
    def _make(w, expert="e"):
        return consistent_pcm(w, expert, scale9, unified)
    return _make


@pytest.fixture
def small_config():
    return EngineConfig()
