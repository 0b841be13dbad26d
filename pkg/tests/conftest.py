import pytest

from anchorpath.graph import Graph, augment_inverses

from helpers import T1_TRIPLES


@pytest.fixture
def t1() -> Graph:
    return Graph(T1_TRIPLES)


@pytest.fixture
def t1_aug() -> Graph:
    return augment_inverses(Graph(T1_TRIPLES))
