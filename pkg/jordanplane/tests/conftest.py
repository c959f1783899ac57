import pytest
from unittest.mock import patch

from jordanplane.braided import make_block
from jordanplane.config import settings
from jordanplane.freealg import FreeElement
from jordanplane.ydcat import standard_triple


@pytest.fixture
def jordan():
    """The Jordan plane V(1, 2)."""
    return make_block(1, 2)


@pytest.fixture
def super_jordan():
    """The super Jordan plane V(-1, 2)."""
    return make_block(-1, 2)


@pytest.fixture
def jordan_triple():
    return standard_triple(1)


@pytest.fixture
def super_triple():
    return standard_triple(-1)


@pytest.fixture
def parse():
    """Parse element literals against a space: parse(space, 'x2 x1 - x1 x2')."""
    def _parse(space, text):
        return FreeElement.parse(text, space)
    return _parse


@pytest.fixture
def small_caps():
    """Temporarily tighten degree and search caps so limit errors trigger fast."""
    with patch.object(settings, 'MAX_DEGREE_DIM2', 5), \
         patch.object(settings, 'MAX_DEGREE_DIM3', 4), \
         patch.object(settings, 'MAX_COMPLETION_RULES', 3), \
         patch.object(settings, 'AUT_SEARCH_LIMIT', 10):
        yield
