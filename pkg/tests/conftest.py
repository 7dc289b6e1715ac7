import sys

import pytest

from mdacp.semantics import EMPTY_GAMMA, CommTable

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


@pytest.fixture
def gamma_abc():
    return CommTable({("a", "b"): "c"})


@pytest.fixture(params=["empty", "a|b->c"])
def any_gamma(request):
    return EMPTY_GAMMA if request.param == "empty" else CommTable({("a", "b"): "c"})
