import pytest

from knnseq import Tagset
from knnseq.synth import make_tagset


@pytest.fixture
def ts4() -> Tagset:
    """4 main types (9 main labels), 3 subtypes (6 sub labels)."""
    return make_tagset(4, 3)


@pytest.fixture
def full_ts() -> Tagset:
    """The full-size taxonomy: 21 main types, 31 subtypes."""
    return make_tagset(21, 31)
