import warnings

import pytest

from rbflt.diffmat import IllConditionedWarning


@pytest.fixture(autouse=True)
def _quiet_conditioning():
    # wide stencils trip the conditioning warning by design; tests that care catch it explicitly
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IllConditionedWarning)
        yield
