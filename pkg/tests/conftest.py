import warnings

import pytest

from momentshape.domains import OutsideUnitDiskWarning


@pytest.fixture
def quiet_outside():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OutsideUnitDiskWarning)
        yield
