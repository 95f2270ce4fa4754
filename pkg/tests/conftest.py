import warnings

import pytest

from hcfconv.config import load_run_config
from hcfconv.errors import ConfigWarning


@pytest.fixture(scope="session")
def reference_run():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConfigWarning)
        return load_run_config("reference")


@pytest.fixture(scope="session")
def conversion(reference_run):
    return reference_run.conversion
