import pytest

from brinv.catalog import BUILTIN, DEGENERATE
from brinv.invariants import check_identities, validate_icis


@pytest.fixture(scope="session")
def builtin_reports():
    out = {}
    for spec in BUILTIN:
        germ, omega = spec.build()
        germ = validate_icis(germ)
        out[spec.label] = (germ, omega, check_identities(germ, omega, label=spec.label))
    return out


@pytest.fixture(scope="session")
def degenerate_reports():
    out = {}
    for spec in DEGENERATE:
        germ, omega = spec.build()
        germ = validate_icis(germ, 16)
        out[spec.label] = check_identities(germ, omega, 16, label=spec.label)
    return out
