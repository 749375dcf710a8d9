from __future__ import annotations

import pytest

from risbeam.arrays import ArrayGeometry, make_angle_grid
from risbeam.blockcode import build_plain_code, build_reduced_code
from risbeam.codebook import GsConfig, build_codebooks


@pytest.fixture(scope="session")
def desk_geometry():
    return ArrayGeometry(n_bs=16, n_ris_rows=8, n_ris_cols=8)


@pytest.fixture(scope="session")
def desk_grid(desk_geometry):
    return make_angle_grid(desk_geometry)


@pytest.fixture(scope="session")
def desk_codes():
    return build_plain_code(4), build_reduced_code(3, 3)


@pytest.fixture(scope="session")
def desk_books(desk_codes, desk_grid, desk_geometry):
    code_t, code_r = desk_codes
    return build_codebooks(code_t, code_r, desk_grid, desk_geometry, GsConfig(seed=1))


def pytest_runtest_logreport(report):
    # one visible pass/fail line per acceptance criterion
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        status = "PASS" if report.passed else "FAIL"
        print(f"\nACCEPTANCE {name}: {status}", flush=True)
