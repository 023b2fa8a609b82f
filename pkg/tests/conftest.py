import pytest

from ggpu import data_text, shipped_tech_params
from ggpu.design import build_reference_design
from ggpu.docio import read_table1


@pytest.fixture(scope="session")
def tech():
    return shipped_tech_params()


@pytest.fixture(scope="session")
def table1_rows():
    return read_table1(data_text("table1.tsv"))


@pytest.fixture(scope="session")
def baseline_1cu():
    return build_reference_design(1)


@pytest.fixture(scope="session")
def baseline_2cu():
    return build_reference_design(2)
