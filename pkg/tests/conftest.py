import pytest

import support


@pytest.fixture
def desk_questionnaire():
    return support.desk_questionnaire()


@pytest.fixture
def desk_palette():
    return support.desk_palette()


@pytest.fixture
def desk_records():
    return support.desk_records()
