import pytest

from padlab import make_context


@pytest.fixture(scope="session")
def Q5():
    return make_context(5, precision=8)


@pytest.fixture(scope="session")
def Q3():
    return make_context(3, precision=8)


@pytest.fixture(scope="session")
def Q2():
    return make_context(2, precision=8)
