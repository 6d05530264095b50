import pytest

from sympwalk.walk import exact_form_chain


@pytest.fixture(scope="session")
def chain22():
    return exact_form_chain(2, 2)


@pytest.fixture(scope="session")
def chain23():
    return exact_form_chain(2, 3)
