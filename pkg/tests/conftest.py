import pytest

from polysynth.defaults import default_catalog, default_contexts, reduced_catalog
from polysynth.testbed import Testbed


@pytest.fixture(scope="session")
def catalog():
    return default_catalog()


@pytest.fixture(scope="session")
def contexts():
    return list(default_contexts())


@pytest.fixture(scope="session")
def small_catalog():
    return reduced_catalog()


@pytest.fixture()
def testbed(contexts):
    return Testbed(contexts)


# Worked three-context polyglot: javascript: URI, quote/paren break-out
# with comment break-in, and a fresh script element.
WORKED_POLYGLOT = 'javascript:xss()//"){}xss();//</a><script>xss()</script>'
WORKED_TOKEN_IDS = (1, 0, 6, 2, 4, 7, 0, 5, 6, 49, 8, 0, 9)


@pytest.fixture(scope="session")
def worked_polyglot():
    return WORKED_POLYGLOT
