import pytest

from upslopes import cache

cache.ensure_big_digits()


@pytest.fixture(autouse=True)
def _hermetic_cache(tmp_path_factory, monkeypatch):
    # keep certificate caches out of the user's home dir during tests
    monkeypatch.setenv(
        "UPSLOPES_CACHE_DIR", str(tmp_path_factory.getbasetemp() / "upcache"))
