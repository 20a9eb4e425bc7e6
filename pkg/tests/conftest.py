import pytest


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long optimizer or oracle runs")


@pytest.fixture(autouse=True)
def isolated_home(tmp_path, monkeypatch):
    # keeps log files and user config out of the real home directory
    monkeypatch.setenv("HOME", str(tmp_path))
    monkeypatch.setenv("XDG_CONFIG_HOME", str(tmp_path / "config"))
    monkeypatch.delenv("GHZWL_THREADS", raising=False)
    return tmp_path
