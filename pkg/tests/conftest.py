import pytest

from clintime.cli import main
from clintime.synthetic import generate_corpus


@pytest.fixture(scope="session")
def synthetic_docs():
    return generate_corpus(24, seed=5)


@pytest.fixture(scope="session")
def synthetic_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("synthetic")
    assert main(["gen-synthetic", "--out", str(out), "--docs", "16", "--seed", "9"]) == 0
    return out


@pytest.fixture(scope="session")
def models_dir(synthetic_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("models")
    assert main(["train", "--corpus", str(synthetic_dir / "gold"), "--out", str(out)]) == 0
    return out


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
