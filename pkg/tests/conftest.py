import io
import sys

import pytest

from refcast import cli, dataset, registry, samples


@pytest.fixture(scope="session")
def roads():
    return samples.roads_class()


@pytest.fixture(scope="session")
def rail():
    return samples.rail_class()


@pytest.fixture(scope="session")
def fixed_links():
    return samples.fixed_links_class()


@pytest.fixture()
def store(tmp_path):
    path = str(tmp_path / "store")
    registry.init_store(path)
    return path


@pytest.fixture()
def seeded_store(tmp_path, roads, rail, fixed_links):
    """Store preloaded with the three calibrated sample classes."""
    path = str(tmp_path / "store")
    for cls in (roads, rail, fixed_links):
        registry.save_class(cls, path)
    return path


class CliResult:
    def __init__(self, code: int, out: str, err: str):
        self.code = code
        self.out = out
        self.err = err


@pytest.fixture()
def run_cli(monkeypatch):
    """In-process CLI invoker capturing stdout/stderr and the exit code."""

    def invoke(*argv: str, env: dict[str, str] | None = None) -> CliResult:
        monkeypatch.delenv("REFCAST_STORE", raising=False)
        for key, value in (env or {}).items():
            monkeypatch.setenv(key, value)
        out, err = io.StringIO(), io.StringIO()
        old_out, old_err = sys.stdout, sys.stderr
        sys.stdout, sys.stderr = out, err
        try:
            try:
                code = cli.main(list(argv))
            except SystemExit as exc:  # argparse usage errors
                code = int(exc.code or 0)
        finally:
            sys.stdout, sys.stderr = old_out, old_err
        return CliResult(code, out.getvalue(), err.getvalue())

    return invoke


@pytest.fixture()
def sample_csv(tmp_path, roads):
    path = tmp_path / "roads.csv"
    path.write_text(dataset.serialize_records(roads.records), encoding="utf-8")
    return str(path)
