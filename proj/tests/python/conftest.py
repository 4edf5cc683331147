import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[2] / "tools"))

from make_demo import write_demo  # noqa: E402


@pytest.fixture(scope="session")
def city(tmp_path_factory):
    return write_demo(tmp_path_factory.mktemp("city"))


@pytest.fixture(scope="session")
def snapshot(city):
    import verdant

    return verdant.ingest(city / "census.csv", city / "species.csv", city / "lst.asc",
                          city / "nv.asc", city / "roads.geojson", date="2024-05-01")


@pytest.fixture(scope="session")
def engine(snapshot):
    import verdant

    return verdant.Engine(snapshot)
