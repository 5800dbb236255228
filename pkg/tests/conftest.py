import numpy as np
import pytest

from gridimpact import fixtures
from gridimpact.dataio import load_county, load_weather


@pytest.fixture(scope="session")
def fixture_dir(tmp_path_factory):
    """Hourly fixture bundle shared by the whole session."""
    out = tmp_path_factory.mktemp("fx")
    for which in ("cold-valley", "hot-flats"):
        fixtures.write_county(str(out), which, dt_hours=1.0)
    return out


@pytest.fixture(scope="session")
def cold_county(fixture_dir):
    return load_county(str(fixture_dir / "cold_valley.yaml"))


@pytest.fixture(scope="session")
def cold_weather(cold_county):
    return load_weather(cold_county.weather_file, 1.0)


@pytest.fixture(scope="session")
def hot_county(fixture_dir):
    return load_county(str(fixture_dir / "hot_flats.yaml"))


@pytest.fixture(scope="session")
def hot_weather(hot_county):
    return load_weather(hot_county.weather_file, 1.0)


@pytest.fixture()
def rng():
    return np.random.default_rng(2024)
