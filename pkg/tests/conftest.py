from typing import Generator

import numpy as np
import pytest

from app.data import Dataset, build_benchmark
from app.types import TrainConfig
from server.config import get_settings
from tests.fixtures.micro import tiny_config


@pytest.fixture(autouse=True)
def test_env(monkeypatch: pytest.MonkeyPatch) -> Generator[None, None, None]:
    monkeypatch.setenv("STEAM_ENV", "test")
    monkeypatch.setenv("STEAM_LOG_LEVEL", "WARNING")
    monkeypatch.setenv("STEAM_WORKERS", "1")
    monkeypatch.setenv("STEAM_APP_VERSION", "0.1.0-test")
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture()
def micro_config() -> TrainConfig:
    return tiny_config()


@pytest.fixture()
def micro_dataset(micro_config: TrainConfig) -> Dataset:
    return build_benchmark(micro_config)
