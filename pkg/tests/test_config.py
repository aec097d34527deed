from pathlib import Path

import pytest

from app.types import (
    ConfigurationError,
    MethodVariant,
    ProtocolMode,
    TrainConfig,
    echo_config,
    echo_lines,
    full_scale_defaults,
    load_config,
    parse_config_text,
)
from server.config import get_settings
from tests.fixtures.micro import tiny_config


def test_empty_file_gives_defaults() -> None:
    config = parse_config_text("")
    assert config == TrainConfig()
    assert (config.tau, config.alpha, config.bank_size, config.p_same_class) == (0.07, 0.999, 256, 0.5)
    assert load_config(None) == config


def test_comments_and_whitespace_are_ignored() -> None:
    text = "# a comment\n\n  tau = 0.2   # inline\nvariant=vanilla\nhidden_dims = 16, 8\ntarget_domain=\n"
    config = parse_config_text(text)
    assert config.tau == 0.2
    assert config.variant is MethodVariant.VANILLA
    assert config.hidden_dims == (16, 8)
    assert config.target_domain is None


@pytest.mark.parametrize(
    "config",
    [
        TrainConfig(),
        tiny_config(variant=MethodVariant.L2_MATCHING, target_domain=1, cosine_annealing=False),
        tiny_config(mode=ProtocolMode.MSDA, msda_adapt_fraction=0.25, tau=0.1 + 0.2),
    ],
)
def test_echo_then_load_is_identity(config: TrainConfig, tmp_path: Path) -> None:
    path = echo_config(config, tmp_path / "nested" / "config.txt")
    assert load_config(path) == config


def test_echo_lists_every_key_in_order() -> None:
    lines = list(echo_lines(TrainConfig()))
    assert lines[0].startswith("#")
    assert [line.split("=", 1)[0] for line in lines[1:]] == list(TrainConfig.model_fields)
    assert "hidden_dims=64,64" in lines
    assert "cosine_annealing=true" in lines


def test_unknown_key_names_key_and_line() -> None:
    with pytest.raises(ConfigurationError) as info:
        parse_config_text("tau=0.1\nbogus=3\n")
    assert (info.value.key, info.value.line) == ("bogus", 2)


def test_duplicate_key() -> None:
    with pytest.raises(ConfigurationError) as info:
        parse_config_text("tau=0.1\n\ntau=0.2\n")
    assert (info.value.key, info.value.line) == ("tau", 3)


def test_line_without_equals() -> None:
    with pytest.raises(ConfigurationError) as info:
        parse_config_text("epochs=3\njust words\n")
    assert info.value.line == 2


@pytest.mark.parametrize(
    ("text", "key", "line"),
    [
        ("epochs=2\ntau=0\n", "tau", 2),
        ("alpha=1.0\n", "alpha", 1),
        ("bank_size=abc\n", "bank_size", 1),
        ("variant=resnet\n", "variant", 1),
        ("n_domains=3\nbatch_size=7\n", "batch_size", 2),
    ],
)
def test_invalid_values_name_key_and_line(text: str, key: str, line: int) -> None:
    with pytest.raises(ConfigurationError) as info:
        parse_config_text(text)
    assert info.value.key == key
    assert info.value.line == line


def test_missing_file(tmp_path: Path) -> None:
    with pytest.raises(ConfigurationError):
        load_config(tmp_path / "absent.txt")


def test_bank_cannot_exceed_domain_size() -> None:
    with pytest.raises(ConfigurationError):
        parse_config_text("per_domain=100\nbank_size=200\n")


def test_full_scale_defaults() -> None:
    config = full_scale_defaults(epochs=1)
    assert (config.bank_size, config.per_domain, config.epochs) == (2048, 2048, 1)


def test_settings_read_environment(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("STEAM_WORKERS", "4")
    get_settings.cache_clear()
    settings = get_settings()
    assert settings.workers == 4
    assert settings.env == "test"
    assert settings.app_version == "0.1.0-test"
