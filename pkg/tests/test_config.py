"""Layered configuration: defaults, file, environment, CLI precedence."""

from __future__ import annotations

import json

import pytest

from cer.config import ENV_KEYS, RunConfig, load_config_file, resolve_config
from cer.errors import ConfigError


def test_defaults():
    config = RunConfig()
    assert config.retriever_mode == "sparse"
    assert config.k == 20
    assert config.m == 3
    assert config.prompt_variant == "full"
    assert config.seed == 42
    assert config.strict_counts is False
    assert config.char_budget == 24000
    assert config.max_in_flight == 4
    assert (config.k1, config.b) == (1.2, 0.75)
    assert config.learning_rate == 0.1
    assert config.l2 == 1e-4
    assert config.max_epochs == 200
    assert config.patience == 10
    assert config.llm_endpoint is None
    config.validate()  # defaults are a valid configuration


def test_load_json_config(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"k": 7, "b": 0.5, "strict_counts": True}))
    assert load_config_file(path) == {"k": 7, "b": 0.5, "strict_counts": True}


def test_load_key_value_config_with_comments(tmp_path):
    path = tmp_path / "config.cfg"
    path.write_text(
        "# retrieval settings\n"
        "k = 9\n"
        "\n"
        "retriever_mode=dense\n"
        "b=0.25\n"
        "strict_counts=yes\n"
    )
    assert load_config_file(path) == {
        "k": 9,
        "retriever_mode": "dense",
        "b": 0.25,
        "strict_counts": True,
    }


def test_config_file_errors(tmp_path):
    path = tmp_path / "config.json"
    path.write_text('{"k": 5')
    with pytest.raises(ConfigError, match="invalid JSON"):
        load_config_file(path)

    path.write_text('{"retrieval_k": 5}')
    with pytest.raises(ConfigError, match="unknown config key 'retrieval_k'"):
        load_config_file(path)

    path.write_text("[1, 2]")  # not an object; falls to key=value parsing
    with pytest.raises(ConfigError):
        load_config_file(path)

    kv = tmp_path / "config.cfg"
    kv.write_text("k: 5\n")
    with pytest.raises(ConfigError, match="line 1"):
        load_config_file(kv)


def test_coercion(tmp_path):
    path = tmp_path / "config.cfg"
    path.write_text("k=15\nlearning_rate=0.5\nstrict_counts=false\nprompt_variant=no_role\n")
    values = load_config_file(path)
    assert values == {
        "k": 15,
        "learning_rate": 0.5,
        "strict_counts": False,
        "prompt_variant": "no_role",
    }
    assert isinstance(values["k"], int)
    assert isinstance(values["learning_rate"], float)

    path.write_text("k=many\n")
    with pytest.raises(ConfigError, match="integer"):
        load_config_file(path)
    path.write_text("b=wide\n")
    with pytest.raises(ConfigError, match="number"):
        load_config_file(path)
    path.write_text("strict_counts=maybe\n")
    with pytest.raises(ConfigError, match="boolean"):
        load_config_file(path)


def test_precedence_cli_over_env_over_file_over_default(tmp_path, monkeypatch):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"llm_endpoint": "http://from-file", "k": 5}))
    monkeypatch.setenv("CER_LLM_ENDPOINT", "http://from-env")
    monkeypatch.setenv("CER_LLM_API_KEY", "env-key")

    # file < env
    config = resolve_config(config_path=path)
    assert config.llm_endpoint == "http://from-env"
    assert config.llm_api_key == "env-key"
    assert config.k == 5  # file beats default
    assert config.m == 3  # untouched default

    # env < CLI
    config = resolve_config(
        {"llm_endpoint": "http://from-cli", "k": 11}, config_path=path
    )
    assert config.llm_endpoint == "http://from-cli"
    assert config.k == 11
    assert config.llm_api_key == "env-key"  # CLI silent on this one


def test_none_cli_values_do_not_override(tmp_path, monkeypatch):
    monkeypatch.setenv("CER_EMBED_ENDPOINT", "http://embed")
    config = resolve_config({"embed_endpoint": None, "k": None})
    assert config.embed_endpoint == "http://embed"
    assert config.k == 20


def test_empty_env_values_ignored(monkeypatch):
    monkeypatch.setenv("CER_LLM_ENDPOINT", "")
    assert resolve_config().llm_endpoint is None


def test_env_key_names():
    assert ENV_KEYS == {
        "llm_endpoint": "CER_LLM_ENDPOINT",
        "llm_api_key": "CER_LLM_API_KEY",
        "embed_endpoint": "CER_EMBED_ENDPOINT",
    }


def test_resolve_rejects_unknown_cli_key():
    with pytest.raises(ConfigError, match="unknown config key"):
        resolve_config({"retrieval_depth": 4})


@pytest.mark.parametrize(
    "overrides, message",
    [
        ({"retriever_mode": "hybrid"}, "retriever_mode"),
        ({"prompt_variant": "no_claim"}, "prompt_variant"),
        ({"k": 0}, "k must be >= 1"),
        ({"m": 0}, "m must be >= 1"),
        ({"max_in_flight": 0}, "max_in_flight"),
        ({"k1": 0.0}, "k1 must be positive"),
        ({"b": 1.5}, "b must be in"),
        ({"b": -0.1}, "b must be in"),
        ({"learning_rate": 0.0}, "learning_rate"),
        ({"l2": -1.0}, "l2"),
        ({"max_epochs": 0}, "max_epochs"),
        ({"patience": 0}, "patience"),
    ],
)
def test_validate_errors(overrides, message):
    with pytest.raises(ConfigError, match=message):
        RunConfig(**overrides).validate()


def test_resolve_validates(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"k": 0}))
    with pytest.raises(ConfigError, match="k must be >= 1"):
        resolve_config(config_path=path)
