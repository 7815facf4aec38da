"""Configuration loading for the demo services."""

import json


class Config:
    def __init__(self, values: dict[str, str]) -> None:
        self.values = values

    def get(self, key: str, default: str = "") -> str:
        found: str = self.values.get(key, default)
        return found


def parse_pairs(raw: str) -> dict[str, str]:
    pairs: dict[str, str] = {}
    for chunk in raw.split(","):
        key, _, value = chunk.partition("=")
        pairs[key.strip()] = value.strip()
    return pairs


def load_config(path: str) -> Config:
    with open(path) as handle:
        text = handle.read()
    data = json.loads(text)
    merged = {str(k): str(v) for k, v in data.items()}
    return Config(merged)


def flag_names(config: Config, prefix: str) -> list[str]:
    names: list[str] = [name for name in config.values if name.startswith(prefix)]
    return names


DEFAULT_CONFIG: Config = Config({"timeout": "30"})

SETTINGS: dict[str, str] = {"retries": "3", "verbose": "false"}
