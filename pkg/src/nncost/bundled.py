"""Accessors for data files shipped inside the package: the default
hardware profile and a set of example models."""

from __future__ import annotations

from importlib import resources


def _data_root():
    return resources.files(__package__) / "data"


def default_profile_text() -> str:
    """CSV text of the bundled synthetic profile."""
    return (_data_root() / "profiles" / "default.csv").read_text(encoding="utf-8")


def model_names() -> list[str]:
    """Names of the bundled example models (without the .json suffix)."""
    return sorted(
        p.name[: -len(".json")]
        for p in (_data_root() / "models").iterdir()
        if p.name.endswith(".json")
    )


def model_text(name: str) -> str:
    """JSON text of one bundled example model."""
    path = _data_root() / "models" / f"{name}.json"
    if not path.is_file():
        raise FileNotFoundError(f"no bundled model named '{name}' (have: {model_names()})")
    return path.read_text(encoding="utf-8")
