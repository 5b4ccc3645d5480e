"""Bundled CoNLL-U fixtures."""

from importlib import resources
from pathlib import Path

FIXTURES = ("fig1", "fig2", "fig3", "fig4", "fig5")


def path(name: str) -> Path:
    return Path(str(resources.files(__name__).joinpath(name)))


def fixture_paths(name: str) -> dict[str, Path]:
    return {kind: path(f"{name}_{kind}.conllu") for kind in ("tree", "graph", "gold")}
