"""Versioned prompt-template assets.

Templates ship with the package under ``assets/prompts/v1`` and are
loaded once at startup; an alternative directory can be supplied via
configuration. Rendered text rides along in backend requests as an
``instruction`` field, which adapters may forward to their models
verbatim. Templates use ``string.Template`` placeholders ($name) so JSON
braces in the template body need no escaping.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from string import Template

from .errors import ConfigError

ASSET_VERSION = "v1"

_TEMPLATE_NAMES = (
    "question_generation",
    "vqa_count",
    "vqa_attribute",
    "key_object_selection",
    "refinement_prompt",
    "paraphrase",
)


@dataclass
class PromptAssets:
    version: str
    templates: dict[str, Template]

    def render(self, name: str, **values) -> str:
        if name not in self.templates:
            raise ConfigError(f"unknown prompt template {name!r}")
        return self.templates[name].safe_substitute(**values)


def load_prompt_assets(directory: str | Path | None = None) -> PromptAssets:
    """Load all templates from ``directory`` or the packaged defaults."""
    templates: dict[str, Template] = {}
    if directory is not None:
        base = Path(directory)
        for name in _TEMPLATE_NAMES:
            path = base / f"{name}.txt"
            if not path.is_file():
                raise ConfigError(f"prompt template missing: {path}")
            templates[name] = Template(path.read_text(encoding="utf-8"))
    else:
        root = resources.files("videorepair") / "assets" / "prompts" / ASSET_VERSION
        for name in _TEMPLATE_NAMES:
            res = root / f"{name}.txt"
            templates[name] = Template(res.read_text(encoding="utf-8"))
    return PromptAssets(version=ASSET_VERSION, templates=templates)
