"""
Recipe Registry - Load and manage experiment recipes from YAML files.

Recipes are YAML files with:
- name: recipe name
- version: recipe version
- kind: experiment kind the recipe drives (e.g., 'tail', 'limit-dist')
- description: one line shown by the CLI
- defaults: mapping of ExperimentConfig fields (lowest precedence)
- report: Jinja2 template for the run summary
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml


@dataclass
class RecipeConfig:
    """Configuration loaded from a recipe YAML file."""

    name: str
    """Recipe name (e.g., 'tail', 'heavy-tail')."""

    version: str
    """Recipe version string."""

    kind: str
    """Experiment kind the defaults are meant for."""

    description: str = ""

    defaults: dict[str, Any] = field(default_factory=dict)
    """Default ExperimentConfig values."""

    report: str = ""
    """Jinja2 template of the run summary; empty means no report."""

    raw_yaml: dict[str, Any] = field(default_factory=dict)
    """Original YAML content for reference."""

    source_path: Path | None = None
    """Path to the source YAML file."""


class RecipeRegistry:
    """
    Registry for loading and caching experiment recipes.

    Recipes are loaded from YAML files in the recipes directory.
    """

    def __init__(self, recipes_dir: str | Path | None = None):
        """
        Initialize the recipe registry.

        Args:
            recipes_dir: Directory containing recipe YAML files.
                        Defaults to 'recipes/' relative to project root.
        """
        if recipes_dir is None:
            project_root = Path(__file__).parent.parent.parent.parent
            recipes_dir = project_root / "recipes"

        self.recipes_dir = Path(recipes_dir)
        self._cache: dict[str, RecipeConfig] = {}

    def load(self, recipe_name: str) -> RecipeConfig:
        """
        Load a recipe by name.

        Raises:
            FileNotFoundError: If the recipe file doesn't exist.
            ValueError: If the YAML is not a valid recipe.
        """
        if recipe_name in self._cache:
            return self._cache[recipe_name]

        yaml_path = None
        for pattern in (f"{recipe_name}.yaml", f"{recipe_name}.yml"):
            candidate = self.recipes_dir / pattern
            if candidate.exists():
                yaml_path = candidate
                break

        if yaml_path is None:
            raise FileNotFoundError(
                f"Recipe file not found for '{recipe_name}' in {self.recipes_dir}"
            )

        with open(yaml_path, "r", encoding="utf-8") as f:
            raw = yaml.safe_load(f)

        if not isinstance(raw, dict):
            raise ValueError(f"Invalid recipe YAML in {yaml_path}: expected dict")

        kind = raw.get("kind")
        if not isinstance(kind, str) or not kind:
            raise ValueError(f"Recipe missing 'kind' in {yaml_path}")

        defaults = raw.get("defaults", {}) or {}
        if not isinstance(defaults, dict):
            raise ValueError(f"Invalid 'defaults' in {yaml_path}: expected dict")
        if "kind" in defaults and defaults["kind"] != kind:
            raise ValueError(
                f"Recipe {yaml_path} declares kind '{kind}' but defaults say '{defaults['kind']}'"
            )

        report = raw.get("report", "") or ""
        if not isinstance(report, str):
            raise ValueError(f"Invalid 'report' in {yaml_path}: expected string")

        config = RecipeConfig(
            name=raw.get("name", recipe_name),
            version=str(raw.get("version", "0.0.0")),
            kind=kind,
            description=raw.get("description", ""),
            defaults={**defaults, "kind": kind},
            report=report,
            raw_yaml=raw,
            source_path=yaml_path,
        )

        self._cache[recipe_name] = config
        return config

    def list_recipes(self) -> list[str]:
        """List all recipe names in the recipes directory."""
        recipes = []
        if not self.recipes_dir.exists():
            return recipes

        for path in self.recipes_dir.iterdir():
            if path.suffix in (".yaml", ".yml"):
                recipes.append(path.stem)

        return sorted(recipes)

    def for_kind(self, kind: str) -> RecipeConfig | None:
        """The first recipe (by name) that drives `kind`, if any."""
        for name in self.list_recipes():
            recipe = self.load(name)
            if recipe.kind == kind:
                return recipe
        return None

    def reload(self, recipe_name: str | None = None) -> None:
        """
        Reload recipe(s) from disk.

        Args:
            recipe_name: If specified, reload only this recipe.
                        If None, clear entire cache.
        """
        if recipe_name:
            self._cache.pop(recipe_name, None)
        else:
            self._cache.clear()


_default_registry: RecipeRegistry | None = None


def get_default_registry() -> RecipeRegistry:
    """Get the default recipe registry instance."""
    global _default_registry
    if _default_registry is None:
        _default_registry = RecipeRegistry()
    return _default_registry
