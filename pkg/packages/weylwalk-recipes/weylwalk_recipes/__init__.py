"""
weylwalk recipes - recipe registry and report renderer.
"""

from .registry import RecipeConfig, RecipeRegistry, get_default_registry
from .renderer import render_report, render_template

__all__ = [
    "RecipeRegistry",
    "RecipeConfig",
    "get_default_registry",
    "render_report",
    "render_template",
]
