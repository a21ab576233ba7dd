"""
Report Renderer - Render run summaries with Jinja2.
"""

import logging
from typing import Any

from jinja2 import BaseLoader, Environment, StrictUndefined

from .registry import RecipeConfig

logger = logging.getLogger(__name__)

_env = Environment(
    loader=BaseLoader(),
    undefined=StrictUndefined,
    autoescape=False,
    keep_trailing_newline=True,
)


def _fmt(value: Any, digits: int = 6) -> str:
    if isinstance(value, float):
        return f"{value:.{digits}g}"
    return str(value)


_env.filters["fmt"] = _fmt


def render_template(template: str, variables: dict[str, Any]) -> str:
    """
    Render one template string.

    If the template fails (missing variable, syntax error) the raw text is
    returned and a warning is logged, so a broken report never fails a run.
    """
    try:
        return _env.from_string(template).render(**variables)
    except Exception as e:
        logger.warning(f"Report template failed to render: {e}")
        return template


def render_report(recipe: RecipeConfig, variables: dict[str, Any]) -> str:
    """
    Render a recipe's report template.

    Supports variable substitution ({{ config.k }}), conditionals, loops and
    the `fmt` filter for compact floats ({{ value | fmt(4) }}).
    """
    if not recipe.report:
        return ""
    return render_template(recipe.report, variables)
