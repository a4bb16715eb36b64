# Copyright 2025 laguerre-calculus contributors.
# See LICENSE file for licensing details.

"""Render CSV side files from the package templates."""

from jinja2 import Environment, PackageLoader, StrictUndefined


def format_number(value: object) -> str:
    """Format a scalar with the shortest representation that round-trips."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    return repr(float(value))  # type: ignore[arg-type]


def render(template_name: str, **context) -> str:
    """Render one of the package templates.

    Args:
        template_name: file name under `laguerre_calculus/templates`
        context: template variables

    Returns:
        str: Rendered content
    """
    jinja2_environment = Environment(
        loader=PackageLoader("laguerre_calculus", "templates"),
        undefined=StrictUndefined,
        keep_trailing_newline=True,
    )
    jinja2_environment.filters["number"] = format_number
    template = jinja2_environment.get_template(template_name)
    return template.render(**context)
