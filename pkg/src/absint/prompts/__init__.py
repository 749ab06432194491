"""The two analysis prompt templates.

Templates live as versioned fixture files next to this module so text
fixes never require code changes.  Each template ends with a single
``[Input Program]`` marker; building a prompt is byte-deterministic:
the only varying bytes are the rendered program.

Math symbols are UTF-8 by default; the ASCII fallback spells them
bot / nabla / U / ^.
"""

from __future__ import annotations

from importlib import resources

from absint.lang.annotate import AnnotatedProgram

MARKER = "[Input Program]"
STRATEGIES = ("compositional", "transitional")

_ASCII_FALLBACK = [
    ("⊥", "bot"),
    ("∇", "nabla"),
    ("⊔", "U"),
    ("⊓", "^"),
]


def template_text(strategy: str) -> str:
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    return (
        resources.files("absint.prompts").joinpath(f"{strategy}.prompt").read_text("utf-8")
    )


def build_prompt(strategy: str, prog: AnnotatedProgram, ascii_fallback: bool = False) -> str:
    """The full template with the rendered program substituted at the
    marker."""
    template = template_text(strategy)
    if template.count(MARKER) != 1:
        raise ValueError(f"{strategy} template must contain exactly one {MARKER!r}")
    text = template.replace(MARKER, prog.render())
    if ascii_fallback:
        for symbol, spelled in _ASCII_FALLBACK:
            text = text.replace(symbol, spelled)
    return text
