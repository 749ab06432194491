from absint.lang.annotate import AnnotatedProgram, Directive, annotate
from absint.lang.parser import ImpSyntaxError, LabelMismatchError, parse_imp
from absint.lang.render import render_expr, render_guard, render_program

__all__ = [
    "AnnotatedProgram",
    "Directive",
    "ImpSyntaxError",
    "LabelMismatchError",
    "annotate",
    "parse_imp",
    "render_expr",
    "render_guard",
    "render_program",
]
