"""Connection language: parsing, vertex numbering and equation generation."""

from .codegen import generate_equations, render_equations
from .flatten import VertexNumbering, build_graph, flatten_graph, number_vertices
from .parser import parse

__all__ = ["VertexNumbering", "build_graph", "flatten_graph", "generate_equations", "number_vertices", "parse", "render_equations"]
