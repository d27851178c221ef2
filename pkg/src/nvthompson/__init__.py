"""Exact arithmetic in the higher-dimensional Thompson groups nV."""
from .elements import (
    Element, block_count, caret_count, compose, conjugate, depth, deserialize, equals,
    eval_point, format_element, identity, invert, make_element, parse_element, power,
    random_element, reduce, serialize,
)
from .errors import NVError
from .generators import Symbol, evaluate_word, format_word, generator, parse_word, sym
from .geometry import Pattern, validate_pattern
from .normal_form import decompose, semi_normal_form, upper_bound_length
from .trees import TreePairDiagram, diagram_to_element, element_to_diagram, parse_diagram, parse_tree

__version__ = "0.1.0"
