"""Resource-aware parity automata and games."""
from .exceptions import ResourceGameError
from .extent import extent_fig1, extent_generic
from .model import load_model, parse_model, render_model
from .oracle import oracle_extent_credit, oracle_extent_enumerate, random_model
from .resource_game import build_resource_game, zielonka_solve
from .runs import is_accepting, run_value, unfold
from .semiring import Semiring, SemiringValue
from .strategy import synth_fig2

__all__ = [
    "ResourceGameError",
    "Semiring",
    "SemiringValue",
    "build_resource_game",
    "extent_fig1",
    "extent_generic",
    "is_accepting",
    "load_model",
    "oracle_extent_credit",
    "oracle_extent_enumerate",
    "parse_model",
    "random_model",
    "render_model",
    "run_value",
    "synth_fig2",
    "unfold",
    "zielonka_solve",
]
