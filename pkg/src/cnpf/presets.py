"""Named run configurations, one per worked example."""

from __future__ import annotations

import copy
import math

_H = 1.0 / math.sqrt(2.0)
SZEGO = {"family": "SzegoDisc", "dimension": 1, "truncation_order": 200}
BERGMAN0 = {"family": "BergmanDiscWeighted", "params": {"beta": 0.0}, "dimension": 1, "truncation_order": 200}
BERGMAN1 = {"family": "BergmanDiscWeighted", "params": {"beta": 1.0}, "dimension": 1, "truncation_order": 200}
DA2 = {"family": "DruryArveson", "dimension": 2, "truncation_order": 40}
HB2 = {"family": "HardyBall", "dimension": 2, "truncation_order": 40}
DHALF = {"family": "DirichletAlpha", "params": {"alpha": 0.5}, "dimension": 1, "truncation_order": 500}

PRESETS = {
    "h2-half-one-plus-z": {
        "command": "factorize",
        "k": SZEGO, "s": SZEGO,
        "function": {"coeffs": [[0, _H, 0.0], [1, _H, 0.0]]},
        "a": [1.0, 0.0],
    },
    "h2-z": {
        "command": "factorize",
        "k": SZEGO, "s": SZEGO,
        "function": {"coeffs": [[1, 1.0, 0.0]]},
    },
    "h2-sub-unit-z": {
        "command": "factorize",
        "k": SZEGO, "s": SZEGO,
        "function": {"coeffs": [[1, _H, 0.0]]},
        "embed": [0.5, 0.0],
    },
    "bergman-z-over-szego": {
        "command": "sarason",
        "k": BERGMAN0, "s": SZEGO,
        "function": {"coeffs": [[1, 1.0, 0.0]]},
    },
    "bergman1-random-over-szego": {
        "command": "factorize",
        "k": BERGMAN1, "s": SZEGO,
        "function": {"random": {"degree": 10}},
    },
    "da2-z1": {
        "command": "factorize",
        "k": DA2, "s": DA2,
        "function": {"coeffs": [[[1, 0], 1.0, 0.0]]},
    },
    "hardy-ball2-random-over-da2": {
        "command": "sarason",
        "k": HB2, "s": DA2,
        "function": {"random": {"degree": 4}},
        "grid": {"n_points": 20, "radius": 0.6},
    },
    "dirichlet-half-cnp": {
        "command": "kernel",
        "k": DHALF,
        "N": 500,
    },
    "bergman-over-dirichlet-half": {
        "command": "kernel",
        "k": BERGMAN0,
        "s": {"family": "DirichletAlpha", "params": {"alpha": 0.5}},
    },
    "dirichlet-half": {
        "command": "dirichlet",
        "alpha": 0.5,
        "J": 12,
        "n_coeffs": 1048576,
    },
    "carleson-point-zero": {
        "command": "carleson",
        "s": SZEGO,
        "measure": {"type": "point_mass", "z": [0.0, 0.0], "mass": 1.0},
    },
    "carleson-point-near-boundary": {
        "command": "carleson",
        "s": SZEGO,
        "measure": {"type": "point_mass", "z": [0.99, 0.0], "mass": 1.0},
        "f_degree": 400,
    },
    "carleson-area-dirichlet-half": {
        "command": "carleson",
        "s": {"family": "DirichletAlpha", "params": {"alpha": 0.5}},
        "measure": {"type": "area", "n_radial": 32, "n_angular": 64},
        "multiplier": {"function": {"coeffs": [[0, _H, 0.0], [1, _H, 0.0]]}, "degrees": [5, 10, 20]},
    },
}


def get_preset(name: str) -> dict:
    if name not in PRESETS:
        raise KeyError(name)
    return copy.deepcopy(PRESETS[name])
