"""Named parameter sets that regenerate the reference figures at desk scale."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Preset:
    name: str
    command: str
    config: dict = field(default_factory=dict)
    description: str = ""


_PRESETS = (
    Preset("single-node", "simulate",
           {"b": [0.1], "nu": [0.5], "rho": [0.5], "x0": 0.9, "y0": [0.0], "t_end": 200.0},
           "single agent, stable node"),
    Preset("single-spiral", "simulate",
           {"b": [1.0], "nu": [0.5], "rho": [0.5], "x0": 0.9, "y0": [0.0], "t_end": 200.0},
           "single agent, stable spiral"),
    Preset("single-degenerate", "simulate",
           {"b": [0.5], "nu": [0.75], "rho": [0.5], "x0": 0.9, "y0": [0.0], "t_end": 200.0},
           "single agent, degenerate node"),
    Preset("two-agent-nominal", "simulate",
           {"b": [1.0, 1.0], "nu": [0.75, 0.25], "rho": [0.75, 0.25], "topology": "dyad",
            "x0": 0.5, "y0": [0.0, 0.0], "t_end": 200.0},
           "two communities, nominal parameters"),
    Preset("limit-cycle", "simulate",
           {"b": [0.2, 0.1], "nu": [0.01, 0.9], "rho": [0.001, 0.1], "topology": "dyad",
            "x0": 0.001, "y0": [0.5, 0.5], "t_end": 5000.0, "n_samples": 5001},
           "two communities on a limit cycle, started inside"),
    Preset("limit-cycle-outside", "simulate",
           {"b": [0.2, 0.1], "nu": [0.01, 0.9], "rho": [0.001, 0.1], "topology": "dyad",
            "x0": 0.1, "y0": [1.0, 0.3], "t_end": 5000.0, "n_samples": 5001},
           "two communities on a limit cycle, started outside"),
    Preset("aggregation-demo", "aggregate",
           {"n": 100, "t_end": 200.0, "x0": 0.1, "y0": 0.0, "seed": 0},
           "n = 100 uniform-weight self-directed population"),
    Preset("ocp-sustainable", "ocp", {"delta": 0.01, "x0": 0.1, "t_end": 1000.0},
           "optimal feedback for a small discount rate"),
    Preset("ocp-unsustainable", "ocp", {"delta": 10.0, "x0": 0.5, "t_end": 5.0},
           "optimal feedback under heavy discounting"),
    Preset("learning-identical", "learn",
           {"nu1": 0.5, "nu2": 0.5, "b1": 1.0, "b2": 1.0, "x0": 0.5, "y1": 0.0, "y2": 0.0,
            "rho1": 0.8, "rho2": 0.2, "t_end": 100.0},
           "best-response learning, identical social relevance"),
    Preset("learning-different", "learn",
           {"nu1": 0.75, "nu2": 0.25, "b1": 1.0, "b2": 1.0, "x0": 0.5, "y1": 0.0, "y2": 0.0,
            "rho1": 0.8, "rho2": 0.2, "t_end": 100.0},
           "best-response learning, different social relevance"),
    Preset("game-a", "sweep", {"figure": "game-a", "n": 100},
           "continuous game over the average and difference of nu"),
    Preset("disc-trag", "sweep", {"figure": "disc-trag", "n": 50},
           "discrete game labels over (rho_L, rho_H) slices"),
)


def figure_recipes():
    return {p.name: p for p in _PRESETS}


def get_preset(name):
    table = figure_recipes()
    if name not in table:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(sorted(table))}")
    return table[name]
