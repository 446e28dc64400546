# State generators module
from src.generators.state_generator import (
    MIXTURE_PRESETS,
    StateGenerator,
    StateKind,
    cat_state,
    coherent,
    coherent_mixture,
    fock,
    photon_added,
    suggest_nmax,
    suggest_thermal_nmax,
    thermal,
)

__all__ = [
    "coherent",
    "thermal",
    "fock",
    "coherent_mixture",
    "cat_state",
    "photon_added",
    "suggest_nmax",
    "suggest_thermal_nmax",
    "StateGenerator",
    "StateKind",
    "MIXTURE_PRESETS",
]
