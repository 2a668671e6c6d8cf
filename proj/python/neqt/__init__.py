"""Python access to the neqt transport engine."""

import json as _json

from ._neqt import (  # noqa: F401
    ConfigError,
    NumericalFailure,
    System,
    check_spectral_condition,
    currents,
    density_matrix,
    entropy_production,
    evolve_adiabatic,
    evolve_free,
    evolve_interacting,
    fourier_lesser,
    green_functions,
    hartree_fock_potential,
    hartree_fock_system,
    onsager_matrix,
    sample_resolvent,
    surface_green,
    transmission,
)


def system(spec):
    """Build a System from a dict, a JSON string or a path to a JSON file."""
    if isinstance(spec, dict):
        return System.from_json(_json.dumps(spec))
    text = str(spec)
    if text.lstrip().startswith("{"):
        return System.from_json(text)
    return System.load(text)
