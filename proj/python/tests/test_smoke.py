import math
import os

import numpy as np
import pytest

import neqt

CONFIGS = os.environ.get("NEQT_CONFIG_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "configs"))


def dot(d=0.4, dmu=0.2):
    return neqt.system({
        "sample": {"h_S": [[0.0]]},
        "c_R": 1.0,
        "leads": [
            {"d": d, "phi": [1.0], "beta": 20.0, "mu": dmu / 2},
            {"d": d, "phi": [1.0], "beta": 20.0, "mu": -dmu / 2},
        ],
    })


def test_resonant_transmission():
    for d in (0.2, 0.5, 1.0):
        T = neqt.transmission(dot(d), 0.0)
        assert abs(T[0, 1] - 1 / (2 * math.pi)) < 1e-10


def test_currents_and_sum_rule():
    out = neqt.currents(dot())
    assert out["J"][0] > 0
    assert abs(out["J"].sum()) < 1e-12
    assert out["sigma"] > 0


def test_spectral_violation_for_strong_coupling():
    rep = neqt.check_spectral_condition(neqt.system(os.path.join(CONFIGS, "strong_coupling.json")))
    assert not rep["passed"]
    assert abs(rep["violations"][-1][0] - 2 * math.cosh(0.5 * math.log(99))) < 1e-8


def test_density_and_green_functions():
    s = neqt.system(os.path.join(CONFIGS, "two_site_interacting.json"))
    with pytest.raises(neqt.ConfigError):
        neqt.density_matrix(s, [0, 1])
    bare = neqt.system(os.path.join(CONFIGS, "three_lead.json"))
    rho = neqt.density_matrix(bare, [0, 1, (0, 0)])
    assert np.allclose(rho, rho.conj().T, atol=1e-12)
    g = neqt.green_functions(bare, 0.0, 0, 0)
    assert abs(g["lesser"] - 1j * rho[0, 0]) < 1e-9


def test_oracle_plateau_matches_landauer_buttiker():
    s = dot()
    run = neqt.evolve_free(s, lead_length=200, dt=1.0)
    lb = neqt.currents(s)["J"][0]
    assert abs(run["charge_plateaus"][0]["value"] - lb) < 0.05 * lb
    assert run["charge"].shape[1] == 2


def test_bad_config_raises():
    bad = neqt.system({"sample": {"h_S": [[0.0]]}, "c_R": -1.0, "leads": []})
    assert "c_R > 0" in bad.validate()
    with pytest.raises(neqt.ConfigError):
        neqt.currents(bad)
