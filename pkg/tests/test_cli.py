import json
import subprocess
import sys

import numpy as np
import pytest

from riccati_scattering.cli import main
from riccati_scattering.config import DEFAULTS, ConfigError, parse_config
from riccati_scattering.grid import GridFunction, SpectralFunction


def write_cfg(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture(scope="module")
def delta2_bundle(tmp_path_factory):
    d = tmp_path_factory.mktemp("delta2")
    cfg = write_cfg(d / "job.json", {"potential": {"family": "delta", "gamma": 2}})
    assert main(["direct", "--config", cfg, "--out", str(d / "out")]) == 0
    return d / "out"


def test_direct_delta_matches_closed_form(delta2_bundle):
    r = SpectralFunction.from_csv(delta2_bundle / "r_minus.csv")
    assert np.abs(r.values - 1 / (1j * r.k - 1)).max() < 1e-6
    doc = json.loads((delta2_bundle / "scattering.json").read_text())
    assert doc["v0"] == 2.0 and doc["class"] == "generic"
    assert all(c["pass"] for c in doc["report"]["checks"].values())


def test_zero_potential_gives_zero_r(tmp_path):
    cfg = write_cfg(tmp_path / "z.json", {"potential": {"family": "zero"}})
    assert main(["direct", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    for name in ("r_minus.csv", "r_plus.csv"):
        assert not np.any(SpectralFunction.from_csv(tmp_path / "o" / name).values)


def test_invalid_s_is_a_config_error(tmp_path):
    cfg = write_cfg(tmp_path / "bad.json", {"s": 0.3, "potential": {"family": "delta", "gamma": 1}})
    assert main(["direct", "--config", cfg, "--out", str(tmp_path / "o")]) == 1
    assert not (tmp_path / "o").exists()


@pytest.mark.parametrize("doc", [
    {"potential": {"family": "nope"}},
    {"potential": {"family": "delta"}},
    {"potential": {"family": "delta", "gamma": 1}, "colour": "red"},
    {"mode": "inverse", "potential": {"family": "delta", "gamma": 1}},
    {"potential": {"family": "delta", "gamma": 1}, "grid": {"N": 7}},
])
def test_config_errors(tmp_path, doc):
    cfg = write_cfg(tmp_path / "bad.json", doc)
    assert main(["direct", "--config", cfg, "--out", str(tmp_path / "o")]) == 1


def test_usage_error_and_missing_config(tmp_path):
    assert main(["direct"]) == 1
    assert main(["direct", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path)]) == 1


def test_defaults_live_in_one_table():
    cfg = parse_config({"potential": {"family": "delta", "gamma": 1}}, "direct")
    assert cfg.grid == DEFAULTS["grid"] and cfg.s == DEFAULTS["s"]
    g = cfg.make_grid()
    assert g.X == 20 and g.N == 2048 and g.k_max >= 40
    with pytest.raises(ConfigError):
        parse_config({"s_sweep": [0.6, 0.4]}, "verify")


def test_roundtrip_zero_is_exact(tmp_path):
    cfg = write_cfg(tmp_path / "z.json", {"potential": {"family": "zero"}})
    assert main(["roundtrip", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    assert not np.any(GridFunction.from_csv(tmp_path / "o" / "u_plus.csv").values)
    rep = json.loads((tmp_path / "o" / "roundtrip.json").read_text())
    assert rep["u_pass"] and rep["v0"] == 0


def test_roundtrip_delta_and_determinism(tmp_path):
    cfg = write_cfg(tmp_path / "d.json", {"potential": {"family": "delta", "gamma": 1}})
    assert main(["roundtrip", "--config", cfg, "--out", str(tmp_path / "a")]) == 0
    assert main(["roundtrip", "--config", cfg, "--out", str(tmp_path / "b")]) == 0
    rep = json.loads((tmp_path / "a" / "roundtrip.json").read_text())
    assert abs(rep["v0"] - 1) < 0.05
    assert np.abs(GridFunction.from_csv(tmp_path / "a" / "u_plus.csv").values).max() < 1e-3
    for name in ("u_plus.csv", "u_minus.csv", "scattering/r_minus.csv", "scattering/r_tilde.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_inverse_and_involute(tmp_path, delta2_bundle):
    cfg = write_cfg(tmp_path / "i.json", {"input": str(delta2_bundle / "scattering.json")})
    assert main(["inverse", "--config", cfg, "--out", str(tmp_path / "inv")]) == 0
    rep = json.loads((tmp_path / "inv" / "reconstruction.json").read_text())
    assert abs(rep["v0"] - 2) < 0.1 and rep["solver_equivalence_pass"]
    assert json.loads((tmp_path / "inv" / "membership.json").read_text())["pass"]
    assert main(["involute", "--config", cfg, "--out", str(tmp_path / "invol")]) == 0
    r_sharp = SpectralFunction.from_csv(tmp_path / "invol" / "r_sharp.csv")
    assert np.abs(r_sharp.values - 1 / (1j * r_sharp.k - 1)).max() < 1e-8


def test_verify_flags_corrupted_bundle(tmp_path, delta2_bundle):
    import shutil
    bad = tmp_path / "bad"
    shutil.copytree(delta2_bundle, bad)
    r = SpectralFunction.from_csv(bad / "r_minus.csv")
    v = r.values.copy()
    v[5] += 0.01
    r.with_values(v).to_csv(bad / "r_minus.csv")
    cfg = write_cfg(tmp_path / "v.json", {"input": str(bad / "scattering.json")})
    assert main(["verify", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    rep = json.loads((tmp_path / "o" / "verify.json").read_text())
    assert not rep["results"]["bundle"]["reality_condition"]["pass"]
    good = write_cfg(tmp_path / "g.json", {"input": str(delta2_bundle / "scattering.json"),
                                           "s_sweep": [0.6, 1.0, 2.0]})
    assert main(["verify", "--config", good, "--out", str(tmp_path / "o2")]) == 0


def test_verify_subset_of_corpus(tmp_path):
    cfg = write_cfg(tmp_path / "v.json", {"corpus": ["delta_1", "gaussian_0.5"], "lipschitz_probes": 3})
    assert main(["verify", "--config", cfg, "--out", str(tmp_path / "o"), "--seed", "3"]) == 0
    rep = json.loads((tmp_path / "o" / "verify.json").read_text())
    assert rep["pass"] and "lipschitz" in rep["results"]


def test_module_entry_point(tmp_path):
    cfg = write_cfg(tmp_path / "bad.json", {"s": 0.3, "potential": {"family": "zero"}})
    proc = subprocess.run([sys.executable, "-m", "riccati_scattering", "direct", "--config", cfg,
                           "--out", str(tmp_path / "o")], capture_output=True, text=True)
    assert proc.returncode == 1 and "s must exceed" in proc.stderr
