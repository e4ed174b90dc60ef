import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from qlattice import harness as H
from qlattice.cli import main
from qlattice.identities import registry as R
from qlattice.identities.degenerations import CHAINS
from qlattice.scalarfield import Param


def _strip(records):
    return [{k: v for k, v in r.items() if k != "wall_seconds" and k != "lhs"}
            for r in records]


def test_sampling_is_deterministic():
    one = H.sample_params("jackson_8phi7", 1, 7)
    two = H.sample_params("jackson_8phi7", 1, 7)
    assert one == two and one.digest() == two.digest()
    assert H.sample_params("jackson_8phi7", 1, 8) != one


def test_sampled_rationals_have_small_denominators():
    p = H.sample_params("milne_ar_8phi7", 3, 0)
    for v in (p.a, p.b, p.d, *p.cs, *p.xs):
        assert F(v).denominator <= H.MAX_DEN
    assert H.Q_RANGE[0] <= p.q <= H.Q_RANGE[1]


@pytest.mark.parametrize("seed", range(5))
def test_sampled_modulus_is_capped(seed):
    p = H.sample_params("gustafson_ar_6psi6", 2, seed)
    z = R.REGISTRY["gustafson_ar_6psi6"].modulus(p)
    assert abs(float(z.coef) * float(p.q) ** z.qexp) <= H.MODULUS_CAP


def test_pinned_negative_powers_truncate():
    p = H.sample_params("ar_8psi8", 2, 0, cs=(Param(1, -2),) * 2, ks=(2, 2), M=4)
    rec = R.verify("ar_8psi8", p)
    assert rec.status == "Pass"
    assert "natural truncation" in rec.note


def test_sampling_error_names_tightest_constraint(monkeypatch):
    monkeypatch.setattr(H, "MAX_TRIES", 50)
    with pytest.raises(H.SamplingError) as err:
        H.sample_params("gustafson_ar_6psi6", 2, 0, a=F(9, 10), b=F(1, 100), d=F(1, 100))
    assert "convergence modulus" in err.value.tightest
    assert "convergence modulus" in str(err.value)


@pytest.mark.parametrize("chain", sorted(CHAINS))
def test_chain_targets_sample(chain):
    r = 1 if chain.startswith("88n") else 2
    p = H.sample_params(chain, r, 0)
    assert p.r == r
    assert (p.k is not None) if r == 1 else len(p.ks) == 2


# -- configuration -----------------------------------------------------------------


def test_config_from_json_and_yaml(tmp_path):
    data = {"identities": ["jackson_8phi7"], "r_values": [1], "samples": 2, "seed": 3}
    j = tmp_path / "c.json"
    j.write_text(json.dumps(data))
    y = tmp_path / "c.yaml"
    y.write_text("identities: [jackson_8phi7]\nr_values: [1]\nsamples: 2\nseed: 3\n")
    assert H.load_config(j) == H.load_config(y)
    assert H.load_config(j).samples == 2


@pytest.mark.parametrize("text", ['{"identitys": []}', '{"identities": ["nope"]}',
                                  '{"policy": {"shell_tolerance": 1}}', '[1, 2]',
                                  '{"campaign_tol": -1}', "{not json"])
def test_bad_config_is_rejected(tmp_path, text):
    path = tmp_path / "c.json"
    path.write_text(text)
    with pytest.raises(H.ConfigError):
        H.load_config(path)


# -- campaigns and exit codes --------------------------------------------------------


def test_empty_campaign_is_clean():
    rep = H.run_campaign(H.CampaignConfig(identities=[], pairs=[], workers=1))
    assert rep.records == [] and rep.exit_code == 0


def test_small_campaign_reproducible():
    cfg = dict(identities=["jackson_8phi7", "bailey_6psi6"], r_values=[1], samples=2, seed=4,
               workers=1)
    one = H.run_campaign(H.CampaignConfig(**cfg))
    two = H.run_campaign(H.CampaignConfig(**cfg))
    assert _strip(one.records) == _strip(two.records)
    assert one.exit_code == 0 and one.summary["pass"] == 4


def test_expected_divergence_counts_as_expected():
    rep = H.run_campaign(H.CampaignConfig(identities=["dr_6psi6_false"], r_values=[2],
                                          samples=1, workers=1))
    assert rep.records[0]["status"] == "Divergent" and rep.records[0]["as_expected"]
    assert rep.exit_code == 0


def _report(*records):
    recs = [dict(status=s, expected=e, as_expected=s == e) for s, e in records]
    return H.Report({}, recs, H._summary(recs), 0.0)


def test_exit_code_rules():
    assert H.exit_code(_report(("Pass", "Pass"))) == 0
    assert H.exit_code(_report(("Pass", "Pass"), ("Fail", "Pass"))) == 1
    assert H.exit_code(_report(("Pass", "Divergent"))) == 1
    assert H.exit_code(_report(("Inconclusive", "Pass"))) == 3
    assert H.exit_code(_report(("Inconclusive", "Pass"), ("Fail", "Pass"))) == 1


def test_exhausted_shell_budget_is_inconclusive(capsys):
    code = main(["verify", "--id", "bailey_6psi6", "--samples", "1", "--max-shell", "3",
                 "--workers", "1"])
    assert code == 3
    assert "Inconclusive" in capsys.readouterr().out


def test_report_file(tmp_path):
    out = tmp_path / "r.json"
    code = main(["verify", "--id", "jackson_8phi7", "--samples", "2", "--out", str(out),
                 "--workers", "1"])
    data = json.loads(out.read_text())
    assert code == 0 and len(data["records"]) == 2
    assert {"config", "records", "summary"} <= set(data)


def test_cli_ortho(capsys):
    code = main(["ortho", "--pair", "bmi", "--side", "left", "--samples", "1", "--workers", "1"])
    assert code == 0
    assert "bmi Left r=1" in capsys.readouterr().out


def test_cli_config_error(tmp_path, capsys):
    bad = tmp_path / "c.json"
    bad.write_text('{"whatever": 1}')
    assert main(["campaign", "--config", str(bad)]) == 2
    assert "configuration error" in capsys.readouterr().err


def test_cli_campaign_yaml(tmp_path, capsys):
    cfg = tmp_path / "c.yml"
    cfg.write_text("identities: [jackson_8phi7]\nr_values: [1]\nsamples: 1\nworkers: 1\n")
    assert main(["campaign", "--config", str(cfg), "--quiet"]) == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert out[-1].startswith("summary: pass=1")


def test_cli_list_subprocess():
    out = subprocess.run([sys.executable, "-m", "qlattice.cli", "list"], check=True,
                         capture_output=True, text=True).stdout
    for name in R.ids():
        assert name in out
    assert "crmi" in out and "a88s" in out
