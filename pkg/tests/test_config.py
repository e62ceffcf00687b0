import pytest

from loojam.antijam import CorrectionPolicy
from loojam.config import ConfigError, load_config, parse_config
from loojam.jammer import JammerModel


def test_defaults():
    exp = parse_config({})
    assert exp.trial.n_fft == 256 and exp.trial.snr_db == 5.0
    assert exp.antijam.policy is CorrectionPolicy.NEGATION


def test_shipped_sweep_config(root):
    exp = load_config(root / "configs" / "roc_sweep.toml")
    t = exp.trial
    assert (t.snr_db, t.jsr_db, t.trials) == (5.0, 0.0, 2000)
    assert t.jammer.model is JammerModel.FREQUENCY_SHIFT
    assert t.tau_grid[0] == 0.0 and t.tau_grid[-1] == 1.0


def test_shipped_cdl_config(root):
    assert load_config(root / "configs" / "cdl_d.toml").trial.channel_profile == "cdl_d"


def test_all_sections(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text(
        """
[signal]
n = 64
scs_hz = 30000.0
[channel]
profile_path = "cdl_d"
mode = "linear"
snr_db = 10
[jammer]
model = "frequency_shift"
offset = 1.5
targets = [3]
phase = 0.1
jsr_db = 3.0
seed = 4
[detector]
epsilon = 1e-5
tau = 0.9
max_targets = 2
[antijam]
policy = "paper"
candidate_step = 0.25
candidate_max = 2.0
[run]
trials = 10
base_seed = 9
tau_grid = [0.0, 1.0]
per_subcarrier = true
"""
    )
    exp = load_config(p)
    t = exp.trial
    assert t.n_fft == 64 and t.subcarrier_spacing == 30000.0
    assert t.channel_mode == "linear" and t.snr_db == 10.0
    assert t.jammer.offset == 1.5 and t.jammer.targets == (3,) and t.jammer.seed == 4
    assert t.jsr_db == 3.0 and t.detector.max_targets == 2 and t.detector.tau == 0.9
    assert exp.antijam.policy is CorrectionPolicy.PAPER and exp.antijam.candidate_step == 0.25
    assert exp.per_subcarrier and t.tau_grid == (0.0, 1.0)


def test_jammer_disabled():
    assert parse_config({"jammer": {"enabled": False}}).trial.jammer is None


def test_noiseless_snr():
    assert parse_config({"channel": {"snr_db": "inf"}}).trial.noiseless


@pytest.mark.parametrize(
    "data",
    [
        {"bogus": {}},
        {"signal": {"nn": 3}},
        {"detector": {"tau": 2.0}},
        {"run": {"tau_grid": [0.5, 0.2]}},
        {"antijam": {"policy": "other"}},
        {"antijam": {"candidate_step": 0}},
        {"run": {"trials": 0}},
        {"signal": 5},
    ],
)
def test_rejects(data):
    with pytest.raises(ConfigError):
        parse_config(data)


def test_bad_toml(tmp_path):
    p = tmp_path / "bad.toml"
    p.write_text("[signal\nn=")
    with pytest.raises(ConfigError, match="invalid TOML"):
        load_config(p)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "none.toml")
