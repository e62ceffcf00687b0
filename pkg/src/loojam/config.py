"""TOML experiment configuration.

Sections::

    [signal]    n, scs_hz
    [channel]   profile_path, mode ("circular" | "linear"), snr_db
    [jammer]    model, offset, targets, amplitude, phase, jsr_db, seed, offset_fractions, enabled
    [detector]  any DetectorConfig field
    [antijam]   policy ("negation" | "paper"), candidate_step, candidate_max
    [run]       trials, base_seed, tau_grid, per_subcarrier, workers

Every section is optional; unknown sections or keys are errors.
"""
from __future__ import annotations

import dataclasses
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .antijam import CorrectionPolicy
from .detector import DetectorConfig
from .sim import AttackPlan, TrialConfig

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

_SECTIONS = {
    "signal": {"n", "scs_hz"},
    "channel": {"profile_path", "mode", "snr_db"},
    "jammer": {"model", "offset", "targets", "amplitude", "phase", "jsr_db", "offset_fractions", "enabled", "seed"},
    "detector": {f.name for f in dataclasses.fields(DetectorConfig)},
    "antijam": {"policy", "candidate_step", "candidate_max"},
    "run": {"trials", "base_seed", "tau_grid", "per_subcarrier", "workers"},
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class AntijamSettings:
    policy: CorrectionPolicy = CorrectionPolicy.NEGATION
    candidate_step: float = 0.5
    candidate_max: float = 4.0


@dataclass(frozen=True)
class ExperimentConfig:
    trial: TrialConfig = field(default_factory=TrialConfig)
    antijam: AntijamSettings = field(default_factory=AntijamSettings)
    per_subcarrier: bool = False
    workers: int = 1


def _check_keys(data: Mapping[str, Any]):
    for name, section in data.items():
        if name not in _SECTIONS:
            raise ConfigError(f"unknown section [{name}]")
        if not isinstance(section, Mapping):
            raise ConfigError(f"[{name}] must be a table")
        unknown = set(section) - _SECTIONS[name]
        if unknown:
            raise ConfigError(f"unknown keys in [{name}]: {sorted(unknown)}")


def parse_config(data: Mapping[str, Any]) -> ExperimentConfig:
    _check_keys(data)
    sig = data.get("signal", {})
    ch = data.get("channel", {})
    jam = dict(data.get("jammer", {}))
    det = data.get("detector", {})
    aj = data.get("antijam", {})
    run = data.get("run", {})
    try:
        detector = DetectorConfig(**det)
        plan = None
        jsr_db = float(jam.pop("jsr_db", 0.0))
        if jam.pop("enabled", True):
            if "targets" in jam:
                jam["targets"] = tuple(jam["targets"])
            if "offset_fractions" in jam:
                jam["offset_fractions"] = tuple(jam["offset_fractions"])
            plan = AttackPlan(**jam)
        snr = ch.get("snr_db", 5.0)
        snr = None if snr in ("inf", "none") else float(snr)
        if snr is not None and math.isinf(snr):
            snr = None
        trial_kwargs = dict(
            n_fft=int(sig.get("n", 256)),
            subcarrier_spacing=float(sig.get("scs_hz", 15e3)),
            snr_db=snr,
            jsr_db=jsr_db,
            jammer=plan,
            channel_profile=str(ch.get("profile_path", "flat")),
            channel_mode=str(ch.get("mode", "circular")),
            trials=int(run.get("trials", 2000)),
            base_seed=int(run.get("base_seed", 0)),
            detector=detector,
        )
        if "tau_grid" in run:
            trial_kwargs["tau_grid"] = tuple(float(t) for t in run["tau_grid"])
        trial = TrialConfig(**trial_kwargs)
        antijam = AntijamSettings(
            policy=CorrectionPolicy(aj.get("policy", "negation")),
            candidate_step=float(aj.get("candidate_step", 0.5)),
            candidate_max=float(aj.get("candidate_max", 4.0)),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    if not antijam.candidate_step > 0 or antijam.candidate_max < 0:
        raise ConfigError("antijam candidate_step must be > 0 and candidate_max >= 0")
    workers = int(run.get("workers", 1))
    if workers < 1:
        raise ConfigError("run.workers must be >= 1")
    return ExperimentConfig(trial, antijam, bool(run.get("per_subcarrier", False)), workers)


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc
    return parse_config(data)
