import json

import numpy as np
import pytest

from loojam.cli import main
from loojam.iqfile import write_iq, write_reference
from loojam.ofdm import OfdmSymbol, qpsk, synthesize


def _err(capsys):
    line = capsys.readouterr().err.strip().splitlines()[-1]
    return json.loads(line)


def _write_config(tmp_path, extra=""):
    p = tmp_path / "c.toml"
    p.write_text(
        "[signal]\nn = 64\n[channel]\nsnr_db = \"inf\"\n"
        "[jammer]\noffset = 0.5\ntargets = [5]\n"
        "[run]\ntrials = 20\nbase_seed = 3\n" + extra
    )
    return p


def test_grid(tmp_path, capsys):
    out = tmp_path / "g.csv"
    assert main(["grid", "--csv", str(out)]) == 0
    summary = json.loads(capsys.readouterr().out.splitlines()[0])
    assert summary["pbch_total"] == 576 and summary["dmrs_fraction"] == 0.25
    lines = out.read_text().splitlines()
    assert lines[0] == "symbol,subcarrier,kind" and len(lines) == 1 + 4 * 240


def test_simulate_then_detect_and_correct(tmp_path, capsys):
    cfg = _write_config(tmp_path)
    iq, ref = tmp_path / "rx.iq", tmp_path / "ref.csv"
    assert main(["simulate", "--config", str(cfg), "--iq-out", str(iq), "--reference-out", str(ref)]) == 0
    capsys.readouterr()
    fixed = tmp_path / "fixed.iq"
    report = tmp_path / "report.csv"
    rc = main(["detect", str(iq), "--reference", str(ref), "--correct", "--corrected-out", str(fixed),
               "--out", str(report)])
    assert rc == 0
    cause = json.loads(capsys.readouterr().out.split("cause: ", 1)[1])
    assert cause["cause"] == "JammingSuspected" and cause["detections"][0][0] == 5
    lines = report.read_text().splitlines()
    assert lines[0] == "subcarrier,psi,s,m_hat,verdict,psi_before,psi_after"
    row = next(r.split(",") for r in lines[1:] if r.startswith("5,"))
    assert row[1] == "63" and row[-2:] == ["63", "0"]
    assert fixed.exists()


def test_detect_stdout(tmp_path, capsys):
    cfg = _write_config(tmp_path)
    iq, ref = tmp_path / "rx.csv", tmp_path / "ref.csv"
    main(["simulate", "--config", str(cfg), "--iq-out", str(iq), "--reference-out", str(ref), "--trial-index", "1"])
    capsys.readouterr()
    assert main(["detect", str(iq), "--reference", str(ref)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "subcarrier,psi,s,m_hat,verdict"
    assert out[-1].startswith("# cause: ") and '"cause": "Clean"' in out[-1]


def test_simulate_batch(tmp_path, capsys):
    cfg = _write_config(tmp_path)
    rec = tmp_path / "r.jsonl"
    assert main(["simulate", "--config", str(cfg), "--records", str(rec)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["present"] == 10 and summary["detected_present"] == 10 and summary["flagged_absent"] == 0
    assert len(rec.read_text().splitlines()) == 20


def test_roc(tmp_path, capsys):
    cfg = _write_config(tmp_path, "per_subcarrier = true\n")
    assert main(["roc", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    assert json.loads(capsys.readouterr().out)["auc"] == 1.0
    assert (tmp_path / "o" / "roc.csv").exists() and (tmp_path / "o" / "roc_subcarrier.csv").exists()


def test_sweep(tmp_path, capsys):
    out = tmp_path / "s"
    assert main(["sweep", "--n", "32,64", "--trials", "10", "--out", str(out)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert [json.loads(x)["n"] for x in lines] == [32, 64]
    assert len((out / "summary.csv").read_text().splitlines()) == 3


@pytest.mark.parametrize(
    "argv, kind",
    [
        ([], "usage"),
        (["sweep", "--n", "x"], "usage"),
        (["roc", "--config", "/nonexistent.toml", "--out", "o"], "ConfigError"),
        (["detect", "/nonexistent.iq", "--reference", "r.csv"], "FileNotFoundError"),
    ],
)
def test_errors_are_machine_readable(argv, kind, capsys):
    assert main(argv) == 2
    assert _err(capsys)["error"] == kind


def test_bad_iq(tmp_path, capsys):
    bad = tmp_path / "x.iq"
    bad.write_bytes(b"nope")
    ref = tmp_path / "r.csv"
    ref.write_text("subcarrier,re,im\n")
    assert main(["detect", str(bad), "--reference", str(ref)]) == 2
    assert _err(capsys)["error"] == "IqFormatError"


def test_all_loo_needs_alt_n(tmp_path, capsys):
    # a 128-point comb read as a 64-point symbol: every active bin shows LoO

    vals = qpsk(np.random.default_rng(1), 8)
    for n in (32, 64, 128):
        b = np.zeros(n, complex)
        for j, v in enumerate(vals):
            b[(8 * j + 1) * n // 128] = v
        write_reference(tmp_path / f"ref{n}.csv", b)
        if n == 128:
            full = synthesize(b, 128)
    write_iq(tmp_path / "rx.iq", OfdmSymbol(full.samples[:64], full.sample_rate / 2))
    cfg = tmp_path / "d.toml"
    cfg.write_text("[detector]\nnoise_var = 0.0\n")
    args = ["detect", str(tmp_path / "rx.iq"), "--reference", str(tmp_path / "ref64.csv"), "--config", str(cfg),
            "--max-targets", "0"]
    assert main(args) == 2
    assert _err(capsys)["error"] == "usage"
