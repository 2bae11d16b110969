# Copyright 2026 The binharm Authors
# SPDX-License-Identifier: Apache-2.0

import os
import subprocess

import numpy as np
import pytest

import binharm


def test_presets():
    conds = binharm.experiment_conditions("2")
    assert set(conds) == {"diotic-harmonic", "diotic-mistuned", "dichotic-harmonic", "dichotic-mistuned"}
    assert conds["diotic-mistuned"].mistuning_percent == pytest.approx(2.64)
    assert conds["dichotic-harmonic"].target_ipd == pytest.approx(np.pi)
    assert binharm.component_frequencies(conds["diotic-harmonic"]) == [640, 680, 720, 760, 840, 880, 920, 960]


def test_condition_spec_kwargs_and_validation():
    spec = binharm.ConditionSpec(f0=40.0, n_components=4)
    assert spec.n_components == 4
    spec.n_components = 3
    with pytest.raises(ValueError):
        spec.validate()


def test_level_scale():
    assert binharm.level_to_amplitude(100.0) == pytest.approx(np.sqrt(2.0))
    assert binharm.erb_hz(800.0) == pytest.approx(111.0512, abs=1e-3)


def test_synth_shapes_and_determinism():
    spec = binharm.experiment_conditions("2")["dichotic-harmonic"]
    a = binharm.synth(spec, 60.0, seed=7, trial=3, interval=2)
    b = binharm.synth(spec, 60.0, seed=7, trial=3, interval=2)
    assert a.shape == (2, 19200)
    np.testing.assert_array_equal(a, b)
    whole = binharm.synth(spec, 60.0, seed=7, trial=3, interval=0, isi=0.1)
    assert whole.shape == (2, 3 * 19200 + 2 * 4800)


def test_wav_roundtrip():
    spec = binharm.experiment_conditions("3")["diotic-harmonic"]
    x = binharm.synth(spec, 55.0, seed=1)
    y = binharm.decode_wav(binharm.encode_wav(x))
    assert y.shape == x.shape
    assert np.max(np.abs(x - y)) < 1e-4


def test_model_chain_ec_null():
    spec = binharm.experiment_conditions("2")["diotic-harmonic"]
    t = binharm.trial(spec, 50.0, seed=11)
    internal = binharm.peripheral(t["reference"])
    assert internal.shape == (2, 19200)
    out = binharm.binaural_pathway(internal, False, "binaural-then-mod")
    assert np.max(np.abs(out)) == 0.0
    mono = binharm.monaural_pathway(internal, False)
    assert binharm.decision_energy(mono) > 0.0


def test_gammatone_unit_gain():
    fs = 48000.0
    n = np.arange(int(fs))
    x = np.cos(2 * np.pi * 800.0 * n / fs)
    y = binharm.gammatone(x)
    tail = y[len(y) // 2:]
    assert np.sqrt(2.0 * np.mean(tail**2)) == pytest.approx(1.0, abs=1e-3)


def test_run_track_callback():
    res = binharm.run_track(lambda level: level > 40.0)
    assert 35.0 < res["threshold"] < 45.0
    assert len(res["reversals"]) >= 8


def test_human_reference():
    ref = binharm.human_reference()
    assert ref["exp2"]["bmld_harmonic"] == 8.0


def test_run_experiment_small():
    r = binharm.run_experiment("2", "binaural-then-mod", 0.0115, 0.005, seed=3, samples=2, runs=1, jobs=2)
    assert set(r["thresholds"]) == set(binharm.experiment_conditions("2"))
    d = r["thresholds"]
    assert r["bmld_harmonic"] == pytest.approx(d["diotic-harmonic"] - d["dichotic-harmonic"])


CLI = os.environ.get("BINHARM_CLI")


@pytest.mark.skipif(not CLI, reason="BINHARM_CLI not set")
def test_cli_exit_codes(tmp_path):
    ok = subprocess.run([CLI, "synth", "--exp", "2", "--condition", "diotic-harmonic", "--level", "60",
                         "-o", str(tmp_path / "a.wav")])
    assert ok.returncode == 0
    spec = binharm.experiment_conditions("2")["diotic-harmonic"]
    data = (tmp_path / "a.wav").read_bytes()
    np.testing.assert_allclose(binharm.decode_wav(data),
                               binharm.decode_wav(binharm.encode_wav(binharm.synth(spec, 60.0))))
    bad = subprocess.run([CLI, "synth", "--n-components", "3", "-o", str(tmp_path / "b.wav")],
                         capture_output=True)
    assert bad.returncode == 1
    nosigma = subprocess.run([CLI, "simulate", "--exp", "2", "--out", str(tmp_path)], capture_output=True)
    assert nosigma.returncode == 1
