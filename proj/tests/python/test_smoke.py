"""Python binding smoke tests: the compiled module must agree with numpy-side
reference computations on the core operations."""

import math
import os
import subprocess
import tempfile

import numpy as np
import pytest

fapt = pytest.importorskip("fapt")


def test_version():
    assert fapt.__version__ == "0.1.0"


def test_flat_to_port():
    p = fapt.flat_to_port(57, 100, 50)
    assert (p.n, p.m, p.flat) == (2, 8, 57)


def test_select_port_matches_numpy_argmin():
    rng = np.random.default_rng(1)
    for _ in range(20):
        pred = rng.normal(size=(6, 5)) + 1j * rng.normal(size=(6, 5))
        ref = rng.normal(size=(6, 5)) + 1j * rng.normal(size=(6, 5))
        got = fapt.select_port(pred, ref)
        n, m = np.unravel_index(np.argmin(np.abs(pred - ref)), pred.shape)
        assert (got.n - 1, got.m - 1) == (n, m)


def test_select_port_miso_matches_numpy():
    rng = np.random.default_rng(2)
    pred = rng.normal(size=(3, 4, 4)) + 1j * rng.normal(size=(3, 4, 4))
    ref = rng.normal(size=(3, 4, 4)) + 1j * rng.normal(size=(3, 4, 4))
    got = fapt.select_port_miso(pred, ref)
    dist = np.abs(pred - ref).sum(axis=0)
    n, m = np.unravel_index(np.argmin(dist), dist.shape)
    assert (got.n - 1, got.m - 1) == (n, m)


def test_metrics_fixed_points():
    rng = np.random.default_rng(3)
    truth = rng.normal(size=(2, 3, 3)) + 1j * rng.normal(size=(2, 3, 3))
    assert fapt.table_accuracy(truth, truth) == pytest.approx(100.0)
    assert fapt.nmse_loss(truth, truth) == 0.0
    assert fapt.nmse_loss(np.zeros_like(truth), truth) == pytest.approx(1.0)

    h = [1 + 1j, 2 - 1j]
    assert fapt.validation_nmse([v * 1.1 for v in h], h) == pytest.approx(-20.0)
    assert fapt.validation_nmse(h, h) == -math.inf


def test_lr_schedule_endpoints():
    assert fapt.lr_at_epoch(0) == pytest.approx(4e-6, abs=1e-12)
    assert fapt.lr_at_epoch(100) == pytest.approx(1e-3, abs=1e-12)
    assert fapt.lr_at_epoch(600) == pytest.approx(4e-6, abs=1e-12)


def test_channel_table_against_direct_formula():
    geom = fapt.ArrayGeometry(1, 1)
    grid = fapt.PortGrid(4, 3, 1.0, 1.5)
    # Single LoS path.
    tab = fapt.channel_table(
        1, 0.0, 39.0, 10.0, [[30.0, 80.0, 120.0, 70.0]], [0.0], geom, grid
    )
    lam = 299792458.0 / 39e9
    theta, phi = math.radians(70.0), math.radians(120.0)
    r = np.array(
        [math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)]
    )
    alpha = math.sqrt(10.0 / 11.0)
    dry, drz = 1.0 * lam / 2, 1.5 * lam / 3
    for n in range(4):
        for m in range(3):
            phase = 2 * math.pi * (r[1] * dry * m + r[2] * drz * n) / lam
            expect = alpha * np.exp(1j * phase)
            assert tab[n, m] == pytest.approx(expect, abs=1e-12)


def test_prony_exact_on_two_exponentials():
    z1, z2 = np.exp(0.4j), np.exp(-1.1j)
    n = np.arange(8)
    hist = np.stack(
        [0.7 * z1**n + 0.3 * z2**n, (0.2 - 0.5j) * z1**n + (0.9 + 0.1j) * z2**n], axis=1
    )
    pred = fapt.vec_prony_predict(hist, order=2, steps=8)
    m = np.arange(8, 16)
    truth = np.stack(
        [0.7 * z1**m + 0.3 * z2**m, (0.2 - 0.5j) * z1**m + (0.9 + 0.1j) * z2**m], axis=1
    )
    assert np.max(np.abs(pred - truth) / np.abs(truth)) < 1e-8


def test_hold_last():
    rng = np.random.default_rng(4)
    hist = rng.normal(size=(3, 2, 2)) + 1j * rng.normal(size=(3, 2, 2))
    pred = fapt.hold_last_predict(hist, 5)
    assert pred.shape == (5, 2, 2)
    assert np.array_equal(pred[0], hist[-1])
    assert np.array_equal(pred[4], hist[-1])


def test_ezf_zero_forcing_property():
    rng = np.random.default_rng(5)
    h = rng.normal(size=(4, 8)) + 1j * rng.normal(size=(4, 8))
    w = fapt.ezf_precoder(h)
    gains = np.conj(h) @ w.T
    off = gains - np.diag(np.diag(gains))
    assert np.max(np.abs(off)) < 1e-10
    sinr, se = fapt.sinr_and_se(h, w, 10.0)
    assert se > 0
    assert len(sinr) == 4


def test_dataset_roundtrip_and_cli(tmp_path):
    cfg = "ports_z=8\nports_y=8\naperture_y=1.6\naperture_z=1.6\nt_past=4\nf_future=4\nn_paths=2\nseed=3\n"
    out = tmp_path / "ds.fapt"
    n = fapt.gen_dataset(cfg, 6, str(out))
    assert n == 6

    ds = fapt.read_dataset(str(out))
    assert ds["t_past"] == 4 and ds["n_rows"] == 8
    assert len(ds["samples"]) == 6
    s = ds["samples"][0]
    assert s["past"].shape == (4, 8, 8)
    assert s["future"].shape == (4, 8, 8)
    # Reference slices are constant over the grid.
    ref = s["reference"]
    assert np.allclose(ref, ref[:, :1, :1])

    # The CLI produces a byte-identical file for the same config and seed.
    cli = os.environ.get("FAPT_CLI")
    if cli:
        cfg_path = tmp_path / "cfg.txt"
        cfg_path.write_text(cfg)
        out2 = tmp_path / "ds_cli.fapt"
        subprocess.run(
            [cli, "gen-data", "--config", str(cfg_path), "--out", str(out2), "--samples", "6"],
            check=True,
            capture_output=True,
        )
        assert out.read_bytes() == out2.read_bytes()


def test_model_load_and_predict(tmp_path):
    cli = os.environ.get("FAPT_CLI")
    if not cli:
        pytest.skip("FAPT_CLI not set")
    cfg = "ports_z=8\nports_y=8\naperture_y=1.6\naperture_z=1.6\nt_past=4\nf_future=4\nn_paths=2\nseed=3\n"
    cfg_path = tmp_path / "cfg.txt"
    cfg_path.write_text(cfg)
    ds_path = tmp_path / "ds.fapt"
    subprocess.run(
        [cli, "gen-data", "--config", str(cfg_path), "--out", str(ds_path), "--samples", "12"],
        check=True,
        capture_output=True,
    )
    tr_cfg = tmp_path / "train.txt"
    tr_cfg.write_text(
        "d_model=16\nn_heads=2\nn_layers=1\nd_hidden=32\nlora_rank=2\n"
        "total_epochs=2\nwarmup_epochs=1\nbatch_train=4\nbatch_test=4\ntrain_seed=5\n"
    )
    ckpt = tmp_path / "m.ckpt"
    subprocess.run(
        [
            cli, "train", "--config", str(tr_cfg), "--data", str(ds_path),
            "--out", str(ckpt), "--log-every", "0",
        ],
        check=True,
        capture_output=True,
    )

    model = fapt.Model.load(str(ckpt))
    assert model.horizon == 4
    assert model.trainable_params > 0

    ds = fapt.read_dataset(str(ds_path))
    pred = model.predict(ds["samples"][0]["past"])
    assert pred.shape == (4, 8, 8)
    assert np.all(np.isfinite(pred.view(float)))
    # Deterministic inference.
    assert np.array_equal(pred, model.predict(ds["samples"][0]["past"]))
