#!/usr/bin/env python
# encoding: utf-8
#
# Copyright (c) 2026 bispecar contributors
#
# MIT Licence. See http://opensource.org/licenses/MIT
#
# Created on 2026-10-18
#

"""Unit tests for :mod:`bispecar.cli`."""


import json
import logging
import os

import pandas as pd
import pytest

from bispecar.cli import build_parser, run
from bispecar.model import ModelSpec
from bispecar.serializers import SCHEMA_VERSION, manifest_path
from bispecar.util import library_version, sha256_file

from .conftest import env
from .util import listdir, monthly_dates, write_csv


@pytest.fixture(autouse=True)
def reset_logging():
    """Drop handlers attached by ``run()``."""
    yield
    logger = logging.getLogger("bispecar")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()


@pytest.fixture()
def series_csv(tempdir, mar11_series):
    """Dated CSV of the MAR(1,1) fixture series."""
    path = os.path.join(tempdir, "series.csv")
    return write_csv(
        path, ["date", "value"], zip(monthly_dates(len(mar11_series.y)), mar11_series.y)
    )


def _load_json(path):
    with open(path) as fp:
        return json.load(fp)


def _simulate(path, seed=42):
    return run(
        [
            "simulate",
            "--family", "mixed",
            "--phi", "0.7",
            "--varphi", "0.2",
            "--alpha", "1.5",
            "--T", "100",
            "--seed", str(seed),
            "-o", path,
        ]
    )


def test_parser():
    """Subcommands and aliases."""
    parser = build_parser()
    args = parser.parse_args(["simulate", "--family", "mar", "--T", "10"])
    assert args.family == "mixed"
    assert args.seed == 0
    args = parser.parse_args(
        ["rt-surface", "--input", "x.csv", "--column", "v", "--grid1", "0", "1", "5"]
    )
    assert args.grid1 == [0.0, 1.0, 5.0]


def test_usage_errors(capsys):
    """Argument errors exit with 2."""
    assert run(["simulate", "--phi", "0.7"]) == 2
    assert run(["bogus"]) == 2
    assert run(["simulate", "--family", "weird", "--T", "10"]) == 2
    assert run([]) == 2


def test_version(capsys):
    """--version prints the library version."""
    assert run(["--version"]) == 0
    assert library_version() in capsys.readouterr().out


def test_banners_at_info(tempdir, caplog):
    """Start and finish banners are logged at INFO."""
    path = os.path.join(tempdir, "sim.csv")
    with env(BISPECAR_LOG_LEVEL="INFO"):
        assert _simulate(path) == 0
    banners = [r for r in caplog.records if r.getMessage().startswith("----------")]
    assert len(banners) == 2
    assert all(r.levelno == logging.INFO for r in banners)
    assert "simulate" in banners[0].getMessage()
    assert "finished in" in banners[1].getMessage()


def test_simulate(tempdir):
    """Simulated CSV and its manifest."""
    path = os.path.join(tempdir, "sim.csv")
    assert _simulate(path) == 0
    df = pd.read_csv(path)
    assert list(df.columns) == ["t", "y", "eps"]
    assert len(df) == 100

    manifest = _load_json(manifest_path(path))
    assert manifest["command"] == "simulate"
    assert manifest["seed"] == 42
    assert manifest["schema_version"] == SCHEMA_VERSION
    assert manifest["flags"]["T"] == 100
    assert manifest["outputs"] == [os.path.abspath(path)]


def test_simulate_reproducible(tempdir):
    """Same seed, same bytes."""
    a = os.path.join(tempdir, "a.csv")
    b = os.path.join(tempdir, "b.csv")
    c = os.path.join(tempdir, "c.csv")
    assert _simulate(a) == 0
    assert _simulate(b) == 0
    assert _simulate(c, seed=43) == 0
    assert sha256_file(a) == sha256_file(b)
    assert sha256_file(a) != sha256_file(c)


def test_simulate_model_errors(tempdir):
    """Model flag mistakes map to exit codes."""
    path = os.path.join(tempdir, "sim.csv")
    base = ["simulate", "--T", "50", "-o", path]
    assert run(base + ["--family", "causal", "--phi", "0.7", "--varphi", "0.2"]) == 7
    assert run(base + ["--phi", "1.2"]) == 5
    assert run(base + ["--phi", "0.5", "--alpha", "2.5"]) == 7
    assert not os.path.exists(path)


def test_identify(tempdir, series_csv, capsys):
    """Identification report and printed label."""
    out = os.path.join(tempdir, "identify.json")
    argv = ["identify", "--input", series_csv, "--column", "value", "--p", "2"]
    assert run(argv + ["--threads", "1", "-o", out]) == 0

    doc = _load_json(out)
    assert doc["schema_version"] == SCHEMA_VERSION
    assert doc["series"] == "value"
    assert doc["T"] == 200
    assert len(doc["candidates"]) == 3
    assert doc["manifest"] == os.path.basename(manifest_path(out))
    assert doc["selected"] in capsys.readouterr().out

    manifest = _load_json(manifest_path(out))
    assert manifest["inputs"] == {os.path.abspath(series_csv): sha256_file(series_csv)}


def test_estimate(tempdir, series_csv):
    """Single-model estimate with an iteration trace."""
    out = os.path.join(tempdir, "est.json")
    trace = os.path.join(tempdir, "trace.jsonl")
    argv = [
        "estimate",
        "--input", series_csv,
        "--column", "value",
        "--r", "1",
        "--s", "1",
        "--trace", trace,
        "-o", out,
    ]
    assert run(argv) == 0

    doc = _load_json(out)
    assert doc["result"]["label"] == "MAR(1,1)"
    assert len(doc["start"]) == 2
    assert doc["k2_star"] > 0
    spec = ModelSpec.from_dict(doc["result"]["model"])
    assert spec.stationary

    with open(trace) as fp:
        lines = [json.loads(line) for line in fp]
    assert len(lines) == doc["result"]["iterations"]
    if lines:
        assert lines[0]["iteration"] == 1


def test_estimate_errors(tempdir, series_csv):
    """Bad orders and short data."""
    out = os.path.join(tempdir, "est.json")
    argv = ["estimate", "--input", series_csv, "--column", "value", "-o", out]
    assert run(argv + ["--r", "0", "--s", "0"]) == 7
    assert run(argv + ["--r", "1", "--s", "1", "--m", "0.7", "--n", "0.7"]) == 7

    short = write_csv(
        os.path.join(tempdir, "short.csv"), ["value"], [[v] for v in range(30)]
    )
    argv = ["estimate", "--input", short, "--column", "value", "--r", "1", "--s", "0"]
    assert run(argv + ["-o", out]) == 3


def test_data_errors(tempdir, series_csv):
    """Malformed inputs exit with 3."""
    out = os.path.join(tempdir, "x.json")
    assert run(["identify", "--input", series_csv, "--column", "price", "-o", out]) == 3

    bad = write_csv(
        os.path.join(tempdir, "bad.csv"), ["value", "other"], [[1, 0], ["", 0], [3, 0]]
    )
    assert run(["ingest", "--input", bad, "--column", "value", "-o", out]) == 3
    missing = os.path.join(tempdir, "nope.csv")
    assert run(["ingest", "--input", missing, "--column", "value", "-o", out]) == 3


def test_ingest(tempdir):
    """Transformed series and diagnostics."""
    values = [100.0 * 1.01 ** t + (t % 5) for t in range(120)]
    src = write_csv(
        os.path.join(tempdir, "prices.csv"), ["date", "price"],
        zip(monthly_dates(120), values),
    )
    out = os.path.join(tempdir, "cycle.csv")
    argv = ["ingest", "--input", src, "--column", "price", "--transform", "hp"]
    assert run(argv + ["--pmax", "3", "-o", out]) == 0

    df = pd.read_csv(out)
    assert list(df.columns) == ["date", "price"]
    assert len(df) == 120

    diag = _load_json(os.path.join(tempdir, "cycle_diagnostics.json"))
    assert diag["transform"] == "hp_cycle"
    assert diag["T"] == 120
    assert 1 <= diag["p"] <= 3
    assert len(diag["ljung_box"]) == 2


def test_ingest_log_returns(tempdir):
    """Log returns drop one observation."""
    src = write_csv(
        os.path.join(tempdir, "p.csv"), ["price"],
        [[100.0 + (t * 7) % 11] for t in range(40)],
    )
    out = os.path.join(tempdir, "r.csv")
    diag = os.path.join(tempdir, "r.json")
    argv = ["ingest", "--input", src, "--column", "price", "--transform", "logret"]
    assert run(argv + ["--diagnostics", diag, "-o", out]) == 0
    assert len(pd.read_csv(out)) == 39
    assert _load_json(diag)["transform"] == "log_returns"


def test_dump_spectra(tempdir, series_csv):
    """Periodogram, biperiodogram, model grids and ACF."""
    prefix = os.path.join(tempdir, "spec")
    argv = [
        "dump-spectra",
        "--input", series_csv,
        "--column", "value",
        "--theory",
        "--phi", "0.7",
        "--varphi", "0.2",
        "--acf", "3",
        "-o", prefix,
    ]
    assert run(argv) == 0

    I2 = pd.read_csv(prefix + "_I2.csv")
    assert list(I2.columns) == ["freq", "value"]
    assert len(I2) == 199
    I3 = pd.read_csv(prefix + "_I3.csv")
    assert list(I3.columns) == ["freq1", "freq2", "re", "im"]
    assert len(I3) == 199 * 199
    assert len(pd.read_csv(prefix + "_S2.csv")) == 199
    assert len(pd.read_csv(prefix + "_S3.csv")) == 199 * 199
    acf = pd.read_csv(prefix + "_acf.csv")
    assert acf["lag"].tolist() == [0, 1, 2, 3]
    assert acf["acf"].iloc[0] == pytest.approx(1.0)

    manifest = _load_json(manifest_path(prefix + "_I2.csv"))
    assert len(manifest["outputs"]) == 5


def test_rt_surface(tempdir, series_csv):
    """Criterion on a small grid."""
    out = os.path.join(tempdir, "surface.csv")
    argv = [
        "rt-surface",
        "--input", series_csv,
        "--column", "value",
        "--grid1", "0.1", "0.9", "3",
        "--grid2", "0.0", "0.6", "4",
        "--threads", "2",
        "-o", out,
    ]
    assert run(argv) == 0
    df = pd.read_csv(out)
    assert list(df.columns) == ["phi_1", "varphi_1", "rt"]
    assert len(df) == 12
    assert df["phi_1"].iloc[0] == pytest.approx(0.1)
    assert (df["rt"] >= 0).all()

    bad = ["rt-surface", "--input", series_csv, "--column", "value", "--r", "2"]
    assert run(bad + ["-o", out]) == 7


def test_montecarlo(tempdir):
    """Tiny campaign from a config file with overrides."""
    config = os.path.join(tempdir, "mc.json")
    with open(config, "w") as fp:
        json.dump(
            {"dgp": ModelSpec.mixed([0.7], [0.2]).to_dict(), "alpha": [1.5], "T": [60]},
            fp,
        )
    prefix = os.path.join(tempdir, "mc")
    argv = ["montecarlo", "--config", config, "--M", "1", "--seed", "3"]
    assert run(argv + ["--threads", "1", "-o", prefix]) == 0

    rates = pd.read_csv(prefix + "_rates.csv")
    assert len(rates) == 1
    assert rates["M"].iloc[0] == 1
    assert os.path.exists(prefix + "_estimates.csv")
    log = _load_json(prefix + "_log.json")
    assert log["config"]["seed"] == 3
    assert log["config"]["M"] == 1
    manifest = _load_json(manifest_path(prefix + "_rates.csv"))
    assert manifest["seed"] == 3
    assert len(manifest["outputs"]) == 3

    # config file is not rewritten
    assert "M" not in _load_json(config)


def test_montecarlo_bad_config(tempdir):
    """Invalid configuration files exit with 7."""
    config = os.path.join(tempdir, "mc.json")
    with open(config, "w") as fp:
        fp.write("{not json")
    prefix = os.path.join(tempdir, "mc")
    assert run(["montecarlo", "--config", config, "-o", prefix]) == 7

    with open(config, "w") as fp:
        json.dump({"alpha": [1.5]}, fp)
    assert run(["montecarlo", "--config", config, "-o", prefix]) == 7


def _read_bytes(path):
    with open(path, "rb") as fp:
        return fp.read()


@pytest.mark.slow
def test_outputs_independent_of_threads(tempdir, series_csv):
    """Data outputs are byte-identical at 1, 4 and 16 threads."""
    config = os.path.join(tempdir, "mc.json")
    with open(config, "w") as fp:
        json.dump(
            {"dgp": ModelSpec.mixed([0.7], [0.2]).to_dict(), "alpha": [1.5], "T": [80]},
            fp,
        )
    data = ["--input", series_csv, "--column", "value"]
    commands = [
        ["identify"] + data + ["-o", "identify.json"],
        ["rt-surface"] + data + ["--grid1", "0", "0.9", "7", "-o", "surface.csv"],
        ["montecarlo", "--config", config, "--M", "3", "--seed", "5", "-o", "mc"],
    ]

    outputs = {}
    for threads in (1, 4, 16):
        outdir = os.path.join(tempdir, "threads{}".format(threads))
        os.mkdir(outdir)
        for argv in commands:
            # output name comes last
            argv = argv[:-1] + [os.path.join(outdir, argv[-1])]
            assert run(argv + ["--threads", str(threads)]) == 0
        names = [n for n in listdir(outdir) if not n.endswith(".manifest.json")]
        outputs[threads] = {n: _read_bytes(os.path.join(outdir, n)) for n in names}

    assert sorted(outputs[1]) == [
        "identify.json",
        "mc_estimates.csv",
        "mc_log.json",
        "mc_rates.csv",
        "surface.csv",
    ]
    assert outputs[4] == outputs[1]
    assert outputs[16] == outputs[1]


if __name__ == "__main__":  # pragma: no cover
    pytest.main([__file__])
