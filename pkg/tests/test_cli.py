"""Batch front end: report files, summaries, determinism, worker equivalence.

The fixture model is f(x) = x0 - x1 on 1/255-scaled pixels, so every
sample's exact robustness radius is |f(x)| / 2 and each verdict below is
known in advance.
"""

import csv
import json

import numpy as np
import pytest

from svmcert import KernelSpec, SvmModel, save_model
from svmcert.cli import RunSpec, cmd_curve, cmd_verify, load_samples, main, parse_idx
from svmcert.idx import write_idx_images, write_idx_labels

# bytes -> scaled features; margins/2 are the flip radii listed in the comment
PIXELS = np.array(
    [
        [200, 50],   # f = +0.588  correct,   flips at 0.294
        [180, 80],   # f = +0.392  correct,   flips at 0.196
        [140, 115],  # f = +0.098  correct,   flips at 0.049
        [50, 200],   # f = -0.588  correct,   flips at 0.294
        [100, 150],  # f = -0.196  true label says +1: misclassified
    ],
    dtype=np.uint8,
)
LABELS = np.array([1, 1, 1, 0, 1], dtype=np.uint8)
DELTAS = (0.02, 0.15, 0.25)
EXPECT_ALL = {0.02: 5, 0.15: 3, 0.25: 2}
EXPECT_CORRECT = {0.02: 4, 0.15: 3, 0.25: 2}


def _write_fixture(tmp_path, as_text=False):
    tmp_path.mkdir(parents=True, exist_ok=True)
    model = SvmModel(np.array([[1.0, -1.0]]), np.array([1.0]), 0.0, KernelSpec("linear"))
    model_path = tmp_path / "model.json"
    save_model(model, model_path)
    if as_text:
        images = tmp_path / "samples.csv"
        labels = tmp_path / "labels.txt"
        images.write_text("\n".join(",".join(str(b) for b in row) for row in PIXELS) + "\n")
        labels.write_text("\n".join(str(v) for v in LABELS) + "\n")
    else:
        images = tmp_path / "images.idx"
        labels = tmp_path / "labels.idx"
        write_idx_images(images, PIXELS.reshape(5, 1, 2))
        write_idx_labels(labels, LABELS)
    return model_path, images, labels


def _runspec(tmp_path, out, workers=1, **kw):
    model_path, images, labels = _write_fixture(tmp_path)
    defaults = dict(
        model=str(model_path),
        images=str(images),
        labels=str(labels),
        classes=(1, 0),
        deltas=DELTAS,
        lr_init=0.02,
        lr_final=1e-5,
        max_iters=400,
        workers=workers,
        out_dir=str(out),
    )
    defaults.update(kw)
    return RunSpec(**defaults)


def test_parse_idx_scales_and_maps(tmp_path):
    _, images, labels = _write_fixture(tmp_path)
    X, y = parse_idx(images, labels, classes=(1, 0))
    assert X.shape == (5, 2)
    np.testing.assert_allclose(X[0], [200 / 255, 50 / 255])
    np.testing.assert_array_equal(y, [1, 1, 1, -1, 1])


def test_parse_idx_count_mismatch(tmp_path):
    _, images, _ = _write_fixture(tmp_path)
    short = tmp_path / "short.idx"
    write_idx_labels(short, LABELS[:3])
    with pytest.raises(Exception, match="count"):
        parse_idx(images, short, classes=(1, 0))


def test_unmapped_label_is_an_error(tmp_path):
    _, images, labels = _write_fixture(tmp_path)
    with pytest.raises(ValueError, match="not covered"):
        parse_idx(images, labels, classes=(3, 4))


def test_text_and_idx_sources_agree(tmp_path):
    spec_idx = _runspec(tmp_path / "a", tmp_path / "outa")
    model_path, images, labels = _write_fixture(tmp_path / "b", as_text=True)
    spec_txt = RunSpec(
        model=str(model_path), images=str(images), labels=str(labels),
        classes=(1, 0), deltas=DELTAS,
    )
    Xa, ya = load_samples(spec_idx)
    Xb, yb = load_samples(spec_txt)
    np.testing.assert_allclose(Xa, Xb)
    np.testing.assert_array_equal(ya, yb)


def test_runspec_validation(tmp_path):
    with pytest.raises(ValueError, match="strictly increasing"):
        _runspec(tmp_path, tmp_path / "o", deltas=(0.2, 0.1))
    with pytest.raises(ValueError, match="classes"):
        _runspec(tmp_path, tmp_path / "o", classes=(1, 1))
    with pytest.raises(ValueError, match="limit"):
        _runspec(tmp_path, tmp_path / "o", limit=0)
    with pytest.raises(ValueError, match="workers"):
        _runspec(tmp_path, tmp_path / "o", workers=0)


def _read_rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_cmd_verify_known_verdicts(tmp_path):
    out = tmp_path / "out"
    report = cmd_verify(_runspec(tmp_path, out))
    rows = _read_rows(out / "results.csv")
    assert len(rows) == len(PIXELS) * len(DELTAS)
    # ordered by (sample, delta)
    assert [(int(r["index"]), float(r["delta"])) for r in rows] == [
        (i, d) for i in range(5) for d in DELTAS
    ]
    for summary in report.summaries:
        assert summary.robust_all == EXPECT_ALL[summary.delta]
        assert summary.robust_correct == EXPECT_CORRECT[summary.delta]
        assert summary.n_samples == 5
        assert summary.n_correct == 4
    # summary fractions recomputed from the per-sample rows match exactly
    with open(out / "summary.json") as fh:
        payload = json.load(fh)
    for entry in payload["per_delta"]:
        robust = sum(
            1 for r in rows
            if float(r["delta"]) == entry["delta"] and r["verdict"] == "robust"
        )
        assert robust / entry["n_samples"] == entry["fraction_all"]
    assert payload["run"]["classes"] == [1, 0]
    assert payload["run"]["label_mode"] == "predicted"


def test_misclassified_sample_defends_its_own_prediction(tmp_path):
    out = tmp_path / "out"
    cmd_verify(_runspec(tmp_path, out, deltas=(0.02,)))
    rows = _read_rows(out / "results.csv")
    last = rows[-1]
    assert (last["true_label"], last["predicted_label"]) == ("1", "-1")
    assert last["verdict"] == "robust"  # prediction -1 is stable at delta 0.02


def test_true_label_mode_falsifies_misclassified_sample(tmp_path):
    out = tmp_path / "out"
    cmd_verify(_runspec(tmp_path, out, deltas=(0.02,), label_mode="true"))
    rows = _read_rows(out / "results.csv")
    assert rows[-1]["verdict"] == "falsified"  # defending the dataset label +1 fails


def test_cmd_curve_columns_and_monotone_fraction(tmp_path):
    out = tmp_path / "out"
    cmd_curve(_runspec(tmp_path, out))
    rows = _read_rows(out / "curve.csv")
    assert list(rows[0].keys()) == ["delta", "fraction_all", "fraction_correct", "mean_iterations", "mean_ms"]
    fractions = [float(r["fraction_all"]) for r in rows]
    assert fractions == sorted(fractions, reverse=True)
    np.testing.assert_allclose(fractions, [1.0, 0.6, 0.4])


def test_single_delta_curve_equals_verify_summary(tmp_path):
    out_v = tmp_path / "v"
    out_c = tmp_path / "c"
    rv = cmd_verify(_runspec(tmp_path / "x", out_v, deltas=(0.15,)))
    rc = cmd_curve(_runspec(tmp_path / "y", out_c, deltas=(0.15,)))
    rows = _read_rows(out_c / "curve.csv")
    assert len(rows) == 1
    assert float(rows[0]["fraction_all"]) == rv.summaries[0].fraction_all
    assert float(rows[0]["fraction_correct"]) == rv.summaries[0].fraction_correct
    assert rc.summaries[0].robust_all == rv.summaries[0].robust_all


def _strip_ms(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    drop = [i for i, name in enumerate(rows[0]) if name in ("ms", "mean_ms")]
    return [tuple(v for i, v in enumerate(row) if i not in drop) for row in rows]


def test_reports_identical_across_reruns(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    cmd_verify(_runspec(tmp_path / "fa", a))
    cmd_verify(_runspec(tmp_path / "fb", b))
    assert _strip_ms(a / "results.csv") == _strip_ms(b / "results.csv")


def test_worker_count_does_not_change_results(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    cmd_verify(_runspec(tmp_path / "fa", a, workers=1))
    cmd_verify(_runspec(tmp_path / "fb", b, workers=2))
    assert _strip_ms(a / "results.csv") == _strip_ms(b / "results.csv")
    cmd_curve(_runspec(tmp_path / "fc", a, workers=1))
    cmd_curve(_runspec(tmp_path / "fd", b, workers=3))
    assert _strip_ms(a / "curve.csv") == _strip_ms(b / "curve.csv")


def test_main_end_to_end_exit_codes(tmp_path, capsys):
    model_path, images, labels = _write_fixture(tmp_path)
    out = tmp_path / "out"
    argv = [
        "verify", "--model", str(model_path), "--images", str(images), "--labels", str(labels),
        "--classes", "1,0", "--deltas", "0.02,0.15", "--lr-init", "0.02", "--lr-final", "1e-5",
        "--max-iters", "400", "--out-dir", str(out),
    ]
    assert main(argv) == 0
    assert (out / "results.csv").exists()
    assert (out / "summary.json").exists()
    assert "robust" in capsys.readouterr().out

    missing = ["verify", "--model", str(tmp_path / "nope.json"), "--images", str(images),
               "--labels", str(labels), "--classes", "1,0", "--deltas", "0.1"]
    assert main(missing) == 1
    assert "error" in capsys.readouterr().err

    bad_deltas = argv.copy()
    bad_deltas[bad_deltas.index("0.02,0.15")] = "0.2,0.1"
    assert main(bad_deltas) == 1

    with pytest.raises(SystemExit):
        main(["verify", "--model", "m", "--images", "i", "--labels", "l",
              "--classes", "one,two", "--deltas", "0.1"])


def test_main_curve_command(tmp_path, capsys):
    model_path, images, labels = _write_fixture(tmp_path)
    out = tmp_path / "out"
    argv = [
        "curve", "--model", str(model_path), "--images", str(images), "--labels", str(labels),
        "--classes", "1,0", "--deltas", "0.02,0.25", "--lr-init", "0.02", "--lr-final", "1e-5",
        "--max-iters", "400", "--out-dir", str(out),
    ]
    assert main(argv) == 0
    assert (out / "curve.csv").exists()
    assert not (out / "results.csv").exists()
