"""Test bitmrf main functions and the command line workflows."""

from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from utils_for_tests import bitmrf_runner, read_png, write_png

from bitmrf import main
from bitmrf.constants import Headers, Keywords
from bitmrf.exceptions.clean_exceptions import UsageError

_CONFIG = """
# segmentation settings
optimizer = sa
beta = 0.8
sa-t0 = 2.0   # hotter start
levels = 1, 3
reestimate = yes
"""


@pytest.fixture
def disk_image(tmp_path) -> Path:
    rows, cols = np.indices((24, 24))
    image = np.where((rows - 12) ** 2 + (cols - 12) ** 2 <= 36, 200, 20).astype(np.uint8)
    return write_png(image, tmp_path / "cells.png")


def test_resolve_settings_defaults():
    settings = main.resolve_settings({"command": "segment", "image": "x.png", "beta": None})
    assert settings == main.DEFAULT_SETTINGS


def test_resolve_settings_layers_config_and_flags(tmp_path):
    config = tmp_path / "settings.cfg"
    config.write_text(_CONFIG)
    settings = main.resolve_settings({"config": str(config), "beta": 2.5, "optimizer": None, "levels": [5, 6]})
    assert settings[Keywords.OPTIMIZER] == "sa"
    assert settings[Keywords.SA_T0] == 2.0
    assert settings[Keywords.REESTIMATE] is True
    assert settings[Keywords.BETA] == 2.5
    assert settings[Keywords.LEVELS] == (5, 6)
    assert settings[Keywords.MAX_SWEEPS] == main.DEFAULT_SETTINGS[Keywords.MAX_SWEEPS]


def test_ensemble_config_reports_usage_errors():
    settings = {**main.DEFAULT_SETTINGS, Keywords.SA_COOLING: 1.5}
    with pytest.raises(UsageError, match="cooling factor"):
        main.ensemble_config(settings)
    with pytest.raises(UsageError, match="beta"):
        main.ensemble_config({**main.DEFAULT_SETTINGS, Keywords.BETA: 20.0})


def test_segment_writes_outputs(disk_image, tmp_path):
    out_dir = tmp_path / "out"
    bitmrf_runner(command="segment", image=str(disk_image), out=str(out_dir), level=2, dump_members=True, plot=True)
    names = {path.name for path in out_dir.iterdir()}
    expected = {"cells_probability.png", "cells_level2.png", "cells_levels.png"}
    expected |= {f"cells_member{index}.png" for index in range(8)}
    assert names == expected

    probability = read_png(out_dir / "cells_probability.png")
    mask = read_png(out_dir / "cells_level2.png")
    assert set(np.unique(mask)) <= {0, 255}
    assert set(np.unique(probability)) <= {0, 32, 64, 96, 128, 159, 191, 223, 255}
    np.testing.assert_array_equal(mask == 255, probability > 64)


def test_segment_default_level(disk_image, tmp_path):
    bitmrf_runner(command="segment", image=str(disk_image), out=str(tmp_path / "out"))
    assert (tmp_path / "out" / "cells_level3.png").exists()
    assert not (tmp_path / "out" / "cells_member0.png").exists()


def test_segment_missing_image_is_a_data_error(tmp_path, caplog):
    with pytest.raises(SystemExit) as e:
        bitmrf_runner(command="segment", image=str(tmp_path / "missing.png"), out=str(tmp_path))
    assert e.value.code == 2
    assert "Could not find the file" in caplog.text


def test_segment_invalid_level_is_a_usage_error(disk_image, tmp_path):
    with pytest.raises(SystemExit) as e:
        bitmrf_runner(command="segment", image=str(disk_image), out=str(tmp_path), level=9)
    assert e.value.code == 1


def test_invalid_beta_is_a_usage_error(disk_image, tmp_path, caplog):
    with pytest.raises(SystemExit) as e:
        bitmrf_runner(command="segment", image=str(disk_image), out=str(tmp_path), beta=0.0)
    assert e.value.code == 1
    assert "beta must be in" in caplog.text


def test_missing_config_file_is_a_usage_error(disk_image, tmp_path):
    with pytest.raises(SystemExit) as e:
        bitmrf_runner(command="segment", image=str(disk_image), config=str(tmp_path / "nowhere.cfg"))
    assert e.value.code == 1


def test_slice_writes_planes(tmp_path):
    image = write_png(np.array([[0, 5], [178, 255]], dtype=np.uint8), tmp_path / "tiny.png")
    out_dir = tmp_path / "planes"
    bitmrf_runner(command="slice", image=str(image), out=str(out_dir), plot=True)
    assert {path.name for path in out_dir.iterdir()} == {f"plane_{bit}.png" for bit in range(8)} | {"bit_planes.png"}
    np.testing.assert_array_equal(read_png(out_dir / "plane_0.png"), [[0, 255], [0, 255]])
    np.testing.assert_array_equal(read_png(out_dir / "plane_7.png"), [[0, 0], [255, 255]])


def test_evaluate_prints_and_writes(tmp_path, capsys):
    seg = write_png(np.array([[255, 255, 0, 0]], dtype=np.uint8), tmp_path / "seg.png")
    gt = write_png(np.array([[255, 0, 0, 255]], dtype=np.uint8), tmp_path / "gt.png")
    bitmrf_runner(command="evaluate", segmentation=str(seg), ground_truth=str(gt), out=str(tmp_path / "eval"))

    captured = capsys.readouterr().out
    assert ",".join(Headers.METRICS) in captured
    assert "0.500000,2.000000,0.500000,0.500000,0.500000,0.500000,0.500000" in captured
    written = pd.read_csv(tmp_path / "eval" / "evaluation.csv")
    assert list(written.columns) == Headers.METRICS
    assert written[Headers.RI].iloc[0] == 0.5


def test_evaluate_warns_about_undefined_metrics(tmp_path, caplog, capsys):
    blank = write_png(np.zeros((2, 2), dtype=np.uint8), tmp_path / "blank.png")
    bitmrf_runner(command="evaluate", segmentation=str(blank), ground_truth=str(blank))
    assert "Undefined metrics (reported as nan): SEN, PPV, FSCORE" in caplog.text
    assert "nan" in capsys.readouterr().out


def test_evaluate_dimension_mismatch(tmp_path):
    seg = write_png(np.zeros((2, 2), dtype=np.uint8), tmp_path / "seg.png")
    gt = write_png(np.zeros((2, 3), dtype=np.uint8), tmp_path / "gt.png")
    with pytest.raises(SystemExit) as e:
        bitmrf_runner(command="evaluate", segmentation=str(seg), ground_truth=str(gt))
    assert e.value.code == 2


def test_synthetic_batch_and_roc(tmp_path, capsys):
    dataset = tmp_path / "dataset"
    bitmrf_runner(command="synthetic", out=str(dataset), count=2, size=24, seed=5)
    assert len(list(dataset.glob("*_mask.png"))) == 2

    out_dir = tmp_path / "results"
    bitmrf_runner(command="batch", dataset_dir=str(dataset), out=str(out_dir), levels=[0, 3], aggregation="pooled")
    assert {path.name for path in out_dir.iterdir()} == {"per_image_metrics.csv", "table_pooled.csv"}
    assert "Aggregation 'pooled': best level" in capsys.readouterr().out

    bitmrf_runner(command="roc", dataset_dir=str(dataset), out=str(out_dir))
    assert (out_dir / "auc.csv").exists()
    assert "Pooled AUC:" in capsys.readouterr().out


def test_batch_uses_config_file(tmp_path):
    dataset = tmp_path / "dataset"
    bitmrf_runner(command="synthetic", out=str(dataset), count=1, size=16)
    config = tmp_path / "batch.cfg"
    config.write_text("levels = 4\naggregation = mean\nthreads = 2\n")
    bitmrf_runner(command="batch", dataset_dir=str(dataset), out=str(tmp_path / "out"), config=str(config))
    table = pd.read_csv(tmp_path / "out" / "table_mean.csv")
    assert table[Headers.LEVEL].tolist() == [4]
    assert not (tmp_path / "out" / "table_pooled.csv").exists()


def test_batch_empty_dataset_is_a_data_error(tmp_path):
    with pytest.raises(SystemExit) as e:
        bitmrf_runner(command="batch", dataset_dir=str(tmp_path), out=str(tmp_path / "out"))
    assert e.value.code == 2


def test_batch_empty_mask_suffix_is_a_usage_error(tmp_path):
    dataset = tmp_path / "dataset"
    bitmrf_runner(command="synthetic", out=str(dataset), count=1, size=16)
    with pytest.raises(SystemExit) as e:
        bitmrf_runner(command="batch", dataset_dir=str(dataset), out=str(tmp_path / "out"), mask_suffix="")
    assert e.value.code == 1


def test_roc_of_a_probability_map(disk_image, tmp_path, capsys):
    out_dir = tmp_path / "out"
    bitmrf_runner(command="segment", image=str(disk_image), out=str(out_dir))
    gt = write_png((read_png(disk_image) > 100).astype(np.uint8) * 255, tmp_path / "cells_mask.png")
    bitmrf_runner(
        command="roc", dataset_dir=str(out_dir / "cells_probability.png"), ground_truth=str(gt), out=str(out_dir)
    )
    curve = pd.read_csv(out_dir / "cells_probability_roc.csv")
    assert list(curve.columns) == [Headers.LEVEL, Headers.FPR, Headers.TPR]
    assert "AUC:" in capsys.readouterr().out


def test_roc_rejects_an_arbitrary_image_as_probability_map(disk_image, tmp_path):
    gt = write_png(np.zeros((24, 24), dtype=np.uint8), tmp_path / "gt.png")
    with pytest.raises(SystemExit) as e:
        bitmrf_runner(command="roc", dataset_dir=str(disk_image), ground_truth=str(gt), out=str(tmp_path))
    assert e.value.code == 2
