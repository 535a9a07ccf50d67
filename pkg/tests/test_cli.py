import json
import os

import numpy as np
import pytest

from thickslice import (
    Volume,
    make_phantom_acquisitions,
    read_volume,
    write_volume,
)
from thickslice.cli import main

from conftest import random_volume


def run_cli(*argv):
    return main(list(argv))


def make_phantom_dirs(tmp_path, n=3, **kwargs):
    thin_dir = tmp_path / "thin"
    thick_dir = tmp_path / "thick"
    thin_dir.mkdir(exist_ok=True)
    thick_dir.mkdir(exist_ok=True)
    for seed in range(n):
        thin, thick = make_phantom_acquisitions(seed, **kwargs)
        write_volume(thin, thin_dir / f"case{seed:02d}.mhd")
        write_volume(thick, thick_dir / f"case{seed:02d}.mhd")
    return thin_dir, thick_dir


def constant_pair_dirs(tmp_path, value=200.0):
    thin_dir = tmp_path / "cthin"
    thick_dir = tmp_path / "cthick"
    thin_dir.mkdir()
    thick_dir.mkdir()
    thin = Volume(
        np.full((51, 8, 8), value, np.float32), (1, 1), tuple(np.arange(51) * 0.8)
    )
    thick = Volume(
        np.full((21, 8, 8), value, np.float32), (1, 1), tuple(np.arange(21) * 2.0)
    )
    write_volume(thin, thin_dir / "flat.mhd")
    write_volume(thick, thick_dir / "flat.mhd")
    return thin_dir, thick_dir


@pytest.fixture
def thin_file(tmp_path, rng):
    path = tmp_path / "thin.mhd"
    write_volume(random_volume(rng, n_slices=21, spacing_z=1.0), path)
    return path


class TestSimulate:
    def test_proposed_spans_thin_range(self, tmp_path, thin_file):
        out = tmp_path / "thick.mhd"
        code = run_cli(
            "simulate", "--input", str(thin_file), "--method", "proposed",
            "--thickness", "3", "--increment", "2", "--output", str(out),
        )
        assert code == 0
        thick = read_volume(out)
        assert thick.slice_locations_mm[0] == 0.0
        assert thick.slice_locations_mm[-1] == pytest.approx(20.0)
        assert thick.n_slices == 11
        sidecar = json.loads((tmp_path / "thick.provenance.json").read_text())
        assert sidecar["method"] == "proposed"
        assert sidecar["params"]["thickness_mm"] == 3.0

    def test_downsample_every_third(self, tmp_path, thin_file):
        out = tmp_path / "down.mhd"
        code = run_cli(
            "simulate", "--input", str(thin_file), "--method", "downsample",
            "--stride", "3", "--output", str(out),
        )
        assert code == 0
        thin = read_volume(thin_file)
        down = read_volume(out)
        assert down.n_slices == 7
        np.testing.assert_array_equal(
            down.voxels, np.asarray(thin.voxels, np.float32)[::3]
        )

    def test_negative_thickness_is_usage_error(self, tmp_path, thin_file, capsys):
        code = run_cli(
            "simulate", "--input", str(thin_file), "--method", "proposed",
            "--thickness", "-1", "--increment", "2",
            "--output", str(tmp_path / "x.mhd"),
        )
        assert code == 2
        assert "thickness" in capsys.readouterr().err

    def test_missing_input_is_io_error(self, tmp_path):
        code = run_cli(
            "simulate", "--input", str(tmp_path / "absent.mhd"), "--method",
            "proposed", "--thickness", "3", "--increment", "2",
            "--output", str(tmp_path / "x.mhd"),
        )
        assert code == 3

    def test_unknown_verb_is_usage_error(self):
        assert run_cli("frobnicate") == 2


class TestEvaluate:
    def test_identical_volumes(self, tmp_path, thin_file):
        outdir = tmp_path / "eval"
        code = run_cli(
            "evaluate", "--pred", str(thin_file), "--ref", str(thin_file),
            "--output-dir", str(outdir), "--no-timestamp",
        )
        assert code == 0
        report = json.loads((outdir / "evaluate.json").read_text())
        assert report["per_volume"]["rmse"] == 0.0
        assert report["per_volume"]["psnr_db"] == "inf"
        assert report["per_slice"]["rmse"]["mean"] == 0.0
        header = (outdir / "evaluate.csv").read_text().splitlines()[0]
        assert header == "pair_id,slice_index,location_mm,rmse,psnr_db"

    def test_constant_offset_gives_20db(self, tmp_path):
        # values chosen so the normalized difference is exactly 0.1
        lo, hi = -1024.0, 3071.0
        a = Volume(np.full((4, 6, 6), lo, np.float32), (1, 1), tuple(np.arange(4.0)))
        b = Volume(
            np.full((4, 6, 6), lo + 0.1 * (hi - lo), np.float32),
            (1, 1), tuple(np.arange(4.0)),
        )
        write_volume(a, tmp_path / "a.mhd")
        write_volume(b, tmp_path / "b.mhd")
        outdir = tmp_path / "eval"
        code = run_cli(
            "evaluate", "--pred", str(tmp_path / "a.mhd"), "--ref",
            str(tmp_path / "b.mhd"), "--output-dir", str(outdir),
        )
        assert code == 0
        report = json.loads((outdir / "evaluate.json").read_text())
        assert report["per_volume"]["psnr_db"] == pytest.approx(20.0, abs=1e-4)
        assert report["metadata"]["max_i"] == 1.0

    def test_disjoint_ranges_exit_4(self, tmp_path, rng):
        a = random_volume(rng, n_slices=4, spacing_z=1.0, start_z=0.0)
        b = random_volume(rng, n_slices=4, spacing_z=1.0, start_z=100.0)
        write_volume(a, tmp_path / "a.mhd")
        write_volume(b, tmp_path / "b.mhd")
        code = run_cli(
            "evaluate", "--pred", str(tmp_path / "a.mhd"), "--ref",
            str(tmp_path / "b.mhd"), "--output-dir", str(tmp_path / "e"),
        )
        assert code == 4


class TestCompare:
    def test_phantom_suite_ranks_proposed_first(self, tmp_path):
        thin_dir, thick_dir = make_phantom_dirs(tmp_path, n=3, shape_yx=(12, 12))
        outdir = tmp_path / "cmp"
        code = run_cli(
            "compare", "--thin-dir", str(thin_dir), "--thick-dir", str(thick_dir),
            "--thickness", "3", "--increment", "2",
            "--output-dir", str(outdir), "--no-timestamp",
        )
        assert code == 0
        report = json.loads((outdir / "comparison.json").read_text())
        assert report["ranking"][0] == "proposed"
        methods = report["methods"]
        for name in ("simple", "gaussian", "downsample"):
            assert (
                methods["proposed"]["per_slice"]["psnr_db"]["mean"]
                > methods[name]["per_slice"]["psnr_db"]["mean"]
            )
            assert (
                methods["proposed"]["per_slice"]["rmse"]["mean"]
                < methods[name]["per_slice"]["rmse"]["mean"]
            )
        for name in ("simple", "gaussian", "downsample"):
            csv_path = outdir / f"comparison_{name}.csv"
            assert csv_path.exists()

    def test_identical_methods_yield_na_pvalue(self, tmp_path):
        thin_dir, thick_dir = constant_pair_dirs(tmp_path)
        outdir = tmp_path / "cmpflat"
        code = run_cli(
            "compare", "--thin-dir", str(thin_dir), "--thick-dir", str(thick_dir),
            "--thickness", "3", "--increment", "2",
            "--output-dir", str(outdir), "--no-timestamp",
        )
        assert code == 0
        report = json.loads((outdir / "comparison.json").read_text())
        sig = report["significance"]["simple_vs_proposed"]
        assert sig["psnr_db"]["p_value"] == "n/a"
        assert sig["psnr_db"]["significant"] is False

    def test_empty_thin_dir_exit_3(self, tmp_path):
        (tmp_path / "empty").mkdir()
        (tmp_path / "alsoempty").mkdir()
        code = run_cli(
            "compare", "--thin-dir", str(tmp_path / "empty"), "--thick-dir",
            str(tmp_path / "alsoempty"), "--thickness", "3", "--increment", "2",
            "--output-dir", str(tmp_path / "o"),
        )
        assert code == 3

    def test_thread_count_does_not_change_output(self, tmp_path):
        thin_dir, thick_dir = make_phantom_dirs(tmp_path, n=2, shape_yx=(10, 10))
        outs = []
        for threads, sub in ((1, "t1"), (4, "t4")):
            outdir = tmp_path / sub
            code = run_cli(
                "compare", "--thin-dir", str(thin_dir), "--thick-dir", str(thick_dir),
                "--thickness", "3", "--increment", "2", "--threads", str(threads),
                "--output-dir", str(outdir), "--no-timestamp",
            )
            assert code == 0
            outs.append((outdir / "comparison.json").read_bytes())
        assert outs[0] == outs[1]

    def test_matches_evaluate_pipeline(self, tmp_path):
        """compare's per-method summary equals an independent simulate+evaluate run."""
        thin_dir, thick_dir = make_phantom_dirs(tmp_path, n=1, shape_yx=(10, 10))
        outdir = tmp_path / "cmp1"
        assert run_cli(
            "compare", "--thin-dir", str(thin_dir), "--thick-dir", str(thick_dir),
            "--thickness", "3", "--increment", "2",
            "--output-dir", str(outdir), "--no-timestamp",
        ) == 0
        report = json.loads((outdir / "comparison.json").read_text())

        sim_path = tmp_path / "sim.mhd"
        assert run_cli(
            "simulate", "--input", str(thin_dir / "case00.mhd"), "--method",
            "proposed", "--thickness", "3", "--increment", "2",
            "--output", str(sim_path),
        ) == 0
        eval_dir = tmp_path / "eval1"
        assert run_cli(
            "evaluate", "--pred", str(sim_path), "--ref",
            str(thick_dir / "case00.mhd"), "--output-dir", str(eval_dir),
            "--no-timestamp",
        ) == 0
        evaluated = json.loads((eval_dir / "evaluate.json").read_text())
        cmp_summary = report["methods"]["proposed"]["per_slice"]
        ev_summary = evaluated["per_slice"]
        assert cmp_summary["psnr_db"]["mean"] == pytest.approx(
            ev_summary["psnr_db"]["mean"], rel=1e-9
        )
        assert cmp_summary["rmse"]["mean"] == pytest.approx(
            ev_summary["rmse"]["mean"], rel=1e-9
        )


class TestExportPairs:
    def test_two_volumes_two_methods(self, tmp_path, rng):
        indir = tmp_path / "in"
        indir.mkdir()
        for name in ("v1", "v2"):
            write_volume(
                random_volume(rng, n_slices=21, spacing_z=1.0), indir / f"{name}.mhd"
            )
        outdir = tmp_path / "out"
        code = run_cli(
            "export-pairs", "--input-dir", str(indir), "--output-dir", str(outdir),
            "--method", "proposed", "--method", "simple",
            "--thickness", "3", "--increment", "2", "--no-timestamp",
        )
        assert code == 0
        manifest = json.loads((outdir / "manifest.json").read_text())
        ids = [e["pair_id"] for e in manifest["entries"]]
        assert len(ids) == 4
        assert len(set(ids)) == 4
        for entry in manifest["entries"]:
            base = os.path.dirname(outdir / "manifest.json")
            for key in ("thin_path", "thick_path"):
                target = os.path.normpath(os.path.join(base, entry[key]))
                assert os.path.exists(target)
                read_volume(target)  # must round-trip
            assert entry["hu_window"] == {"lo_hu": -1024.0, "hi_hu": 3071.0}

    def test_empty_dir_exit_3(self, tmp_path, capsys):
        (tmp_path / "none").mkdir()
        code = run_cli(
            "export-pairs", "--input-dir", str(tmp_path / "none"),
            "--output-dir", str(tmp_path / "o"),
            "--thickness", "3", "--increment", "2",
        )
        assert code == 3
        assert "no volumes found" in capsys.readouterr().err

    def test_no_overwrite_skips_and_unions(self, tmp_path, rng):
        indir = tmp_path / "in"
        indir.mkdir()
        write_volume(random_volume(rng, n_slices=21, spacing_z=1.0), indir / "a.mhd")
        outdir = tmp_path / "out"
        args = (
            "export-pairs", "--input-dir", str(indir), "--output-dir", str(outdir),
            "--thickness", "3", "--increment", "2", "--no-timestamp",
        )
        assert run_cli(*args, "--method", "proposed") == 0
        first = (outdir / "manifest.json").read_bytes()
        before = (outdir / "a__proposed.mhd").stat().st_mtime_ns

        # second run adds a method without overwriting the existing output
        assert run_cli(*args, "--method", "proposed", "--method", "simple",
                       "--no-overwrite") == 0
        manifest = json.loads((outdir / "manifest.json").read_text())
        ids = sorted(e["pair_id"] for e in manifest["entries"])
        assert ids == ["a__proposed", "a__simple"]
        assert (outdir / "a__proposed.mhd").stat().st_mtime_ns == before

        # rerunning identically is idempotent
        assert run_cli(*args, "--method", "proposed", "--method", "simple",
                       "--no-overwrite") == 0
        again = json.loads((outdir / "manifest.json").read_text())
        assert sorted(e["pair_id"] for e in again["entries"]) == ids
        assert first != (outdir / "manifest.json").read_bytes()  # unioned, not reset


class TestSnapshot:
    def test_three_planes_with_expected_dims(self, tmp_path, rng):
        from PIL import Image

        vol = random_volume(rng, n_slices=7, shape_yx=(9, 11), spacing_z=1.0)
        path = tmp_path / "v.mhd"
        write_volume(vol, path)
        outdir = tmp_path / "shots"
        assert run_cli("snapshot", "--input", str(path), "--output-dir", str(outdir)) == 0
        sizes = {
            "axial": (11, 9),       # PIL size = (width, height) = (x, y)
            "coronal": (11, 7),     # (x, z)
            "sagittal": (9, 7),     # (y, z)
        }
        for plane, size in sizes.items():
            img = Image.open(outdir / f"v_{plane}.png")
            assert img.size == size
            assert img.mode == "L"

    def test_single_plane_with_index(self, tmp_path, rng):
        vol = random_volume(rng, n_slices=9, spacing_z=1.0)
        path = tmp_path / "v.mhd"
        write_volume(vol, path)
        outdir = tmp_path / "one"
        code = run_cli(
            "snapshot", "--input", str(path), "--output-dir", str(outdir),
            "--plane", "axial", "--index", "7",
        )
        assert code == 0
        files = sorted(os.listdir(outdir))
        assert files == ["v_axial_7.png"]

    def test_index_out_of_range_exit_2(self, tmp_path, rng):
        vol = random_volume(rng, n_slices=5, spacing_z=1.0)
        path = tmp_path / "v.mhd"
        write_volume(vol, path)
        code = run_cli(
            "snapshot", "--input", str(path), "--output-dir", str(tmp_path / "s"),
            "--plane", "axial", "--index", "99",
        )
        assert code == 2


class TestDeterminism:
    def test_simulate_outputs_bit_identical(self, tmp_path, thin_file):
        out = tmp_path / "t.mhd"
        blobs = []
        for _ in range(2):
            assert run_cli(
                "simulate", "--input", str(thin_file), "--method", "proposed",
                "--thickness", "3", "--increment", "2", "--output", str(out),
                "--no-timestamp",
            ) == 0
            blobs.append(
                (out.read_bytes(), (tmp_path / "t.raw").read_bytes(),
                 (tmp_path / "t.provenance.json").read_bytes())
            )
        assert blobs[0] == blobs[1]
