"""Command-line pipelines over the thickslice library.

Verbs: ``simulate`` (one volume, one degradation method), ``evaluate``
(prediction vs reference metrics), ``compare`` (all four methods against a
set of thin/true-thick pairs, with significance tests), ``export-pairs``
(batch thin/thick training-pair generation with a manifest), and
``snapshot`` (tri-planar PNG previews).

Exit codes: 0 success, 2 argument errors, 3 I/O errors, 4 domain errors.
All outputs are deterministic for identical inputs and flags; report
timestamps can be disabled with --no-timestamp.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import glob
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .degrade import (
    DegradationSpec,
    DirectDownsampleSpec,
    GaussianAverageSpec,
    ProposedSpec,
    SimpleAverageSpec,
    degrade,
)
from .errors import AllZeroDifferencesError, ThickSliceError, VolumeIOError
from .geometry import SliceGrid
from .io import HuWindow, align_volumes, normalize_hu, read_volume, write_volume
from .metrics import psnr_from_rmse, rmse, summarize
from .volume import IntensityDomain, Volume

FORMAT_VERSION = 1
SIGNIFICANCE_LEVEL = 0.05
METHOD_ORDER = ("simple", "gaussian", "downsample", "proposed")

CSV_HEADER = ["pair_id", "slice_index", "location_mm", "rmse", "psnr_db"]


class UsageError(Exception):
    """Invalid argument combination or value; maps to exit code 2."""


# ---------------------------------------------------------------------------
# Shared helpers


def _timestamp() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")


def _jsonable(value):
    """Recursively convert values for strict JSON (inf -> "inf")."""
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return value
    if isinstance(value, (np.floating, np.integer)):
        return _jsonable(float(value)) if isinstance(value, np.floating) else int(value)
    return value


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(payload), fh, indent=2)
        fh.write("\n")


def _fmt(value: float) -> str:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(float(value))


def _write_slice_csv(path: str, rows: list[dict]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow(
                [
                    row["pair_id"],
                    row["slice_index"],
                    _fmt(row["location_mm"]),
                    _fmt(row["rmse"]),
                    _fmt(row["psnr_db"]),
                ]
            )


def _summary_dict(values: list[float]) -> dict:
    """Mean/std/n over finite samples; degenerates to mean "inf" if none."""
    finite = [v for v in values if math.isfinite(v)]
    if not finite:
        return {"mean": math.inf, "std": 0.0, "n": 0, "n_excluded": len(values)}
    s = summarize(values)
    return {"mean": s.mean, "std": s.std, "n": s.n, "n_excluded": s.n_excluded}


def _wilcoxon_dict(x: list[float], y: list[float]) -> dict:
    from .metrics import wilcoxon_signed_rank

    finite = [
        (a, b) for a, b in zip(x, y) if math.isfinite(a) and math.isfinite(b)
    ]
    if not finite:
        return {
            "w_statistic": "n/a",
            "p_value": "n/a",
            "n_effective": 0,
            "mode": "n/a",
            "significant": False,
        }
    xs = [a for a, _ in finite]
    ys = [b for _, b in finite]
    try:
        r = wilcoxon_signed_rank(xs, ys)
    except AllZeroDifferencesError:
        return {
            "w_statistic": "n/a",
            "p_value": "n/a",
            "n_effective": 0,
            "mode": "n/a",
            "significant": False,
        }
    return {
        "w_statistic": r.w_statistic,
        "p_value": r.p_value,
        "n_effective": r.n_effective,
        "mode": r.mode.value,
        "significant": bool(r.p_value < SIGNIFICANCE_LEVEL),
    }


def _hu_window(args) -> HuWindow:
    try:
        return HuWindow(lo_hu=args.hu_lo, hi_hu=args.hu_hi)
    except ValueError as exc:
        raise UsageError(f"--hu-lo/--hu-hi: {exc}") from exc


def _normalized(volume: Volume, window: HuWindow) -> Volume:
    if volume.intensity_domain is IntensityDomain.NORMALIZED01:
        return volume
    return normalize_hu(volume, window)


def _require_positive(value, name: str) -> float:
    if value is None:
        raise UsageError(f"{name} is required for this method")
    if not (math.isfinite(value) and value > 0):
        raise UsageError(f"{name} must be a positive finite number, got {value}")
    return float(value)


def _derived_count(physical_mm: float, dz: float, flag: str, kind: str) -> int:
    """Slice count nearest to a physical size; warns past 10% rounding error."""
    exact = physical_mm / dz
    count = max(1, round(exact))
    if exact > 0 and abs(count - exact) / exact > 0.10:
        print(
            f"warning: {flag} {physical_mm:g} mm is {exact:.3g} slices at "
            f"{dz:g} mm spacing; rounding {kind} to {count} exceeds 10% error",
            file=sys.stderr,
        )
    return count


@dataclass
class AlignedEval:
    """Per-slice and whole-volume metrics for one aligned pred/ref pair."""

    rows: list[dict]  # pair_id, slice_index, ref_index, location_mm, rmse, psnr_db
    volume_rmse: float
    volume_psnr: float


def _evaluate_aligned(
    pred: Volume, ref: Volume, tol_mm: float, max_i: float, pair_id: str
) -> AlignedEval:
    pairs = align_volumes(pred, ref, tol_mm)
    rows = []
    for i, j in pairs:
        r = rmse(pred.voxels[i], ref.voxels[j])
        rows.append(
            {
                "pair_id": pair_id,
                "slice_index": i,
                "ref_index": j,
                "location_mm": pred.slice_locations_mm[i],
                "rmse": r,
                "psnr_db": psnr_from_rmse(r, max_i),
            }
        )
    pred_stack = np.stack([pred.voxels[i] for i, _ in pairs])
    ref_stack = np.stack([ref.voxels[j] for _, j in pairs])
    vol_rmse = rmse(pred_stack, ref_stack)
    return AlignedEval(
        rows=rows,
        volume_rmse=vol_rmse,
        volume_psnr=psnr_from_rmse(vol_rmse, max_i),
    )


def _method_specs(
    thickness_mm: float, increment_mm: float, dz: float
) -> dict[str, DegradationSpec]:
    """The four comparison methods parameterized from physical targets."""
    window = _derived_count(thickness_mm, dz, "--thickness", "window")
    stride = _derived_count(increment_mm, dz, "--increment", "stride")
    return {
        "simple": SimpleAverageSpec(window_slices=window, stride_slices=stride),
        "gaussian": GaussianAverageSpec(fwhm_mm=thickness_mm, stride_slices=stride),
        "downsample": DirectDownsampleSpec(stride_slices=stride, offset_slices=0),
        "proposed": ProposedSpec(thickness_mm=thickness_mm, increment_mm=increment_mm),
    }


def _discover_volumes(directory: str) -> list[str]:
    paths = sorted(
        glob.glob(os.path.join(directory, "*.mhd"))
        + glob.glob(os.path.join(directory, "*.mha"))
    )
    return paths


def _stem(path: str) -> str:
    return os.path.splitext(os.path.basename(path))[0]


# ---------------------------------------------------------------------------
# simulate


def _spec_from_args(args, thin: Volume) -> DegradationSpec:
    method = args.method
    if method == "proposed":
        thickness = _require_positive(args.thickness, "--thickness")
        if args.start is not None or args.end is not None:
            if args.start is None or args.end is None:
                raise UsageError("--start and --end must be given together")
            increment = _require_positive(args.increment, "--increment")
            return ProposedSpec(
                thickness_mm=thickness,
                grid=SliceGrid(args.start, args.end, increment),
            )
        increment = _require_positive(args.increment, "--increment")
        return ProposedSpec(thickness_mm=thickness, increment_mm=increment)

    dz = None
    if args.window is None or args.stride is None or (
        method == "gaussian" and args.fwhm is None
    ):
        dz = abs(thin.uniform_slice_spacing_mm()) if thin.n_slices > 1 else None

    def derived_stride() -> int:
        if args.stride is not None:
            if args.stride < 1:
                raise UsageError(f"--stride must be >= 1, got {args.stride}")
            return args.stride
        if args.increment is None or dz is None:
            raise UsageError("--stride (or --increment) is required for this method")
        return _derived_count(
            _require_positive(args.increment, "--increment"), dz, "--increment", "stride"
        )

    if method == "simple":
        if args.window is not None:
            if args.window < 1:
                raise UsageError(f"--window must be >= 1, got {args.window}")
            window = args.window
        else:
            if args.thickness is None or dz is None:
                raise UsageError("--window (or --thickness) is required for simple")
            window = _derived_count(
                _require_positive(args.thickness, "--thickness"),
                dz,
                "--thickness",
                "window",
            )
        return SimpleAverageSpec(window_slices=window, stride_slices=derived_stride())
    if method == "gaussian":
        fwhm = args.fwhm if args.fwhm is not None else args.thickness
        fwhm = _require_positive(fwhm, "--fwhm (or --thickness)")
        return GaussianAverageSpec(fwhm_mm=fwhm, stride_slices=derived_stride())
    if method == "downsample":
        if args.offset < 0:
            raise UsageError(f"--offset must be >= 0, got {args.offset}")
        return DirectDownsampleSpec(
            stride_slices=derived_stride(), offset_slices=args.offset
        )
    raise UsageError(f"unknown method {method}")


def cmd_simulate(args) -> int:
    thin = read_volume(args.input)
    spec = _spec_from_args(args, thin)
    try:
        thick = degrade(thin, spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    write_volume(thick, args.output, element_type=args.element_type)
    sidecar = os.path.splitext(args.output)[0] + ".provenance.json"
    payload = {
        "format_version": FORMAT_VERSION,
        "tool": "thickslice",
        "tool_version": __version__,
        "input": args.input,
        "output": args.output,
        "element_type": args.element_type,
        "method": thick.provenance["method"],
        "params": thick.provenance["params"],
    }
    if not args.no_timestamp:
        payload["timestamp"] = _timestamp()
    _write_json(sidecar, payload)
    print(f"wrote {args.output} ({thick.n_slices} slices) and {sidecar}")
    return 0


# ---------------------------------------------------------------------------
# evaluate


def cmd_evaluate(args) -> int:
    window = _hu_window(args)
    pred = _normalized(read_volume(args.pred), window)
    ref = _normalized(read_volume(args.ref), window)
    pair_id = args.pair_id or _stem(args.pred)
    result = _evaluate_aligned(pred, ref, args.tol_mm, args.max_i, pair_id)

    os.makedirs(args.output_dir, exist_ok=True)
    csv_path = os.path.join(args.output_dir, "evaluate.csv")
    _write_slice_csv(csv_path, result.rows)
    report = {
        "format_version": FORMAT_VERSION,
        "metadata": _report_metadata(args, window, pair_id=pair_id),
        "per_slice": {
            "rmse": _summary_dict([r["rmse"] for r in result.rows]),
            "psnr_db": _summary_dict([r["psnr_db"] for r in result.rows]),
            "n_aligned_slices": len(result.rows),
        },
        "per_volume": {
            "rmse": result.volume_rmse,
            "psnr_db": result.volume_psnr,
        },
    }
    json_path = os.path.join(args.output_dir, "evaluate.json")
    _write_json(json_path, report)
    print(f"wrote {csv_path} and {json_path}")
    return 0


def _report_metadata(args, window: HuWindow, **extra) -> dict:
    md = {
        "tool": "thickslice",
        "tool_version": __version__,
        "max_i": args.max_i,
        "hu_window": {"lo_hu": window.lo_hu, "hi_hu": window.hi_hu},
        "alignment_tol_mm": args.tol_mm,
        "std_definition": "population",
        "wilcoxon_zero_method": "wilcox",
        **extra,
    }
    if not args.no_timestamp:
        md["timestamp"] = _timestamp()
    return md


# ---------------------------------------------------------------------------
# compare


def _compare_one_volume(task) -> dict[str, AlignedEval]:
    thin_path, thick_path, specs, window, tol_mm, max_i = task
    thin = read_volume(thin_path)
    true_thick = _normalized(read_volume(thick_path), window)
    out = {}
    for name, spec in specs.items():
        simulated = _normalized(degrade(thin, spec), window)
        out[name] = _evaluate_aligned(
            simulated, true_thick, tol_mm, max_i, _stem(thin_path)
        )
    return out


def cmd_compare(args) -> int:
    window = _hu_window(args)
    thickness = _require_positive(args.thickness, "--thickness")
    increment = _require_positive(args.increment, "--increment")
    thin_paths = _discover_volumes(args.thin_dir)
    thick_paths = _discover_volumes(args.thick_dir)
    if not thin_paths:
        print(f"no volumes found in {args.thin_dir}", file=sys.stderr)
        return 3
    thin_by_stem = {_stem(p): p for p in thin_paths}
    thick_by_stem = {_stem(p): p for p in thick_paths}
    stems = sorted(set(thin_by_stem) & set(thick_by_stem))
    if not stems:
        print(
            f"no matching thin/thick stems between {args.thin_dir} and {args.thick_dir}",
            file=sys.stderr,
        )
        return 3

    tasks = []
    for stem in stems:
        thin = read_volume(thin_by_stem[stem])
        dz = abs(thin.uniform_slice_spacing_mm())
        specs = _method_specs(thickness, increment, dz)
        tasks.append(
            (thin_by_stem[stem], thick_by_stem[stem], specs, window, args.tol_mm, args.max_i)
        )
    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            per_volume = list(pool.map(_compare_one_volume, tasks))
    else:
        per_volume = [_compare_one_volume(t) for t in tasks]

    method_names = list(per_volume[0].keys())
    methods_payload = {}
    slice_samples: dict[str, dict[str, list[float]]] = {}
    volume_samples: dict[str, dict[str, list[float]]] = {}
    rows_by_method: dict[str, list[dict]] = {m: [] for m in method_names}
    keyed_slices: dict[str, dict[tuple, tuple[float, float]]] = {m: {} for m in method_names}
    for name in method_names:
        s_rmse, s_psnr, v_rmse, v_psnr = [], [], [], []
        for stem, evals in zip(stems, per_volume):
            ev = evals[name]
            rows_by_method[name].extend(ev.rows)
            for row in ev.rows:
                s_rmse.append(row["rmse"])
                s_psnr.append(row["psnr_db"])
                keyed_slices[name][(stem, row["ref_index"])] = (
                    row["rmse"],
                    row["psnr_db"],
                )
            v_rmse.append(ev.volume_rmse)
            v_psnr.append(ev.volume_psnr)
        slice_samples[name] = {"rmse": s_rmse, "psnr_db": s_psnr}
        volume_samples[name] = {"rmse": v_rmse, "psnr_db": v_psnr}
        methods_payload[name] = {
            "per_slice": {
                "rmse": _summary_dict(s_rmse),
                "psnr_db": _summary_dict(s_psnr),
            },
            "per_volume": {
                "rmse": _summary_dict(v_rmse),
                "psnr_db": _summary_dict(v_psnr),
            },
        }

    significance = {}
    for name in method_names:
        if name == "proposed":
            continue
        entry = {
            "baseline": name,
            "reference": "proposed",
            "granularity": "per_volume",
            "psnr_db": _wilcoxon_dict(
                volume_samples[name]["psnr_db"], volume_samples["proposed"]["psnr_db"]
            ),
            "rmse": _wilcoxon_dict(
                volume_samples[name]["rmse"], volume_samples["proposed"]["rmse"]
            ),
        }
        common = sorted(
            set(keyed_slices[name]) & set(keyed_slices["proposed"]),
            key=lambda k: (k[0], k[1]),
        )
        if common:
            entry["per_slice"] = {
                "n_common": len(common),
                "psnr_db": _wilcoxon_dict(
                    [keyed_slices[name][k][1] for k in common],
                    [keyed_slices["proposed"][k][1] for k in common],
                ),
                "rmse": _wilcoxon_dict(
                    [keyed_slices[name][k][0] for k in common],
                    [keyed_slices["proposed"][k][0] for k in common],
                ),
            }
        significance[f"{name}_vs_proposed"] = entry

    def _rank_key(name: str):
        mean_psnr = methods_payload[name]["per_slice"]["psnr_db"]["mean"]
        mean_rmse = methods_payload[name]["per_slice"]["rmse"]["mean"]
        return (-mean_psnr, mean_rmse)

    ranking = sorted(method_names, key=_rank_key)

    os.makedirs(args.output_dir, exist_ok=True)
    report = {
        "format_version": FORMAT_VERSION,
        "metadata": _report_metadata(
            args,
            window,
            dataset_label=args.dataset_label,
            thickness_mm=thickness,
            increment_mm=increment,
            n_pairs=len(stems),
            summary_granularity="per_slice",
            significance_granularity="per_volume",
        ),
        "methods": methods_payload,
        "significance": significance,
        "ranking": ranking,
    }
    json_path = os.path.join(args.output_dir, "comparison.json")
    _write_json(json_path, report)
    for name in method_names:
        _write_slice_csv(
            os.path.join(args.output_dir, f"comparison_{name}.csv"),
            rows_by_method[name],
        )
    flagged = [
        key
        for key, entry in significance.items()
        if entry["psnr_db"]["significant"] and entry["rmse"]["significant"]
    ]
    print(
        f"compared {len(method_names)} methods on {len(stems)} pairs; "
        f"ranking: {', '.join(ranking)}; significant vs proposed: "
        f"{', '.join(flagged) if flagged else 'none'}"
    )
    print(f"wrote {json_path}")
    return 0


# ---------------------------------------------------------------------------
# export-pairs


def cmd_export_pairs(args) -> int:
    window = _hu_window(args)
    thickness = _require_positive(args.thickness, "--thickness")
    increment = _require_positive(args.increment, "--increment")
    methods = args.method or ["proposed"]
    thin_paths = _discover_volumes(args.input_dir)
    if not thin_paths:
        print(f"no volumes found in {args.input_dir}", file=sys.stderr)
        return 3
    os.makedirs(args.output_dir, exist_ok=True)
    manifest_path = args.manifest or os.path.join(args.output_dir, "manifest.json")
    manifest_dir = os.path.dirname(os.path.abspath(manifest_path)) or "."

    existing: dict[str, dict] = {}
    if os.path.exists(manifest_path) and not args.overwrite:
        with open(manifest_path, "r", encoding="utf-8") as fh:
            previous = json.load(fh)
        for entry in previous.get("entries", []):
            existing[entry["pair_id"]] = entry

    def _export(task):
        thin_path, method = task
        stem = _stem(thin_path)
        pair_id = f"{stem}__{method}"
        out_path = os.path.join(args.output_dir, f"{pair_id}.mhd")
        if os.path.exists(out_path) and not args.overwrite and pair_id in existing:
            return pair_id, None  # keep the prior manifest entry untouched
        thin = read_volume(thin_path)
        dz = abs(thin.uniform_slice_spacing_mm()) if thin.n_slices > 1 else None
        if method == "proposed":
            spec: DegradationSpec = ProposedSpec(
                thickness_mm=thickness, increment_mm=increment
            )
        else:
            if dz is None:
                raise UsageError(
                    f"{thin_path}: single-slice volume cannot derive {method} parameters"
                )
            spec = _method_specs(thickness, increment, dz)[method]
        thick = degrade(thin, spec)
        write_volume(thick, out_path, element_type=args.element_type)
        entry = {
            "pair_id": pair_id,
            "thin_path": os.path.relpath(os.path.abspath(thin_path), manifest_dir),
            "thick_path": os.path.relpath(os.path.abspath(out_path), manifest_dir),
            "method": method,
            "method_params": thick.provenance["params"],
            "thickness_mm": thickness,
            "increment_mm": increment,
            "hu_window": {"lo_hu": window.lo_hu, "hi_hu": window.hi_hu},
        }
        return pair_id, entry

    tasks = [(p, m) for p in thin_paths for m in methods]
    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(_export, tasks))
    else:
        results = [_export(t) for t in tasks]

    entries = dict(existing)
    n_skipped = 0
    for pair_id, entry in results:
        if entry is None:
            n_skipped += 1
        else:
            entries[pair_id] = entry

    ordered = [entries[k] for k in sorted(entries)]
    for entry in ordered:
        for key in ("thin_path", "thick_path"):
            target = os.path.normpath(os.path.join(manifest_dir, entry[key]))
            if not os.path.exists(target):
                raise ThickSliceError(f"manifest references missing file {target}")
    payload = {
        "format_version": FORMAT_VERSION,
        "tool": "thickslice",
        "tool_version": __version__,
        "entries": ordered,
    }
    if not args.no_timestamp:
        payload["timestamp"] = _timestamp()
    _write_json(manifest_path, payload)
    print(
        f"exported {len(results) - n_skipped} volumes ({n_skipped} skipped); "
        f"manifest {manifest_path} has {len(ordered)} entries"
    )
    return 0


# ---------------------------------------------------------------------------
# snapshot


def _to_uint8(plane: np.ndarray, window: HuWindow, domain: IntensityDomain) -> np.ndarray:
    data = np.asarray(plane, dtype=np.float64)
    if domain is IntensityDomain.HU:
        data = (data - window.lo_hu) / (window.hi_hu - window.lo_hu)
    return np.clip(np.rint(data * 255.0), 0, 255).astype(np.uint8)


def cmd_snapshot(args) -> int:
    from PIL import Image

    window = _hu_window(args)
    volume = read_volume(args.input)
    planes = {
        "axial": (0, volume.shape[0]),
        "coronal": (1, volume.shape[1]),
        "sagittal": (2, volume.shape[2]),
    }
    selected = list(planes) if args.plane == "all" else [args.plane]
    os.makedirs(args.output_dir, exist_ok=True)
    stem = _stem(args.input)
    written = []
    for plane in selected:
        axis, size = planes[plane]
        index = args.index if args.index is not None else size // 2
        if not (0 <= index < size):
            raise UsageError(
                f"--index {index} out of range for {plane} plane of size {size}"
            )
        section = np.take(volume.voxels, index, axis=axis)
        img = Image.fromarray(
            _to_uint8(section, window, volume.intensity_domain), mode="L"
        )
        suffix = f"_{index}" if args.index is not None else ""
        out_path = os.path.join(args.output_dir, f"{stem}_{plane}{suffix}.png")
        img.save(out_path)
        written.append(out_path)
    print("wrote " + ", ".join(written))
    return 0


# ---------------------------------------------------------------------------
# Parser / entry point


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--hu-lo", type=float, default=-1024.0, help="HU window low edge")
    common.add_argument("--hu-hi", type=float, default=3071.0, help="HU window high edge")
    common.add_argument(
        "--max-i", type=float, default=1.0, help="PSNR peak value (normalized scale)"
    )
    common.add_argument(
        "--tol-mm", type=float, default=0.1, help="slice alignment tolerance in mm"
    )
    common.add_argument("--threads", type=int, default=1, help="worker threads")
    common.add_argument(
        "--no-timestamp",
        action="store_true",
        help="omit timestamps so reports are byte-reproducible",
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thickslice",
        description="Simulate, evaluate, and export thick-slice CT volumes.",
    )
    parser.add_argument("--version", action="version", version=f"thickslice {__version__}")
    common = _common_parser()
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="degrade one thin volume")
    p.add_argument("--input", required=True, help="thin volume (.mhd/.mha)")
    p.add_argument("--output", required=True, help="output thick volume path")
    p.add_argument(
        "--method",
        required=True,
        choices=["proposed", "simple", "gaussian", "downsample"],
    )
    p.add_argument("--thickness", type=float, help="target slice thickness in mm")
    p.add_argument("--increment", type=float, help="target slice increment in mm")
    p.add_argument("--start", type=float, help="proposed grid start (default: thin start)")
    p.add_argument("--end", type=float, help="proposed grid end (default: thin end)")
    p.add_argument("--window", type=int, help="simple averaging window in slices")
    p.add_argument("--stride", type=int, help="stride in slices for baselines")
    p.add_argument("--fwhm", type=float, help="gaussian FWHM in mm (default: --thickness)")
    p.add_argument("--offset", type=int, default=0, help="downsample start offset")
    p.add_argument("--element-type", choices=["float32", "int16"], default="float32")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("evaluate", parents=[common], help="metrics for pred vs ref")
    p.add_argument("--pred", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--output-dir", required=True)
    p.add_argument("--pair-id", help="identifier used in the CSV (default: pred stem)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser(
        "compare", parents=[common], help="rank all four methods against truth"
    )
    p.add_argument("--thin-dir", required=True, help="directory of thin volumes")
    p.add_argument("--thick-dir", required=True, help="directory of true thick volumes")
    p.add_argument("--output-dir", required=True)
    p.add_argument("--thickness", type=float, required=True)
    p.add_argument("--increment", type=float, required=True)
    p.add_argument("--dataset-label", default="unlabeled")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser(
        "export-pairs", parents=[common], help="batch-generate training pairs"
    )
    p.add_argument("--input-dir", required=True, help="directory of thin volumes")
    p.add_argument("--output-dir", required=True)
    p.add_argument(
        "--method",
        action="append",
        choices=["proposed", "simple", "gaussian", "downsample"],
        help="repeatable; default proposed",
    )
    p.add_argument("--thickness", type=float, required=True)
    p.add_argument("--increment", type=float, required=True)
    p.add_argument("--element-type", choices=["float32", "int16"], default="float32")
    p.add_argument(
        "--overwrite",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="--no-overwrite skips existing outputs and unions the manifest",
    )
    p.add_argument("--manifest", help="manifest path (default: <output-dir>/manifest.json)")
    p.set_defaults(func=cmd_export_pairs)

    p = sub.add_parser("snapshot", parents=[common], help="tri-planar PNG previews")
    p.add_argument("--input", required=True)
    p.add_argument("--output-dir", required=True)
    p.add_argument(
        "--plane", choices=["axial", "coronal", "sagittal", "all"], default="all"
    )
    p.add_argument("--index", type=int, help="slice index (default: center)")
    p.set_defaults(func=cmd_snapshot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (VolumeIOError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    except ThickSliceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
