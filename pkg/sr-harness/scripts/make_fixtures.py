"""Generate harness test fixtures using the thickslice package and CLI.

Creates, under sr-harness/fixtures/:
  train_thin/   true thin phantom volumes (training inputs)
  pairs/        thin/thick training pairs exported by `thickslice export-pairs`
                for the proposed and simple methods, with the pair manifest
  identity/     manifest whose LR and HR point at the same volumes
  heldout/      true thin + true thick reference pairs (fine-grid integrated)
  parity/       10 pred/ref volume pairs plus `thickslice evaluate` reports
  directional/  a second train/heldout suite for the model-transfer check:
                thin 1 mm / 1 mm (so both methods derive the same 2 mm
                training increment and neither gets a resolution advantage
                over the 2 mm test grid) and lamina-rich phantoms whose
                sub-slice z structure makes restoration kernel-sensitive

Idempotent: skips everything if the completion marker exists.
"""

import json
import shutil
import subprocess
import sys
from pathlib import Path

from thickslice import make_phantom_acquisitions, write_volume

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
MARKER = FIXTURES / ".complete"

HU_WINDOW = {"lo_hu": -1024.0, "hi_hu": 3071.0}


def cli(*args: str) -> None:
    subprocess.run(
        [sys.executable, "-m", "thickslice", *args],
        check=True,
        stdout=subprocess.DEVNULL,
    )


def manifest_entry(pair_id, thin_rel, thick_rel, method):
    return {
        "pair_id": pair_id,
        "thin_path": thin_rel,
        "thick_path": thick_rel,
        "method": method,
        "method_params": {},
        "thickness_mm": 3.0,
        "increment_mm": 2.0,
        "hu_window": dict(HU_WINDOW),
    }


def write_manifest(path: Path, entries) -> None:
    path.write_text(
        json.dumps({"format_version": 1, "entries": entries}, indent=2) + "\n"
    )


def main() -> int:
    if MARKER.exists():
        print("fixtures already present")
        return 0
    shutil.rmtree(FIXTURES, ignore_errors=True)

    train_thin = FIXTURES / "train_thin"
    train_thin.mkdir(parents=True)
    identity_dir = FIXTURES / "identity"
    identity_dir.mkdir()
    identity_entries = []
    for seed in range(100, 104):
        thin, _ = make_phantom_acquisitions(seed)
        name = f"t{seed}.mhd"
        write_volume(thin, train_thin / name)
        identity_entries.append(
            manifest_entry(f"t{seed}__identity", f"../train_thin/{name}",
                           f"../train_thin/{name}", "identity")
        )
    write_manifest(identity_dir / "manifest.json", identity_entries)

    cli(
        "export-pairs",
        "--input-dir", str(train_thin),
        "--output-dir", str(FIXTURES / "pairs"),
        "--method", "proposed",
        "--method", "simple",
        "--thickness", "3",
        "--increment", "2",
        "--no-timestamp",
    )

    heldout = FIXTURES / "heldout"
    heldout.mkdir()
    heldout_entries = []
    for seed in range(200, 205):
        thin, thick = make_phantom_acquisitions(seed)
        write_volume(thin, heldout / f"h{seed}_thin.mhd")
        write_volume(thick, heldout / f"h{seed}_thick.mhd")
        heldout_entries.append(
            manifest_entry(f"h{seed}", f"h{seed}_thin.mhd",
                           f"h{seed}_thick.mhd", "reference")
        )
    write_manifest(heldout / "manifest.json", heldout_entries)

    parity = FIXTURES / "parity"
    parity.mkdir()
    for i, seed in enumerate(range(300, 310)):
        thin, thick = make_phantom_acquisitions(seed)
        thin_path = parity / f"thin{i}.mhd"
        write_volume(thin, thin_path)
        write_volume(thick, parity / f"ref{i}.mhd")
        cli(
            "simulate",
            "--input", str(thin_path),
            "--method", "proposed",
            "--thickness", "3",
            "--increment", "2",
            "--output", str(parity / f"pred{i}.mhd"),
            "--no-timestamp",
        )
        cli(
            "evaluate",
            "--pred", str(parity / f"pred{i}.mhd"),
            "--ref", str(parity / f"ref{i}.mhd"),
            "--output-dir", str(parity / f"eval{i}"),
            "--no-timestamp",
        )

    directional = FIXTURES / "directional"
    dir_thin = directional / "train_thin"
    dir_held = directional / "heldout"
    dir_thin.mkdir(parents=True)
    dir_held.mkdir()
    geometry = dict(thin_thickness_mm=1.0, thin_increment_mm=1.0, n_laminae=12)
    for seed in range(100, 106):
        thin, _ = make_phantom_acquisitions(seed, **geometry)
        write_volume(thin, dir_thin / f"t{seed}.mhd")
    dir_entries = []
    for seed in range(200, 205):
        thin, thick = make_phantom_acquisitions(seed, **geometry)
        write_volume(thin, dir_held / f"h{seed}_thin.mhd")
        write_volume(thick, dir_held / f"h{seed}_thick.mhd")
        dir_entries.append(
            manifest_entry(f"h{seed}", f"h{seed}_thin.mhd",
                           f"h{seed}_thick.mhd", "reference")
        )
    write_manifest(dir_held / "manifest.json", dir_entries)
    cli(
        "export-pairs",
        "--input-dir", str(dir_thin),
        "--output-dir", str(directional / "pairs"),
        "--method", "proposed",
        "--method", "simple",
        "--thickness", "3",
        "--increment", "2",
        "--no-timestamp",
    )

    # a primary comparison report, used to cross-check the report schema
    cmp_thin = FIXTURES / "cmp_thin"
    cmp_thick = FIXTURES / "cmp_thick"
    cmp_thin.mkdir()
    cmp_thick.mkdir()
    for seed in range(400, 402):
        thin, thick = make_phantom_acquisitions(seed)
        write_volume(thin, cmp_thin / f"c{seed}.mhd")
        write_volume(thick, cmp_thick / f"c{seed}.mhd")
    cli(
        "compare",
        "--thin-dir", str(cmp_thin),
        "--thick-dir", str(cmp_thick),
        "--thickness", "3",
        "--increment", "2",
        "--output-dir", str(FIXTURES / "primary_report"),
        "--no-timestamp",
    )

    MARKER.touch()
    print(f"fixtures written under {FIXTURES}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
