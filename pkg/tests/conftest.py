import numpy as np
import pytest

from thickslice import IntensityDomain, Volume

_ACCEPTANCE_RESULTS: dict[str, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    name = marker.args[0]
    if report.when == "call" or (report.when == "setup" and report.skipped):
        _ACCEPTANCE_RESULTS[item.nodeid] = (name, report.outcome)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _ACCEPTANCE_RESULTS.values():
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}.get(
            outcome, outcome.upper()
        )
        terminalreporter.write_line(f"[{status}] {name}")


def random_volume(
    rng,
    n_slices=None,
    shape_yx=(5, 6),
    spacing_z=None,
    start_z=0.0,
    uniform=True,
    domain=IntensityDomain.HU,
    lo=-1000.0,
    hi=1000.0,
) -> Volume:
    n = n_slices if n_slices is not None else int(rng.integers(2, 12))
    dz = spacing_z if spacing_z is not None else float(rng.uniform(0.4, 3.0))
    if uniform:
        locs = start_z + np.arange(n) * dz
    else:
        steps = rng.uniform(0.3, 2.5, size=n - 1)
        locs = start_z + np.concatenate([[0.0], np.cumsum(steps)])
    vox = rng.uniform(lo, hi, size=(n,) + shape_yx).astype(np.float32)
    if domain is IntensityDomain.NORMALIZED01:
        vox = rng.uniform(0.0, 1.0, size=(n,) + shape_yx).astype(np.float32)
    return Volume(vox, (1.0, 1.0), tuple(float(z) for z in locs), domain)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
