"""Shared fixtures: real CSV inputs produced by the pextremal CLI."""
import math
import subprocess
import sys

import pytest


def run_cli(args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "pextremal.cli"] + args,
        cwd=cwd, capture_output=True, text=True)


@pytest.fixture(scope="session")
def contour_dir(tmp_path_factory):
    """contour_q1/q2/q4.csv on a 64x64 grid out to radius 3."""
    out = tmp_path_factory.mktemp("contour")
    proc = run_cli(["contour", "--q-list", "1,2,4", "--grid", "64",
                    "--rmax", "3", "--out", str(out)], cwd=out)
    assert proc.returncode == 0, proc.stderr
    return out


@pytest.fixture(scope="session")
def decay_f2_csv(tmp_path_factory):
    out = tmp_path_factory.mktemp("decay_f2")
    proc = run_cli(["approx", "--f", "f2", "--a", "2", "--q-list", "1,4",
                    "--nmax", "20", "--out", str(out)], cwd=out)
    assert proc.returncode == 0, proc.stderr
    return out / "approx_f2.csv"


@pytest.fixture(scope="session")
def decay_f1_csv(tmp_path_factory):
    out = tmp_path_factory.mktemp("decay_f1")
    proc = run_cli(["approx", "--f", "f1", "--q-list", "1,4",
                    "--nmax", "15", "--out", str(out)], cwd=out)
    assert proc.returncode == 0, proc.stderr
    return out / "approx_f1.csv"


@pytest.fixture()
def synth_contour_csv(tmp_path):
    """Synthetic q=1 style grid: v = log max(|r|, 1) on a 61x61 grid."""
    path = tmp_path / "contour_q1.csv"
    lines = ["r1,r2,v"]
    n = 61
    for i in range(n):
        r1 = 3.0 * i / (n - 1)
        for j in range(n):
            r2 = 3.0 * j / (n - 1)
            v = max(0.0, 0.5 * math.log(r1 * r1 + r2 * r2)
                    if r1 * r1 + r2 * r2 > 1 else 0.0)
            lines.append(f"{r1!r},{r2!r},{v!r}")
    path.write_text("\n".join(lines) + "\n")
    return path
