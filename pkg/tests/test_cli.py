import io
import subprocess
import sys

import pytest

from multibrot import Lamination, build
from multibrot.cli import run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize(
    "argv,expected",
    [
        (["pair", "1/7", "--degree", "2", "--max-period", "4"], "leaf 1/7 2/7 n=3\n"),
        (["pair", "9/56", "--max-period", "6"], "misiu m3.3.4 l=3 n=3 angles=9/56,11/56,15/56 zerogap=2\n"),
        (["pair", "1/8", "-d", "3", "--max-period", "3", "--max-preperiod", "0"], "leaf 1/8 3/8 n=2 coroots=1/4\n"),
        (["branch", "1/7", "3/7"], "branch comp main 1/3 1/2\n"),
        (["branch", "1/3", "3/7"], "inwake c2.1\n"),
        (["branch", "9/56", "11/56"], "branch misiu m3.3.4 0 1\n"),
        (["separate", "1/7", "2/7"], "same-class\n"),
        (["separate", "9/56", "3/7"], "pair 1/3 2/3\n"),
        (["separate", "1/7", "5/7"], "comp main via 0/1 1/3\n"),
        (["class", "1/7", "2/7"], "true\n"),
        (["class", "1/7", "3/7"], "false\n"),
        (["wake", "1/3", "3/7"], "inwake c2.1\n"),
        (["wake", "1/7", "3/7"], "outside c3.1\n"),
        (["angle", "info", "1/7"], "angle 1/7\nclass l=0 n=3\nkneading |11★\naddress 1->3\nangled 1(1/3)->3\n"),
        (["approx", "3/7", "4/7", "--count", "1", "--max-period", "6", "--max-preperiod", "0"],
         "pair 53/124 71/124\n"),
    ],
)
def test_golden_outputs(argv, expected):
    code, out, err = call(*argv)
    assert (code, out) == (0, expected), err


def test_misiu_output():
    code, out, _ = call("misiu", "9/56")
    assert code == 0
    assert out.splitlines() == [
        "misiu m3.3.4 l=3 n=3 angles=9/56,11/56,15/56 zerogap=2",
        "gap 0 9/56 11/56 witness c5.3 5/31 6/31",
        "gap 1 11/56 15/56 witness c4.2 1/5 4/15",
        "gap 2 15/56 9/56 zero witness c9.41 82/511 137/511",
    ]


def test_machine_format():
    code, out, _ = call("separate", "9/56", "3/7", "--format", "machine")
    assert code == 0
    # sides: 1 inside the wake of the witness, 0 outside
    assert out == "kind=pair rays=1/3,2/3 sides=0,1\n"
    code, out, _ = call("pair", "1/7", "--format", "machine", "--max-period", "4")
    assert out == "kind=leaf id=c3.1 lower=1/7 upper=2/7 period=3\n"


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["pair"],
        ["pair", "3/2"],
        ["pair", "abc"],
        ["branch", "1/3", "1/3"],
        ["separate", "0", "1/3"],
        ["lam", "build", "--misiu-period", "12"],
        ["pair", "1/7", "--degree", "1"],
        ["render", "set", "-o", "x.png", "--viewport", "1 2 3"],
        ["approx", "1/3", "2/3"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_one(argv):
    code, _, err = call(*argv)
    assert code == 1
    assert "error" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["pair", "1/2047", "--max-period", "6"],
        ["separate", "1/15", "2/15", "--max-period", "3"],
        ["branch", "1/15", "2/15", "--max-period", "3", "--max-preperiod", "0"],
        ["class", "1/15", "2/15", "--max-period", "3"],
    ],
)
def test_undecided_exit_two(argv):
    code, out, _ = call(*argv)
    assert code == 2
    assert "undecided" in out


def test_validate_exit_codes():
    code, out, _ = call("validate", "--period", "3", "--max-period", "3", "--max-preperiod", "0", "--tol", "1e-2")
    assert code == 0
    assert len(out.splitlines()) == 4 and all(" pass " in l for l in out.splitlines())
    code, out, _ = call("validate", "--period", "3", "--max-period", "3", "--max-preperiod", "0", "--tol", "1e-12")
    assert code == 3


def test_trace_command():
    code, out, _ = call("trace", "1/3")
    assert code == 0
    re_, im_ = out.split()[0][5:], out.split()[1]
    assert abs(float(re_) + 0.75) < 1e-4 and abs(float(im_)) < 1e-4
    code, out, _ = call("trace", "1/5", "--dump", "--depth", "2", "--t-min", "1e-4")
    assert out.splitlines()[0].startswith("t=") and out.splitlines()[-1].startswith("land=")


def test_cache_round_trip(tmp_path):
    cache = tmp_path / "cache"
    code, out, _ = call("lam", "build", "--max-period", "6", "--max-preperiod", "2", "--cache", str(cache))
    assert code == 0
    files = list(cache.iterdir())
    assert [f.name for f in files] == ["mblam-d2-n6-l2.txt"]
    assert files[0].read_text() == build(2, 6, 2).dumps()
    # a query served from the cache matches a fresh build
    cached = call("separate", "9/56", "3/7", "--max-period", "6", "--max-preperiod", "2", "--cache", str(cache))
    fresh = call("separate", "9/56", "3/7", "--max-period", "6", "--max-preperiod", "2")
    assert cached == fresh
    # a stale file with the wrong header is rebuilt
    files[0].write_text("MBLAM v1 d=2 maxper=5 maxpre=2\n")
    assert call("pair", "1/7", "--max-period", "6", "--max-preperiod", "2", "--cache", str(cache))[0] == 0
    assert files[0].read_text() == build(2, 6, 2).dumps()


def test_cache_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("MULTIBROT_CACHE", str(tmp_path))
    assert call("pair", "1/3", "--max-period", "4", "--misiu-period", "2")[0] == 0
    assert (tmp_path / "mblam-d2-n4-l3-p2.txt").exists()


def test_lam_build_and_show(tmp_path):
    path = tmp_path / "lam.txt"
    code, out, _ = call("lam", "build", "--max-period", "4", "--max-preperiod", "1", "-o", str(path))
    assert code == 0 and out.startswith("built d=2 maxper=4 maxpre=1 components=11 misiurewicz=21")
    code, out, _ = call("lam", "show", "-i", str(path))
    assert out == path.read_text()
    assert Lamination.loads(out).dumps() == out


def test_render_commands(tmp_path):
    svg = tmp_path / "lam.svg"
    code, _, _ = call("render", "lam", "-o", str(svg), "--max-period", "3", "--max-preperiod", "0")
    assert code == 0 and svg.read_text().count('<path id="') == 5
    png = tmp_path / "set.png"
    code, _, _ = call("render", "set", "-o", str(png), "--size", "64", "--rays", "1/3,2/3")
    assert code == 0 and png.stat().st_size > 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "multibrot", "pair", "1/7", "--max-period", "4"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "leaf 1/7 2/7 n=3\n"
    proc = subprocess.run([sys.executable, "-m", "multibrot", "pair"], capture_output=True, text=True)
    assert proc.returncode == 1
