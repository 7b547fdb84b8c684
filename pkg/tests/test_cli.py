import subprocess
import sys

import pytest

from brstokes.study.cli import build_parser, main


def test_mesh_info(capsys, tmp_path):
    assert main(["mesh-info", "--mesh", "uniform", "--levels", "2", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "vertices=9 triangles=8 facets=16" in out
    assert (tmp_path / "mesh-uniform-2.txt").read_text().startswith("vertices 9 / triangles 8")


def test_converge_writes_results(capsys, tmp_path):
    code = main(["converge", "--case", "smooth", "--mesh", "uniform", "--nu", "1", "--levels", "2,4",
                 "--variant", "br-bdm", "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "results.csv").read_text().startswith("level,n,dofs,h_max,aspect_ratio,")
    assert (tmp_path / "plot.svg").exists() and (tmp_path / "manifest.txt").exists()
    assert "# BR-BDM" in capsys.readouterr().out


def test_converge_several_variants(tmp_path):
    main(["converge", "--case", "smooth", "--mesh", "uniform", "--nu", "1", "--levels", "2",
          "--variant", "br,br-rt", "--out", str(tmp_path)])
    assert (tmp_path / "results-br.csv").exists() and (tmp_path / "results-br-rt.csv").exists()


def test_robustness(capsys):
    assert main(["robustness", "--mesh", "uniform", "--levels", "4", "--nu", "1,1e-4",
                 "--variant", "br,br-rt,br-bdm"]) == 0
    out = capsys.readouterr().out
    assert "BR      n=4    -> not robust" in out
    assert "BR-BDM  n=4    -> robust" in out


def test_infsup(capsys):
    main(["infsup", "--mesh", "uniform", "--levels", "2"])
    assert "beta=0.561784" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [["converge", "--variant", "bdm2"], ["converge", "--mesh", "graded"],
                                  ["frobnicate"], []])
def test_bad_arguments(argv):
    with pytest.raises(SystemExit) as info:
        build_parser().parse_args(argv)
    assert info.value.code == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "brstokes.study", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for cmd in ("converge", "robustness", "infsup", "mesh-info"):
        assert cmd in res.stdout
