import csv
import io
import subprocess
import sys

import pytest
from conftest import GRAPHS

from treegrowth.cli import run
from treegrowth.periodic_graph import loads


def call(*argv):
    out = io.StringIO()
    code = run([str(a) for a in argv], out)
    return code, out.getvalue()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_delta():
    code, text = call("delta", GRAPHS / "grid2.graph")
    assert code == 0
    assert text.splitlines()[0] == "4 - x1 - x1^-1 - x2 - x2^-1"
    assert "zero: no" in text and "reciprocal: yes" in text


def test_delta_reports_blocks_and_zero():
    code, text = call("delta", GRAPHS / "closed-loop.graph")
    assert code == 0
    assert text.splitlines()[:2] == ["0", "zero: yes"]


def test_count_cycle():
    code, text = call("count", GRAPHS / "grid1.graph", "--lattice", "5", "--oracle")
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == "T = 5"
    assert "deletion-contraction T = 5 (agrees)" in text


def test_count_timing_goes_to_stderr(capsys):
    code, text = call("count", GRAPHS / "grid2.graph", "--diag", "3")
    assert code == 0
    assert "time" not in text
    assert "time:" in capsys.readouterr().err


def test_verify_product():
    code, text = call("verify-product", GRAPHS / "grid2.graph", "--diag", "4", "--format", "csv")
    assert code == 0
    (row,) = rows(text)
    assert int(row["index"]) == 16
    assert float(row["abs_diff"]) < 1e-6
    assert int(row["skipped_points"]) == 1


def test_mahler_polynomial_and_graph():
    code, text = call("mahler", "4 - 2*x1 - 2*x1^-1", "--format", "csv")
    assert code == 0
    (row,) = rows(text)
    assert abs(float(row["value"]) - 0.6931471805599453) < 1e-9
    code, text = call("mahler", "--graph", GRAPHS / "grid1.graph", "--bits", "--format", "csv")
    (row,) = rows(text)
    assert float(row["value"]) == 0.0 and row["unit"] == "bits"


def test_converge_and_tables():
    code, text = call("converge", GRAPHS / "grid1.graph", "--diag-range", "4:12:4", "--format", "csv")
    assert code == 0
    assert [int(r["index"]) for r in rows(text)] == [4, 8, 12]
    code, text = call("gap-table", "--s-max", "4", "--format", "csv")
    assert code == 0
    assert [r["at_least_log2"] for r in rows(text)] == ["True"] * 3
    code, text = call("grid-table", "--d-max", "2", "--grid", "256", "--format", "csv")
    assert code == 0 and len(rows(text)) == 2


def test_make_graph():
    code, text = call("make-graph", "grid-drop-last", "2")
    assert code == 0
    g = loads(text)
    assert g.edge_orbits == ((1, 1, (1, 0)),)
    code, text = call("make-graph", "gap", "3")
    assert loads(text) == loads((GRAPHS / "gap3.graph").read_text())


@pytest.mark.parametrize(
    "argv, needle",
    [
        (["verify-product", GRAPHS / "closed-loop.graph", "--diag", "3"], "closed component"),
        (["mahler", "--graph", GRAPHS / "closed-loop.graph"], "identically zero"),
        (["count", GRAPHS / "nope.graph", "--diag", "3"], "cannot read"),
        (["count", GRAPHS / "grid2.graph", "--lattice", "1,2;2,4"], "malformed lattice"),
        (["count", GRAPHS / "grid2.graph", "--lattice", "3"], "dimension"),
        (["count", GRAPHS / "grid2.graph", "--diag", "100", "--max-index", "50"], "exceeds"),
        (["count", GRAPHS / "grid2.graph"], "lattice is required"),
        (["mahler", "4 - y"], "cannot parse"),
        (["mahler", "4 - x1 - x1^-1 - x2 - x2^-1", "--grid", "20000"], "max-grid"),
        (["converge", GRAPHS / "grid1.graph", "--diag-range", "8:4"], "range"),
        (["count", GRAPHS / "grid1.graph", "--diag", "3", "--threads", "0"], "positive"),
    ],
)
def test_usage_errors(argv, needle, capsys):
    code, text = call(*argv)
    assert code == 2
    err = capsys.readouterr().err.strip()
    assert err.startswith("error:") and "\n" not in err
    assert needle in err
    assert text == ""


def test_rejects_oversized_graphs(tmp_path, capsys):
    big = tmp_path / "big.graph"
    big.write_text("d: 9\nn: 1\nedges: []\n")
    assert call("delta", big)[0] == 2
    big.write_text("d: 1\nn: 65\nedges: []\n")
    assert call("delta", big)[0] == 2
    assert "limit" in capsys.readouterr().err


def test_output_is_deterministic():
    argv = ["mahler", "--graph", GRAPHS / "grid3.graph", "--grid", "40", "--format", "csv"]
    assert call(*argv) == call(*argv)
    argv = ["mahler", "--graph", GRAPHS / "grid3.graph", "--method", "monte-carlo", "--samples", "50000", "--seed", "7"]
    assert call(*argv) == call(*argv)


def test_threads_do_not_change_output():
    argv = ["converge", GRAPHS / "grid2.graph", "--diag-range", "2:6:2", "--format", "csv"]
    assert call(*argv) == call(*argv, "--threads", "2")


def test_csv_round_trip():
    code, text = call("grid-table", "--d-max", "2", "--grid", "128", "--format", "csv")
    table = list(csv.reader(io.StringIO(text)))
    header, body = table[0], table[1:]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in body:
        parsed = [float(v) if i in (1, 2, 3, 4) else v for i, v in enumerate(r)]
        w.writerow([repr(v) if isinstance(v, float) else v for v in parsed])
    assert buf.getvalue() == text


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "treegrowth", "delta", str(GRAPHS / "grid1.graph")],
        capture_output=True, text=True, check=True,
    )
    assert proc.stdout.startswith("2 - x1 - x1^-1\n")
    proc = subprocess.run([sys.executable, "-m", "treegrowth", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "edges:" in proc.stdout
