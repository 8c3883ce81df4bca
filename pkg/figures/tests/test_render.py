"""Rendering contracts: determinism, schema enforcement, CLI exit codes."""

import numpy as np
import pytest

from spikefigs import FigureRecipe, SchemaMismatch, read_table, render
from spikefigs.cli import main


def _write(path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(str(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")
    return str(path)


@pytest.fixture
def artifacts(tmp_path):
    """Small synthetic CSVs conforming to each artifact schema."""
    xs = np.linspace(-1, 1, 21)
    snap_rows = [(t, x, np.exp(-20 * x * x) * (1 + t), 0.5, 0.2)
                 for t in (0.0, 1.0, 2.0) for x in xs]
    track_rows = [(t, 0, 0.1 * np.sin(t), 40.0, 1)
                  for t in np.linspace(0, 10, 50)]
    s = np.linspace(0, 1, 40)
    branch_rows = [(si, 1.1 - 0.2 * (si - 0.5) ** 2, 0.9 + 0.3 * si,
                    1.0 - 0.5 * si, 1 if i == 20 else 0)
                   for i, si in enumerate(s)]
    lam = np.concatenate([np.linspace(0, 1.18, 30),
                          np.linspace(1.32, 3.0, 30)])
    spectral_rows = [(x, 6.0 / (1.25 - x), 0.0) for x in lam]
    summary_rows = [("a=0.3:D_nuc", 0.9, "", "sweep"),
                    ("a=0.3:regime", "nucleating", "", "sweep"),
                    ("a=0.5:D_nuc", 1.07, "", "sweep"),
                    ("a=0.4:D_nuc", 1.01, "", "sweep")]
    return {
        "snapshots": _write(tmp_path / "snapshots.csv",
                            ["t", "x", "u", "v", "w"], snap_rows),
        "track": _write(tmp_path / "track.csv",
                        ["t", "spike_id", "position", "amplitude", "count"],
                        track_rows),
        "branch": _write(tmp_path / "branch.csv",
                         ["arclength", "Dv", "mu", "v0", "fold"],
                         branch_rows),
        "curve": _write(tmp_path / "curve.csv", ["lam", "re", "im"],
                        spectral_rows),
        "summary": _write(tmp_path / "summary.csv",
                          ["quantity", "value", "tolerance", "source"],
                          summary_rows),
    }


def _recipe(kind, role, path, out, **options):
    return FigureRecipe(figure_id=f"test-{kind}", kind=kind,
                        inputs={role: path}, output=str(out),
                        options=options)


ALL_KINDS = [("heatmap", "snapshots"), ("track", "track"),
             ("branch", "branch"), ("spectral", "curve"),
             ("threshold", "summary")]


class TestDeterminism:
    @pytest.mark.parametrize("kind,role", ALL_KINDS)
    def test_rerender_is_byte_identical(self, kind, role, artifacts, tmp_path):
        opts = {"quantity": "D_nuc"} if kind == "threshold" else {}
        out1 = tmp_path / f"{kind}_1.png"
        out2 = tmp_path / f"{kind}_2.png"
        render(_recipe(kind, role, artifacts[role], out1, **opts))
        render(_recipe(kind, role, artifacts[role], out2, **opts))
        data = out1.read_bytes()
        assert data.startswith(b"\x89PNG") and len(data) > 1000
        assert data == out2.read_bytes()


class TestSchema:
    def test_missing_columns_all_listed(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("t,x\n0,0\n")
        with pytest.raises(SchemaMismatch) as exc:
            read_table(path, ["t", "x", "u", "v", "w"])
        assert exc.value.missing == ["u", "v", "w"]
        assert "u, v, w" in str(exc.value)

    def test_empty_file_is_schema_mismatch(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(SchemaMismatch):
            read_table(path, ["t", "x"])

    def test_extra_columns_tolerated(self, tmp_path):
        path = tmp_path / "extra.csv"
        path.write_text("lam,re,im,extra\n0,6,0,9\n")
        table = read_table(path, ["lam", "re", "im"])
        assert table["extra"] == ["9"]

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError, match="unknown recipe kind"):
            FigureRecipe("x", "scatter3d", {}, "out.png")

    def test_threshold_needs_matching_rows(self, artifacts, tmp_path):
        recipe = _recipe("threshold", "summary", artifacts["summary"],
                         tmp_path / "t.png", quantity="nonexistent")
        with pytest.raises(ValueError, match="nonexistent"):
            render(recipe)


class TestCli:
    def test_success_exit_0(self, artifacts, tmp_path, capsys):
        out = tmp_path / "branch.png"
        assert main(["branch", artifacts["branch"], str(out)]) == 0
        assert out.is_file()

    def test_empty_csv_exit_2(self, tmp_path, capsys):
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        rc = main(["track", str(empty), str(tmp_path / "t.png")])
        assert rc == 2
        assert "schema mismatch" in capsys.readouterr().err

    def test_missing_column_reported(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("t,spike_id,position\n0,0,0\n")
        rc = main(["track", str(bad), str(tmp_path / "t.png")])
        assert rc == 2
        err = capsys.readouterr().err
        assert "amplitude" in err and "count" in err

    def test_threshold_requires_quantity(self, artifacts, tmp_path, capsys):
        rc = main(["threshold", artifacts["summary"],
                   str(tmp_path / "t.png")])
        assert rc == 1

    def test_threshold_happy_path(self, artifacts, tmp_path):
        out = tmp_path / "dnuc.png"
        rc = main(["threshold", artifacts["summary"], str(out),
                   "--quantity", "D_nuc"])
        assert rc == 0 and out.is_file()
