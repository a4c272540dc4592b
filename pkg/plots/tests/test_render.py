import csv
import subprocess
import sys

import pytest

from compclass_plots import EXPECTED_COLUMNS, FigureSpec, SchemaError, render


def write_csv(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(EXPECTED_COLUMNS)
        writer.writerows(rows)


def fake_row(m=2, snr=10.0, p=0.1, ub=0.3, kernel="random(seed=1,normalized=true)"):
    sigma2 = 10.0 ** (-snr / 10.0)
    lo, hi = max(p - 0.02, 0.0), min(p + 0.02, 1.0)
    return ["scn", kernel, m, f"{snr:.17e}", f"{sigma2:.17e}", f"{p:.17e}",
            f"{lo:.17e}", f"{hi:.17e}", f"{ub:.17e}", 1000, 42]


class TestRender:
    def test_two_series_grouped_by_m(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        write_csv(a, [fake_row(m=2, snr=s, p=0.3 - 0.01 * s, ub=0.4 - 0.01 * s)
                      for s in (0.0, 10.0, 20.0)])
        write_csv(b, [fake_row(m=4, snr=s, p=0.2 - 0.008 * s, ub=0.3 - 0.008 * s)
                      for s in (0.0, 10.0, 20.0)])
        out = tmp_path / "fig.png"
        result = render(FigureSpec((str(a), str(b)), "m", str(out)))
        assert out.exists()
        assert len(result.series) == 2
        assert all("M=" in s and "random" in s for s in result.series)

    def test_group_by_kernel(self, tmp_path):
        a = tmp_path / "a.csv"
        write_csv(a, [fake_row(kernel="random(seed=1,normalized=true)"),
                      fake_row(kernel="designed(two_zero_mean)")])
        out = tmp_path / "fig.png"
        result = render(FigureSpec((str(a),), "kernel", str(out)))
        assert len(result.series) == 2

    def test_empty_csv_no_file_written(self, tmp_path):
        a = tmp_path / "empty.csv"
        write_csv(a, [])
        out = tmp_path / "fig.png"
        with pytest.raises(ValueError):
            render(FigureSpec((str(a),), "m", str(out)))
        assert not out.exists()

    def test_schema_mismatch(self, tmp_path):
        a = tmp_path / "bad.csv"
        a.write_text("x,y\n1,2\n")
        with pytest.raises(SchemaError):
            render(FigureSpec((str(a),), "m", str(tmp_path / "fig.png")))

    def test_single_point_renders(self, tmp_path):
        a = tmp_path / "one.csv"
        write_csv(a, [fake_row()])
        out = tmp_path / "fig.png"
        result = render(FigureSpec((str(a),), "m", str(out), log_y=False))
        assert out.exists() and len(result.series) == 1

    def test_deterministic_output(self, tmp_path):
        a = tmp_path / "a.csv"
        write_csv(a, [fake_row(snr=s) for s in (0.0, 10.0)])
        out1, out2 = tmp_path / "f1.png", tmp_path / "f2.png"
        render(FigureSpec((str(a),), "m", str(out1)))
        render(FigureSpec((str(a),), "m", str(out2)))
        assert out1.read_bytes() == out2.read_bytes()


class TestCli:
    def test_render_subcommand(self, tmp_path):
        from compclass_plots.cli import main

        a = tmp_path / "a.csv"
        write_csv(a, [fake_row(snr=s) for s in (0.0, 10.0)])
        out = tmp_path / "fig.png"
        assert main(["render", "--in", str(a), "--group-by", "m",
                     "--out", str(out)]) == 0
        assert out.exists()

    def test_bad_input_exit_code(self, tmp_path, capsys):
        from compclass_plots.cli import main

        bad = tmp_path / "bad.csv"
        bad.write_text("nope\n")
        rc = main(["render", "--in", str(bad), "--out", str(tmp_path / "f.png")])
        assert rc != 0


class TestFig1aPipeline:
    def test_five_series_from_primary_cli(self, tmp_path):
        # Acceptance: CSVs out of the primary CLI feed the renderer with no
        # manual intervention; figure exists with five series (one per M).
        csvs = []
        for m in (2, 3, 4, 5, 6):
            out = tmp_path / f"fig1a_m{m}.csv"
            cmd = [sys.executable, "-m", "compclass.cli", "run",
                   "--scenario", "fig1a-zero-mean-2class", "--m", str(m),
                   "--trials", "400", "--snr", "0:40:10", "--out", str(out)]
            proc = subprocess.run(cmd, capture_output=True, text=True)
            assert proc.returncode == 0, proc.stderr
            csvs.append(str(out))
        fig = tmp_path / "fig1a.png"
        result = render(FigureSpec(tuple(csvs), "m", str(fig)))
        assert fig.exists()
        assert len(result.series) == 5
        print("\n[acceptance] plots: fig1a five-series figure from primary CLI: PASS")
