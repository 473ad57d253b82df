import json
import math
import subprocess
import sys

import numpy as np
import pytest

from lanearith import bench
from lanearith.cli import main
from lanearith.testgen import RngSpec, gen_corpus, read_vectors, write_vectors


def _corpus(tmp_path, ops=("add",), sizes=(512,), n=20, cats=("random",)):
    cases = gen_corpus(RngSpec(3), ops, sizes, n, cats)
    p = tmp_path / "c.jsonl"
    write_vectors(cases, p)
    return p, cases


def test_verify_clean(tmp_path, capsys):
    p, cases = _corpus(tmp_path, ("add", "sub", "mul"), (512, 1024))
    assert main(["verify", str(p), "--kernel", "dot,oracle"]) == 0
    assert "0 mismatches" in capsys.readouterr().out


def test_verify_reports_single_corruption(tmp_path, capsys):
    p, cases = _corpus(tmp_path, n=30)
    lines = p.read_text().splitlines()
    rec = json.loads(lines[17])
    exp = int(rec["expected"], 16) ^ (1 << 200)
    rec["expected"] = format(exp, "x")
    lines[17] = json.dumps(rec)
    p.write_text("\n".join(lines) + "\n")
    assert main(["verify", str(p)]) == 1
    out = capsys.readouterr().out
    assert out.count("MISMATCH") == 1 and "case 17" in out
    rep = bench.run_verify(read_vectors(p))
    assert [m.index for m in rep.mismatches] == [17]


def test_verify_flag_corruption(tmp_path):
    p, cases = _corpus(tmp_path, n=5)
    cases[2].flag ^= 1
    assert len(bench.run_verify(cases).mismatches) == 1


def test_verify_empty_corpus(tmp_path, capsys):
    p = tmp_path / "e.jsonl"
    p.write_text("")
    assert main(["verify", str(p)]) == 0
    assert "0 cases, 0 mismatches" in capsys.readouterr().out


def test_verify_generated(capsys):
    assert main(["verify", "--bits", "512", "--cases", "30", "--pathological", "all",
                 "--width", "scalar"]) == 0


@pytest.mark.parametrize("kernel", ["mulwords", "karatsuba", "mul4x4", "oracle"])
def test_verify_mul_kernels(tmp_path, kernel):
    p, _ = _corpus(tmp_path, ("mul",), (256, 512), 10)
    rep = bench.run_verify(read_vectors(p), (kernel,))
    assert rep.exit_code == 0
    if kernel == "mul4x4":
        assert any("skipped" in n for n in rep.notes)


def test_usage_errors(tmp_path, capsys):
    with pytest.raises(SystemExit) as e:
        main(["bench", "--width", "3"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["gen", "--bits", "100"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["verify", "--kernel", "fft"])
    assert e.value.code == 2
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{not json\n")
    assert main(["verify", str(bad)]) == 2
    assert "bad.jsonl:1" in capsys.readouterr().err
    assert main(["verify", str(tmp_path / "missing.jsonl")]) == 2


def test_gen_deterministic_bytes(tmp_path):
    outs = []
    for name in ("a", "b"):
        p = tmp_path / f"{name}.jsonl"
        assert main(["gen", "--op", "sub", "--bits", "512,1536", "--cases", "15", "--seed", "42",
                     "--pathological", "all", "--pathological-cases", "4", "-o", str(p)]) == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]
    assert len(outs[0].splitlines()) == 2 * (15 + 6 * 4)


def test_gen_stdout(capsys):
    assert main(["gen", "--bits", "512", "--cases", "3"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 3


def test_bench_rows_and_csv(tmp_path, capsys):
    p = tmp_path / "b.csv"
    assert main(["bench", "--bits", "512", "--cases", "200", "--reps", "3", "--instrument",
                 "--csv", str(p)]) == 0
    rep = bench.read_csv(p)
    assert [r.kernel for r in rep.rows] == ["dot", "oracle"]
    dot = rep.rows[0]
    assert dot.mismatches == 0 and dot.ticks_per_op_mean > 0 and dot.phase4_rate == 0
    assert sum(getattr(dot, "pct_" + ph) for ph in bench.PHASES) == pytest.approx(100)
    assert math.isnan(rep.rows[1].carry_add_ratio)
    emit = tmp_path / "again.csv"
    bench.emit_csv(rep, emit)
    assert emit.read_text() == p.read_text()


def test_bench_mul_instrumented():
    rep = bench.run_bench("mul", 512, 8, 3, 1, 50, kernels=("mulwords", "karatsuba"),
                          instrument=True)
    assert [r.kernel for r in rep.rows] == ["mulwords", "karatsuba"]
    mw = rep.rows[0]
    assert sum(getattr(mw, "pct_" + ph) for ph in
               ("gather", "compute", "align", "reduce", "carry_pass")) == pytest.approx(100)


def test_csv_header_only(tmp_path):
    p = tmp_path / "h.csv"
    bench.emit_csv(bench.BenchReport(), p)
    assert p.read_text().strip() == ",".join(bench.COLUMNS)
    assert bench.read_csv(p).rows == []
    p.write_text("x,y\n")
    with pytest.raises(ValueError):
        bench.read_csv(p)


def test_compare_backends(capsys):
    assert main(["bench", "--bits", "512", "--cases", "20", "--reps", "2", "--compare-backends",
                 "--width", "4"]) == 0
    out = capsys.readouterr().out
    assert "[pure]" in out


def test_mean_ci95():
    m, h = bench.mean_ci95([1.0, 2.0, 3.0])
    assert m == 2.0 and h == pytest.approx(4.302652729911275 / math.sqrt(3))
    assert math.isnan(bench.mean_ci95([5.0])[1])


def test_stats_command(capsys):
    assert main(["stats", "--kmax", "8", "--samples", "200000"]) == 0
    out = capsys.readouterr().out
    assert "32640" in out and "NO" not in out


def test_carry_frequency_deterministic():
    assert bench.carry_frequency(10_000, 1) == bench.carry_frequency(10_000, 1)
    assert abs(bench.carry_frequency(10 ** 6) - 0.5) < 0.005


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "lanearith", "gen", "--bits", "512", "--cases", "2"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and len(r.stdout.splitlines()) == 2
    r = subprocess.run([sys.executable, "-m", "lanearith"], capture_output=True, text=True)
    assert r.returncode == 2


def test_mismatching_kernel_row_skipped(monkeypatch):
    real = bench.run_kernel

    def broken(kernel, op, A, B, *args, **kw):
        V, F = real(kernel, op, A, B, *args, **kw)
        if kernel == "dot":
            V = V.copy()
            V[0, 0] ^= np.uint64(1)
        return V, F

    monkeypatch.setattr(bench, "run_kernel", broken)
    rep = bench.run_bench("add", 512, 8, 2, 1, 30)
    assert rep.exit_code == 1 and len(rep.mismatches) == 1
