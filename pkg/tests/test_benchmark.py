import os
import runpy


def test_benchmark_runs(capsys):
    path = os.path.join(os.path.dirname(__file__), os.pardir, "benchmarks", "bench_kernels.py")
    mod = runpy.run_path(path)
    mod["main"](["--sizes", "4", "--repeat", "1"])
    out = capsys.readouterr().out
    assert out.count("\n") == 1 + 4 and "hessenberg_qr" in out
