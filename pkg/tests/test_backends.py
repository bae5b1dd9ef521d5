"""Backend selection and the arithmetic benchmark harness."""

from halfparity import benchmark, engine


def test_compiled_backend_active():
    # this environment builds the extension; a fallback here means the
    # build is broken, not that the fallback misbehaves
    assert engine.BACKEND == "compiled"
    from halfparity.engine import _kernel

    assert engine.sse_path is _kernel.sse_path
    assert engine.sme_path is _kernel.sme_path


def test_backend_exports():
    assert callable(engine.sse_path)
    assert callable(engine.sme_path)
    assert callable(engine.wiener_increments)
    assert callable(engine.trajectory_rng)


def test_benchmark_runs(capsys):
    assert benchmark.main(["--steps", "400", "--paths", "2"]) == 0
    out = capsys.readouterr().out
    assert "pure" in out
    assert "mixed" in out
    assert "steps/s" in out
    assert "speedup" in out
