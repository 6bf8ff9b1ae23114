"""Smoke checks for the python bindings; plain asserts, no test framework."""

import math
import os
import sys
import tempfile

import dashapp


def test_theory_params():
    p = dashapp.theory_params(
        "gradient", omega=0.0, n=1, p_a=1.0, p_aa=1.0, L=2.0, L_hat=2.0,
        L_max=2.0, L_sigma=2.0, m=1, B=1)
    assert math.isclose(p["gamma_max"], 0.5, rel_tol=0, abs_tol=0)
    assert math.isclose(p["a"], 1.0)
    p2 = dashapp.theory_params(
        "page", omega=4.0, n=4, p_a=0.5, p_aa=0.25, L=1.0, L_hat=1.5,
        L_max=3.0, L_sigma=3.0, m=16, B=2)
    assert 0 < p2["gamma_max"] < 1.0
    assert math.isclose(p2["p_page"], 2.0 / 18.0)


def test_compressor():
    x = [1.0, -2.0, 3.0, 0.5]
    y = dashapp.rand_k_compress(x, 2, seed=7)
    nonzero = [v for v in y if v != 0.0]
    assert len(nonzero) == 2
    for yi, xi in zip(y, x):
        if yi != 0.0:
            assert math.isclose(yi, 2.0 * xi)
    assert math.isclose(dashapp.rand_k_omega(4, 2), 1.0)


def test_libsvm_roundtrip():
    text = "1 1:0.5 3:-2\n-1 2:1.25\n"
    assert dashapp.canonicalize_libsvm(text) == text
    synth = dashapp.synthetic_libsvm(2, 4, 6, seed=3)
    assert dashapp.canonicalize_libsvm(synth) == synth


def test_verify():
    for row in dashapp.verify(seed=5):
        assert row["pass"], row


def test_run_config():
    config = """
[problem]
loss = squared_sigmoid
n = 3
m = 8
d = 10
data_seed = 11

[participation]
scheme = s_nice
s = 2

[compressor]
kind = rand_k
K = 3

[variant]
name = gradient

[run]
T = 40
seeds = 1,2
gamma = theory
"""
    with tempfile.TemporaryDirectory() as tmp:
        summary = dashapp.run_config(config, tmp)
        assert summary["variant"] == "gradient"
        assert summary["gamma"] > 0
        assert len(summary["runs"]) == 2
        for run in summary["runs"]:
            assert not run["diverged"]
        assert summary["final_grad_norm_sq_mean"] >= 0
        for path in summary["csv_files"]:
            assert os.path.exists(path)
            with open(path) as fh:
                header = fh.readline().strip()
            assert header == "t,f,grad_norm_sq,coords_sent_cum,participants"


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for fn in tests:
        fn()
        print(f"ok {fn.__name__}")
    print(f"{len(tests)} smoke tests passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
