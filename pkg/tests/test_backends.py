import os
import subprocess
import sys

import numpy as np
import pytest

from ngcut import lp
from ngcut.dca import DcaConfig, run_dca
from ngcut.formulation import Formulation

from oracles import random_instance

needs_ext = pytest.mark.skipif("cython" not in lp.BACKENDS, reason="compiled kernel not built")


@needs_ext
def test_default_is_compiled():
    assert lp.DEFAULT_BACKEND == "cython"


@needs_ext
def test_lp_backends_bit_identical():
    rng = np.random.default_rng(51)
    for _ in range(40):
        form = Formulation(random_instance(rng, max_side=16, max_m=5))
        c = rng.normal(size=form.n)
        a = lp.solve_lp(form.A, c, backend="cython")
        b = lp.solve_lp(form.A, c, backend="python")
        assert a.status == b.status and a.iterations == b.iterations
        assert np.array_equal(a.x, b.x)


@needs_ext
def test_dca_backends_bit_identical():
    rng = np.random.default_rng(52)
    for _ in range(10):
        form = Formulation(random_instance(rng, max_side=16, max_m=5))
        a = run_dca(form, DcaConfig(t=20, u=20, backend="cython"))
        b = run_dca(form, DcaConfig(t=20, u=20, backend="python"))
        assert np.array_equal(a.x_final, b.x_final) and a.trace.F_values == b.trace.F_values


def test_pure_python_switch():
    env = dict(os.environ, NGCUT_PURE_PYTHON="1")
    code = "from ngcut import lp; print(lp.DEFAULT_BACKEND, sorted(lp.BACKENDS))"
    proc = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env)
    assert proc.stdout.split()[0] == "python"
    assert "cython" not in proc.stdout


def test_unknown_backend_rejected(t1):
    with pytest.raises(ValueError, match="unknown backend"):
        lp.solve_lp(Formulation(t1).A, np.zeros(4), backend="fortran")
