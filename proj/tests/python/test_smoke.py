import math

import numpy as np
import pytest

import nelson_fk as nf


def test_renorm_energy_closed_form():
    p = nf.ModelParams(eps=0.5, kappa=4.0, radial=16, angular=14)
    assert nf.renorm_energy(p) == pytest.approx(8 * math.pi * 0.25 * math.log(3.0), rel=1e-9)
    assert nf.renorm_energy_closed(0.5, 4.0) == pytest.approx(nf.renorm_energy(p), rel=1e-9)


def test_sample_path_shape_and_reproducibility():
    a = nf.sample_path(3, 1, 50, 0.01, N=2)
    b = nf.sample_path(3, 1, 50, 0.01, N=2)
    assert a.shape == (51, 6)
    assert np.array_equal(a, b)
    assert np.all(a[0] == 0.0)


def test_action_scales_with_coupling():
    p = nf.ModelParams(eps=1.0, kappa=4.0, radial=16, angular=14)
    u1 = nf.action(p, 1, 0, 0.5, 0.01)["u"]
    p.eps = 0.5
    u2 = nf.action(p, 1, 0, 0.5, 0.01)["u"]
    assert u2 == pytest.approx(0.25 * u1, rel=1e-12)


def test_free_fiber_energy():
    p = nf.ModelParams(eps=0.0, kappa=4.0, radial=8, angular=6)
    mc = nf.McControls(n_paths=1024, dt=0.01, seed=2)
    fit = nf.fiber_energy([1.0, 0.0, 0.0], p, [0.5, 1.0, 1.5, 2.0], mc)
    assert abs(fit["energy"] - 0.5) < 4 * fit["energy_err"] + 1e-3


def test_bounds_helpers():
    assert nf.pekar_gaussian() == pytest.approx(-1 / (3 * math.pi), rel=1e-8)
    assert not nf.pair_lemma_check(3, trials=20000)["violated"]
    rows = nf.bound_table(1.0, 2)
    assert all(len(r) == 5 for r in rows)


def test_suite_and_errors():
    assert "fock-algebra" in nf.suite_names()
    report = nf.run_suite("fock-algebra")
    assert all(c["passed"] for c in report["checks"])
    with pytest.raises(nf.NelsonError):
        nf.run_suite("nope")
    with pytest.raises(nf.DomainError):
        nf.ModelParams(N=0)
