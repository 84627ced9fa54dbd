import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from foliage.exterior import is_real
from foliage.harness import (
    IDENTITIES,
    LEVELS,
    RandomFormSpec,
    make_trial,
    random_deformation,
    random_form,
    run_identities,
    select_identities,
)


@pytest.fixture(scope="module")
def suites(models):
    return {
        "carriere": run_identities(models["carriere"], "all", K=4, seed=42, trials=20),
        "taut_torus": run_identities(models["taut_torus"], "all", K=4, seed=0, trials=20),
    }


@settings(max_examples=20)
@given(seed=st.integers(0, 2 ** 63 - 1), bw=st.integers(0, 2))
def test_random_form_is_reproducible(models, seed, bw):
    m = models["product_j1"]
    spec = RandomFormSpec(seed=seed, bandwidth=bw)
    a, b = random_form(m, spec), random_form(m, spec)
    assert a.terms.keys() == b.terms.keys()
    for w in a.terms:
        assert a.terms[w].terms == b.terms[w].terms


def test_random_form_options(models):
    m = models["product_j1"]
    real = random_form(m, RandomFormSpec(seed=3, real=True))
    assert is_real(real, 1e-15)
    only = random_form(m, RandomFormSpec(seed=3, degree=2))
    assert only.degrees() == {2}
    weighted = random_form(m, RandomFormSpec(seed=3, bidegree_weights={(1, 1): 0.0, (0, 0): 0.0}))
    assert (1, 1) not in weighted.bidegrees() and (0, 0) not in weighted.bidegrees()
    amp = random_form(m, RandomFormSpec(seed=3, amplitude=2.0))
    assert abs(amp.norm() - 2 * random_form(m, RandomFormSpec(seed=3)).norm()) < 1e-12
    assert random_form(m, RandomFormSpec(seed=3, bandwidth=2)).bandwidth == 2


def test_random_deformation_is_real_without_constant():
    for dims in (1, 2):
        f = random_deformation(dims, 9, bandwidth=2)
        assert f.is_real(1e-15)
        assert f.coefficient((0,) * dims) == 0
        assert f.bandwidth == 2
        assert f == random_deformation(dims, 9, bandwidth=2)


def test_trials_are_independent_of_each_other(models):
    m = models["carriere"]
    t0, t1 = make_trial(m, 5, 0, 1), make_trial(m, 5, 1, 1)
    assert (t0.form - t1.form).norm() > 0.1
    assert t0.real_one_form.degrees() == {1} and is_real(t0.real_one_form, 1e-15)
    assert t0.function.degrees() == {0}


def test_carriere_suite_pattern(suites):
    res = suites["carriere"]
    assert [e.id for e in res.entries] == [f"I{k}" for k in range(1, 24)]
    for k in range(1, 20):
        e = res.entry(f"I{k}")
        assert e.applicable and e.passed, e
        assert e.residual <= 1e-10
    i20 = res.entry("I20")
    assert not i20.applicable and not i20.passed
    assert "not automorphic" in i20.skip_reason
    for k in (21, 22, 23):
        e = res.entry(f"I{k}")
        assert not e.applicable and not e.passed and "kappa_B is not zero" in e.skip_reason
    assert res.all_pass and res.failures == []


def test_non_applicable_identities_really_fail_on_carriere(suites):
    # skipped entries still carry their residual so the gate can be audited
    res = suites["carriere"]
    assert res.entry("I20").residual > 0.1
    assert res.entry("I23").residual > 1e-3


def test_taut_suite_all_pass(suites):
    res = suites["taut_torus"]
    assert all(e.applicable and e.passed for e in res.entries)
    assert res.entry("I22").matrix_residual is not None and res.entry("I22").matrix_residual <= 1e-10


def test_product_j2_kahler_filter(models):
    res = run_identities(models["product_j2"], "kahler", K=2, seed=1, trials=3)
    assert {e.level for e in res.entries} == {"Riemannian", "Hermitian", "Kähler"}
    for e in res.entries:
        if e.level == "Kähler":
            assert not e.applicable and e.skip_reason == "model is not transversely Kähler"
        elif e.id in ("I11", "I15"):
            assert not e.applicable and "not integrable" in e.skip_reason
        else:
            assert e.applicable and e.passed, e


def test_select_identities():
    assert len(select_identities("all")) == len(IDENTITIES) == 23
    assert [i.id for i in select_identities("I3, I1")] == ["I1", "I3"]
    assert [i.id for i in select_identities(["I2"])] == ["I2"]
    assert {i.level for i in select_identities("riemannian")} == {"Riemannian"}
    assert {i.level for i in select_identities("taut")} == set(LEVELS)
    with pytest.raises(ValueError, match="I99"):
        select_identities("I99")
    with pytest.raises(ValueError):
        select_identities("symplectic")


def test_determinism_and_thread_count(models, monkeypatch):
    m = models["product_j1"]
    monkeypatch.setenv("FOLIAGE_THREADS", "1")
    serial = run_identities(m, "hermitian", K=2, seed=7, trials=3).to_dict()
    monkeypatch.setenv("FOLIAGE_THREADS", "4")
    threaded = run_identities(m, "hermitian", K=2, seed=7, trials=3).to_dict()
    assert serial == threaded


def test_seed_changes_residuals_but_not_verdicts(models):
    m = models["carriere"]
    a = run_identities(m, "I1,I3,I8", K=2, seed=1, trials=3)
    b = run_identities(m, "I1,I3,I8", K=2, seed=2, trials=3)
    assert [e.passed for e in a.entries] == [e.passed for e in b.entries] == [True] * 3
    assert not np.allclose([e.residual for e in a.entries], [e.residual for e in b.entries], rtol=0, atol=0)


def test_threshold_controls_pass(models):
    res = run_identities(models["carriere"], "I1", K=2, seed=0, trials=2, threshold=0.0)
    e = res.entry("I1")
    assert e.applicable and (e.passed == (e.residual == 0.0))
