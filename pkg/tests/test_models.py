import json
import math

import pytest

from foliage.fourier import FourierScalar
from foliage.harness import random_deformation
from foliage.models import (
    BUILTIN_MODELS,
    ModelError,
    build_model,
    deform_leafwise,
    hyperbolic_eigenvalue,
    load_model_config,
    parse_deformation,
    resolve_model,
)
from foliage.operators import d_basic

LAM = (3 + math.sqrt(5)) / 2


def test_hyperbolic_eigenvalue_default():
    assert math.isclose(hyperbolic_eigenvalue((2, 1, 1, 1)), LAM, rel_tol=1e-15)


@pytest.mark.parametrize("A, msg", [
    ((1, 1, 0, 1), "trace"),
    ((2, 1, 1, 2), "determinant"),
    ((2, 1, 1), "four entries"),
    ((2.5, 1, 1, 1), "integers"),
])
def test_hyperbolic_eigenvalue_rejects(A, msg):
    with pytest.raises(ModelError, match=msg):
        hyperbolic_eigenvalue(A)


@pytest.mark.parametrize("name, flags", [
    ("carriere", dict(hermitian=True, integrable=True, kahler=True, taut_candidate=False)),
    ("product_j1", dict(hermitian=True, integrable=True, kahler=True, taut_candidate=False)),
    ("product_j2", dict(hermitian=True, integrable=False, kahler=False, taut_candidate=False)),
    ("taut_torus", dict(hermitian=True, integrable=True, kahler=True, taut_candidate=True)),
])
def test_builtin_flags(models, name, flags):
    assert dict(models[name].flags) == flags


def test_carriere_structure(models):
    m = models["carriere"]
    ll = math.log(LAM)
    assert m.n == 1 and m.coords == ("t",)
    dS = d_basic(m, m.real_generator("S*"))
    assert m.to_real(dS, 1e-15).keys() == {("S*", "T*")}
    # d S* = logλ T* ^ S* = -logλ S* ^ T*
    assert m.to_real(dS)[("S*", "T*")].allclose(FourierScalar.constant(1, -ll), 1e-14)
    assert d_basic(m, m.real_generator("T*")).is_zero(1e-15)
    assert (m.kappa - m.real_form({"T*": ll})).is_zero(1e-15)


def test_product_j2_pairs_stable_and_unstable(models):
    m = models["product_j2"]
    assert m.pairs == (("S1*", "S2*"), ("T1*", "T2*"))
    assert m.j_action()["S1*"] == (1, "S2*")
    assert m.j_action()["S2*"] == (-1, "S1*")


@pytest.mark.parametrize("name", BUILTIN_MODELS)
def test_real_generators_round_trip(models, name):
    m = models[name]
    for lab in m.real_labels:
        back = m.to_real(m.real_generator(lab), 1e-15)
        assert list(back) == [(lab,)]
        assert back[(lab,)].allclose(FourierScalar.constant(m.dims, 1.0), 1e-15)


@pytest.mark.parametrize("name", BUILTIN_MODELS)
def test_kahler_form_is_sum_of_pairs(models, name):
    m = models[name]
    expected = m.zero()
    for th, jth in m.pairs:
        expected = expected + m.real_form({(jth, th): 1.0})
    assert (m.kahler_form() - expected).is_zero(1e-15)


def test_unknown_model_and_parameters():
    with pytest.raises(ModelError, match="carriere"):
        build_model("klein")
    with pytest.raises(ModelError, match="unknown model parameters"):
        build_model("carriere", {"B": 1})
    with pytest.raises(ModelError):
        resolve_model("nope")


def test_custom_matrix_changes_lambda():
    m = build_model("carriere", {"A": (3, 2, 1, 1)})
    lam = hyperbolic_eigenvalue((3, 2, 1, 1))
    assert math.isclose(m.params["lambda"], lam)
    assert (m.kappa - m.real_form({"T*": math.log(lam)})).is_zero(1e-15)


@pytest.mark.parametrize("name", BUILTIN_MODELS)
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_deformation_shifts_kappa_by_df(models, name, seed):
    m = models[name]
    f = random_deformation(m.dims, seed)
    dm = deform_leafwise(m, f)
    df = m.zero()
    for j, du in enumerate(m.coord_forms):
        df = df + du * f.differentiate(j)
    assert (dm.kappa - m.kappa - df).is_zero(1e-15)
    assert dm.log_density.allclose(f, 1e-15)
    assert dm.weighted and dm.name.endswith("+deformed")
    # the structure flags are untouched; taut_candidate only sees kappa itself
    for key in ("hermitian", "integrable", "kahler"):
        assert dm.flags[key] == m.flags[key]


def test_deformation_drops_constant_and_rejects_complex(models):
    m = models["carriere"]
    f = FourierScalar.constant(1, 3.0) + FourierScalar.cosine(1, (1,), 0.1)
    assert not deform_leafwise(m, f).log_density.coefficient((0,))
    with pytest.raises(ModelError, match="real"):
        deform_leafwise(m, FourierScalar.mode(1, (1,)))
    with pytest.raises(ModelError, match="coordinates"):
        deform_leafwise(m, FourierScalar.cosine(2, (1, 0)))


def test_parse_deformation_adds_mirror():
    f = parse_deformation("1:0.5", 1)
    assert f.allclose(FourierScalar.cosine(1, (1,), 1.0), 1e-15)
    g = parse_deformation("1,0:0.3:0.1; 0,2:0.2", 2)
    assert g.is_real(1e-15)
    assert g.coefficient((-1, 0)) == complex(0.3, -0.1)
    # an explicitly listed mirror is left alone
    h = parse_deformation("1:0.5;-1:0.25", 1)
    assert h.coefficient((-1,)) == 0.25


@pytest.mark.parametrize("spec", ["1", "x:1", "1:a", "1:2:3:4"])
def test_parse_deformation_errors(spec):
    with pytest.raises(ModelError):
        parse_deformation(spec, 1)


def test_parse_deformation_wrong_arity():
    with pytest.raises(ModelError, match="2 entries"):
        parse_deformation("1:0.5", 2)


def test_json_config(tmp_path):
    cfg = tmp_path / "m.json"
    cfg.write_text(json.dumps({"name": "carriere", "A": [3, 2, 1, 1], "f": [[[1], 0.1, 0.0], [[-1], 0.1, 0.0]]}))
    m = load_model_config(cfg)
    assert m.weighted and m.params["A"] == [3, 2, 1, 1]
    assert resolve_model(str(cfg)).weighted
    ffile = tmp_path / "f.json"
    ffile.write_text(json.dumps([[[1], 0.1, 0.0], [[-1], 0.1, 0.0]]))
    assert parse_deformation(str(ffile), 1).allclose(FourierScalar.cosine(1, (1,), 0.2), 1e-15)


@pytest.mark.parametrize("content, msg", [
    ("[1, 2]", "object"),
    ('{"name": "carriere", "B": 1}', "unknown config keys"),
    ("{", "cannot read"),
])
def test_bad_config(tmp_path, content, msg):
    cfg = tmp_path / "bad.json"
    cfg.write_text(content)
    with pytest.raises(ModelError, match=msg):
        load_model_config(cfg)


def test_describe_is_plain(models):
    d = models["carriere"].describe()
    assert d["name"] == "carriere" and d["n"] == 1 and d["deformed"] is False
    json.dumps(d)
