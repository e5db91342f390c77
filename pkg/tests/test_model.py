"""Model core: algebra tables, axiom validation, free-model builder."""

from fractions import Fraction

import pytest

from cartanext.errors import (
    CapExceeded,
    InconsistentDifferential,
    ModelMismatch,
    StructuralError,
)
from cartanext.library import (
    BUILDERS,
    build_cech_overlap,
    build_point,
    build_s1_exact_xi,
    build_s1_trivial,
    build_s3,
    build_s3_smooth,
    build_t3_bundle,
)
from cartanext.model import (
    CdgaModel,
    LieActionData,
    TwistData,
    enumerate_free_cdga,
    extended_lie_matrix,
    restrict_to_invariants,
    validate_model,
)

F = Fraction


@pytest.fixture(scope="module")
def s1():
    return build_s1_trivial()


@pytest.fixture(scope="module")
def s3():
    return build_s3(cap=4)


@pytest.fixture(scope="module")
def t3():
    return build_t3_bundle(1)


def test_s1_model_validates(s1):
    report = validate_model(s1)
    assert report.valid, report.failed()


def test_odd_square_violation_detected():
    # declaring e1^e1 = unit is already degree-inconsistent and rejected
    # structurally; the graded-commutativity axiom catches the degree-legal
    # variant e1^e1 = e2 != 0.
    lie = LieActionData(generators=[], iota={})
    with pytest.raises(StructuralError):
        CdgaModel(
            "bad",
            [("one", 0), ("e1", 1)],
            "one",
            {("e1", "e1"): {"one": F(1)}},
            {},
            lie,
            TwistData(),
        )
    model = CdgaModel(
        "bad2",
        [("one", 0), ("e1", 1), ("e2", 2)],
        "one",
        {("e1", "e1"): {"e2": F(1)}},
        {},
        lie,
        TwistData(),
    )
    report = validate_model(model)
    failed = {c.name for c in report.failed()}
    assert "graded_commutativity" in failed


def test_s3_dh_zero(s3):
    report = validate_model(s3)
    assert report.valid, report.failed()
    assert s3.H.d().is_zero()


def test_all_bundled_models_validate():
    for name, builder in BUILDERS.items():
        report = validate_model(builder())
        assert report.valid, (name, [(c.name, c.witness) for c in report.failed()])


def test_wedge_odd_square(s1):
    dt = s1.basis_form("dtheta")
    assert dt.wedge(dt).is_zero()


def test_wedge_unit_identity(s3):
    rho = s3.form({"c_beta": F(2), "gamma": F(-1, 3)})
    assert s3.one().wedge(rho) == rho
    assert rho.wedge(s3.one()) == rho


def test_wedge_bilinear_sign(s3):
    c_beta = s3.form({"c_beta": F(3)})
    alpha = s3.basis_form("alpha")
    out = c_beta.wedge(alpha)
    # (c beta) ^ alpha = -c (alpha beta)
    assert out == s3.form({"c_alpha_beta": F(-3)})


def test_wedge_model_mismatch(s1, s3):
    with pytest.raises(ModelMismatch):
        s1.one().wedge(s3.one())


def test_cap_exceeded_on_absent_product():
    model = enumerate_free_cdga(
        [("c", 0), ("gamma", 1)],
        {"c": [(F(1), (("gamma", 1),))]},
        degree_cap=1,
        poly_cap=2,
        name="capped",
    )
    c2 = model.basis_form("c2")
    with pytest.raises(CapExceeded):
        c2.wedge(model.basis_form("c"))


def test_differential_examples(s1, s3):
    assert s1.one().d().is_zero()
    assert s1.basis_form("dtheta").d().is_zero()
    assert s3.basis_form("c").d() == s3.basis_form("gamma")
    # purity consequence: d(c.beta) = gamma^beta
    assert s3.basis_form("c_beta").d() == s3.basis_form("gamma_beta")


def test_lie_derivative_examples(s3):
    assert s3.one().lie("T1").is_zero()
    assert s3.basis_form("alpha").lie("T1").is_zero()
    assert s3.basis_form("c_beta").lie("T1").is_zero()


def test_iota_is_odd_derivation_everywhere(s3):
    rep = validate_model(s3)
    by_name = {c.name: c for c in rep.checks}
    assert by_name["iota_derivation"].passed
    assert by_name["iota_derivation"].skipped == 0  # nilpotent model is total


def test_enumerate_single_odd_generator():
    model = enumerate_free_cdga([("th1", 1)], {}, degree_cap=1, poly_cap=1)
    assert model.dim == 2
    assert {b.name for b in model.basis} == {"one", "th1"}


def test_enumerate_s3_monomials():
    model = build_s3(cap=3)
    # c^k (k <= 3) times squarefree monomials in gamma, alpha, beta, minus
    # the four top-power gamma monomials in the truncation ideal
    assert model.dim == 8 * 4 - 4
    assert model.basis_form("c2").wedge(model.basis_form("c")).coeffs == {"c3": F(1)}
    # nilpotent truncation: c^3 * c = 0 and c^3 gamma is killed
    assert model.basis_form("c3").wedge(model.basis_form("c")).is_zero()
    assert "c3_gamma" not in {b.name for b in model.basis}


def test_enumerate_t3_exterior():
    model = build_t3_bundle(1)
    assert model.dim == 8


def test_enumerate_inconsistent_differential():
    with pytest.raises(InconsistentDifferential):
        enumerate_free_cdga(
            [("x", 0), ("y", 1), ("z", 0)],
            {"x": [(F(1), (("y", 1),))], "y": [(F(1), (("z", 1),))]},
            degree_cap=2,
            poly_cap=2,
        )


def test_structural_error_unknown_name():
    lie = LieActionData(generators=[], iota={})
    with pytest.raises(StructuralError):
        CdgaModel(
            "bad",
            [("one", 0)],
            "one",
            {},
            {"one": {"mystery": F(1)}},
            lie,
            TwistData(),
        )


def test_invariants_s1_whole_space(s1):
    inv = restrict_to_invariants(s1)
    assert inv.dim == 2


def test_invariants_point():
    inv = restrict_to_invariants(build_point())
    assert inv.dim == 1


def test_invariants_s3_whole_space(s3):
    assert restrict_to_invariants(s3).dim == s3.dim


def test_invariants_t3_bundle(t3):
    # kernel of wedging with th1^th2: monomials containing th1 or th2
    inv = restrict_to_invariants(t3)
    assert inv.dim == 6
    even = restrict_to_invariants(t3, parity=0)
    odd = restrict_to_invariants(t3, parity=1)
    assert even.dim == 3 and odd.dim == 3


def test_extended_lie_matrix_t3(t3):
    # L^T = (d xi - iota H) wedge = (-th1^th2) wedge for the bundle model
    m = extended_lie_matrix(t3, 0)
    one_col = m.column(t3.index_of("one"))
    assert one_col == {t3.index_of("th1_th2"): F(-1)}


def test_overlap_model_delta_squared():
    m = build_cech_overlap()
    d = m.basis_form("delta")
    assert d.wedge(d) == m.one()
    assert validate_model(m).valid


def test_s1_exact_xi_de_rham_ranks():
    # the collar model has the circle de Rham ranks (1, 1) at every cap
    from cartanext.linalg import SparseMatrix, kernel_basis

    m = build_s1_exact_xi(cap=4)
    report = validate_model(m)
    assert report.valid, report.failed()
    d = m.operator_matrix(lambda x: x.d())
    evens = [i for i, b in enumerate(m.basis) if b.degree % 2 == 0]
    odds = [i for i, b in enumerate(m.basis) if b.degree % 2 == 1]
    ev_pos = {b: k for k, b in enumerate(evens)}
    od_pos = {b: k for k, b in enumerate(odds)}
    d_eo = SparseMatrix(
        len(odds),
        len(evens),
        {
            (od_pos[i], ev_pos[j]): x
            for (i, j), x in d.entries.items()
            if j in ev_pos and i in od_pos
        },
    )
    d_oe = SparseMatrix(
        len(evens),
        len(odds),
        {
            (ev_pos[i], od_pos[j]): x
            for (i, j), x in d.entries.items()
            if j in od_pos and i in ev_pos
        },
    )
    from cartanext.linalg import rank

    h_even = kernel_basis(d_eo).dim - rank(d_oe)
    h_odd = kernel_basis(d_oe).dim - rank(d_eo)
    assert (h_even, h_odd) == (1, 1)


def test_smooth_sphere_purity_data():
    m = build_s3_smooth(cap=4)
    assert validate_model(m).valid
    # d(xi) - iota(H) = 0
    xi = m.xi("T1")
    lhs = xi.d() - m.H.iota("T1")
    assert lhs.is_zero()


def test_form_degree_and_parity(s3):
    rho = s3.form({"gamma": F(1), "alpha": F(2)})
    assert rho.degree() == 1
    assert rho.parity() == 1
    with pytest.raises(ValueError):
        s3.form({"one": F(1), "gamma": F(1)}).degree()
    assert s3.zero().degree() is None
