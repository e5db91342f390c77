"""Twisted differential, B-transforms, extended Cartan operators.

Sections of the extended bundle are pairs (constant vector part, 1-form
part) in a chosen splitting; all operator identities are verified as exact
computations on probe elements.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .errors import (
    CapExceeded,
    NonConstantCoefficient,
    NonInvariantFunction,
    NotIsotropic,
    NotPure,
    UnknownGenerator,
)
from .model import CdgaModel, FormElement, LieActionData, TwistData

F = Fraction


class ExtendedSection:
    """Section (vector part, form part): constant generator coefficients
    plus a homogeneous 1-form."""

    def __init__(self, model: CdgaModel, vector_part: dict, form_part: FormElement):
        for g, c in vector_part.items():
            if g not in model.lie.generators:
                raise UnknownGenerator(f"section vector part uses {g!r}")
            if not isinstance(c, Rational):
                raise NonConstantCoefficient(
                    f"vector coefficient of {g} is not a rational constant"
                )
        if form_part.model is not model:
            raise NonConstantCoefficient("form part over a different model")
        if not form_part.is_zero() and form_part.degree() != 1:
            raise NonConstantCoefficient("form part must be homogeneous of degree 1")
        self.model = model
        self.vector = {g: F(c) for g, c in vector_part.items() if c}
        self.form = form_part

    def iota_vector(self, a: FormElement) -> FormElement:
        out = self.model.zero()
        for g, c in self.vector.items():
            out = out + c * a.iota(g)
        return out

    def lie_vector(self, a: FormElement) -> FormElement:
        out = self.model.zero()
        for g, c in self.vector.items():
            out = out + c * a.lie(g)
        return out

    def __repr__(self):
        return f"ExtendedSection({dict(self.vector)}, {self.form!r})"


def generator_section(model: CdgaModel, j) -> ExtendedSection:
    """The section delta_j = (X_j, xi_j) attached to a symmetry generator."""
    g = model.generator_name(j)
    return ExtendedSection(model, {g: F(1)}, model.xi(g))


def twisted_differential(a: FormElement, H: FormElement = None) -> FormElement:
    """d(a) - H ^ a; the model's own twist is used when H is omitted."""
    if H is None:
        H = a.model.H
    return a.d() - H.wedge(a)


def b_transform(a: FormElement, B: FormElement) -> FormElement:
    """Splitting-change action sum_k (-B)^k / k! ^ a.

    B must be nilpotent inside the model; a power that leaves the basis span
    before vanishing raises CapExceeded.
    """
    if not B.is_zero() and B.degree() != 2:
        raise ValueError("b_transform needs a homogeneous 2-form")
    out = a.model.zero()
    term = a
    k = 0
    while not term.is_zero():
        out = out + F(1) * term
        k += 1
        term = F(-1, k) * B.wedge(term)
    return out


def exp_wedge(B: FormElement) -> FormElement:
    """e^B as an element: sum_k B^k / k! (finite by nilpotency)."""
    return b_transform(B.model.one(), -1 * B)


def iota_extended(x: ExtendedSection, a: FormElement) -> FormElement:
    """Clifford action iota_X a + xi ^ a."""
    return x.iota_vector(a) + x.form.wedge(a)


def lie_extended(x: ExtendedSection, a: FormElement) -> FormElement:
    """L_X a + (d xi - iota_X H) ^ a."""
    w = x.form.d() - x.iota_vector(a.model.H)
    return x.lie_vector(a) + w.wedge(a)


def pairing(x: ExtendedSection, y: ExtendedSection) -> FormElement:
    """Symmetric pairing (iota_X eta + iota_Y xi) / 2 as a degree-0 element.

    The 1/2 normalisation is pinned by the contraction anticommutator
    identity, which then holds with the literal factor 2.
    """
    return F(1, 2) * (x.iota_vector(y.form) + y.iota_vector(x.form))


def loday_bracket(x: ExtendedSection, y: ExtendedSection) -> ExtendedSection:
    """Non-skew bracket in split form:
    ([X, Y], L_X eta - iota_Y d xi + iota_Y iota_X H)."""
    model = x.model
    vec = {}
    sc = model.lie.structure_constants
    for gi, ci in x.vector.items():
        for gj, cj in y.vector.items():
            for gk, c in sc.get((gi, gj), {}).items():
                vec[gk] = vec.get(gk, F(0)) + ci * cj * c
    form = (
        x.lie_vector(y.form)
        - y.iota_vector(x.form.d())
        + y.iota_vector(x.iota_vector(model.H))
    )
    return ExtendedSection(model, vec, form)


@dataclass
class EquationStatus:
    equation: str
    status: str  # "pass" | "fail" | "inconclusive"
    witness: str = ""
    checked: int = 0

    @property
    def passed(self) -> bool:
        return self.status == "pass"


@dataclass
class RelationsReport:
    model: str
    equations: list

    @property
    def all_pass(self) -> bool:
        return all(e.passed for e in self.equations)

    def by_name(self) -> dict:
        return {e.equation: e for e in self.equations}

    def lines(self) -> list:
        out = []
        for e in self.equations:
            tag = {"pass": "pass", "fail": "FAIL", "inconclusive": "????"}[e.status]
            line = f"{tag:4}  {e.equation} [{e.checked} checked]"
            if e.status != "pass":
                line += f" witness: {e.witness}"
            out.append(line)
        return out


def verify_cartan_relations(
    model: CdgaModel, sections: list, probes: list = None
) -> RelationsReport:
    """Check the six Cartan operator identities exactly on every probe.

    A CapExceeded during a check marks the equation inconclusive rather than
    failed: a cap artifact is not a mathematical counterexample.
    """
    if probes is None:
        probes = [model.basis_form(b.name) for b in model.basis]
    H = model.H
    dT = lambda a: a.d() - H.wedge(a)

    def lie_t(x, a):
        w = x.form.d() - x.iota_vector(H)
        return x.lie_vector(a) + w.wedge(a)

    results = []

    def run(name, gen):
        checked = 0
        for witness, lhs, rhs in gen():
            try:
                ok = lhs() == rhs()
            except CapExceeded as exc:
                results.append(
                    EquationStatus(name, "inconclusive", f"{witness}: {exc}", checked)
                )
                return
            checked += 1
            if not ok:
                results.append(EquationStatus(name, "fail", str(witness), checked))
                return
        results.append(EquationStatus(name, "pass", "", checked))

    def eq1():
        for i, x in enumerate(sections):
            for rho in probes:
                yield (
                    ("section", i, repr(rho)),
                    lambda x=x, rho=rho: lie_t(x, rho),
                    lambda x=x, rho=rho: dT(iota_extended(x, rho))
                    + iota_extended(x, dT(rho)),
                )

    def eq2():
        for i, x in enumerate(sections):
            for j, y in enumerate(sections):
                xy = loday_bracket(x, y)
                for rho in probes:
                    yield (
                        ("sections", i, j, repr(rho)),
                        lambda x=x, y=y, rho=rho: lie_t(x, lie_t(y, rho))
                        - lie_t(y, lie_t(x, rho)),
                        lambda xy=xy, rho=rho: lie_t(xy, rho),
                    )

    def eq3():
        for i, x in enumerate(sections):
            for j, y in enumerate(sections):
                p = pairing(x, y)
                for rho in probes:
                    yield (
                        ("sections", i, j, repr(rho)),
                        lambda x=x, y=y, rho=rho: iota_extended(x, iota_extended(y, rho))
                        + iota_extended(y, iota_extended(x, rho)),
                        lambda p=p, rho=rho: F(2) * p.wedge(rho),
                    )

    def eq4():
        for i, x in enumerate(sections):
            for j, y in enumerate(sections):
                xy = loday_bracket(x, y)
                for rho in probes:
                    yield (
                        ("sections", i, j, repr(rho)),
                        lambda x=x, y=y, rho=rho: lie_t(x, iota_extended(y, rho))
                        - iota_extended(y, lie_t(x, rho)),
                        lambda xy=xy, rho=rho: iota_extended(xy, rho),
                    )

    def eq5():
        for i, x in enumerate(sections):
            for rho in probes:
                yield (
                    ("section", i, repr(rho)),
                    lambda x=x, rho=rho: dT(lie_t(x, rho)) - lie_t(x, dT(rho)),
                    lambda rho=rho: rho.model.zero(),
                )

    def eq6():
        for rho in probes:
            yield (
                repr(rho),
                lambda rho=rho: dT(dT(rho)),
                lambda rho=rho: rho.model.zero(),
            )

    run("lie_is_anticommutator", eq1)
    run("lie_bracket_compat", eq2)
    run("contraction_pairing", eq3)
    run("lie_contraction_bracket", eq4)
    run("lie_chain_commute", eq5)
    run("twisted_d_squared", eq6)
    return RelationsReport(model.name, results)


def purity_check(model: CdgaModel) -> dict:
    """True per generator iff d(xi_j) - iota_j(H) = 0 exactly."""
    out = {}
    for g in model.generators:
        out[g] = (model.xi(g).d() - model.H.iota(g)).is_zero()
    return out


def isotropy_check(model: CdgaModel):
    """(all pairings vanish, witness pair or None)."""
    secs = [generator_section(model, j) for j in range(len(model.generators))]
    for i, x in enumerate(secs):
        for j, y in enumerate(secs):
            if not pairing(x, y).is_zero():
                return False, (model.generators[i], model.generators[j])
    return True, None


def build_HG(model: CdgaModel):
    """The equivariant twisting element H + sum_j u_j xi_j.

    Requires a pure isotropic action; the result is closed for the
    equivariant differential d - sum_j u_j iota_j (checked by the caller's
    tests via the equivariant module).
    """
    purity = purity_check(model)
    if not all(purity.values()):
        bad = [g for g, ok in purity.items() if not ok]
        raise NotPure(f"generators {bad} are not pure")
    ok, witness = isotropy_check(model)
    if not ok:
        raise NotIsotropic(f"pairing nonzero at {witness}")
    from .equivariant import EquivariantElement

    n = len(model.generators)
    terms = {}
    zero_exp = (0,) * n
    if not model.H.is_zero():
        terms[zero_exp] = model.H
    for j, g in enumerate(model.generators):
        xi = model.xi(g)
        if not xi.is_zero():
            exp = tuple(1 if k == j else 0 for k in range(n))
            terms[exp] = xi
    return EquivariantElement(model, terms)


def perturb_delta(model: CdgaModel, f: dict) -> CdgaModel:
    """Replace xi_j by xi_j + d(f_j) for invariant degree-0 functions f_j."""
    new_xi = {}
    for g in model.generators:
        fg = f.get(g)
        if fg is None:
            new_xi[g] = dict(model.twist.xi.get(g, {}))
            continue
        if not fg.is_zero() and fg.degree() != 0:
            raise NonInvariantFunction(f"f[{g}] is not a degree-0 element")
        for gi in model.generators:
            if not fg.lie(gi).is_zero():
                raise NonInvariantFunction(f"f[{g}] is not invariant under {gi}")
        new_xi[g] = (model.xi(g) + fg.d()).coeffs
    lie = LieActionData(
        generators=list(model.lie.generators),
        iota={g: {a: dict(c) for a, c in t.items()} for g, t in model.lie.iota.items()},
        structure_constants=dict(model.lie.structure_constants),
    )
    twist = TwistData(H=dict(model.twist.H), xi=new_xi)
    return CdgaModel(
        model.name,
        [(b.name, b.degree) for b in model.basis],
        model.unit,
        dict(model.wedge_table),
        dict(model.d_table),
        lie,
        twist,
    )


def transform_model(model: CdgaModel, B: FormElement, f: dict = None) -> CdgaModel:
    """Change of splitting by an invariant 2-form B and invariant functions f:
    H -> H - dB, xi_j -> xi_j + d f_j + iota_j B.

    Spinor coordinates convert by e^B (wedging with e^{-B}), under which the
    twisted differentials intertwine exactly.
    """
    from .errors import NonInvariantData

    if not B.is_zero():
        if B.degree() != 2:
            raise NonInvariantData("B must be a 2-form")
        for g in model.generators:
            if not B.lie(g).is_zero():
                raise NonInvariantData(f"B is not invariant under {g}")
    f = f or {}
    for g, fg in f.items():
        if not fg.is_zero() and fg.degree() != 0:
            raise NonInvariantData(f"f[{g}] is not degree 0")
        for gi in model.generators:
            if not fg.lie(gi).is_zero():
                raise NonInvariantData(f"f[{g}] is not invariant under {gi}")
    new_H = (model.H - B.d()).coeffs
    new_xi = {}
    for g in model.generators:
        xi = model.xi(g) + B.iota(g)
        if g in f:
            xi = xi + f[g].d()
        new_xi[g] = xi.coeffs
    lie = LieActionData(
        generators=list(model.lie.generators),
        iota={g: {a: dict(c) for a, c in t.items()} for g, t in model.lie.iota.items()},
        structure_constants=dict(model.lie.structure_constants),
    )
    twist = TwistData(H=new_H, xi=new_xi)
    return CdgaModel(
        model.name,
        [(b.name, b.degree) for b in model.basis],
        model.unit,
        dict(model.wedge_table),
        dict(model.d_table),
        lie,
        twist,
    )
