"""Finite invariant-form models: graded algebra data and its validators.

A model is a finite-dimensional graded-commutative differential algebra with
explicit structure-constant tables, plus symmetry data (contraction operators
and Lie structure constants) and twist data (a closed 3-form H and a 1-form
xi per generator).  Every operation is exact rational linear algebra over the
model basis.  Products that leave the basis span are a hard CapExceeded
error, never a silent truncation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    AxiomViolation,
    CapExceeded,
    InconsistentDifferential,
    ModelMismatch,
    StructuralError,
    UnknownGenerator,
)
from .linalg import SparseMatrix, SubspaceBasis, kernel_basis

Combo = dict  # {basis_name: Fraction}, no zero coefficients


def _clean(combo) -> Combo:
    return {k: Fraction(v) for k, v in combo.items() if v}


def _combo_add(a: Combo, b: Combo, scale=1) -> Combo:
    out = dict(a)
    for k, x in b.items():
        s = out.get(k, 0) + scale * x
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


@dataclass(frozen=True)
class BasisElement:
    name: str
    degree: int


class FormElement:
    """Sparse exact-rational vector over a model basis."""

    __slots__ = ("model", "coeffs")

    def __init__(self, model: "CdgaModel", coeffs: Combo):
        self.model = model
        self.coeffs = _clean(coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self):
        """Common degree of all terms, None for zero, error if mixed."""
        degs = {self.model.degree_of(n) for n in self.coeffs}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError(f"inhomogeneous element, degrees {sorted(degs)}")
        return degs.pop()

    def parity(self):
        """0 for even, 1 for odd, None for zero, error if mixed."""
        pars = {self.model.degree_of(n) % 2 for n in self.coeffs}
        if not pars:
            return None
        if len(pars) > 1:
            raise ValueError("mixed-parity element")
        return pars.pop()

    def wedge(self, other: "FormElement") -> "FormElement":
        if self.model is not other.model:
            raise ModelMismatch("wedge operands over different models")
        out: Combo = {}
        for a, ca in self.coeffs.items():
            for b, cb in other.coeffs.items():
                prod = self.model.wedge_basis(a, b)
                out = _combo_add(out, prod, ca * cb)
        return FormElement(self.model, out)

    def d(self) -> "FormElement":
        out: Combo = {}
        for a, ca in self.coeffs.items():
            out = _combo_add(out, self.model.d_table.get(a, {}), ca)
        return FormElement(self.model, out)

    def iota(self, j) -> "FormElement":
        gen = self.model.generator_name(j)
        table = self.model.lie.iota.get(gen, {})
        out: Combo = {}
        for a, ca in self.coeffs.items():
            out = _combo_add(out, table.get(a, {}), ca)
        return FormElement(self.model, out)

    def lie(self, j) -> "FormElement":
        return self.iota(j).d() + self.d().iota(j)

    def __add__(self, other):
        if self.model is not other.model:
            raise ModelMismatch("sum over different models")
        return FormElement(self.model, _combo_add(self.coeffs, other.coeffs))

    def __sub__(self, other):
        if self.model is not other.model:
            raise ModelMismatch("difference over different models")
        return FormElement(self.model, _combo_add(self.coeffs, other.coeffs, -1))

    def __neg__(self):
        return FormElement(self.model, {k: -x for k, x in self.coeffs.items()})

    def __rmul__(self, c):
        c = Fraction(c)
        return FormElement(self.model, {k: c * x for k, x in self.coeffs.items()})

    def __eq__(self, other):
        return (
            isinstance(other, FormElement)
            and self.model is other.model
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((id(self.model), tuple(sorted(self.coeffs.items()))))

    def to_vec(self) -> dict:
        return {self.model.index_of(n): c for n, c in self.coeffs.items()}

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for n in sorted(self.coeffs, key=self.model.index_of):
            parts.append(f"{self.coeffs[n]}*{n}")
        return " + ".join(parts)


@dataclass
class LieActionData:
    """Ordered symmetry generators with contraction operators and brackets."""

    generators: list
    iota: dict  # gen -> {basis_name -> Combo}
    structure_constants: dict = field(default_factory=dict)  # (g1,g2) -> {gen: Fraction}


@dataclass
class TwistData:
    H: Combo = field(default_factory=dict)
    xi: dict = field(default_factory=dict)  # gen -> Combo


class CdgaModel:
    """Finite-basis graded-commutative differential algebra with symmetry data.

    ``wedge_table`` holds *present* products keyed by ordered name pairs;
    a missing key means the product leaves the modelled span and any attempt
    to use it raises CapExceeded.  The constructor completes the table with
    unit products, odd squares, and graded-commutativity mirrors.
    """

    def __init__(
        self,
        name: str,
        basis: list,
        unit: str,
        wedge_table: dict,
        d_table: dict,
        lie: LieActionData,
        twist: TwistData,
    ):
        self.name = name
        self.basis = [BasisElement(b.name, b.degree) if isinstance(b, BasisElement) else BasisElement(*b) for b in basis]
        names = [b.name for b in self.basis]
        if len(set(names)) != len(names):
            raise StructuralError(f"duplicate basis names in model {name}")
        self._index = {b.name: i for i, b in enumerate(self.basis)}
        self._degree = {b.name: b.degree for b in self.basis}
        if unit not in self._index:
            raise StructuralError(f"unknown unit {unit!r}")
        if self._degree[unit] != 0:
            raise StructuralError(f"unit {unit!r} must have degree 0")
        self.unit = unit
        self.d_table = {a: _clean(c) for a, c in d_table.items() if _clean(c)}
        self.lie = lie
        self.twist = twist
        self._check_names(self.d_table.keys(), "d table")
        for c in self.d_table.values():
            self._check_names(c.keys(), "d table image")
        self.wedge_table = {}
        for (a, b), combo in wedge_table.items():
            self._check_names([a, b], "wedge table")
            combo = _clean(combo)
            self._check_names(combo.keys(), "wedge table image")
            da, db = self._degree[a], self._degree[b]
            for t in combo:
                if self._degree[t] != da + db:
                    raise StructuralError(
                        f"wedge({a},{b}) term {t} has degree {self._degree[t]}, expected {da + db}"
                    )
            self.wedge_table[(a, b)] = combo
        self._complete_wedge_table()
        # symmetry data
        if len(set(lie.generators)) != len(lie.generators):
            raise StructuralError("duplicate generator names")
        for g in lie.generators:
            lie.iota.setdefault(g, {})
            lie.iota[g] = {a: _clean(c) for a, c in lie.iota[g].items() if _clean(c)}
            self._check_names(lie.iota[g].keys(), f"iota[{g}]")
            for c in lie.iota[g].values():
                self._check_names(c.keys(), f"iota[{g}] image")
            twist.xi.setdefault(g, {})
            twist.xi[g] = _clean(twist.xi[g])
            self._check_names(twist.xi[g].keys(), f"xi[{g}]")
        twist.H = _clean(twist.H)
        self._check_names(twist.H.keys(), "H")
        for (g1, g2), c in list(lie.structure_constants.items()):
            if g1 not in lie.generators or g2 not in lie.generators:
                raise StructuralError(f"structure constant for unknown pair ({g1},{g2})")
            lie.structure_constants[(g1, g2)] = {
                g: Fraction(x) for g, x in c.items() if x
            }
            for g in lie.structure_constants[(g1, g2)]:
                if g not in lie.generators:
                    raise StructuralError(f"structure constant image {g} unknown")

    # -- bookkeeping -------------------------------------------------------

    def _check_names(self, names, where: str):
        for n in names:
            if n not in self._index:
                raise StructuralError(f"unknown basis name {n!r} in {where}")

    def _complete_wedge_table(self):
        for b in self.basis:
            self.wedge_table.setdefault((self.unit, b.name), {b.name: Fraction(1)})
            self.wedge_table.setdefault((b.name, self.unit), {b.name: Fraction(1)})
            if b.degree % 2 == 1:
                self.wedge_table.setdefault((b.name, b.name), {})
        for (a, b), combo in list(self.wedge_table.items()):
            if (b, a) not in self.wedge_table:
                sign = (-1) ** (self._degree[a] * self._degree[b])
                self.wedge_table[(b, a)] = (
                    combo if sign == 1 else {k: -x for k, x in combo.items()}
                )

    def index_of(self, name: str) -> int:
        return self._index[name]

    def degree_of(self, name: str) -> int:
        return self._degree[name]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def generator_name(self, j) -> str:
        if isinstance(j, int):
            try:
                return self.lie.generators[j]
            except IndexError:
                raise UnknownGenerator(f"generator index {j}") from None
        if j not in self.lie.generators:
            raise UnknownGenerator(f"generator {j!r}")
        return j

    @property
    def generators(self) -> list:
        return list(self.lie.generators)

    # -- element constructors ---------------------------------------------

    def zero(self) -> FormElement:
        return FormElement(self, {})

    def one(self) -> FormElement:
        return FormElement(self, {self.unit: Fraction(1)})

    def form(self, coeffs: Combo) -> FormElement:
        self._check_names(coeffs.keys(), "form literal")
        return FormElement(self, coeffs)

    def basis_form(self, name: str) -> FormElement:
        self._check_names([name], "basis_form")
        return FormElement(self, {name: Fraction(1)})

    def form_from_vec(self, vec: dict) -> FormElement:
        return FormElement(self, {self.basis[i].name: c for i, c in vec.items()})

    @property
    def H(self) -> FormElement:
        return FormElement(self, self.twist.H)

    def xi(self, j) -> FormElement:
        return FormElement(self, self.twist.xi[self.generator_name(j)])

    # -- core operations ----------------------------------------------------

    def wedge_basis(self, a: str, b: str) -> Combo:
        try:
            return self.wedge_table[(a, b)]
        except KeyError:
            raise CapExceeded(a, b) from None

    def operator_matrix(self, op) -> SparseMatrix:
        """Matrix of a linear FormElement -> FormElement map over the basis."""
        entries = {}
        for j, b in enumerate(self.basis):
            img = op(self.basis_form(b.name))
            for n, c in img.coeffs.items():
                entries[(self._index[n], j)] = c
        return SparseMatrix(self.dim, self.dim, entries)

    def wedge_matrix(self, w: FormElement) -> SparseMatrix:
        return self.operator_matrix(lambda x: w.wedge(x))


# -- module-level operation surface ---------------------------------------


def wedge(a: FormElement, b: FormElement) -> FormElement:
    return a.wedge(b)


def differential(a: FormElement) -> FormElement:
    return a.d()


def lie_derivative(j, a: FormElement) -> FormElement:
    return a.lie(j)


# -- validation -------------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    passed: bool
    witness: str = ""
    checked: int = 0
    skipped: int = 0


@dataclass
class ValidationReport:
    model: str
    checks: list

    @property
    def valid(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> list:
        return [c for c in self.checks if not c.passed]

    def lines(self) -> list:
        out = []
        for c in self.checks:
            status = "pass" if c.passed else "FAIL"
            extra = f" [{c.checked} checked, {c.skipped} skipped]"
            if not c.passed:
                extra += f" witness: {c.witness}"
            out.append(f"{status:4}  {c.name}{extra}")
        return out


def _sign(deg: int) -> int:
    return -1 if deg % 2 else 1


def validate_model(model: CdgaModel) -> ValidationReport:
    """Run every algebra axiom as an exhaustive basis-level check.

    Triples or pairs whose products are absent from the table are counted as
    skipped rather than failed: a cap is an artifact, not a counterexample.
    """
    checks = []
    names = [b.name for b in model.basis]

    def run(check_name, fn):
        checked = skipped = 0
        failure = None
        for witness, ok in fn():
            if ok is None:
                skipped += 1
                continue
            checked += 1
            if not ok and failure is None:
                failure = witness
        checks.append(
            CheckResult(check_name, failure is None, str(failure or ""), checked, skipped)
        )

    def graded_commutativity():
        for a in names:
            for b in names:
                ta = model.wedge_table.get((a, b))
                tb = model.wedge_table.get((b, a))
                if ta is None or tb is None:
                    yield (a, b), None
                    continue
                s = _sign(model.degree_of(a) * model.degree_of(b))
                expect = ta if s == 1 else {k: -x for k, x in ta.items()}
                yield (a, b), tb == expect

    def associativity():
        for a in names:
            fa = model.basis_form(a)
            for b in names:
                if (a, b) not in model.wedge_table:
                    for c in names:
                        yield (a, b, c), None
                    continue
                ab = fa.wedge(model.basis_form(b))
                for c in names:
                    if (b, c) not in model.wedge_table:
                        yield (a, b, c), None
                        continue
                    try:
                        lhs = ab.wedge(model.basis_form(c))
                        rhs = fa.wedge(
                            model.basis_form(b).wedge(model.basis_form(c))
                        )
                    except CapExceeded:
                        yield (a, b, c), None
                        continue
                    yield (a, b, c), lhs == rhs

    def unit_identity():
        one = model.one()
        for a in names:
            fa = model.basis_form(a)
            yield a, one.wedge(fa) == fa and fa.wedge(one) == fa

    def d_degree():
        for a in names:
            img = model.basis_form(a).d()
            if img.is_zero():
                yield a, True
            else:
                yield a, img.degree() == model.degree_of(a) + 1

    def d_squared():
        for a in names:
            yield a, model.basis_form(a).d().d().is_zero()

    def d_leibniz():
        for a in names:
            fa = model.basis_form(a)
            sa = _sign(model.degree_of(a))
            for b in names:
                if (a, b) not in model.wedge_table:
                    yield (a, b), None
                    continue
                fb = model.basis_form(b)
                try:
                    lhs = fa.wedge(fb).d()
                    rhs = fa.d().wedge(fb) + Fraction(sa) * fa.wedge(fb.d())
                except CapExceeded:
                    yield (a, b), None
                    continue
                yield (a, b), lhs == rhs

    def iota_degree():
        for g in model.generators:
            for a in names:
                img = model.basis_form(a).iota(g)
                if img.is_zero():
                    yield (g, a), True
                else:
                    yield (g, a), img.degree() == model.degree_of(a) - 1

    def iota_squared():
        for g in model.generators:
            for a in names:
                yield (g, a), model.basis_form(a).iota(g).iota(g).is_zero()

    def iota_derivation():
        for g in model.generators:
            for a in names:
                fa = model.basis_form(a)
                sa = _sign(model.degree_of(a))
                for b in names:
                    if (a, b) not in model.wedge_table:
                        yield (g, a, b), None
                        continue
                    fb = model.basis_form(b)
                    try:
                        lhs = fa.wedge(fb).iota(g)
                        rhs = fa.iota(g).wedge(fb) + Fraction(sa) * fa.wedge(fb.iota(g))
                    except CapExceeded:
                        yield (g, a, b), None
                        continue
                    yield (g, a, b), lhs == rhs

    def lie_d_commute():
        for g in model.generators:
            for a in names:
                fa = model.basis_form(a)
                yield (g, a), fa.d().lie(g) == fa.lie(g).d()

    def lie_iota_bracket():
        for gi in model.generators:
            for gj in model.generators:
                c = model.lie.structure_constants.get((gi, gj), {})
                for a in names:
                    fa = model.basis_form(a)
                    lhs = fa.iota(gj).lie(gi) - fa.lie(gi).iota(gj)
                    rhs = model.zero()
                    for gk, x in c.items():
                        rhs = rhs + Fraction(x) * fa.iota(gk)
                    yield (gi, gj, a), lhs == rhs

    def c_antisymmetry():
        sc = model.lie.structure_constants
        for gi in model.generators:
            for gj in model.generators:
                cij = sc.get((gi, gj), {})
                cji = sc.get((gj, gi), {})
                yield (gi, gj), cij == {g: -x for g, x in cji.items()}

    def c_jacobi():
        sc = model.lie.structure_constants
        gens = model.generators

        def bracket(a, b):
            return sc.get((a, b), {})

        for gi in gens:
            for gj in gens:
                for gk in gens:
                    total = {}
                    for gm, x in bracket(gi, gj).items():
                        for gl, y in bracket(gm, gk).items():
                            total[gl] = total.get(gl, 0) + x * y
                    for gm, x in bracket(gj, gk).items():
                        for gl, y in bracket(gm, gi).items():
                            total[gl] = total.get(gl, 0) + x * y
                    for gm, x in bracket(gk, gi).items():
                        for gl, y in bracket(gm, gj).items():
                            total[gl] = total.get(gl, 0) + x * y
                    yield (gi, gj, gk), not any(total.values())

    def dh_zero():
        yield "H", model.H.d().is_zero()

    def h_invariant():
        for g in model.generators:
            yield g, model.H.lie(g).is_zero()

    def twist_degrees():
        h = model.H
        yield "H", h.is_zero() or h.degree() == 3
        for g in model.generators:
            x = model.xi(g)
            yield ("xi", g), x.is_zero() or x.degree() == 1

    run("graded_commutativity", graded_commutativity)
    run("associativity", associativity)
    run("unit_identity", unit_identity)
    run("d_degree", d_degree)
    run("d_squared", d_squared)
    run("d_leibniz", d_leibniz)
    run("iota_degree", iota_degree)
    run("iota_squared", iota_squared)
    run("iota_derivation", iota_derivation)
    run("lie_d_commute", lie_d_commute)
    run("lie_iota_bracket", lie_iota_bracket)
    run("c_antisymmetry", c_antisymmetry)
    run("c_jacobi", c_jacobi)
    run("dH_zero", dh_zero)
    run("H_invariant", h_invariant)
    run("twist_degrees", twist_degrees)
    return ValidationReport(model.name, checks)


# -- free model builder ------------------------------------------------------


def _monomial_name(mono: tuple) -> str:
    if not mono:
        return "one"
    parts = []
    for g, k in mono:
        parts.append(g if k == 1 else f"{g}{k}")
    return "_".join(parts)


class _FreeBasis:
    """Monomial bookkeeping for free graded-commutative algebras.

    In nilpotent mode the algebra is the quotient by the differential ideal
    generated by the first power of each even generator past poly_cap, so
    products past the caps are exactly zero and the table is total; otherwise
    they are absent (CapExceeded on use).
    """

    def __init__(self, gens, degree_cap, poly_cap, nilpotent=False, kill_pairs=()):
        self.gens = list(gens)  # [(name, degree)]
        self.order = {g: i for i, (g, _) in enumerate(self.gens)}
        self.deg = dict(self.gens)
        self.degree_cap = degree_cap
        self.poly_cap = poly_cap
        self.nilpotent = nilpotent
        # (even gen, odd gen): even^poly_cap * odd is in the truncation ideal
        self.kill_pairs = set(kill_pairs)
        self.monomials = self._enumerate()
        self.names = {m: _monomial_name(m) for m in self.monomials}

    def _killed(self, mono) -> bool:
        exps = dict(mono)
        for even_g, odd_g in self.kill_pairs:
            if exps.get(even_g, 0) >= self.poly_cap and exps.get(odd_g, 0):
                return True
        return False

    def _enumerate(self):
        monos = [()]
        for g, d in self.gens:
            cap = 1 if d % 2 else self.poly_cap
            new = []
            for m in monos:
                for k in range(0, cap + 1):
                    mono = m + ((g, k),) if k else m
                    if self.mono_degree(mono) <= self.degree_cap:
                        new.append(mono)
            monos = new
        monos = [m for m in monos if not self._killed(m)]
        monos.sort(key=lambda m: (self.mono_degree(m), self.sort_key(m)))
        return monos

    def mono_degree(self, mono) -> int:
        return sum(self.deg[g] * k for g, k in mono)

    def sort_key(self, mono):
        exps = [0] * len(self.gens)
        for g, k in mono:
            exps[self.order[g]] = k
        return tuple(exps)

    def multiply(self, m1, m2):
        """Return (sign, monomial), (0, None) for zero, (None, None) when capped."""
        exps = {}
        for g, k in m1:
            exps[g] = exps.get(g, 0) + k
        for g, k in m2:
            exps[g] = exps.get(g, 0) + k
        odd1 = [self.order[g] for g, k in m1 if self.deg[g] % 2]
        odd2 = [self.order[g] for g, k in m2 if self.deg[g] % 2]
        if set(odd1) & set(odd2):
            return 0, None
        sign = 1
        for o2 in odd2:
            sign *= (-1) ** sum(1 for o1 in odd1 if o1 > o2)
        mono = tuple(
            (g, exps[g]) for g, _ in self.gens if exps.get(g)
        )
        overflow = self.mono_degree(mono) > self.degree_cap
        for g, k in mono:
            cap = 1 if self.deg[g] % 2 else self.poly_cap
            if k > cap:
                overflow = True
        if overflow or self._killed(mono):
            if self.nilpotent:
                return 0, None
            return None, None
        return sign, mono

    def as_combo(self, terms):
        """[(coeff, mono)] -> name combo, or None if any term is capped."""
        out = {}
        for c, m in terms:
            if m not in self.names:
                if self.nilpotent:
                    continue
                return None
            out[self.names[m]] = out.get(self.names[m], 0) + c
        return _clean(out)


def enumerate_free_cdga(
    gens: list,
    diffs: dict,
    degree_cap: int,
    poly_cap: int,
    *,
    name: str = "free",
    generators: list = (),
    iota_on_gens: dict = None,
    structure_constants: dict = None,
    H: list = None,
    xi: dict = None,
    nilpotent: bool = False,
) -> CdgaModel:
    """Build the monomial model of a free graded-commutative algebra.

    ``gens`` is [(name, degree)]; ``diffs`` maps a generator to a list of
    (coeff, monomial) terms where a monomial is a tuple of (gen, power).
    Even generators get powers up to poly_cap, odd generators are squarefree,
    everything capped at total degree degree_cap.  Products beyond the caps
    are left absent from the table (CapExceeded on use) unless ``nilpotent``
    is set, in which case the algebra is truncated by the differential ideal
    past the caps and the table is total.  Symmetry data may be supplied on
    generators; contractions extend as odd derivations.
    """
    diffs = {g: [(Fraction(c), tuple(m)) for c, m in terms] for g, terms in (diffs or {}).items()}
    kill_pairs = []
    if nilpotent:
        # d-compatibility of g^(P+1) = 0 forces g^P * dg = 0
        for g, d in gens:
            if d % 2 == 0 and g in diffs:
                for _, m in diffs[g]:
                    if len(m) != 1 or m[0][1] != 1:
                        raise StructuralError(
                            "nilpotent truncation needs single-generator differentials"
                        )
                    kill_pairs.append((g, m[0][0]))
    fb = _FreeBasis(gens, degree_cap, poly_cap, nilpotent, kill_pairs)
    iota_on_gens = iota_on_gens or {}

    def d_mono(mono):
        """Graded Leibniz expansion of d on a monomial; None when capped."""
        terms = []
        factors = []
        for g, k in mono:
            factors.extend([g] * k)
        for i, g in enumerate(factors):
            dg = diffs.get(g)
            if not dg:
                continue
            # moving d(g) to the front costs (-1)^(deg(prefix) * deg(g))
            sign = 1
            for h in factors[:i]:
                sign *= _sign(fb.deg[h] * fb.deg[g])
            rest = factors[:i] + factors[i + 1 :]
            rest_mono = []
            exps = {}
            for h in rest:
                exps[h] = exps.get(h, 0) + 1
            rest_mono = tuple((h, exps[h]) for h, _ in fb.gens if exps.get(h))
            for c, m in dg:
                s1, m1 = fb.multiply(m, rest_mono)
                if s1 is None:
                    return None
                if s1 == 0:
                    continue
                terms.append((Fraction(sign) * c * s1, m1))
        return terms

    # d^2 = 0 on generators
    for g, terms in diffs.items():
        sq = []
        for c, m in terms:
            expansion = d_mono(m)
            if expansion is None:
                raise InconsistentDifferential(
                    f"d(d({g})) leaves the capped basis"
                )
            sq.extend((c * c2, m2) for c2, m2 in expansion)
        acc = {}
        for c, m in sq:
            acc[m] = acc.get(m, 0) + c
        if any(acc.values()):
            raise InconsistentDifferential(f"d^2 != 0 on generator {g}")

    basis = [BasisElement(fb.names[m], fb.mono_degree(m)) for m in fb.monomials]
    wedge_table = {}
    for m1 in fb.monomials:
        for m2 in fb.monomials:
            s, m = fb.multiply(m1, m2)
            if s is None:
                continue  # capped: absent
            combo = {} if s == 0 else {fb.names[m]: Fraction(s)}
            wedge_table[(fb.names[m1], fb.names[m2])] = combo
    d_table = {}
    for m in fb.monomials:
        terms = d_mono(m)
        if terms is None:
            raise StructuralError(
                f"d({fb.names[m]}) leaves the capped basis; raise the caps"
            )
        combo = fb.as_combo(terms)
        if combo is None:
            raise StructuralError(
                f"d({fb.names[m]}) leaves the capped basis; raise the caps"
            )
        if combo:
            d_table[fb.names[m]] = combo

    def iota_mono(gen, mono):
        """Odd-derivation expansion of a contraction on a monomial."""
        table = iota_on_gens.get(gen, {})
        terms = []
        factors = []
        for g, k in mono:
            factors.extend([g] * k)
        for i, g in enumerate(factors):
            ig = table.get(g)
            if not ig:
                continue
            # moving iota(g) to the front costs (-1)^(deg(prefix) * deg(g))
            sign = 1
            for h in factors[:i]:
                sign *= _sign(fb.deg[h] * fb.deg[g])
            exps = {}
            for h in factors[:i] + factors[i + 1 :]:
                exps[h] = exps.get(h, 0) + 1
            rest_mono = tuple((h, exps[h]) for h, _ in fb.gens if exps.get(h))
            for c, m in ig:
                s1, m1 = fb.multiply(m, rest_mono)
                if s1 is None:
                    return None
                if s1 == 0:
                    continue
                terms.append((Fraction(sign) * Fraction(c) * s1, m1))
        return terms

    iota_table = {}
    for sym in generators:
        table = {}
        for m in fb.monomials:
            terms = iota_mono(sym, m)
            if terms is None:
                raise StructuralError(f"iota[{sym}] leaves the capped basis")
            combo = fb.as_combo(terms)
            if combo is None:
                raise StructuralError(f"iota[{sym}] leaves the capped basis")
            if combo:
                table[fb.names[m]] = combo
        iota_table[sym] = table

    lie = LieActionData(
        generators=list(generators),
        iota=iota_table,
        structure_constants=dict(structure_constants or {}),
    )
    h_combo = fb.as_combo([(Fraction(c), tuple(m)) for c, m in (H or [])])
    if h_combo is None:
        raise StructuralError("twist form H leaves the capped basis")
    xi_combos = {}
    for sym in generators:
        combo = fb.as_combo(
            [(Fraction(c), tuple(m)) for c, m in (xi or {}).get(sym, [])]
        )
        if combo is None:
            raise StructuralError(f"xi[{sym}] leaves the capped basis")
        xi_combos[sym] = combo
    twist = TwistData(H=h_combo, xi=xi_combos)
    return CdgaModel(name, basis, "one", wedge_table, d_table, lie, twist)


# -- invariant subspace ------------------------------------------------------


def extended_lie_matrix(model: CdgaModel, j) -> SparseMatrix:
    """Matrix of L^T_j = L_j + (d(xi_j) - iota_j(H)) wedge on the basis."""
    gen = model.generator_name(j)
    w = model.xi(gen).d() - model.H.iota(gen)
    return model.operator_matrix(lambda x: x.lie(gen) + w.wedge(x))


def restrict_to_invariants(model: CdgaModel, parity=None, degree=None) -> SubspaceBasis:
    """Joint kernel of the extended Lie operators on the chosen graded piece."""
    from .linalg import subspace_intersection

    keep = []
    for i, b in enumerate(model.basis):
        if parity is not None and b.degree % 2 != parity:
            continue
        if degree is not None and b.degree != degree:
            continue
        keep.append(i)
    if not model.generators:
        ker = SubspaceBasis([{i: Fraction(1)} for i in range(model.dim)], model.dim)
    else:
        stacked = {}
        nrows = 0
        for j, _ in enumerate(model.generators):
            m = extended_lie_matrix(model, j)
            for (r, c), x in m.entries.items():
                stacked[(nrows + r, c)] = x
            nrows += model.dim
        big = SparseMatrix(nrows, model.dim, stacked)
        ker = kernel_basis(big)
    if parity is None and degree is None:
        return ker
    piece = SubspaceBasis([{i: Fraction(1)} for i in keep], model.dim)
    return subspace_intersection(ker, piece)


def structural_equal(m1: CdgaModel, m2: CdgaModel) -> bool:
    """Equality of the underlying tables, independent of declaration order."""
    if {b.name: b.degree for b in m1.basis} != {b.name: b.degree for b in m2.basis}:
        return False
    if m1.unit != m2.unit:
        return False
    if m1.wedge_table != m2.wedge_table:
        return False
    if m1.d_table != m2.d_table:
        return False
    if m1.lie.generators != m2.lie.generators:
        return False
    if {g: m1.lie.iota.get(g, {}) for g in m1.lie.generators} != {
        g: m2.lie.iota.get(g, {}) for g in m2.lie.generators
    }:
        return False
    sc1 = {k: v for k, v in m1.lie.structure_constants.items() if v}
    sc2 = {k: v for k, v in m2.lie.structure_constants.items() if v}
    if sc1 != sc2:
        return False
    if m1.twist.H != m2.twist.H:
        return False
    if {g: m1.twist.xi.get(g, {}) for g in m1.lie.generators} != {
        g: m2.twist.xi.get(g, {}) for g in m2.lie.generators
    }:
        return False
    return True
