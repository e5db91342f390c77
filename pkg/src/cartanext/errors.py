"""Exception taxonomy shared across the engine.

Structural problems (malformed input data) are kept distinct from axiom
violations (well-formed data that fails a mathematical law), and both are
distinct from capacity errors (a product left the finite basis span).
"""

from __future__ import annotations


class CartanExtError(Exception):
    """Base class for all engine errors."""


class StructuralError(CartanExtError):
    """Malformed model data: unknown name, wrong arity, bad degree."""


class AxiomViolation(CartanExtError):
    """A named algebra axiom fails, with a witnessing basis tuple."""

    def __init__(self, axiom: str, witness=None, detail: str = ""):
        self.axiom = axiom
        self.witness = witness
        self.detail = detail
        msg = f"axiom violated: {axiom}"
        if witness is not None:
            msg += f" (witness: {witness})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class ModelMismatch(CartanExtError):
    """Operands built over different models."""


class CapExceeded(CartanExtError):
    """A wedge product left the span of the finite basis."""

    def __init__(self, left: str, right: str):
        self.left = left
        self.right = right
        super().__init__(f"product {left} ^ {right} is outside the model basis")


class UnknownGenerator(CartanExtError):
    """Symmetry generator index or name not present in the model."""


class InconsistentDifferential(CartanExtError):
    """d^2 != 0 already on the generators of a free model."""


class NonConstantCoefficient(CartanExtError):
    """Section vector parts must be constant combinations of generators."""


class NotPure(CartanExtError):
    """d(xi_j) - iota_j(H) != 0 for some generator."""


class NotIsotropic(CartanExtError):
    """Some pairing <delta_i, delta_j> is nonzero."""


class NonInvariantFunction(CartanExtError):
    """Perturbation function is not invariant under the action."""


class NonInvariantData(CartanExtError):
    """B-transform data (2-form or functions) is not invariant."""


class DSquaredNonzero(CartanExtError):
    """The assembled equivariant differential fails d^2 = 0; carries a witness."""

    def __init__(self, witness, detail: str = ""):
        self.witness = witness
        super().__init__(f"d^2 != 0 on {witness}" + (f": {detail}" if detail else ""))


class NotContained(CartanExtError):
    """Boundary vector not contained in the cycle space (upstream d^2 bug)."""


class MultiVariableUnsupported(CartanExtError):
    """Torsion/localization is single-equivariant-variable only."""


class EulerNotInvertible(CartanExtError):
    """Euler class does not act invertibly on the free part of the fixed-set cohomology."""


class GeneratorMismatch(CartanExtError):
    """Source and target actions have incompatible generator lists."""


class NotExact(CartanExtError):
    """Chain-level exactness validation failed, with a position."""


class NotEquivariant(CartanExtError):
    """Morphism used equivariantly without passing the equivariance check."""
