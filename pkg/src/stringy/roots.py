"""Monogenic root extensions ``A[w]/(w^r - u)``."""

from __future__ import annotations

from fractions import Fraction

from .algebra import AlgebraError, Element, GradedAlgebra


class RootExtension(GradedAlgebra):
    """``base[w]/(w^r - u)`` with basis ``b_i w^j`` (j-major, 0 <= j < r).

    ``w`` commutes with everything, so ``u`` must have even parity.  The base
    sits inside as the ``j = 0`` slice.
    """

    def __init__(self, base: GradedAlgebra, u: Element, r: int, root_name: str = "w"):
        if r < 1:
            raise AlgebraError(f"root order must be positive, got {r}")
        if u.algebra != base:
            raise AlgebraError("relation element must live in the base algebra")
        if any(base.parities[i] for i, c in enumerate(u.coeffs) if c):
            raise AlgebraError("cannot adjoin a root of an odd element")
        self.base = base
        self.u = u
        self.r = r
        self.root_name = root_name

        degs = u.degrees()
        graded = base.graded
        if len(degs) == 1:
            root_deg = next(iter(degs)) / r
            if root_deg.denominator != 1:
                graded = False
        else:
            # zero or inhomogeneous relation element
            root_deg = Fraction(0)
            graded = graded and not degs
        self.root_degree = root_deg

        n = base.dim
        unit_name = base.basis[base.unit_index] if base.unit_index is not None else None

        def name(i: int, j: int) -> str:
            if j == 0:
                return base.basis[i]
            wpow = root_name if j == 1 else f"{root_name}^{j}"
            return wpow if base.basis[i] == unit_name else f"{base.basis[i]}·{wpow}"

        basis = [name(i, j) for j in range(r) for i in range(n)]
        degrees = [base.degrees[i] + j * root_deg for j in range(r) for i in range(n)]
        parities = [base.parities[i] for j in range(r) for i in range(n)]
        base_products = base.products()
        u_times = [base.multiply(base.basis_element(k).coeffs, u.coeffs) for k in range(n)]
        products: dict[tuple[int, int], dict[int, Fraction]] = {}
        for j in range(r):
            for l in range(r):
                s = j + l
                for (i, k), out in base_products.items():
                    target: dict[int, Fraction] = {}
                    if s < r:
                        for m, c in out.items():
                            target[s * n + m] = target.get(s * n + m, Fraction(0)) + c
                    else:
                        for m, c in out.items():
                            for p, v in enumerate(u_times[m]):
                                if v:
                                    key = (s - r) * n + p
                                    target[key] = target.get(key, Fraction(0)) + c * v
                    target = {key: v for key, v in target.items() if v}
                    if target:
                        products[(j * n + i, l * n + k)] = target
        super().__init__(
            f"{base.name}[{root_name}]",
            basis,
            degrees,
            products,
            base.unit_index,
            None,
            graded=graded,
            parities=parities,
        )

    def embed(self, el: Element) -> Element:
        """Image of an element of the base (or of any algebra below it in a tower)."""
        if el.algebra != self.base:
            if isinstance(self.base, RootExtension):
                el = self.base.embed(el)
            else:
                raise AlgebraError(f"{el.algebra.name} does not embed in {self.name}")
        return Element(self, tuple(el.coeffs) + (Fraction(0),) * (self.dim - self.base.dim))

    def root(self) -> Element:
        if self.r == 1:
            return self.embed(self.u)
        return self.basis_element(self.base.dim + self.base.unit_index)


def adjoin_root(base: GradedAlgebra, u: Element, r: int, root_name: str = "w") -> GradedAlgebra:
    """``base[w]/(w^r - u)``; ``r = 1`` returns the base unchanged."""
    if r < 1:
        raise AlgebraError(f"root order must be positive, got {r}")
    if r == 1:
        return base
    return RootExtension(base, u, r, root_name)


def embed_into(tower: GradedAlgebra, el: Element) -> Element:
    """Embed ``el`` into ``tower`` when ``tower`` is ``el``'s algebra or a root extension above it."""
    if el.algebra == tower:
        return el
    if isinstance(tower, RootExtension):
        return tower.embed(el)
    raise AlgebraError(f"{el.algebra.name} does not embed in {tower.name}")
