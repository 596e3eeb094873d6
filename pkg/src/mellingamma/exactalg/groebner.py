"""Reduced Groebner bases over Q in grevlex order."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct
from typing import Sequence

from mellingamma.exactalg.poly import (
    Monomial,
    Polynomial,
    divides,
    grevlex_key,
    mono_div,
    mono_lcm,
)

DEFAULT_BUDGET = 10**6


class GroebnerBudgetExceeded(RuntimeError):
    def __init__(self, budget: int):
        super().__init__(f"groebner budget exceeded ({budget} reductions)")
        self.budget = budget


@dataclass(frozen=True)
class GroebnerBasis:
    nvars: int
    generators: tuple[Polynomial, ...]
    order: str = "grevlex"

    @property
    def leading_monomials(self) -> tuple[Monomial, ...]:
        return tuple(g.leading_monomial() for g in self.generators)

    def is_unit(self) -> bool:
        return any(sum(m) == 0 for m in self.leading_monomials)

    def contains(self, p: Polynomial) -> bool:
        return normal_form(p, self).is_zero()


class _Counter:
    __slots__ = ("steps", "budget")

    def __init__(self, budget: int):
        self.steps = 0
        self.budget = budget

    def tick(self):
        self.steps += 1
        if self.steps > self.budget:
            raise GroebnerBudgetExceeded(self.budget)


def _reduce(p: Polynomial, basis: Sequence[Polynomial], counter: _Counter | None = None) -> Polynomial:
    """Full reduction of every term of ``p`` modulo ``basis``."""
    leads = [(g.leading_monomial(), g.leading_coefficient(), g) for g in basis]
    remainder: dict[Monomial, object] = {}
    work = dict(p.terms)
    nv = p.nvars
    while work:
        mono = max(work, key=grevlex_key)
        coeff = work[mono]
        for lm, lc, g in leads:
            if divides(lm, mono):
                if counter is not None:
                    counter.tick()
                factor = coeff / lc
                shift = mono_div(mono, lm)
                for m, c in g.terms.items():
                    t = tuple(a + b for a, b in zip(m, shift))
                    v = work.get(t, 0) - factor * c
                    if v:
                        work[t] = v
                    else:
                        work.pop(t, None)
                break
        else:
            remainder[mono] = coeff
            del work[mono]
    return Polynomial(nv, remainder)


def _spoly(f: Polynomial, g: Polynomial) -> Polynomial:
    lf, lg = f.leading_monomial(), g.leading_monomial()
    l = mono_lcm(lf, lg)
    return f.mul_monomial(mono_div(l, lf), 1 / f.leading_coefficient()) - g.mul_monomial(
        mono_div(l, lg), 1 / g.leading_coefficient()
    )


def _interreduce(basis: list[Polynomial]) -> list[Polynomial]:
    basis = [b.monic() for b in basis if b]
    # drop elements whose leading monomial is divisible by another's
    basis.sort(key=lambda b: grevlex_key(b.leading_monomial()))
    kept: list[Polynomial] = []
    for b in basis:
        lm = b.leading_monomial()
        if not any(divides(k.leading_monomial(), lm) for k in kept):
            kept.append(b)
    out = []
    for i, b in enumerate(kept):
        others = kept[:i] + kept[i + 1 :]
        r = _reduce(b, others)
        out.append(r.monic())
    out.sort(key=lambda b: grevlex_key(b.leading_monomial()))
    return out


def buchberger(gens: Sequence[Polynomial], budget: int = DEFAULT_BUDGET) -> GroebnerBasis:
    """Reduced grevlex Groebner basis of the ideal generated by ``gens``.

    Pairs are processed smallest-lcm first; the coprime-leading-monomial
    criterion and the chain criterion skip pairs known to reduce to zero.
    """
    gens = [g for g in gens]
    if not gens:
        raise ValueError("need at least one generator")
    nv = gens[0].nvars
    if any(g.nvars != nv for g in gens):
        raise ValueError("generators live in different rings")
    counter = _Counter(budget)
    basis: list[Polynomial] = []
    for g in gens:
        r = _reduce(g, basis, counter) if basis else g
        if r:
            basis.append(r.monic())
    if not basis:
        return GroebnerBasis(nv, ())
    pairs = {(i, j) for i in range(len(basis)) for j in range(i)}
    while pairs:
        i, j = min(
            pairs,
            key=lambda ij: (grevlex_key(mono_lcm(basis[ij[0]].leading_monomial(), basis[ij[1]].leading_monomial())), ij),
        )
        pairs.discard((i, j))
        li, lj = basis[i].leading_monomial(), basis[j].leading_monomial()
        l = mono_lcm(li, lj)
        if all(a == 0 or b == 0 for a, b in zip(li, lj)):
            continue
        if any(
            k not in (i, j)
            and divides(basis[k].leading_monomial(), l)
            and (max(i, k), min(i, k)) not in pairs
            and (max(j, k), min(j, k)) not in pairs
            for k in range(len(basis))
        ):
            continue
        r = _reduce(_spoly(basis[i], basis[j]), basis, counter)
        if r:
            basis.append(r.monic())
            n = len(basis) - 1
            pairs |= {(n, k) for k in range(n)}
            if sum(r.leading_monomial()) == 0:
                break
    return GroebnerBasis(nv, tuple(_interreduce(basis)))


def normal_form(p: Polynomial, gb: GroebnerBasis) -> Polynomial:
    if p.nvars != gb.nvars:
        raise ValueError("polynomial and basis live in different rings")
    return _reduce(p, gb.generators)


def standard_monomials(gb: GroebnerBasis) -> list[Monomial] | None:
    """Monomials outside the leading-term ideal, or None if there are infinitely many.

    The list is sorted by increasing grevlex order.
    """
    n = gb.nvars
    leads = gb.leading_monomials
    bounds = []
    for i in range(n):
        pure = [m[i] for m in leads if all(e == 0 for k, e in enumerate(m) if k != i)]
        if not pure:
            return None
        bounds.append(min(pure))
    out = [
        m
        for m in iproduct(*(range(b) for b in bounds))
        if not any(divides(lm, m) for lm in leads)
    ]
    out.sort(key=grevlex_key)
    return out
