"""Coinvariant algebras S/S.S_+^W' and truncations S/S_+^n with their
multiplication and group-action matrices."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import comb
from typing import Sequence

from mellingamma.exactalg import (
    GroebnerBasis,
    Polynomial,
    QMatrix,
    buchberger,
    normal_form,
    rank,
    span_basis,
    standard_monomials,
)
from mellingamma.exactalg.poly import Monomial, grevlex_key, monomials_of_degree
from mellingamma.rootdata import IntMatrix, WeylElement, _identity, _mat_mul


class CoinvariantConstructionFailed(RuntimeError):
    pass


def act_on_polynomial(w: WeylElement, p: Polynomial) -> Polynomial:
    """w acts on S = Sym(t) through its matrix on t: w(v_i) = sum_j g[j][i] v_j."""
    out: dict[Monomial, Fraction] = {}
    for mono, c in p.terms.items():
        for m, k in _act_monomial(w.matrix, mono).items():
            v = out.get(m, 0) + c * k
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return Polynomial(p.nvars, out)


def _int_poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = tuple(x + y for x, y in zip(m1, m2))
            out[m] = out.get(m, 0) + c1 * c2
    return {m: c for m, c in out.items() if c}


_POWER_CACHE: dict[tuple[IntMatrix, int, int], dict] = {}


def _linear_power(g: IntMatrix, i: int, e: int) -> dict:
    key = (g, i, e)
    hit = _POWER_CACHE.get(key)
    if hit is not None:
        return hit
    n = len(g)
    if e == 1:
        res = {tuple(int(k == j) for k in range(n)): g[j][i] for j in range(n) if g[j][i]}
    else:
        res = _int_poly_mul(_linear_power(g, i, e - 1), _linear_power(g, i, 1))
    if len(_POWER_CACHE) > 200_000:
        _POWER_CACHE.clear()
    _POWER_CACHE[key] = res
    return res


def _act_monomial(g: IntMatrix, mono: Monomial) -> dict[Monomial, int]:
    n = len(g)
    cols = [[(j, g[j][i]) for j in range(n) if g[j][i]] for i in range(n)]
    if all(len(c) == 1 for c in cols):
        # signed permutation: the image is a single monomial
        out = [0] * n
        coeff = 1
        for i, e in enumerate(mono):
            if e:
                j, a = cols[i][0]
                out[j] += e
                coeff *= a**e
        return {tuple(out): coeff}
    res: dict = {(0,) * n: 1}
    for i, e in enumerate(mono):
        if e:
            res = _int_poly_mul(res, _linear_power(g, i, e))
    return res


def group_closure(gens: Sequence[IntMatrix], n: int) -> set[IntMatrix]:
    seen = {_identity(n)}
    frontier = [_identity(n)]
    while frontier:
        nxt = []
        for m in frontier:
            for g in gens:
                p = _mat_mul(g, m)
                if p not in seen:
                    seen.add(p)
                    nxt.append(p)
        frontier = nxt
    return seen


def reflection_generated(group: Sequence[WeylElement]) -> bool:
    """True iff the group equals the subgroup generated by its reflections."""
    if not group:
        return True
    n = group[0].rank
    ident = QMatrix.identity(n)
    refl = [w.matrix for w in group if rank(w.qmatrix - ident) == 1]
    return len(group_closure(refl, n)) == len({w.matrix for w in group})


def reynolds(group: Sequence[WeylElement], p: Polynomial) -> Polynomial:
    total = Polynomial(p.nvars)
    for w in group:
        total = total + act_on_polynomial(w, p)
    return total * Fraction(1, len(group))


def _invariants_of_degree(group: Sequence[WeylElement], nvars: int, d: int) -> list[Polynomial]:
    monos = monomials_of_degree(nvars, d)
    index = {m: i for i, m in enumerate(monos)}
    vecs = []
    for m in monos:
        avg = reynolds(group, Polynomial.monomial(m))
        v = [Fraction(0)] * len(monos)
        for mono, c in avg.terms.items():
            v[index[mono]] = c
        vecs.append(v)
    return [Polynomial(nvars, {monos[i]: c for i, c in enumerate(row) if c}) for row in span_basis(vecs, len(monos))]


def invariant_generators(group: Sequence[WeylElement], degree_bound: int | None = None) -> list[Polynomial]:
    """A basis of the homogeneous invariants of degrees 1..degree_bound.

    The default bound is the group order, which always suffices to generate
    the Hilbert ideal in characteristic zero.
    """
    if not group:
        raise ValueError("empty group")
    nvars = group[0].rank
    bound = len(group) if degree_bound is None else degree_bound
    if bound < 1:
        raise ValueError("degree bound must be at least 1")
    out = []
    for d in range(1, bound + 1):
        out.extend(_invariants_of_degree(group, nvars, d))
    return out


def _poly_coords(p: Polynomial, index: dict[Monomial, int], dim: int) -> tuple[Fraction, ...]:
    v = [Fraction(0)] * dim
    for mono, c in p.terms.items():
        v[index[mono]] = c
    return tuple(v)


@dataclass(frozen=True)
class CoinvariantAlgebra:
    group: tuple[WeylElement, ...]
    invariant_generators: tuple[Polynomial, ...]
    gb: GroebnerBasis
    basis: tuple[Monomial, ...]
    degree_bound: int
    is_reflection_group: bool

    @property
    def nvars(self) -> int:
        return self.gb.nvars

    @property
    def dim(self) -> int:
        return len(self.basis)

    @cached_property
    def _index(self) -> dict[Monomial, int]:
        return {m: i for i, m in enumerate(self.basis)}

    def coords(self, p: Polynomial) -> tuple[Fraction, ...]:
        return _poly_coords(normal_form(p, self.gb), self._index, self.dim)

    def basis_polynomial(self, j: int) -> Polynomial:
        return Polynomial.monomial(self.basis[j])

    @cached_property
    def action(self) -> dict[IntMatrix, QMatrix]:
        out = {}
        for w in self.group:
            cols = [self.coords(act_on_polynomial(w, self.basis_polynomial(j))) for j in range(self.dim)]
            out[w.matrix] = QMatrix.from_columns(cols, self.dim)
        return out

    def action_of(self, w: WeylElement) -> QMatrix:
        return self.action[w.matrix]

    @cached_property
    def mult(self) -> tuple[QMatrix, ...]:
        return tuple(_mult_matrix(self.coords, self.basis, i, self.nvars) for i in range(self.nvars))

    def mult_form(self, h: Sequence) -> QMatrix:
        """Multiplication by the linear form sum_i h_i v_i."""
        out = QMatrix.zeros(self.dim, self.dim)
        for c, m in zip(h, self.mult):
            if c:
                out = out + m.scale(c)
        return out

    def basis_strings(self) -> list[str]:
        from mellingamma.exactalg.poly import monomial_str

        return [monomial_str(m) for m in self.basis]


def _mult_matrix(coords, basis, i: int, nvars: int) -> QMatrix:
    var = Polynomial.variable(nvars, i)
    cols = [coords(var * Polynomial.monomial(m)) for m in basis]
    return QMatrix.from_columns(cols, len(basis))


def coinvariant_algebra(group: Sequence[WeylElement], budget: int | None = None) -> CoinvariantAlgebra:
    """Build S/S.S_+^G for a finite matrix group G.

    Invariants are added degree by degree from max(2, rank); the bound is
    raised until the quotient is finite and every degree that still carries
    standard monomials has had its invariants included.
    """
    group = tuple(group)
    if not group:
        raise ValueError("empty group")
    n = group[0].rank
    order = len(group)
    noether = max(order, 1)
    kwargs = {} if budget is None else {"budget": budget}
    gens: list[Polynomial] = []
    gb: GroebnerBasis | None = None
    done_degree = 0
    bound = max(2, n) if order > 1 else 1
    while True:
        for d in range(done_degree + 1, bound + 1):
            for inv in _invariants_of_degree(group, n, d):
                if gb is None or normal_form(inv, gb):
                    gens.append(inv)
                    gb = buchberger(gens, **kwargs)
        done_degree = max(done_degree, bound)
        if gb is None:
            raise CoinvariantConstructionFailed("no invariants found")
        std = standard_monomials(gb)
        if std is None:
            if bound >= noether:
                raise CoinvariantConstructionFailed("coinvariant construction failed: quotient infinite at the Noether bound")
            bound += 1
            continue
        top = max((sum(m) for m in std), default=0)
        if top > done_degree and done_degree < noether:
            bound = min(top, noether)
            continue
        return CoinvariantAlgebra(
            group=group,
            invariant_generators=tuple(gens),
            gb=gb,
            basis=tuple(std),
            degree_bound=done_degree,
            is_reflection_group=reflection_generated(group),
        )


@dataclass(frozen=True)
class TruncationAlgebra:
    """S/S_+^n: polynomials of degree < n."""

    rank: int
    n: int
    basis: tuple[Monomial, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    @cached_property
    def _index(self) -> dict[Monomial, int]:
        return {m: i for i, m in enumerate(self.basis)}

    def coords(self, p: Polynomial) -> tuple[Fraction, ...]:
        v = [Fraction(0)] * self.dim
        for mono, c in p.terms.items():
            if sum(mono) < self.n:
                v[self._index[mono]] = c
        return tuple(v)

    @cached_property
    def mult(self) -> tuple[QMatrix, ...]:
        return tuple(_mult_matrix(self.coords, self.basis, i, self.rank) for i in range(self.rank))

    def mult_form(self, h: Sequence) -> QMatrix:
        out = QMatrix.zeros(self.dim, self.dim)
        for c, m in zip(h, self.mult):
            if c:
                out = out + m.scale(c)
        return out

    def projection(self, m: int) -> QMatrix:
        """The quotient map S/S_+^n -> S/S_+^m for m <= n."""
        if not 1 <= m <= self.n:
            raise ValueError("projection target must satisfy 1 <= m <= n")
        lower = truncation_algebra(self.rank, m)
        cols = [lower.coords(Polynomial.monomial(b)) for b in self.basis]
        return QMatrix.from_columns(cols, lower.dim)

    @property
    def expected_dim(self) -> int:
        return comb(self.n - 1 + self.rank, self.rank)


def truncation_algebra(rank_: int, n: int) -> TruncationAlgebra:
    if n < 1:
        raise ValueError("truncation level must be >= 1")
    basis = [m for d in range(n) for m in monomials_of_degree(rank_, d)]
    basis.sort(key=grevlex_key)
    return TruncationAlgebra(rank_, n, tuple(basis))
