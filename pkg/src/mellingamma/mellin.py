"""Monodromic modules on a torus in the Mellin picture.

A lattice-equivariant C[v]-module supported on one coset ``mu0 + Z^n`` is
stored as a single fiber: a space V with commuting operators N_i (the action
of the coordinate vector fields v_i) whose only joint eigenvalue is mu0.  The
fiber at ``mu0 + lam`` is (V, N + lam), canonically.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from typing import Mapping, Sequence

from mellingamma.coinvariants import coinvariant_algebra, truncation_algebra
from mellingamma.exactalg import Polynomial, QMatrix, det, kernel, rank, rref
from mellingamma.exactalg.rational import format_vector, parse_vector
from mellingamma.rootdata import (
    IntMatrix,
    RootDatum,
    TorusPoint,
    WeylElement,
    is_integral,
    permutation_sign,
    stabilizer,
)


class ModuleInvariantError(ValueError):
    pass


def _pair(a: Sequence, b: Sequence) -> Fraction:
    return sum((Fraction(x) * Fraction(y) for x, y in zip(a, b)), Fraction(0))


@dataclass(frozen=True)
class MonodromicModule:
    coset_rep: tuple[Fraction, ...]
    nu: tuple[QMatrix, ...]

    def __post_init__(self):
        object.__setattr__(self, "coset_rep", tuple(Fraction(x) for x in self.coset_rep))
        if len(self.nu) != len(self.coset_rep):
            raise ModuleInvariantError("need one operator per lattice coordinate")
        d = self.nu[0].nrows if self.nu else 0
        for m in self.nu:
            if m.shape != (d, d):
                raise ModuleInvariantError("operators must be square of the fiber dimension")

    @property
    def rank(self) -> int:
        return len(self.coset_rep)

    @property
    def dim(self) -> int:
        return self.nu[0].nrows if self.nu else 0

    @property
    def point(self) -> TorusPoint:
        return TorusPoint(self.coset_rep)

    def N(self, h: Sequence) -> QMatrix:
        """Action of the vector field sum_i h_i v_i."""
        out = QMatrix.zeros(self.dim, self.dim)
        for c, m in zip(h, self.nu):
            if c:
                out = out + m.scale(c)
        return out

    def shifted_to(self, rep: Sequence) -> "MonodromicModule":
        """Same module described at another representative of its coset."""
        rep = tuple(Fraction(x) for x in rep)
        lam = tuple(a - b for a, b in zip(rep, self.coset_rep))
        if not is_integral(lam):
            raise ModuleInvariantError("representatives lie in different cosets")
        d = self.dim
        nu = tuple(m + QMatrix.scalar(d, l) if l else m for m, l in zip(self.nu, lam))
        return MonodromicModule(rep, nu)

    def invariant_failures(self) -> list[str]:
        out = []
        for i, j in combinations(range(self.rank), 2):
            if self.nu[i] @ self.nu[j] != self.nu[j] @ self.nu[i]:
                out.append(f"N_{i + 1} N_{j + 1} != N_{j + 1} N_{i + 1}")
        for i, (m, mu) in enumerate(zip(self.nu, self.coset_rep)):
            if not (m - QMatrix.scalar(self.dim, mu)).is_nilpotent():
                out.append(f"N_{i + 1} - {mu} is not nilpotent")
        return out

    def validate(self) -> "MonodromicModule":
        bad = self.invariant_failures()
        if bad:
            raise ModuleInvariantError("; ".join(bad))
        return self

    def to_json(self) -> dict:
        return {
            "coset_rep": format_vector(self.coset_rep),
            "dim": self.dim,
            "nu": [m.to_strings() for m in self.nu],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "MonodromicModule":
        rep = parse_vector(data["coset_rep"])
        d = int(data["dim"])
        nu = tuple(QMatrix.from_strings(m, d) if d else QMatrix.zeros(0, 0) for m in data["nu"])
        return cls(rep, nu).validate()


def same_coset(a: Sequence, b: Sequence) -> bool:
    return is_integral(Fraction(x) - Fraction(y) for x, y in zip(a, b))


@dataclass(frozen=True)
class EquivariantStructure:
    """Maps u(w) realizing an equivariant structure over a subgroup of W_xi."""

    base: MonodromicModule
    group: tuple[WeylElement, ...]
    u: Mapping[IntMatrix, QMatrix]

    def u_of(self, w: WeylElement) -> QMatrix:
        return self.u[w.matrix]

    def contract_failures(self, elements: Sequence[WeylElement] | None = None) -> list[str]:
        """u(w) N(h) = (N(w h) + <w h, w(mu0) - mu0>) u(w) for coordinate h."""
        m = self.base
        mu = m.coset_rep
        out = []
        for w in elements if elements is not None else self.group:
            lam = tuple(a - b for a, b in zip(w.act_dual(mu), mu))
            if not is_integral(lam):
                out.append(f"w{list(w.word)} does not stabilize the coset")
                continue
            uw = self.u_of(w)
            for i in range(m.rank):
                h = tuple(int(k == i) for k in range(m.rank))
                wh = w.act(h)
                rhs = (m.N(wh) + QMatrix.scalar(m.dim, _pair(wh, lam))) @ uw
                if uw @ m.N(h) != rhs:
                    out.append(f"contract fails for w{list(w.word)} at v{i + 1}")
        return out

    def cocycle_failures(self, rd: RootDatum) -> list[str]:
        out = []
        ident = QMatrix.identity(self.base.dim)
        for w in self.group:
            uw = self.u_of(w)
            if w.is_identity() and uw != ident:
                out.append("u(e) != id")
            if uw.rank() != self.base.dim:
                out.append(f"u(w{list(w.word)}) is singular")
            for v in self.group:
                if self.u_of(rd.multiply(w, v)) != uw @ self.u_of(v):
                    out.append(f"u(w{list(w.word)} w{list(v.word)}) != u u")
        return out

    def to_json(self) -> dict:
        return {
            "module": self.base.to_json(),
            "group": [[list(r) for r in w.matrix] for w in self.group],
            "u": [self.u_of(w).to_strings() for w in self.group],
        }


@dataclass(frozen=True)
class MultiCosetModule:
    """A W-equivariant module supported on a finite W-orbit of cosets.

    ``blocks[w.matrix]`` is ``(perm, mats)``: component j is sent to component
    ``perm[j]`` through ``mats[j]``.
    """

    components: tuple[MonodromicModule, ...]
    group: tuple[WeylElement, ...]
    blocks: Mapping[IntMatrix, tuple[tuple[int, ...], tuple[QMatrix, ...]]]

    @property
    def dim(self) -> int:
        return sum(c.dim for c in self.components)

    def contract_failures(self) -> list[str]:
        out = []
        for w in self.group:
            perm, mats = self.blocks[w.matrix]
            for j, comp in enumerate(self.components):
                tgt = self.components[perm[j]]
                image = w.act_dual(comp.coset_rep)
                lam = tuple(a - b for a, b in zip(image, tgt.coset_rep))
                if not is_integral(lam):
                    out.append(f"w{list(w.word)} sends component {j} off component {perm[j]}")
                    continue
                uw = mats[j]
                for i in range(comp.rank):
                    h = tuple(int(k == i) for k in range(comp.rank))
                    wh = w.act(h)
                    rhs = (tgt.N(wh) + QMatrix.scalar(tgt.dim, _pair(wh, lam))) @ uw
                    if uw @ comp.N(h) != rhs:
                        out.append(f"block contract fails for w{list(w.word)}, component {j}, v{i + 1}")
        return out

    def cocycle_failures(self, rd: RootDatum) -> list[str]:
        out = []
        for w in self.group:
            pw, mw = self.blocks[w.matrix]
            if sorted(pw) != list(range(len(self.components))):
                out.append(f"w{list(w.word)} does not permute components")
            for v in self.group:
                pv, mv = self.blocks[v.matrix]
                pwv, mwv = self.blocks[rd.multiply(w, v).matrix]
                for j in range(len(self.components)):
                    if pwv[j] != pw[pv[j]] or mwv[j] != mw[pv[j]] @ mv[j]:
                        out.append(f"cocycle fails for w{list(w.word)} w{list(v.word)} on component {j}")
        return out

    def full_matrix(self, w: WeylElement) -> QMatrix:
        perm, mats = self.blocks[w.matrix]
        offs = [0]
        for c in self.components:
            offs.append(offs[-1] + c.dim)
        rows = [[Fraction(0)] * self.dim for _ in range(self.dim)]
        for j, m in enumerate(mats):
            t = perm[j]
            for a in range(m.nrows):
                for b in range(m.ncols):
                    rows[offs[t] + a][offs[j] + b] = m[a, b]
        return QMatrix(rows, self.dim)


# ------------------------------------------------------------ constructors


def kummer_module(xi: TorusPoint | Sequence) -> MonodromicModule:
    mu = xi.coset_rep if isinstance(xi, TorusPoint) else tuple(Fraction(x) for x in xi)
    return MonodromicModule(mu, tuple(QMatrix([[m]]) for m in mu))


def unipotent_module(xi: TorusPoint | Sequence, n: int) -> MonodromicModule:
    """Fiber S/S_+^n with v_i acting by multiplication plus mu0_i."""
    mu = xi.coset_rep if isinstance(xi, TorusPoint) else tuple(Fraction(x) for x in xi)
    alg = truncation_algebra(len(mu), n)
    d = alg.dim
    return MonodromicModule(mu, tuple(m + QMatrix.scalar(d, c) for m, c in zip(alg.mult, mu)))


def unipotent_projection(rank_: int, n: int) -> QMatrix:
    """The tower map L^n -> L^(n-1) on fibers."""
    return truncation_algebra(rank_, n).projection(n - 1)


def e_xi_module(rd: RootDatum, xi: TorusPoint) -> tuple[MonodromicModule, EquivariantStructure]:
    """Fiber S_xi = S/S.S_+^{W_xi} with its W_xi action; contracts are checked."""
    group = stabilizer(rd, xi)
    alg = coinvariant_algebra(group)
    mu = xi.coset_rep
    d = alg.dim
    nu = tuple(m + QMatrix.scalar(d, c) for m, c in zip(alg.mult, mu))
    module = MonodromicModule(mu, nu)
    struct = EquivariantStructure(module, tuple(group), {w.matrix: alg.action_of(w) for w in group})
    bad = struct.contract_failures()
    if bad:
        raise ModuleInvariantError("E_xi construction: " + "; ".join(bad))
    return module, struct


def coset_representatives(rd: RootDatum, xi: TorusPoint) -> list[WeylElement]:
    """First element (in enumeration order) of each coset w W_xi."""
    reps: list[WeylElement] = []
    seen: set[TorusPoint] = set()
    for w in rd.weyl_group:
        p = TorusPoint(w.act_dual(xi.coset_rep))
        if p not in seen:
            seen.add(p)
            reps.append(w)
    return reps


def e_theta_module(rd: RootDatum, xi: TorusPoint) -> MultiCosetModule:
    """The module induced from (E_xi, W_xi) to W, one component per coset of the orbit."""
    base, struct = e_xi_module(rd, xi)
    reps = coset_representatives(rd, xi)
    comps = []
    for wj in reps:
        inv = rd.inverse(wj)
        nu = []
        for i in range(rd.rank):
            h = tuple(int(k == i) for k in range(rd.rank))
            nu.append(base.N(inv.act(h)))
        comps.append(MonodromicModule(wj.act_dual(base.coset_rep), tuple(nu)))
    points = [TorusPoint(c.coset_rep) for c in comps]
    blocks = {}
    for w in rd.weyl_group:
        perm, mats = [], []
        for j, wj in enumerate(reps):
            t = points.index(TorusPoint(w.act_dual(comps[j].coset_rep)))
            s = rd.multiply(rd.inverse(reps[t]), rd.multiply(w, wj))
            perm.append(t)
            mats.append(struct.u_of(s))
        blocks[w.matrix] = (tuple(perm), tuple(mats))
    return MultiCosetModule(tuple(comps), tuple(rd.weyl_group), blocks)


def direct_sum(a: MonodromicModule, b: MonodromicModule) -> MonodromicModule:
    b = b.shifted_to(a.coset_rep)
    nu = []
    for x, y in zip(a.nu, b.nu):
        rows = [r + (Fraction(0),) * y.ncols for r in x.rows] + [(Fraction(0),) * x.ncols + r for r in y.rows]
        nu.append(QMatrix(rows, x.ncols + y.ncols))
    return MonodromicModule(a.coset_rep, tuple(nu))


def zero_module(rep: Sequence) -> MonodromicModule:
    return MonodromicModule(tuple(rep), tuple(QMatrix.zeros(0, 0) for _ in rep))


# ----------------------------------------------------------- tensor and Tor


def _difference_operators(m: MonodromicModule, n: MonodromicModule) -> list[QMatrix]:
    im, iN = QMatrix.identity(m.dim), QMatrix.identity(n.dim)
    return [a.kron(iN) - im.kron(b) for a, b in zip(m.nu, n.nu)]


def tensor(m: MonodromicModule, n: MonodromicModule) -> MonodromicModule:
    """Underived tensor product over C[v] (the degree-0 part of convolution)."""
    if not same_coset(m.coset_rep, n.coset_rep):
        return zero_module(m.coset_rep)
    n = n.shifted_to(m.coset_rep)
    total = m.dim * n.dim
    if total == 0:
        return zero_module(m.coset_rep)
    rels = []
    for d in _difference_operators(m, n):
        rels.extend(d.columns())
    red, pivots = rref(QMatrix(rels, total)) if rels else (QMatrix.zeros(0, total), [])
    pivot_set = set(pivots)
    free = [k for k in range(total) if k not in pivot_set]

    def project(vec):
        out = []
        for k in free:
            val = vec[k]
            for row, p in zip(red.rows, pivots):
                if vec[p]:
                    val -= vec[p] * row[k]
            out.append(val)
        return out

    iN = QMatrix.identity(n.dim)
    nu = []
    for a in m.nu:
        act = a.kron(iN)
        cols = [project(act.column(k)) for k in free]
        nu.append(QMatrix.from_columns(cols, len(free)) if free else QMatrix.zeros(0, 0))
    return MonodromicModule(m.coset_rep, tuple(nu))


def koszul_differentials(ops: Sequence[QMatrix], dim: int) -> list[QMatrix]:
    """d_p : K_p -> K_{p-1} for p = 1..r of the Koszul complex of commuting ops."""
    r = len(ops)
    subsets = [list(combinations(range(r), p)) for p in range(r + 1)]
    index = [{s: i for i, s in enumerate(ss)} for ss in subsets]
    diffs = []
    for p in range(1, r + 1):
        rows_n = len(subsets[p - 1]) * dim
        cols_n = len(subsets[p]) * dim
        data = [[Fraction(0)] * cols_n for _ in range(rows_n)]
        for s in subsets[p]:
            cs = index[p][s] * dim
            for pos, j in enumerate(s):
                t = s[:pos] + s[pos + 1 :]
                rs = index[p - 1][t] * dim
                sign = -1 if pos % 2 else 1
                op = ops[j]
                for a in range(dim):
                    row = op.rows[a]
                    for b in range(dim):
                        if row[b]:
                            data[rs + a][cs + b] += sign * row[b]
        diffs.append(QMatrix(data, cols_n) if rows_n else QMatrix.zeros(0, cols_n))
    return diffs


def koszul_homology(ops: Sequence[QMatrix], dim: int) -> tuple[int, ...]:
    from math import comb

    r = len(ops)
    diffs = koszul_differentials(ops, dim)
    ranks = [0] + [rank(d) for d in diffs] + [0]
    return tuple(comb(r, p) * dim - ranks[p] - ranks[p + 1] for p in range(r + 1))


def tor(m: MonodromicModule, n: MonodromicModule) -> tuple[int, ...]:
    """Graded dimensions of Tor_p over C[v], p = 0..rank."""
    if not same_coset(m.coset_rep, n.coset_rep):
        return (0,) * (m.rank + 1)
    n = n.shifted_to(m.coset_rep)
    return koszul_homology(_difference_operators(m, n), m.dim * n.dim)


# --------------------------------------------------------------- morphisms


@dataclass
class MorphismReport:
    passed: bool
    failures: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.passed


def verify_morphism(
    f: QMatrix,
    m: MonodromicModule,
    n: MonodromicModule,
    structures: tuple[EquivariantStructure, EquivariantStructure] | None = None,
) -> MorphismReport:
    if f.shape != (n.dim, m.dim):
        return MorphismReport(False, [f"shape {f.shape} != ({n.dim}, {m.dim})"])
    if not same_coset(m.coset_rep, n.coset_rep):
        ok = f.is_zero()
        return MorphismReport(ok, [] if ok else ["nonzero map between different cosets"])
    n = n.shifted_to(m.coset_rep)
    failures = []
    for i, (a, b) in enumerate(zip(m.nu, n.nu)):
        if f @ a != b @ f:
            failures.append(f"f N_{i + 1} != N_{i + 1} f")
    if structures is not None:
        sm, sn = structures
        for w in sm.group:
            if w.matrix not in sn.u:
                failures.append(f"w{list(w.word)} missing from target structure")
            elif f @ sm.u_of(w) != sn.u_of(w) @ f:
                failures.append(f"f u(w{list(w.word)}) != u(w{list(w.word)}) f")
    return MorphismReport(not failures, failures)


def intertwiners(m: MonodromicModule, n: MonodromicModule) -> list[QMatrix]:
    """A basis of the linear maps V_M -> V_N commuting with every N_i."""
    if not same_coset(m.coset_rep, n.coset_rep) or m.dim == 0 or n.dim == 0:
        return []
    n = n.shifted_to(m.coset_rep)
    dm, dn = m.dim, n.dim
    # unknown f[a][b] at index a*dm + b; equations (f A - B f)[a][c] = 0
    eqs = []
    for A, B in zip(m.nu, n.nu):
        for a in range(dn):
            for c in range(dm):
                row = [Fraction(0)] * (dn * dm)
                for b in range(dm):
                    if A[b, c]:
                        row[a * dm + b] += A[b, c]
                for k in range(dn):
                    if B[a, k]:
                        row[k * dm + c] -= B[a, k]
                eqs.append(row)
    basis = kernel(QMatrix(eqs, dn * dm)) if eqs else kernel(QMatrix.zeros(1, dn * dm))
    return [QMatrix([vec[a * dm : (a + 1) * dm] for a in range(dn)], dm) for vec in basis]


@dataclass
class IsoResult:
    status: str  # "found", "no certificate", "none (certified)"
    matrix: QMatrix | None
    intertwiner_dim: int
    generic_determinant_zero: bool | None = None


def _generic_determinant(mats: Sequence[QMatrix]) -> Polynomial:
    k = len(mats)
    d = mats[0].nrows
    entries = [
        [Polynomial(k, {tuple(int(t == s) for t in range(k)): mats[s][i, j] for s in range(k)}) for j in range(d)]
        for i in range(d)
    ]
    total = Polynomial(k)
    for perm in permutations(range(d)):
        term = Polynomial.constant(k, permutation_sign(perm))
        for i, j in enumerate(perm):
            term = term * entries[i][j]
            if term.is_zero():
                break
        total = total + term
    return total


def iso_search(m: MonodromicModule, n: MonodromicModule, seed: int = 0) -> IsoResult:
    if m.dim != n.dim or not same_coset(m.coset_rep, n.coset_rep):
        return IsoResult("none (certified)", None, 0)
    basis = intertwiners(m, n)
    if not basis:
        return IsoResult("none (certified)", None, 0)
    d = m.dim

    def candidates():
        yield from basis
        for size in (2, 3):
            for combo in combinations(basis, size):
                acc = combo[0]
                for b in combo[1:]:
                    acc = acc + b
                yield acc
        rng = random.Random(seed)
        for _ in range(32):
            acc = QMatrix.zeros(d, d)
            for b in basis:
                acc = acc + b.scale(Fraction(rng.randint(-9, 9), rng.randint(1, 9)))
            yield acc

    for cand in candidates():
        if det(cand) != 0:
            return IsoResult("found", cand, len(basis))
    proof = None
    if d <= 4 and len(basis) <= 8:
        proof = _generic_determinant(basis).is_zero()
    return IsoResult("no certificate", None, len(basis), proof)
