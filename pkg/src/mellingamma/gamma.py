"""Convolution with the gamma kernel on the Mellin side.

Convolving a coset module M with the exponential pushforward along a
cocharacter lam produces the span of symbols ``x^k e^{cx} (x) m`` modulo

    x^k e (x) N(lam) m = (k x^k + c x^{k+1}) e (x) m.

Every symbol reduces to the generator ``x^n e (x) -`` with n = floor <lam, mu0>,
so the result has the same fiber as M.  ``R_k`` below is the matrix sending m to
the generator coordinates of ``x^k e (x) m``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import floor
from typing import Callable, Sequence

from mellingamma.exactalg import QMatrix, det, inverse
from mellingamma.mellin import (
    EquivariantStructure,
    MonodromicModule,
    MultiCosetModule,
    e_theta_module,
    e_xi_module,
    unipotent_module,
    unipotent_projection,
    verify_morphism,
)
from mellingamma.rootdata import (
    RootDatum,
    TorusPoint,
    WeylElement,
    WPrime,
    check_lambda_family,
    permutation_sign,
    wprime,
)

CONVENTIONS = ("unsigned", "signed")
LIFT_CAP = 720


class ReductionSingularity(ArithmeticError):
    pass


class GammaPreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class ExponentDecomposition:
    value: Fraction
    a: Fraction
    n: int


def decompose_exponent(lam: Sequence[int], mu: Sequence) -> ExponentDecomposition:
    value = sum((Fraction(l) * Fraction(m) for l, m in zip(lam, mu)), Fraction(0))
    n = floor(value)
    return ExponentDecomposition(value, value - n, n)


@dataclass(frozen=True)
class GammaData:
    rd: RootDatum
    lambdas: tuple[tuple[int, ...], ...]
    c: Fraction
    sigma: tuple[int, ...]
    wprime: WPrime


def gamma_data(rd: RootDatum, lambdas, c=1, sigma=None) -> GammaData:
    c = Fraction(c)
    if c == 0:
        raise GammaPreconditionError("c must be nonzero")
    lambdas = tuple(tuple(int(x) for x in l) for l in lambdas)
    if sigma is None:
        if not rd.characters:
            raise GammaPreconditionError("no sigma given and the root datum has no characters")
        sigma = rd.characters[0]
    sigma = tuple(int(x) for x in sigma)
    fam = check_lambda_family(rd, lambdas, sigma)
    if not fam.all_sigma_positive:
        raise GammaPreconditionError(f"cocharacters not sigma-positive: pairings {list(fam.pairings)}")
    return GammaData(rd, lambdas, c, sigma, wprime(rd, lambdas))


class ReductionTable:
    """Lazily filled table k -> R_k for one cocharacter acting on one fiber."""

    def __init__(self, lam: Sequence[int], c: Fraction, module: MonodromicModule, generator: int | None = None):
        if c == 0:
            raise GammaPreconditionError("c must be nonzero")
        self.lam = tuple(lam)
        self.c = Fraction(c)
        self.module = module
        self.decomposition = decompose_exponent(lam, module.coset_rep)
        self.n = self.decomposition.n if generator is None else generator
        self.N = module.N(lam)
        d = module.dim
        self._ident = QMatrix.identity(d)
        self._table: dict[int, QMatrix] = {self.n: self._ident}
        self.inverses_checked = 0

    def _shifted(self, k: int) -> QMatrix:
        return self.N - QMatrix.scalar(self.module.dim, k)

    def _step_factor(self, k: int) -> QMatrix:
        m = self._shifted(k)
        if k != self.n:
            if det(m) == 0:
                raise ReductionSingularity(f"N(lam) - {k} is singular for lam={list(self.lam)}")
            self.inverses_checked += 1
        return m

    def R(self, k: int) -> QMatrix:
        if k in self._table:
            return self._table[k]
        if k > self.n:
            prev = self.R(k - 1)
            out = (prev @ self._step_factor(k - 1)).scale(1 / self.c)
        else:
            nxt = self.R(k + 1)
            m = self._step_factor(k)
            if det(m) == 0:
                raise ReductionSingularity(f"N(lam) - {k} is singular below the generator")
            out = (nxt @ inverse(m)).scale(self.c)
        self._table[k] = out
        return out

    def relation_failures(self, ks: Sequence[int]) -> list[str]:
        """Replay x^k e (x) N m = k x^k e (x) m + c x^{k+1} e (x) m."""
        out = []
        for k in ks:
            lhs = self.R(k) @ self.N
            rhs = self.R(k).scale(k) + self.R(k + 1).scale(self.c)
            if lhs != rhs:
                out.append(f"relation fails at k={k} for lam={list(self.lam)}")
        return out

    def rows(self, ks: Sequence[int]) -> list[dict]:
        return [{"k": k, "R": self.R(k).to_strings()} for k in ks]


def gamma_reduce_single(lam: Sequence[int], c, module: MonodromicModule) -> tuple[MonodromicModule, ReductionTable]:
    return module, ReductionTable(lam, Fraction(c), module)


def multi_R(tables: Sequence[ReductionTable], ks: Sequence[int], order: Sequence[int] | None = None) -> QMatrix:
    idx = range(len(tables)) if order is None else order
    out = QMatrix.identity(tables[0].module.dim)
    for i in idx:
        out = out @ tables[i].R(ks[i])
    return out


def _box(centers: Sequence[int], radius: int):
    return product(*[range(n - radius, n + radius + 1) for n in centers])


def _box_radius(r: int) -> int:
    return 2 if r <= 3 else 1


@dataclass
class TransportResult:
    u_prime: QMatrix
    by_lift: dict[tuple[int, ...], QMatrix]
    eta_independent: bool
    naturality_failures: list[str]


def transport_block(
    gd: GammaData,
    w: WeylElement,
    source: MonodromicModule,
    target: MonodromicModule,
    u_block: QMatrix,
    convention: str = "unsigned",
    lifts: Sequence[Sequence[int]] | None = None,
) -> TransportResult:
    """Transport the block ``u_block`` from source to target through all lifts of w.

    The source generator x^n e (x) m is sent to eta(x^n) e (x) u m, which lies at
    the image point p = w(mu_s) of the target coset; it is then reduced to the
    target generator at p with the target tables.
    """
    if convention not in CONVENTIONS:
        raise GammaPreconditionError(f"unknown convention {convention!r}")
    r = len(gd.lambdas)
    p = w.act_dual(source.coset_rep)
    tgt_at_p = target.shifted_to(p)
    src_tabs = [ReductionTable(l, gd.c, source) for l in gd.lambdas]
    tgt_tabs = [ReductionTable(l, gd.c, tgt_at_p) for l in gd.lambdas]
    n_src = [t.n for t in src_tabs]
    if lifts is None:
        lifts = gd.wprime.lifts(w, cap=LIFT_CAP)
    by_lift = {}
    naturality = []
    radius = _box_radius(r)
    for eta in lifts:
        eta = tuple(eta)
        sign = 1
        if convention == "signed":
            sign = permutation_sign(eta) * w.sign
        k_img = [0] * r
        for i in range(r):
            k_img[eta[i]] = n_src[i]
        u_prime = multi_R(tgt_tabs, k_img) @ u_block
        if sign != 1:
            u_prime = -u_prime
        by_lift[eta] = u_prime
        # naturality on a box of symbols: kappa_t(eta(x^k) (x) u m) = u' kappa_s(x^k (x) m)
        for ks in _box(n_src, radius):
            kk = [0] * r
            for i in range(r):
                kk[eta[i]] = ks[i]
            lhs = multi_R(tgt_tabs, kk) @ u_block
            if sign != 1:
                lhs = -lhs
            if lhs != u_prime @ multi_R(src_tabs, ks):
                naturality.append(f"naturality fails for w{list(w.word)}, eta={list(eta)}, k={list(ks)}")
                break
    values = list(by_lift.values())
    first = values[0]
    return TransportResult(first, by_lift, all(v == first for v in values), naturality)


@dataclass
class GammaConvolutionReport:
    result: MonodromicModule
    kappa: QMatrix
    transported_u: dict
    iso_ok: bool
    equivariance_ok: bool
    eta_independent: bool
    convention: str = "unsigned"
    diagnostics: list[str] = field(default_factory=list)
    lifts_checked: int = 0
    inverses_checked: int = 0

    @property
    def passed(self) -> bool:
        return self.iso_ok and self.equivariance_ok and self.eta_independent

    def summary(self) -> dict:
        return {
            "passed": self.passed,
            "iso_ok": self.iso_ok,
            "equivariance_ok": self.equivariance_ok,
            "eta_independent": self.eta_independent,
            "convention": self.convention,
            "dim": self.result.dim,
            "lifts_checked": self.lifts_checked,
            "inverses_checked": self.inverses_checked,
            "diagnostics": list(self.diagnostics),
        }


def _kappa_checks(gd: GammaData, module: MonodromicModule) -> tuple[QMatrix, list[ReductionTable], list[str], int]:
    tables = [gamma_reduce_single(l, gd.c, module)[1] for l in gd.lambdas]
    diags = []
    radius = _box_radius(len(tables))
    for t in tables:
        diags += t.relation_failures(range(t.n - 3, t.n + 4))
    # processing order must not matter
    rev = list(reversed(range(len(tables))))
    for ks in _box([t.n for t in tables], radius):
        if multi_R(tables, ks) != multi_R(tables, ks, rev):
            diags.append(f"order dependence at k={list(ks)}")
            break
    kappa = multi_R(tables, [t.n for t in tables])
    return kappa, tables, diags, sum(t.inverses_checked for t in tables)


def gamma_convolve(
    gd: GammaData,
    module: MonodromicModule,
    structure: EquivariantStructure | None = None,
    convention: str = "unsigned",
    lift_override: Callable[[WeylElement], Sequence[Sequence[int]]] | None = None,
) -> GammaConvolutionReport:
    group = structure.group if structure is not None else (gd.rd.identity(),)
    mu = module.coset_rep
    for w in group:
        if TorusPoint(w.act_dual(mu)) != TorusPoint(mu):
            raise GammaPreconditionError(f"w{list(w.word)} does not stabilize the coset of the module")
    kappa, tables, diags, inv = _kappa_checks(gd, module)
    result = module
    morph = verify_morphism(kappa, result, module)
    iso_ok = morph.passed and det(kappa) != 0 and not diags
    diags += morph.failures

    transported = {}
    eta_ok = True
    equiv_ok = True
    lifts_checked = 0
    for w in group:
        u = structure.u_of(w) if structure is not None else QMatrix.identity(module.dim)
        lifts = lift_override(w) if lift_override is not None else None
        tr = transport_block(gd, w, module, module, u, convention, lifts)
        lifts_checked += len(tr.by_lift)
        transported[w.matrix] = tr.u_prime
        if not tr.eta_independent:
            eta_ok = False
            diags.append(f"transported u depends on the lift for w{list(w.word)}")
        if tr.naturality_failures:
            equiv_ok = False
            diags += tr.naturality_failures
        if tr.u_prime != u:
            equiv_ok = False
            diags.append(f"u'(w{list(w.word)}) != u(w{list(w.word)})")
    if structure is not None:
        new = EquivariantStructure(result, structure.group, transported)
        bad = new.contract_failures() + new.cocycle_failures(gd.rd)
        if bad:
            equiv_ok = False
            diags += bad
    return GammaConvolutionReport(
        result, kappa, transported, iso_ok, equiv_ok, eta_ok, convention, diags, lifts_checked, inv
    )


def check_key_prop(gd: GammaData, xi: TorusPoint, convention: str = "unsigned") -> GammaConvolutionReport:
    module, structure = e_xi_module(gd.rd, xi)
    return gamma_convolve(gd, module, structure, convention)


@dataclass
class TowerLevel:
    n: int
    dim: int
    report: GammaConvolutionReport
    projection_ok: bool


@dataclass
class TowerReport:
    levels: list[TowerLevel]

    @property
    def passed(self) -> bool:
        return all(l.report.passed and l.projection_ok for l in self.levels)


def check_unipotent_tower(gd: GammaData, xi: TorusPoint, n_max: int) -> TowerReport:
    if n_max < 1:
        raise GammaPreconditionError("n_max must be at least 1")
    levels = []
    prev_tables = None
    for n in range(1, n_max + 1):
        module = unipotent_module(xi, n)
        rep = gamma_convolve(gd, module)
        tables = [ReductionTable(l, gd.c, module) for l in gd.lambdas]
        ok = True
        if prev_tables is not None:
            proj = unipotent_projection(gd.rd.rank, n)
            for ks in _box([t.n for t in tables], _box_radius(len(tables))):
                if proj @ multi_R(tables, ks) != multi_R(prev_tables, ks) @ proj:
                    ok = False
                    rep.diagnostics.append(f"projection incompatible at level {n}, k={list(ks)}")
                    break
            if proj @ rep.kappa != levels[-1].report.kappa @ proj:
                ok = False
        levels.append(TowerLevel(n, module.dim, rep, ok))
        prev_tables = tables
    return TowerReport(levels)


@dataclass
class ETheta:
    module: MultiCosetModule
    components: list[GammaConvolutionReport]
    block_failures: list[str]
    eta_independent: bool

    @property
    def passed(self) -> bool:
        return all(c.iso_ok for c in self.components) and not self.block_failures and self.eta_independent


def check_e_theta(gd: GammaData, xi: TorusPoint, convention: str = "unsigned") -> ETheta:
    E = e_theta_module(gd.rd, xi)
    comps = []
    for comp in E.components:
        kappa, _, diags, inv = _kappa_checks(gd, comp)
        morph = verify_morphism(kappa, comp, comp)
        comps.append(
            GammaConvolutionReport(
                comp, kappa, {}, morph.passed and not diags and det(kappa) != 0, True, True,
                convention, diags + morph.failures, 0, inv,
            )
        )
    failures = E.contract_failures() + E.cocycle_failures(gd.rd)
    eta_ok = True
    for w in E.group:
        perm, mats = E.blocks[w.matrix]
        for j, src in enumerate(E.components):
            tr = transport_block(gd, w, src, E.components[perm[j]], mats[j], convention)
            comps[j].lifts_checked += len(tr.by_lift)
            if not tr.eta_independent:
                eta_ok = False
                failures.append(f"block {j} of w{list(w.word)} depends on the lift")
            failures += tr.naturality_failures
            if tr.u_prime != mats[j]:
                failures.append(f"block {j} of w{list(w.word)} not preserved")
    return ETheta(E, comps, failures, eta_ok)
