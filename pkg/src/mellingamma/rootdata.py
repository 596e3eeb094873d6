"""Root data on Z^n, Weyl groups as finite integer matrix groups, and the
combinatorics of W-stable cocharacter families."""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations, permutations, product
from math import factorial, gcd, prod
from typing import Mapping, Sequence

from mellingamma.exactalg import QMatrix, det, inverse, rank

DEFAULT_GROUP_CAP = 10_000
_ORDER_PROBE = 240

IntMatrix = tuple[tuple[int, ...], ...]
IntVector = tuple[int, ...]


class InvalidRootDatum(ValueError):
    pass


class GroupTooLarge(RuntimeError):
    def __init__(self, cap: int):
        super().__init__(f"group too large (more than {cap} elements)")
        self.cap = cap


class FamilyNotStable(ValueError):
    pass


def _mat_mul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    cols = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(r, c)) for c in cols) for r in a)


def _mat_vec(a: IntMatrix, v: Sequence) -> tuple:
    return tuple(sum(x * y for x, y in zip(r, v)) for r in a)


def _identity(n: int) -> IntMatrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def _to_int_matrix(m: QMatrix) -> IntMatrix:
    out = []
    for r in m.rows:
        if any(x.denominator != 1 for x in r):
            raise InvalidRootDatum("matrix inverse is not integral")
        out.append(tuple(int(x) for x in r))
    return tuple(out)


def permutation_sign(perm: Sequence[int]) -> int:
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@dataclass(frozen=True)
class WeylElement:
    matrix: IntMatrix
    word: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.matrix)

    @cached_property
    def qmatrix(self) -> QMatrix:
        return QMatrix(self.matrix)

    @cached_property
    def dual_matrix(self) -> IntMatrix:
        """Contragredient action on the dual space: (g^-1)^T."""
        return _to_int_matrix(inverse(self.qmatrix).T)

    @cached_property
    def sign(self) -> int:
        return int(det(self.qmatrix))

    def act(self, cocharacter: Sequence[int]) -> IntVector:
        return _mat_vec(self.matrix, cocharacter)

    def act_dual(self, mu: Sequence) -> tuple:
        return _mat_vec(self.dual_matrix, mu)

    def is_identity(self) -> bool:
        return self.matrix == _identity(self.rank)

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        return WeylElement(_mat_mul(self.matrix, other.matrix), self.word + other.word)


@dataclass(frozen=True)
class RootDatum:
    rank: int
    weyl_generators: tuple[IntMatrix, ...]
    characters: tuple[IntVector, ...] = ()
    roots: tuple[IntVector, ...] | None = None
    preset: str = "explicit"
    cap: int = DEFAULT_GROUP_CAP

    def pairing(self, cocharacter: Sequence, point: Sequence) -> Fraction:
        return sum((Fraction(a) * Fraction(b) for a, b in zip(cocharacter, point)), Fraction(0))

    def identity(self) -> WeylElement:
        return WeylElement(_identity(self.rank), ())

    @cached_property
    def weyl_group(self) -> tuple[WeylElement, ...]:
        return tuple(enumerate_weyl(self))

    @cached_property
    def _by_matrix(self) -> dict[IntMatrix, WeylElement]:
        return {w.matrix: w for w in self.weyl_group}

    def element(self, matrix: IntMatrix) -> WeylElement:
        return self._by_matrix[matrix]

    def multiply(self, a: WeylElement, b: WeylElement) -> WeylElement:
        return self._by_matrix[_mat_mul(a.matrix, b.matrix)]

    def inverse(self, a: WeylElement) -> WeylElement:
        return self._by_matrix[_to_int_matrix(inverse(a.qmatrix))]

    @property
    def order(self) -> int:
        return len(self.weyl_group)


@dataclass(frozen=True)
class TorusPoint:
    """The coset ``coset_rep + Z^n`` of a rational point of the dual Lie algebra."""

    coset_rep: tuple[Fraction, ...]

    def __init__(self, coset_rep: Sequence):
        object.__setattr__(self, "coset_rep", tuple(Fraction(x) for x in coset_rep))

    @property
    def rank(self) -> int:
        return len(self.coset_rep)

    def reduced(self) -> tuple[Fraction, ...]:
        return tuple(x - (x.numerator // x.denominator) for x in self.coset_rep)

    def __eq__(self, other):
        if not isinstance(other, TorusPoint):
            return NotImplemented
        return self.reduced() == other.reduced()

    def __hash__(self):
        return hash(self.reduced())

    def shifted(self, lam: Sequence[int]) -> "TorusPoint":
        return TorusPoint(tuple(x + y for x, y in zip(self.coset_rep, lam)))


def is_integral(vec: Sequence) -> bool:
    return all(Fraction(x).denominator == 1 for x in vec)


# ---------------------------------------------------------------- presets


def cartan_matrix(kind: str, n: int) -> list[list[int]]:
    """Bourbaki-labelled Cartan matrix, entry (i, j) = <alpha_i^vee, alpha_j>."""
    kind = kind.upper()
    a = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    chain = lambda i, j: (a[i].__setitem__(j, -1), a[j].__setitem__(i, -1))  # noqa: E731
    if kind == "A":
        for i in range(n - 1):
            chain(i, i + 1)
    elif kind in ("B", "C"):
        if n < 2:
            raise InvalidRootDatum(f"type {kind}{n} needs rank >= 2")
        for i in range(n - 1):
            chain(i, i + 1)
        if kind == "B":
            a[n - 2][n - 1] = -2
        else:
            a[n - 1][n - 2] = -2
    elif kind == "D":
        if n < 3:
            raise InvalidRootDatum("type D needs rank >= 3")
        for i in range(n - 2):
            chain(i, i + 1)
        chain(n - 3, n - 1)
    elif kind == "G":
        if n != 2:
            raise InvalidRootDatum("type G only exists in rank 2")
        a = [[2, -1], [-3, 2]]
    elif kind == "F":
        if n != 4:
            raise InvalidRootDatum("type F only exists in rank 4")
        a = [[2, -1, 0, 0], [-1, 2, -2, 0], [0, -1, 2, -1], [0, 0, -1, 2]]
    elif kind == "E":
        if n not in (6, 7, 8):
            raise InvalidRootDatum("type E exists in ranks 6, 7, 8")
        chain(0, 2)
        chain(2, 3)
        chain(1, 3)
        for i in range(3, n - 1):
            chain(i, i + 1)
    else:
        raise InvalidRootDatum(f"unknown Cartan type {kind!r}")
    return a


def _cartan_datum(kind: str, n: int, cap: int) -> RootDatum:
    a = cartan_matrix(kind, n)
    gens = []
    for i in range(n):
        # s_i(e_j) = e_j - a[j][i] e_i on the coroot basis
        cols = []
        for j in range(n):
            col = [int(k == j) for k in range(n)]
            col[i] -= a[j][i]
            cols.append(col)
        gens.append(tuple(tuple(cols[j][k] for j in range(n)) for k in range(n)))
    simple = [tuple(int(k == i) for k in range(n)) for i in range(n)]
    return RootDatum(n, tuple(gens), (), tuple(simple), f"{kind.upper()}{n}", cap)


def _gl_datum(n: int, cap: int) -> RootDatum:
    gens = []
    for i in range(n - 1):
        m = [list(r) for r in _identity(n)]
        m[i][i] = m[i + 1][i + 1] = 0
        m[i][i + 1] = m[i + 1][i] = 1
        gens.append(tuple(tuple(r) for r in m))
    roots = [tuple(int(k == i) - int(k == i + 1) for k in range(n)) for i in range(n - 1)]
    if n == 1:
        gens = [_identity(1)]
    return RootDatum(n, tuple(gens), ((1,) * n,), tuple(roots), f"GL{n}", cap)


def _block_diag(mats: Sequence[IntMatrix], sizes: Sequence[int], which: int) -> IntMatrix:
    total = sum(sizes)
    out = [list(r) for r in _identity(total)]
    off = sum(sizes[:which])
    m = mats[which]
    for i, r in enumerate(m):
        for j, x in enumerate(r):
            out[off + i][off + j] = x
    return tuple(tuple(r) for r in out)


def _product_datum(factors: Sequence[RootDatum], cap: int) -> RootDatum:
    sizes = [f.rank for f in factors]
    total = sum(sizes)
    gens = []
    for k, f in enumerate(factors):
        for g in f.weyl_generators:
            gens.append(_block_diag([g if i == k else _identity(s) for i, s in enumerate(sizes)], sizes, k))
    roots = []
    for k, f in enumerate(factors):
        off = sum(sizes[:k])
        for r in f.roots or ():
            v = [0] * total
            v[off : off + len(r)] = r
            roots.append(tuple(v))
    chars = []
    for k, f in enumerate(factors):
        off = sum(sizes[:k])
        for c in f.characters:
            v = [0] * total
            v[off : off + len(c)] = c
            chars.append(tuple(v))
    name = "x".join(f.preset for f in factors)
    return RootDatum(total, tuple(gens), tuple(chars), tuple(roots), name, cap)


def build_root_datum(datum: Mapping, cap: int | None = None) -> RootDatum:
    """Build and validate a root datum from a preset or explicit generators.

    Accepted forms: ``{"preset": "GL", "rank": n}``, ``{"preset": "SL", "rank": n}``
    (type A_{n-1}), ``{"preset": "A"|"B"|"C"|"D"|"G"|"F"|"E", "rank": n}``,
    ``{"preset": "product", "factors": [...]}`` and
    ``{"generators": [[[...]], ...], "characters": [...]}``.
    """
    cap = cap if cap is not None else int(datum.get("cap", DEFAULT_GROUP_CAP))
    if "generators" in datum:
        gens = tuple(tuple(tuple(int(x) for x in r) for r in g) for g in datum["generators"])
        if not gens:
            raise InvalidRootDatum("explicit root datum needs at least one generator")
        n = len(gens[0])
        chars = tuple(tuple(int(x) for x in c) for c in datum.get("characters", ()))
        roots = datum.get("roots")
        rd = RootDatum(
            n, gens, chars, tuple(tuple(int(x) for x in r) for r in roots) if roots else None, "explicit", cap
        )
    else:
        preset = str(datum.get("preset", "")).upper()
        if preset == "PRODUCT":
            factors = [build_root_datum(f, cap) for f in datum.get("factors", ())]
            if not factors:
                raise InvalidRootDatum("product preset needs factors")
            rd = _product_datum(factors, cap)
        else:
            try:
                n = int(datum["rank"])
            except (KeyError, TypeError, ValueError):
                raise InvalidRootDatum("preset root datum needs an integer 'rank'") from None
            if n < 1:
                raise InvalidRootDatum("rank must be positive")
            if preset == "GL":
                rd = _gl_datum(n, cap)
            elif preset == "SL":
                if n < 2:
                    raise InvalidRootDatum("SL(n) needs n >= 2")
                rd = _cartan_datum("A", n - 1, cap)
            elif preset in ("A", "B", "C", "D", "E", "F", "G"):
                rd = _cartan_datum(preset, n, cap)
            else:
                raise InvalidRootDatum(f"unknown preset {datum.get('preset')!r}")
        if "characters" in datum:
            rd = RootDatum(
                rd.rank, rd.weyl_generators, tuple(tuple(int(x) for x in c) for c in datum["characters"]),
                rd.roots, rd.preset, cap,
            )
    validate_root_datum(rd)
    return rd


def validate_root_datum(rd: RootDatum) -> None:
    n = rd.rank
    ident = _identity(n)
    for g in rd.weyl_generators:
        if len(g) != n or any(len(r) != n for r in g):
            raise InvalidRootDatum("invalid root datum: generator has wrong shape")
        if _mat_mul(g, g) != ident:
            raise InvalidRootDatum("invalid root datum: generator is not an involution")
        if abs(det(QMatrix(g))) != 1:
            raise InvalidRootDatum("invalid root datum: generator determinant is not +-1")
    for c in rd.characters:
        if len(c) != n:
            raise InvalidRootDatum("invalid root datum: character has wrong length")
    # finite-order integer matrices in these ranks have order well below this
    for a, b in combinations(rd.weyl_generators, 2):
        m = p = _mat_mul(a, b)
        for _ in range(_ORDER_PROBE):
            if p == ident:
                break
            p = _mat_mul(p, m)
        else:
            raise InvalidRootDatum("invalid root datum: a product of generators has infinite order")
    group = enumerate_weyl(rd)
    if rd.roots:
        closure = root_closure(rd, group)
        for w in group:
            if {w.act(r) for r in closure} != closure:
                raise InvalidRootDatum("invalid root datum: root set is not W-stable")


def root_closure(rd: RootDatum, group: Sequence[WeylElement] | None = None) -> frozenset[IntVector]:
    """The W-orbit of the stored roots (for Cartan presets: all coroots)."""
    group = group if group is not None else rd.weyl_group
    return frozenset(w.act(r) for r in rd.roots or () for w in group)


def enumerate_weyl(rd: RootDatum) -> list[WeylElement]:
    """Breadth-first closure of the generators; deterministic, duplicate-free."""
    n = rd.rank
    start = WeylElement(_identity(n), ())
    seen = {start.matrix: start}
    order = [start]
    queue = deque([start])
    while queue:
        w = queue.popleft()
        for i, g in enumerate(rd.weyl_generators):
            m = _mat_mul(g, w.matrix)
            if m not in seen:
                if len(seen) >= rd.cap:
                    raise GroupTooLarge(rd.cap)
                e = WeylElement(m, (i,) + w.word)
                seen[m] = e
                order.append(e)
                queue.append(e)
    return order


def stabilizer(rd: RootDatum, xi: TorusPoint) -> tuple[WeylElement, ...]:
    mu = xi.coset_rep
    return tuple(w for w in rd.weyl_group if is_integral(a - b for a, b in zip(w.act_dual(mu), mu)))


def sigma_positive(sigma: Sequence[int], cocharacter: Sequence[int]) -> bool:
    s = sum(int(a) * int(b) for a, b in zip(sigma, cocharacter))
    return s > 0


def is_w_stable(rd: RootDatum, lambdas: Sequence[IntVector]) -> bool:
    base = Counter(tuple(l) for l in lambdas)
    return all(Counter(_mat_vec(g, l) for l in lambdas) == base for g in rd.weyl_generators)


def _minors_gcd(mat: Sequence[Sequence[int]], k: int) -> int:
    rows, cols = len(mat), len(mat[0]) if mat else 0
    g = 0
    for rs in combinations(range(rows), k):
        for cs in combinations(range(cols), k):
            d = det(QMatrix([[mat[i][j] for j in cs] for i in rs]))
            g = gcd(g, int(d))
            if g == 1:
                return 1
    return g


def elementary_divisors(mat: Sequence[Sequence[int]]) -> list[int]:
    """Smith invariants via determinantal divisors (fine at desk scale)."""
    if not mat or not mat[0]:
        return []
    r = rank(QMatrix(mat))
    out, prev = [], 1
    for k in range(1, r + 1):
        d = _minors_gcd(mat, k)
        out.append(d // prev)
        prev = d
    return out


@dataclass(frozen=True)
class FamilyReport:
    w_stable: bool
    all_sigma_positive: bool
    pr_onto: bool
    saturated: bool
    span_rank: int
    elementary_divisors: tuple[int, ...]
    pairings: tuple[int, ...]
    unstable_generators: tuple[int, ...] = ()

    @property
    def ok(self) -> bool:
        return self.w_stable and self.all_sigma_positive


def check_lambda_family(rd: RootDatum, lambdas: Sequence[Sequence[int]], sigma: Sequence[int]) -> FamilyReport:
    lambdas = [tuple(int(x) for x in l) for l in lambdas]
    if not lambdas:
        raise ValueError("cocharacter family must be nonempty")
    for l in lambdas:
        if len(l) != rd.rank:
            raise ValueError(f"cocharacter {l} has wrong length")
        if not any(l):
            raise ValueError("cocharacters must be nontrivial")
    base = Counter(lambdas)
    unstable = tuple(
        i for i, g in enumerate(rd.weyl_generators) if Counter(_mat_vec(g, l) for l in lambdas) != base
    )
    pairings = tuple(sum(a * b for a, b in zip(sigma, l)) for l in lambdas)
    # columns are the cocharacters: an n x r matrix
    mat = [[l[i] for l in lambdas] for i in range(rd.rank)]
    divisors = tuple(elementary_divisors(mat))
    span_rank = len(divisors)
    return FamilyReport(
        w_stable=not unstable,
        all_sigma_positive=all(p > 0 for p in pairings),
        pr_onto=span_rank == rd.rank,
        saturated=span_rank == rd.rank and all(d == 1 for d in divisors),
        span_rank=span_rank,
        elementary_divisors=divisors,
        pairings=pairings,
        unstable_generators=unstable,
    )


@dataclass(frozen=True)
class WPrime:
    """The extension of W by the block-preserving permutations of the family."""

    lambdas: tuple[IntVector, ...]
    distinct: tuple[IntVector, ...]
    multiplicities: tuple[int, ...]
    blocks: tuple[tuple[int, ...], ...]
    weyl_order: int
    image_size: int
    s_k_lambda_order: int

    @property
    def r(self) -> int:
        return len(self.lambdas)

    @property
    def k(self) -> int:
        return len(self.distinct)

    @property
    def s_lambda_order(self) -> int:
        return prod(factorial(m) for m in self.multiplicities)

    @property
    def order(self) -> int:
        return self.weyl_order * self.s_lambda_order

    @property
    def image_check(self) -> bool:
        return self.image_size == self.s_k_lambda_order

    def block_of(self, lam: Sequence[int]) -> int:
        return self.distinct.index(tuple(lam))

    def lift(self, w: WeylElement) -> tuple[int, ...]:
        """The canonical lift: eta with lambda_{eta(i)} = w(lambda_i), order kept in blocks."""
        eta = [0] * self.r
        for b, block in enumerate(self.blocks):
            target = self.blocks[self.block_of(w.act(self.distinct[b]))]
            for src, dst in zip(block, target):
                eta[src] = dst
        return tuple(eta)

    def lifts(self, w: WeylElement, cap: int | None = None) -> list[tuple[int, ...]]:
        """All lifts of ``w``: the canonical one composed with block permutations."""
        base = self.lift(w)
        per_block = [list(permutations(block)) for block in self.blocks]
        out = []
        for choice in product(*per_block):
            sigma = list(range(self.r))
            for block, perm in zip(self.blocks, choice):
                for a, b in zip(block, perm):
                    sigma[a] = b
            out.append(tuple(sigma[base[i]] for i in range(self.r)))
            if cap is not None and len(out) >= cap:
                break
        return out

    def is_lift(self, w: WeylElement, eta: Sequence[int]) -> bool:
        return sorted(eta) == list(range(self.r)) and all(
            self.lambdas[eta[i]] == w.act(self.lambdas[i]) for i in range(self.r)
        )


def wprime(rd: RootDatum, lambdas: Sequence[Sequence[int]]) -> WPrime:
    lambdas = tuple(tuple(int(x) for x in l) for l in lambdas)
    if not is_w_stable(rd, lambdas):
        raise FamilyNotStable("family not W-stable")
    distinct: list[IntVector] = []
    for l in lambdas:
        if l not in distinct:
            distinct.append(l)
    blocks = tuple(tuple(i for i, l in enumerate(lambdas) if l == d) for d in distinct)
    mults = tuple(len(b) for b in blocks)
    image = {tuple(distinct.index(w.act(d)) for d in distinct) for w in rd.weyl_group}
    mult_classes = Counter(mults)
    s_k = prod(factorial(c) for c in mult_classes.values())
    wp = WPrime(lambdas, tuple(distinct), mults, blocks, rd.order, len(image), s_k)
    for w in rd.weyl_group:
        if not wp.is_lift(w, wp.lift(w)):
            raise AssertionError("canonical lift violates lambda_{eta(i)} = w(lambda_i)")
    return wp
