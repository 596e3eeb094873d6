"""The acceptance matrix, runnable from the command line and from tests."""
from __future__ import annotations

import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Any

from mellingamma.checks import SUITE_CHECKS
from mellingamma.config import parse_config
from mellingamma.derham import gm2_koszul_check, gm_exp_kummer_cohomology
from mellingamma.exactalg import QMatrix
from mellingamma.exactalg.rational import format_rational
from mellingamma.mellin import MonodromicModule, kummer_module, tor, unipotent_module

GL2 = {"preset": "GL", "rank": 2}
GL3 = {"preset": "GL", "rank": 3}
B2 = {"preset": "B", "rank": 2}
STD2 = [[1, 0], [0, 1]]
DOUBLE2 = [[1, 0], [1, 0], [0, 1], [0, 1]]
STD3 = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]

GL2_XIS = [["0", "0"], ["1/2", "1/2"], ["1/3", "2/3"]]
GL3_XIS = [["0", "0", "0"], ["0", "0", "1/2"], ["1/3", "1/3", "1/3"]]
C_VALUES = ["1", "-1", "1/3"]

CRITERIA = {
    1: ("key-prop suite", 60.0),
    2: ("unipotent tower", 30.0),
    3: ("coinvariant dimensions", 20.0),
    4: ("Tor and Koszul", 20.0),
    5: ("de Rham multiplier", 30.0),
    6: ("structure contracts", None),
    7: ("W' combinatorics", None),
    8: ("convention discrimination", None),
}


@dataclass(frozen=True)
class Case:
    id: str
    criterion: int
    kind: str
    params: Any
    smoke: bool = False
    expect: tuple = ()


def _cfg(rd, lambdas=None, xi=None, c="1", **options) -> dict:
    out: dict = {"root_datum": rd}
    if lambdas is not None:
        out["lambdas"] = lambdas
    if xi is not None:
        out["xi"] = xi
    out["c"] = c
    if options:
        out["options"] = options
    return out


def _xi_tag(xi) -> str:
    return ",".join(xi)


def gamma_inputs() -> list[tuple[str, dict, bool]]:
    """(tag, config, is_gl2) for every key-prop tuple of the matrix."""
    out = []
    for xi in GL2_XIS:
        for c in C_VALUES:
            out.append((f"gl2/std/xi={_xi_tag(xi)}/c={c}", _cfg(GL2, STD2, xi, c), True))
    out.append(("gl2/double/xi=0,0/c=1", _cfg(GL2, DOUBLE2, ["0", "0"]), True))
    for xi in GL3_XIS:
        out.append((f"gl3/std/xi={_xi_tag(xi)}/c=1", _cfg(GL3, STD3, xi), False))
    return out


def build_cases(convention: str = "unsigned") -> list[Case]:
    cases: list[Case] = []
    gi = gamma_inputs()
    for tag, cfg, gl2 in gi:
        cfg = dict(cfg, options={"convention": convention})
        cases.append(Case(f"ac1/{tag}", 1, "check", ("key-prop", cfg), gl2))
    for xi in GL2_XIS:
        cases.append(Case(f"ac2/gl2/xi={_xi_tag(xi)}", 2, "check", ("unipotent", _cfg(GL2, STD2, xi, n_max=4)), True))
    for xi in GL3_XIS:
        cases.append(Case(f"ac2/gl3/xi={_xi_tag(xi)}", 2, "check", ("unipotent", _cfg(GL3, STD3, xi, n_max=4))))
    coinv = [
        ("gl2/xi=0,0", _cfg(GL2, xi=["0", "0"]), 2, True),
        ("gl2/xi=1/3,2/3", _cfg(GL2, xi=["1/3", "2/3"]), 1, True),
        ("gl3/xi=0,0,0", _cfg(GL3, xi=["0", "0", "0"]), 6, False),
        ("gl3/xi=0,0,1/2", _cfg(GL3, xi=["0", "0", "1/2"]), 2, False),
        ("b2/xi=0,0", _cfg(B2, xi=["0", "0"]), 8, False),
    ]
    for tag, cfg, dim, gl2 in coinv:
        cases.append(Case(f"ac3/{tag}", 3, "check", ("coinvariants", cfg), gl2, (("dim", dim),)))
    for n in (1, 2, 3):
        cases.append(Case(f"ac4/self-tor/rank={n}", 4, "tor-binomial", n, n <= 2))
    cases.append(Case("ac4/distinct-cosets", 4, "tor-distinct", None, True))
    cases.append(Case("ac4/vanishing", 4, "tor-vanishing", (20260101, 50), True))
    cases.append(Case("ac5/gm-grid", 5, "derham-grid", None, True))
    for tag, cfg, gl2 in gi:
        cases.append(Case(f"ac5/multiplier/{tag}", 5, "check", ("multiplier", cfg), gl2))
    cases.append(Case("ac5/gm2-factorization", 5, "gm2-factor", (20260102, 20), True))
    contract_inputs = [(f"gl2/xi={_xi_tag(x)}", GL2, x, True) for x in GL2_XIS]
    contract_inputs += [(f"gl3/xi={_xi_tag(x)}", GL3, x, False) for x in GL3_XIS]
    contract_inputs += [(f"b2/xi={_xi_tag(x)}", B2, x, False) for x in (["0", "0"], ["1/2", "0"], ["1/2", "1/2"])]
    for tag, rd, xi, gl2 in contract_inputs:
        cases.append(Case(f"ac6/{tag}", 6, "check", ("contracts", _cfg(rd, xi=xi)), gl2))
    families = [
        ("gl2/std", _cfg(GL2, STD2), True),
        ("gl2/double", _cfg(GL2, DOUBLE2), True),
        ("gl2/std+diag", _cfg(GL2, [[1, 0], [0, 1], [1, 1]]), True),
        ("gl3/std", _cfg(GL3, STD3), False),
        ("gl3/double", _cfg(GL3, STD3 + STD3), False),
    ]
    for tag, cfg, gl2 in families:
        cases.append(Case(f"ac7/{tag}", 7, "check", ("wprime", cfg), gl2))
    for tag, cfg, gl2 in gi:
        cases.append(Case(f"ac8/{tag}", 8, "conventions", cfg, gl2))
    return sorted(cases, key=lambda c: c.id)


# ------------------------------------------------------------- case kinds


def random_module(rng: random.Random, rep, dim: int) -> MonodromicModule:
    """A random module on the coset of ``rep``: polynomials in one nilpotent, conjugated."""
    n = len(rep)
    a = QMatrix([[Fraction(rng.randint(-2, 2)) if j > i else 0 for j in range(dim)] for i in range(dim)], dim)
    powers = [QMatrix.identity(dim)]
    for _ in range(dim):
        powers.append(powers[-1] @ a)
    while True:
        p = QMatrix([[rng.randint(-2, 2) for _ in range(dim)] for _ in range(dim)], dim)
        if p.det() != 0:
            break
    p_inv = p.inverse()
    nu = []
    for i in range(n):
        m = QMatrix.scalar(dim, rep[i])
        for k in range(1, dim):
            coeff = rng.randint(-1, 1)
            if coeff:
                m = m + powers[k].scale(coeff)
        nu.append(p @ m @ p_inv)
    return MonodromicModule(tuple(rep), tuple(nu)).validate()


def _tor_vanishing(seed: int, count: int) -> dict:
    rng = random.Random(seed)
    cosets = [Fraction(0), Fraction(1, 2), Fraction(1, 3), Fraction(2, 3)]
    hypothesis_true = 0
    violations = []
    for t in range(count):
        n = rng.choice((1, 2))
        xi = tuple(rng.choice(cosets) for _ in range(n))
        level = rng.randint(1, 3)
        L = unipotent_module(xi, level)
        if rng.random() < 0.5:
            rep = xi
        else:
            rep = tuple(rng.choice(cosets) for _ in range(n))
        # shift by a lattice vector so the descent normalization is exercised
        rep = tuple(x + rng.randint(-2, 2) for x in rep)
        F = random_module(rng, rep, rng.randint(1, 4))
        if not any(tor(L, F)):
            hypothesis_true += 1
            if any(tor(kummer_module(xi), F)):
                violations.append(t)
    return {
        "passed": not violations,
        "details": {"instances": count, "hypothesis_true": hypothesis_true, "violations": violations},
    }


def _gm_grid() -> dict:
    rows = []
    ok = True
    for c in ("1", "-1", "2", "1/3"):
        for s in ("0", "1/2", "-3/4", "5"):
            r = gm_exp_kummer_cohomology(Fraction(c), Fraction(s))
            good = (r.dim_ker, r.dim_coker) == (0, 1) and r.stabilized
            ok &= good
            rows.append(r.to_json())
    return {"passed": ok, "details": {"grid": rows}}


def _gm2_factor(seed: int, count: int) -> dict:
    rng = random.Random(seed)
    rows = []
    ok = True
    for _ in range(count):
        c = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 3))
        s1, s2 = (Fraction(rng.randint(-8, 8), rng.choice([1, 1, 2, 3, 4])) for _ in range(2))
        k = gm2_koszul_check(c, s1, s2)
        expected = gm_exp_kummer_cohomology(c, s1).dim_coker * gm_exp_kummer_cohomology(c, s2).dim_coker
        good = k.degree0 == expected and k.stabilized
        ok &= good
        rows.append({"c": format_rational(c), "s": [format_rational(s1), format_rational(s2)],
                     "degree0": k.degree0, "product": expected})
    return {"passed": ok, "details": {"triples": rows}}


def _conventions(cfg: dict) -> dict:
    out = {}
    for conv in ("unsigned", "signed"):
        res = SUITE_CHECKS["key-prop"](parse_config(dict(cfg, options={"convention": conv})))
        out[conv] = {"eta_independent": res["details"]["eta_independent"], "passed": res["passed"]}
    # the signed run only has to be reported; the unsigned one must be lift independent
    return {"passed": out["unsigned"]["eta_independent"], "details": out}


def run_case(case: Case) -> dict:
    if case.kind == "check":
        name, cfg = case.params
        res = SUITE_CHECKS[name](parse_config(cfg))
        passed, details = res["passed"], res["details"]
        for key, value in case.expect:
            if details.get(key) != value:
                passed = False
                details.setdefault("expectation_failures", []).append(f"{key}: expected {value}, got {details.get(key)}")
    elif case.kind == "tor-binomial":
        n = case.params
        k = kummer_module((0,) * n)
        dims = list(tor(k, k))
        passed, details = dims == [comb(n, i) for i in range(n + 1)], {"tor": dims}
    elif case.kind == "tor-distinct":
        dims = [list(tor(kummer_module((0,) * n), kummer_module((Fraction(1, 2),) * n))) for n in (1, 2, 3)]
        passed, details = not any(any(d) for d in dims), {"tor": dims}
    else:
        fn = {"tor-vanishing": _tor_vanishing, "derham-grid": _gm_grid, "gm2-factor": _gm2_factor,
              "conventions": _conventions}[case.kind]
        res = fn(*case.params) if isinstance(case.params, tuple) else fn(case.params) if case.params is not None else fn()
        passed, details = res["passed"], res["details"]
    return {"id": case.id, "criterion": case.criterion, "passed": bool(passed), "details": details}


@dataclass
class SuiteResult:
    cases: list[dict] = field(default_factory=list)
    seconds_by_criterion: dict[int, float] = field(default_factory=dict)

    def criterion_passed(self, k: int) -> bool:
        mine = [c for c in self.cases if c["criterion"] == k]
        return bool(mine) and all(c["passed"] for c in mine)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.cases)

    def criteria(self) -> list[dict]:
        out = []
        for k, (name, _) in CRITERIA.items():
            if any(c["criterion"] == k for c in self.cases):
                out.append({"criterion": k, "name": name, "passed": self.criterion_passed(k)})
        return out


def _timed(case: Case) -> tuple[dict, float]:
    t = time.perf_counter()
    res = run_case(case)
    return res, time.perf_counter() - t


def run_suite(profile: str = "full", convention: str = "unsigned", jobs: int = 1,
              criteria: set[int] | None = None) -> SuiteResult:
    cases = [c for c in build_cases(convention) if profile == "full" or c.smoke]
    if criteria is not None:
        cases = [c for c in cases if c.criterion in criteria]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_timed, cases))
    else:
        results = [_timed(c) for c in cases]
    out = SuiteResult()
    for case, (res, secs) in zip(cases, results):
        out.cases.append(res)
        out.seconds_by_criterion[case.criterion] = out.seconds_by_criterion.get(case.criterion, 0.0) + secs
    out.cases.sort(key=lambda r: r["id"])
    return out
