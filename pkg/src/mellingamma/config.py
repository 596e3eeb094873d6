"""Run configuration: TOML first, JSON accepted, unknown keys rejected."""
from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

from mellingamma.exactalg.rational import RationalParseError, format_rational, format_vector, parse_rational
from mellingamma.rootdata import DEFAULT_GROUP_CAP, RootDatum, TorusPoint, build_root_datum

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

TOP_KEYS = {"root_datum", "lambdas", "c", "sigma", "xi", "checks", "options"}
OPTION_KEYS = {"n_max", "window", "convention", "cap", "profile", "jobs"}
ROOT_DATUM_KEYS = {"preset", "rank", "factors", "generators", "characters", "roots", "cap"}
CHECK_NAMES = ("key-prop", "unipotent", "e-theta", "multiplier", "coinvariants", "wprime", "tor-demo")


class ConfigError(ValueError):
    def __init__(self, message: str, location: str = ""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


@dataclass(frozen=True)
class RunConfig:
    root_datum: Mapping[str, Any] = field(default_factory=lambda: {"preset": "GL", "rank": 2})
    lambdas: tuple[tuple[int, ...], ...] | None = None
    c: Fraction = Fraction(1)
    sigma: tuple[int, ...] | None = None
    xi: tuple[Fraction, ...] | None = None
    checks: tuple[str, ...] = ()
    n_max: int = 4
    window: int = 24
    convention: str = "unsigned"
    cap: int = DEFAULT_GROUP_CAP
    profile: str = "smoke"
    jobs: int = 1

    def with_overrides(self, **kw) -> "RunConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        if "c" in kw:
            kw["c"] = _rational(kw["c"], "--c")
        if "convention" in kw:
            _convention(kw["convention"], "--convention")
        for key in ("window", "cap", "n_max", "jobs"):
            if key in kw and int(kw[key]) < 1:
                raise ConfigError("must be positive", f"--{key.replace('_', '-')}")
        return replace(self, **kw)

    def root(self) -> RootDatum:
        try:
            return build_root_datum(self.root_datum, self.cap)
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc), "root_datum") from None

    def resolved(self, rd: RootDatum) -> tuple[tuple, tuple, TorusPoint]:
        """(lambdas, sigma, xi) with defaults filled in for ``rd``."""
        n = rd.rank
        lambdas = self.lambdas or tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        for i, l in enumerate(lambdas):
            if len(l) != n:
                raise ConfigError(f"expected length {n}, got {len(l)}", f"lambdas[{i}]")
        sigma = self.sigma
        if sigma is None:
            sigma = rd.characters[0] if rd.characters else None
        if sigma is not None and len(sigma) != n:
            raise ConfigError(f"expected length {n}", "sigma")
        xi = self.xi if self.xi is not None else (Fraction(0),) * n
        if len(xi) != n:
            raise ConfigError(f"expected length {n}, got {len(xi)}", "xi")
        return lambdas, sigma, TorusPoint(xi)

    def echo(self) -> dict:
        return {
            "root_datum": _plain(self.root_datum),
            "lambdas": [list(l) for l in self.lambdas] if self.lambdas else None,
            "c": format_rational(self.c),
            "sigma": list(self.sigma) if self.sigma else None,
            "xi": format_vector(self.xi) if self.xi is not None else None,
            "n_max": self.n_max,
            "window": self.window,
            "convention": self.convention,
            "cap": self.cap,
        }


def _plain(obj):
    if isinstance(obj, Mapping):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def _rational(value, loc: str) -> Fraction:
    try:
        return parse_rational(value)
    except RationalParseError as exc:
        raise ConfigError(str(exc), loc) from None


def _convention(value, loc: str) -> str:
    if value not in ("unsigned", "signed"):
        raise ConfigError(f"convention must be 'unsigned' or 'signed', got {value!r}", loc)
    return value


def _int(value, loc: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"expected an integer, got {value!r}", loc)
    if minimum is not None and value < minimum:
        raise ConfigError(f"must be at least {minimum}", loc)
    return value


def _int_vector(value, loc: str) -> tuple[int, ...]:
    if not isinstance(value, list):
        raise ConfigError("expected a list of integers", loc)
    return tuple(_int(v, f"{loc}[{i}]") for i, v in enumerate(value))


def _check_keys(data: Mapping, allowed: set[str], loc: str) -> None:
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) {', '.join(unknown)}", loc or "config")


def _check_root_datum(data, loc: str) -> None:
    if not isinstance(data, Mapping):
        raise ConfigError("expected a table", loc)
    _check_keys(data, ROOT_DATUM_KEYS, loc)
    for i, f in enumerate(data.get("factors", ())):
        _check_root_datum(f, f"{loc}.factors[{i}]")


def parse_config(data: Mapping) -> RunConfig:
    if not isinstance(data, Mapping):
        raise ConfigError("top level must be a table")
    _check_keys(data, TOP_KEYS, "")
    kw: dict[str, Any] = {}
    if "root_datum" in data:
        _check_root_datum(data["root_datum"], "root_datum")
        kw["root_datum"] = data["root_datum"]
    if "lambdas" in data:
        lam = data["lambdas"]
        if not isinstance(lam, list) or not lam:
            raise ConfigError("expected a nonempty list of integer vectors", "lambdas")
        kw["lambdas"] = tuple(_int_vector(v, f"lambdas[{i}]") for i, v in enumerate(lam))
    if "c" in data:
        kw["c"] = _rational(data["c"], "c")
    if "sigma" in data:
        kw["sigma"] = _int_vector(data["sigma"], "sigma")
    if "xi" in data:
        if not isinstance(data["xi"], list):
            raise ConfigError("expected a list of rationals", "xi")
        kw["xi"] = tuple(_rational(v, f"xi[{i}]") for i, v in enumerate(data["xi"]))
    if "checks" in data:
        checks = data["checks"]
        if not isinstance(checks, list):
            raise ConfigError("expected a list of check names", "checks")
        for i, name in enumerate(checks):
            if name not in CHECK_NAMES:
                raise ConfigError(f"unknown check {name!r}", f"checks[{i}]")
        kw["checks"] = tuple(checks)
    opts = data.get("options", {})
    if not isinstance(opts, Mapping):
        raise ConfigError("expected a table", "options")
    _check_keys(opts, OPTION_KEYS, "options")
    for key in ("n_max", "window", "cap", "jobs"):
        if key in opts:
            kw[key] = _int(opts[key], f"options.{key}", 1)
    if "convention" in opts:
        kw["convention"] = _convention(opts["convention"], "options.convention")
    if "profile" in opts:
        if opts["profile"] not in ("smoke", "full"):
            raise ConfigError("profile must be 'smoke' or 'full'", "options.profile")
        kw["profile"] = opts["profile"]
    return RunConfig(**kw)


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", str(path)) from None
    if path.suffix.lower() == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}", str(path)) from None
    else:
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as toml_exc:
            try:
                data = json.loads(text)
            except json.JSONDecodeError:
                raise ConfigError(f"invalid TOML: {toml_exc}", str(path)) from None
    try:
        return parse_config(data)
    except ConfigError as exc:
        raise ConfigError(str(exc), str(path)) from None
