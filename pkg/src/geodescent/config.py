"""Run configuration: an INI-style file with CLI flag overrides (flags win)."""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InvariantViolation, ParseError


@dataclass
class RunConfig:
    """Everything one solver run needs, resolved from file plus overrides."""

    dataset: str
    p: float = 2.0
    anchor: str | list[float] = "auto"
    radius: str | float = "auto"
    x0: str | list[float] = "anchor"
    rule: str = "armijo"
    beta: float = 0.5
    t0: str | float = "auto"
    max_halvings: int = 60
    grad_tol: float = 1e-10
    max_iters: int = 100_000
    point_tol: float | None = None
    seed: int = 0
    out: str = "results"
    # bench section
    bench_manifolds: list[tuple[str, int]] = field(default_factory=list)
    bench_p_values: list[float] = field(default_factory=list)
    bench_sizes: list[int] = field(default_factory=list)

    def validate(self):
        if not 0.0 < self.beta < 1.0:
            raise InvariantViolation(f"beta must be in (0, 1), got {self.beta}")
        if self.p < 1.0:
            raise InvariantViolation(f"p must be >= 1, got {self.p}")
        if self.rule not in ("armijo", "constant"):
            raise InvariantViolation(f"rule must be armijo or constant, got {self.rule}")
        if isinstance(self.t0, float) and self.t0 <= 0.0:
            raise InvariantViolation(f"t0 must be > 0, got {self.t0}")
        if isinstance(self.radius, float) and self.radius <= 0.0:
            raise InvariantViolation(f"radius must be > 0, got {self.radius}")


def _float_or_keyword(raw: str, keywords: tuple[str, ...]):
    raw = raw.strip()
    if raw.lower() in keywords:
        return raw.lower()
    if raw.lower() in ("inf", "+inf", "infinity"):
        return math.inf
    return float(raw)


def _coords_or_keyword(raw: str, keywords: tuple[str, ...]):
    raw = raw.strip()
    if raw.lower() in keywords:
        return raw.lower()
    return [float(v) for v in raw.replace(",", " ").split()]


def load_run_config(path, overrides: dict | None = None) -> RunConfig:
    """Parse a config file and apply non-None flag overrides on top."""
    path = Path(path)
    if not path.exists():
        raise ParseError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as e:
        raise ParseError(f"{path}: {e}") from e

    try:
        problem = parser["problem"] if parser.has_section("problem") else {}
        rule = parser["rule"] if parser.has_section("rule") else {}
        stop = parser["stop"] if parser.has_section("stop") else {}
        run = parser["run"] if parser.has_section("run") else {}
        bench = parser["bench"] if parser.has_section("bench") else {}

        dataset = problem.get("dataset", "")
        cfg = RunConfig(dataset=dataset)
        if "p" in problem:
            cfg.p = float(problem["p"])
        if "anchor" in problem:
            cfg.anchor = _coords_or_keyword(problem["anchor"], ("auto",))
        if "radius" in problem:
            cfg.radius = _float_or_keyword(problem["radius"], ("auto",))
        if "x0" in problem:
            cfg.x0 = _coords_or_keyword(problem["x0"], ("anchor",))

        if "rule" in rule:
            cfg.rule = rule["rule"].strip().lower()
        if "beta" in rule:
            cfg.beta = float(rule["beta"])
        if "t0" in rule:
            cfg.t0 = _float_or_keyword(rule["t0"], ("auto",))
        if "max_halvings" in rule:
            cfg.max_halvings = int(rule["max_halvings"])

        if "grad_tol" in stop:
            cfg.grad_tol = float(stop["grad_tol"])
        if "max_iters" in stop:
            cfg.max_iters = int(stop["max_iters"])
        if "point_tol" in stop:
            cfg.point_tol = float(stop["point_tol"])

        if "seed" in run:
            cfg.seed = int(run["seed"])
        if "out" in run:
            cfg.out = run["out"].strip()

        if "manifolds" in bench:
            pairs = []
            for item in bench["manifolds"].split(","):
                item = item.strip()
                if not item:
                    continue
                tag, _, dim = item.partition(":")
                pairs.append((tag.strip(), int(dim)))
            cfg.bench_manifolds = pairs
        if "p_values" in bench:
            cfg.bench_p_values = [
                float(v) for v in bench["p_values"].split(",") if v.strip()
            ]
        if "sizes" in bench:
            cfg.bench_sizes = [int(v) for v in bench["sizes"].split(",") if v.strip()]
    except (ValueError, KeyError) as e:
        raise ParseError(f"{path}: bad value ({e})") from e

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key == "t0":
            value = _float_or_keyword(str(value), ("auto",))
        setattr(cfg, key, value)

    cfg.validate()
    return cfg
