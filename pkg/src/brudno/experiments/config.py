"""Experiment configuration: YAML files checked against a fixed schema.

Every key is declared below; unknown keys are rejected.  :func:`validate`
never raises and returns every problem it finds.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

import yaml

from ..errors import InvalidInputError

KINDS = ("classical-brudno", "quantum-brudno", "encoding-selftest", "semimeasure-audit")
CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


@dataclass
class Diagnostic:
    path: str
    category: str
    message: str

    def __str__(self):
        return f"{self.path}: [{self.category}] {self.message}"


class ConfigError(InvalidInputError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


# -- schema ----------------------------------------------------------------------------
# key -> (checker name, default); a default of REQUIRED marks a mandatory key

REQUIRED = object()

COMMON = {
    "kind": ("kind", REQUIRED),
    "seed": ("int", REQUIRED),
    "name": ("str", None),
    "description": ("str", ""),
    "log_base": ("log_base", 2),
}

SCHEMAS = {
    "classical-brudno": {
        "source": ("source", REQUIRED),
        "family": ("family", {"preset": "default"}),
        "exhaustive_n": ("int_list", list(range(1, 13))),
        "sampled_n": ("int_list", [256, 512, 1024, 2048, 4096]),
        "eps": ("pos_list", [0.05, 0.1]),
        "samples": ("pos_int", 100),
        "counting_c": ("int_list", list(range(1, 13))),
        "rate_tolerance": ("pos_float", 0.05),
        "g_tolerance": ("pos_float", 0.03),
        "seed_fraction": ("fraction", 0.95),
        "max_exhaustive_n": ("pos_int", 12),
        "enumeration_cap": ("pos_int", 2 ** 20),
        "exact_cap": ("pos_int", 2 ** 16),
    },
    "quantum-brudno": {
        "state": ("state", REQUIRED),
        "family": ("qfamily", [{"state": "experiment", "weight": 0.5},
                               {"state": "tracial", "weight": 0.25}]),
        "n": ("int_list", [8, 10, 12]),
        "eps": ("pos_list", [0.1, 0.2]),
        "samples": ("pos_int", 200),
        "site_cap": ("pos_int", 12),
        "dominance_n_max": ("pos_int", 10),
        "compatibility_n_max": ("pos_int", 11),
        "reduction_n_max": ("pos_int", 12),
        "large_n_max": ("nonneg_int", 1000),
        "slack_limit": ("pos_float", 0.15),
        "warn_below": ("pos_float", 1e-6),
        "near_singular": ("choice:warn,reject", "warn"),
    },
    "encoding-selftest": {
        "max_length": ("pos_int", 16),
        "pair_bound": ("pos_int", 2 ** 16),
        "int_range": ("pos_int", 1000),
        "random_vectors": ("pos_int", 100),
        "max_degree": ("pos_int", 3),
        "max_coefficient": ("pos_int", 9),
        "max_word_length": ("pos_int", 3),
    },
    "semimeasure-audit": {
        "family": ("family", {"preset": "default"}),
        "n_max": ("pos_int", 12),
        "counting_c": ("int_list", list(range(1, 13))),
        "dominance_n_max": ("pos_int", 10),
        "max_exhaustive_n": ("pos_int", 12),
        "enumeration_cap": ("pos_int", 2 ** 20),
    },
}

SOURCE_KEYS = {
    "bernoulli": {"type", "p", "probabilities"},
    "markov": {"type", "transition"},
    "doubling": {"type", "orbit_length", "x0", "cuts"},
    "rotation": {"type", "alpha", "orbit_length", "x0", "cuts"},
}
FAMILY_KEYS = {"preset", "weighting", "total", "extra"}
MEMBER_KEYS = {"model", "weight", "p", "probabilities", "transition"}
MEMBER_MODELS = ("bernoulli", "markov", "kt", "markov-kt", "source")
STATE_KEYS = {
    "iid-product": {"type", "single_site"},
    "mixture-of-products": {"type", "components", "weights"},
}


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _is_num(x) -> bool:
    return (isinstance(x, (int, float)) and not isinstance(x, bool)) or _is_rational_str(x)


def _is_rational_str(x) -> bool:
    if not isinstance(x, str):
        return False
    try:
        Fraction(x.strip())
    except (ValueError, ZeroDivisionError):
        return False
    return True


def number(x) -> float:
    return float(Fraction(x.strip())) if isinstance(x, str) else float(x)


class _Checker:
    def __init__(self):
        self.diags = []

    def add(self, path, category, message):
        self.diags.append(Diagnostic(path, category, message))

    def unknown(self, path, mapping, allowed):
        for key in sorted(set(mapping) - set(allowed)):
            self.add(f"{path}.{key}" if path else key, "unknown-key", "not a recognised key")

    def check(self, kind, path, value):
        if kind.startswith("choice:"):
            options = kind.split(":", 1)[1].split(",")
            if value not in options:
                self.add(path, "value", f"must be one of {options}")
            return
        getattr(self, "check_" + kind)(path, value)

    def check_kind(self, path, v):
        if v not in KINDS:
            self.add(path, "value", f"must be one of {list(KINDS)}")

    def check_log_base(self, path, v):
        if v != 2:
            self.add(path, "value", "all logarithms are base 2; log_base must be 2")

    def check_str(self, path, v):
        if not isinstance(v, str):
            self.add(path, "type", "must be a string")

    def check_int(self, path, v):
        if not _is_int(v):
            self.add(path, "type", "must be an integer")

    def check_pos_int(self, path, v):
        if not _is_int(v) or v < 1:
            self.add(path, "type", "must be a positive integer")

    def check_nonneg_int(self, path, v):
        if not _is_int(v) or v < 0:
            self.add(path, "type", "must be a non-negative integer")

    def check_pos_float(self, path, v):
        if not _is_num(v) or number(v) <= 0:
            self.add(path, "type", "must be a positive number")

    def check_fraction(self, path, v):
        if not _is_num(v) or not 0 <= number(v) <= 1:
            self.add(path, "value", "must be a number in [0, 1]")

    def check_int_list(self, path, v):
        if not isinstance(v, list) or not v or not all(_is_int(x) and x >= 1 for x in v):
            self.add(path, "type", "must be a non-empty list of positive integers")

    def check_pos_list(self, path, v):
        if not isinstance(v, list) or not v or not all(_is_num(x) and number(x) > 0 for x in v):
            self.add(path, "type", "must be a non-empty list of positive numbers")

    def check_matrix(self, path, v, stochastic_rows=False):
        if (not isinstance(v, list) or not v or not all(isinstance(r, list) and len(r) == len(v) for r in v)):
            self.add(path, "type", "must be a square matrix given as a list of rows")
            return False
        for i, row in enumerate(v):
            for j, x in enumerate(row):
                if not (_is_num(x) or isinstance(x, str)):
                    self.add(f"{path}[{i}][{j}]", "type", "matrix entries must be numbers")
                    return False
        if stochastic_rows:
            for i, row in enumerate(v):
                if any(number(x) < 0 for x in row) or abs(sum(number(x) for x in row) - 1) > 1e-12:
                    self.add(f"{path}[{i}]", "value", "rows must be probability vectors")
        return True

    def check_probabilities(self, path, v):
        if not isinstance(v, list) or len(v) < 2 or not all(_is_num(x) and number(x) >= 0 for x in v):
            self.add(path, "type", "must be a list of >= 2 non-negative numbers")
        elif abs(sum(number(x) for x in v) - 1) > 1e-12:
            self.add(path, "value", "probabilities must sum to 1")

    def check_source(self, path, v):
        if not isinstance(v, dict):
            self.add(path, "type", "must be a mapping")
            return
        t = v.get("type")
        if t not in SOURCE_KEYS:
            self.add(f"{path}.type", "missing" if t is None else "value",
                     f"source type must be one of {sorted(SOURCE_KEYS)}")
            return
        self.unknown(path, v, SOURCE_KEYS[t])
        if t == "bernoulli":
            if ("p" in v) == ("probabilities" in v):
                self.add(path, "missing", "give exactly one of 'p' or 'probabilities'")
            elif "p" in v:
                self.check_fraction(f"{path}.p", v["p"])
            else:
                self.check_probabilities(f"{path}.probabilities", v["probabilities"])
        elif t == "markov":
            if "transition" not in v:
                self.add(f"{path}.transition", "missing", "required")
            else:
                self.check_matrix(f"{path}.transition", v["transition"], stochastic_rows=True)
        else:
            if "orbit_length" in v:
                self.check_pos_int(f"{path}.orbit_length", v["orbit_length"])
            if t == "rotation" and "alpha" not in v:
                self.add(f"{path}.alpha", "missing", "required for a rotation")
            for key in ("alpha", "x0"):
                if key in v and not _is_num(v[key]):
                    self.add(f"{path}.{key}", "type", "must be a number or a fraction string")
            if "cuts" in v:
                self.check_pos_list(f"{path}.cuts", v["cuts"][1:] if isinstance(v["cuts"], list) else v["cuts"])

    def check_family(self, path, v):
        if not isinstance(v, dict):
            self.add(path, "type", "must be a mapping")
            return
        self.unknown(path, v, FAMILY_KEYS)
        preset = v.get("preset", "default")
        if preset not in ("default", "none"):
            self.add(f"{path}.preset", "value", "must be 'default' or 'none'")
        if v.get("weighting", "log-squared") not in ("log-squared", "inverse-square"):
            self.add(f"{path}.weighting", "value", "must be 'log-squared' or 'inverse-square'")
        total = v.get("total", 0.5)
        if not _is_num(total) or number(total) <= 0:
            self.add(f"{path}.total", "type", "must be a positive number")
            total = 0.5
        weight_sum = number(total) if preset == "default" else 0.0
        extra = v.get("extra", [])
        if not isinstance(extra, list):
            self.add(f"{path}.extra", "type", "must be a list of members")
            extra = []
        for i, m in enumerate(extra):
            mp = f"{path}.extra[{i}]"
            if not isinstance(m, dict):
                self.add(mp, "type", "must be a mapping")
                continue
            self.unknown(mp, m, MEMBER_KEYS)
            if m.get("model") not in MEMBER_MODELS:
                self.add(f"{mp}.model", "value", f"must be one of {list(MEMBER_MODELS)}")
            w = m.get("weight")
            if w is None:
                self.add(f"{mp}.weight", "missing", "required")
            elif not _is_num(w) or number(w) <= 0:
                self.add(f"{mp}.weight", "family", "weights must be positive")
            else:
                weight_sum += number(w)
            if m.get("model") == "markov":
                if "transition" not in m:
                    self.add(f"{mp}.transition", "missing", "required for a markov member")
                else:
                    self.check_matrix(f"{mp}.transition", m["transition"], stochastic_rows=True)
            if m.get("model") == "bernoulli" and "p" not in m and "probabilities" not in m:
                self.add(mp, "missing", "a bernoulli member needs 'p' or 'probabilities'")
        if preset == "none" and not extra:
            self.add(path, "family", "an empty family defines no semi-measure")
        if weight_sum > 1 + 1e-12:
            self.add(path, "family", f"member weights sum to {weight_sum:.6g} > 1")

    def check_state(self, path, v):
        if not isinstance(v, dict):
            self.add(path, "type", "must be a mapping")
            return
        t = v.get("type")
        if t not in STATE_KEYS:
            self.add(f"{path}.type", "missing" if t is None else "value",
                     f"state type must be one of {sorted(STATE_KEYS)}")
            return
        self.unknown(path, v, STATE_KEYS[t])
        if t == "iid-product":
            if "single_site" not in v:
                self.add(f"{path}.single_site", "missing", "required")
            else:
                self.check_matrix(f"{path}.single_site", v["single_site"])
        else:
            comps, weights = v.get("components"), v.get("weights")
            if not isinstance(comps, list) or not comps:
                self.add(f"{path}.components", "missing", "non-empty list of single-site matrices required")
            else:
                for i, c in enumerate(comps):
                    self.check_matrix(f"{path}.components[{i}]", c)
            if not isinstance(weights, list) or not all(_is_num(w) for w in weights):
                self.add(f"{path}.weights", "missing", "list of weights required")
            elif isinstance(comps, list) and len(weights) != len(comps):
                self.add(f"{path}.weights", "value", "one weight per component")

    def check_qfamily(self, path, v):
        if not isinstance(v, list) or not v:
            self.add(path, "type", "must be a non-empty list of {state, weight}")
            return
        total = 0.0
        for i, m in enumerate(v):
            mp = f"{path}[{i}]"
            if not isinstance(m, dict):
                self.add(mp, "type", "must be a mapping")
                continue
            self.unknown(mp, m, {"state", "weight"})
            s = m.get("state")
            if s is None:
                self.add(f"{mp}.state", "missing", "required")
            elif isinstance(s, str):
                if s not in ("experiment", "tracial"):
                    self.add(f"{mp}.state", "value", "named states are 'experiment' and 'tracial'")
            else:
                self.check_state(f"{mp}.state", s)
            w = m.get("weight")
            if w is None:
                self.add(f"{mp}.weight", "missing", "required")
            elif not _is_num(w) or number(w) <= 0:
                self.add(f"{mp}.weight", "family", "weights must be positive")
            else:
                total += number(w)
        if total > 1 + 1e-12:
            self.add(path, "family", f"member weights sum to {total:.6g} > 1")
        if not any(isinstance(m, dict) and m.get("state") == "experiment" for m in v):
            self.add(path, "family", "the family must include the experiment state")


def _resource_checks(c: _Checker, kind: str, cfg: dict):
    if kind == "quantum-brudno":
        cap = cfg.get("site_cap", 12)
        if not _is_int(cap):
            return
        for key in ("n", "dominance_n_max", "compatibility_n_max", "reduction_n_max"):
            val = cfg.get(key)
            vals = val if isinstance(val, list) else [val]
            for x in vals:
                if _is_int(x) and x > cap:
                    c.add(key, "resource", f"n = {x} exceeds site_cap = {cap}")
    elif kind in ("classical-brudno", "semimeasure-audit"):
        cap = cfg.get("max_exhaustive_n", 12)
        key = "exhaustive_n" if kind == "classical-brudno" else "n_max"
        val = cfg.get(key)
        vals = val if isinstance(val, list) else [val]
        for x in vals:
            if _is_int(x) and _is_int(cap) and x > cap:
                c.add(key, "resource", f"n = {x} exceeds max_exhaustive_n = {cap}")
        k = _alphabet_size(cfg.get("source"))
        ecap = cfg.get("enumeration_cap", 2 ** 20)
        for x in vals:
            if _is_int(x) and _is_int(ecap) and k ** x > ecap:
                c.add(key, "resource", f"{k}**{x} words exceed enumeration_cap = {ecap}")


def _alphabet_size(source) -> int:
    if isinstance(source, dict):
        if source.get("type") == "bernoulli" and isinstance(source.get("probabilities"), list):
            return len(source["probabilities"])
        if source.get("type") == "markov" and isinstance(source.get("transition"), list):
            return len(source["transition"])
        if isinstance(source.get("cuts"), list):
            return max(len(source["cuts"]) - 1, 2)
    return 2


def validate(config: Any) -> list:
    """All problems with ``config`` as :class:`Diagnostic` objects; empty when valid."""
    c = _Checker()
    if not isinstance(config, dict):
        c.add("", "type", "the configuration must be a mapping")
        return c.diags
    if not config:
        c.add("", "missing", "empty configuration")
    for key, (checker, default) in COMMON.items():
        if key not in config:
            if default is REQUIRED:
                c.add(key, "missing", "required")
        else:
            c.check(checker, key, config[key])
    kind = config.get("kind")
    if kind not in SCHEMAS:
        return c.diags
    schema = SCHEMAS[kind]
    c.unknown("", config, set(COMMON) | set(schema))
    for key, (checker, default) in schema.items():
        if key not in config:
            if default is REQUIRED:
                c.add(key, "missing", "required")
        else:
            c.check(checker, key, config[key])
    _resource_checks(c, kind, config)
    return c.diags


@dataclass
class ExperimentConfig:
    kind: str
    name: str
    seed: int
    params: dict
    echo: dict = field(default_factory=dict)
    source_path: Optional[str] = None

    def __getitem__(self, key):
        return self.params[key]

    def with_seed(self, seed: int) -> "ExperimentConfig":
        echo = dict(self.echo, seed=seed)
        return ExperimentConfig(self.kind, self.name, seed, dict(self.params), echo, self.source_path)

    def canonical_json(self) -> str:
        return json.dumps(self.echo, sort_keys=True, separators=(",", ":"))


def build(config: dict, name: Optional[str] = None, source_path: Optional[str] = None) -> ExperimentConfig:
    """Validated config with defaults filled in; raises :class:`ConfigError` listing every diagnostic."""
    diags = validate(config)
    if diags:
        raise ConfigError(diags)
    kind = config["kind"]
    params = {}
    for key, (_, default) in SCHEMAS[kind].items():
        params[key] = copy.deepcopy(config.get(key, default))
    echo = copy.deepcopy(config)
    for key, (_, default) in list(COMMON.items()) + list(SCHEMAS[kind].items()):
        if key not in echo and default is not REQUIRED:
            echo[key] = copy.deepcopy(default)
    echo["name"] = config.get("name") or name or kind
    return ExperimentConfig(kind, echo["name"], int(config["seed"]), params, echo, source_path)


def read_yaml(path) -> Any:
    with open(path, encoding="utf-8") as fh:
        return yaml.safe_load(fh)


def shipped_configs() -> dict:
    """Name -> path of the configuration files bundled with the package."""
    return {p.stem: p for p in sorted(CONFIG_DIR.glob("*.yaml"))}


def resolve(path_or_name: str) -> Path:
    p = Path(path_or_name)
    if p.exists():
        return p
    shipped = shipped_configs()
    if path_or_name in shipped:
        return shipped[path_or_name]
    raise FileNotFoundError(f"no config file or shipped example named {path_or_name!r}")


def load(path_or_name: str) -> ExperimentConfig:
    path = resolve(path_or_name)
    raw = read_yaml(path)
    if raw is None:
        raw = {}
    return build(raw, name=path.stem, source_path=str(path))
