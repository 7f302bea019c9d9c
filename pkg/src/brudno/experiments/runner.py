"""Run configured experiments and write their artifacts.

A run produces named tables (written as CSV), a list of pass/fail checks, a
few headline metrics and optional SVG charts.  The JSON summary echoes the
config and carries two git-style SHA-1 hashes: one of the config and one of
everything written except the timestamp.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import numpy as np

from .. import classical, encoding, gacs, semimeasure, spinchain, symbolic, typicality
from ..errors import InvalidInputError
from .config import ExperimentConfig, number
from .svg import line_chart

SCHEMA_VERSION = "1"


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class Table:
    header: list
    rows: list = field(default_factory=list)

    def add(self, *row):
        self.rows.append(list(row))


@dataclass
class RunResult:
    config: ExperimentConfig
    tables: dict
    checks: list
    metrics: dict
    charts: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)


# -- object builders -----------------------------------------------------------------------

def _matrix(rows):
    return [[number(x) if not (isinstance(x, str) and "j" in x) else complex(x) for x in r] for r in rows]


def build_source(spec: dict):
    t = spec["type"]
    if t == "bernoulli":
        if "p" in spec:
            return symbolic.Bernoulli.binary(number(spec["p"]))
        return symbolic.Bernoulli([number(x) for x in spec["probabilities"]])
    if t == "markov":
        return symbolic.MarkovSource(_matrix(spec["transition"]))
    cuts = spec.get("cuts")
    partition = symbolic.IntervalPartition(tuple(Fraction(str(c)) for c in cuts)) if cuts else None
    x0 = Fraction(str(spec["x0"])) if "x0" in spec else None
    length = spec.get("orbit_length", 2 ** 16)
    if t == "doubling":
        return symbolic.OrbitSource(symbolic.DoublingMap(), partition, x0, length)
    return symbolic.OrbitSource(symbolic.RotationMap(Fraction(str(spec["alpha"]))), partition, x0,
                                length, ergodic=True)


def _member_model(m: dict, source):
    kind = m["model"]
    if kind == "bernoulli":
        if "p" in m:
            return symbolic.Bernoulli.binary(number(m["p"]))
        return symbolic.Bernoulli([number(x) for x in m["probabilities"]])
    if kind == "markov":
        return symbolic.MarkovSource(_matrix(m["transition"]))
    if kind == "kt":
        return semimeasure.KTEstimator(source.alphabet_size if source is not None else 2)
    if kind == "markov-kt":
        return semimeasure.MarkovKTEstimator(source.alphabet_size if source is not None else 2)
    if source is None or not getattr(source, "exact", False):
        raise InvalidInputError("a 'source' member needs an exact source (bernoulli or markov)")
    return source


def build_family(spec: dict, source=None) -> semimeasure.WeightedFamily:
    weighting = semimeasure.LengthWeighting(spec.get("weighting", "log-squared"))
    members = []
    if spec.get("preset", "default") == "default":
        members = list(semimeasure.default_family(weighting, number(spec.get("total", 0.5))))
    for m in spec.get("extra", []):
        model = _member_model(m, source)
        members.append((semimeasure.LengthWeighted(model, weighting), number(m["weight"])))
    return semimeasure.WeightedFamily(members)


def build_state(spec: dict, warn_below: float = spinchain.NEAR_SINGULAR, near_singular: str = "warn"):
    if spec["type"] == "iid-product":
        return spinchain.IIDProduct(spec["single_site"], warn_below, near_singular)
    comps = [spinchain.IIDProduct(c, warn_below, near_singular) for c in spec["components"]]
    return spinchain.MixtureOfProducts(comps, [number(w) for w in spec["weights"]])


def build_quantum_family(spec: list, state, **kw) -> list:
    out = []
    for m in spec:
        s = m["state"]
        if s == "experiment":
            member = state
        elif s == "tracial":
            member = gacs.tracial_state(state.local_dim)
        else:
            member = build_state(s, **kw)
        out.append((member, number(m["weight"])))
    return out


# -- helpers -------------------------------------------------------------------------------

def _parallel_map(fn, items, jobs: int):
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _derived_seeds(seed: int, stream: int, count: int) -> list:
    return [int(s) for s in np.random.SeedSequence([seed, stream]).generate_state(count)]


def _per_sequence_task(args):
    source_spec, family_spec, grid, seed = args
    source = build_source(source_spec)
    mu = semimeasure.SemiMeasure(build_family(family_spec, source))
    path = source.sample(max(grid), seed)
    return classical.per_sequence_rate(mu, path, grid)


# -- classical ----------------------------------------------------------------------------

def run_classical(cfg: ExperimentConfig, jobs: int = 1) -> RunResult:
    source = build_source(cfg["source"])
    family = build_family(cfg["family"], source)
    mu = semimeasure.SemiMeasure(family)
    h = classical.reference_entropy_rate(source)
    ecap = cfg["enumeration_cap"]
    member = classical.matching_member(family, source)

    exhaustive = Table(["n", "eps", "G_n", "H_n", "G_rate", "H_rate", "mixture_bound", "bound_pass",
                        "mass_A", "mass_A_hat", "mass_A_tilde", "count_A", "alpha_n",
                        "a_hat_bound", "a_hat_pass"])
    bound_ok, a_hat_ok = True, True
    for n in sorted(cfg["exhaustive_n"]):
        dist = symbolic.block_distribution(source, n, ecap)
        if member is not None:
            rep = classical.mixture_bound_check(source, mu, n, member[0], ecap)
            g, bound, passed = rep.G_n, rep.bound, rep.passed
            bound_ok &= passed
        else:
            g = classical.gacs_block_complexity(source, mu, n, exact_cap=ecap).value
            bound, passed = math.nan, None
        hn = symbolic.shannon_entropy(dist)
        for eps in cfg["eps"]:
            ts = classical.typical_sets(dist, h, number(eps), mu, cap=ecap)
            a_hat_ok &= ts.a_hat_bound_holds
            exhaustive.add(n, number(eps), g, hn, g / n, hn / n, bound, passed,
                           ts.masses["A"], ts.masses["A_hat"], ts.masses["A_tilde"], ts.counts["A"],
                           ts.alpha_n, ts.a_hat_bound, ts.a_hat_bound_holds)

    counting = _counting_table(mu, cfg["exhaustive_n"], cfg["counting_c"], ecap)
    violations = sum(1 for r in counting.rows if not r[-1])

    grid = sorted(set(cfg["exhaustive_n"]) | set(cfg["sampled_n"]))
    rate = classical.gacs_rate(source, mu, grid, samples=cfg["samples"], seed=cfg.seed,
                               exact_cap=cfg["exact_cap"])
    rates = Table(["n", "G_n", "G_rate", "stderr", "exact", "H_n"])
    for r in rate.rows:
        rates.add(r.n, r.G_n, r.rate, r.stderr, r.exact, r.H_n)

    seq_grid = sorted(cfg["sampled_n"])
    seeds = _derived_seeds(cfg.seed, 1, cfg["samples"])
    tasks = [(cfg["source"], cfg["family"], seq_grid, s) for s in seeds]
    curves = _parallel_map(_per_sequence_task, tasks, jobs)
    per_seq = Table(["sample", "seed", "n", "rate"])
    for j, (s, curve) in enumerate(zip(seeds, curves)):
        for n, v in curve:
            per_seq.add(j, s, n, v)
    n_top = seq_grid[-1]
    ends = np.array([c[-1][1] for c in curves])
    within = float(np.mean(np.abs(ends - h) <= cfg["rate_tolerance"]))
    top = next(r for r in rate.rows if r.n == n_top)
    se = math.hypot(top.stderr, float(ends.std(ddof=1) / math.sqrt(ends.size)) if ends.size > 1 else 0.0)

    checks = []
    if member is not None:
        checks.append(Check("mixture_bound", bound_ok, f"G_n <= H_n + log2(1/w) + log2(Z/delta(n)) for n in {sorted(cfg['exhaustive_n'])}"))
    checks += [
        Check("a_hat_mass_bound", a_hat_ok, "pi(A_hat) <= 2^(-n eps + alpha_n + 1) on every (n, eps)"),
        Check("counting_bound", violations == 0, f"{violations} violations in {len(counting.rows)} cases"),
        Check("per_sequence_rate", within >= cfg["seed_fraction"],
              f"{within:.2%} of {ends.size} samples within {cfg['rate_tolerance']} of h = {h:.5f} at n = {n_top}"),
        Check("gacs_rate_endpoint", abs(rate.rate_estimate - h) <= cfg["g_tolerance"],
              f"g = {rate.rate_estimate:.5f}, h = {h:.5f}, tolerance {cfg['g_tolerance']}"),
        Check("per_sequence_vs_expected", abs(ends.mean() - top.rate) <= 3 * se,
              f"mean endpoint {ends.mean():.5f} vs G_n/n {top.rate:.5f}, 3 SE = {3 * se:.5f}"),
    ]
    metrics = {"g": rate.rate_estimate, "h": h, "gap": rate.gap, "monotone": rate.monotone,
               "per_sequence_fraction": within, "per_sequence_mean": float(ends.mean()),
               "counting_violations": violations}
    chart = line_chart(
        {"G_n/n": [(r.n, r.rate) for r in rate.rows],
         "H_n/n": [(r.n, r.H_n / r.n) for r in rate.rows if r.H_n is not None],
         "median per-sequence": [(n, float(np.median([c[i][1] for c in curves])))
                                 for i, n in enumerate(seq_grid)]},
        title=f"{cfg.name}: complexity rate", xlabel="n", ylabel="bits per symbol",
        hlines={"h": h}, log_x=True)
    tables = {"exhaustive": exhaustive, "counting": counting, "rates": rates, "per_sequence": per_seq}
    return RunResult(cfg, tables, checks, metrics, {"rates": chart})


def _counting_table(mu, ns, cs, cap) -> Table:
    t = Table(["n", "c", "count", "bound", "mass", "pass"])
    for n in sorted(ns):
        for c in sorted(cs):
            rep = classical.counting_bound_check(mu, c, n, cap)
            t.add(n, c, rep.count, rep.bound, rep.mass, rep.passed)
    return t


# -- quantum ------------------------------------------------------------------------------

def _diagonal_qubit(state) -> bool:
    return (isinstance(state, spinchain.IIDProduct) and state.local_dim == 2
            and state.site_spectrum.vectors is None)


def run_quantum(cfg: ExperimentConfig, jobs: int = 1) -> RunResult:
    kw = dict(warn_below=cfg["warn_below"], near_singular=cfg["near_singular"])
    state = build_state(cfg["state"], **kw)
    family = build_quantum_family(cfg["family"], state, **kw)
    cap = cfg["site_cap"]
    eps_list = [number(e) for e in cfg["eps"]]
    s = state.entropy_rate() if isinstance(state, spinchain.IIDProduct) else None

    items = Table(["n", "eps", "s", "dim", "b_complement", "alpha_n", "alpha_over_n",
                   "item1_value", "item1_bound", "item1_pass",
                   "item2_lower_statement", "item2_lower_proof", "item2_upper", "item2_pass", "item2_proof_pass",
                   "item3_min", "item3_max", "item3_lower", "item3_upper", "item3_pass",
                   "item4_min", "item4_max", "item4_lower", "item4_upper", "slack", "item4_pass"])
    reports = {e: [] for e in eps_list}
    for n in sorted(cfg["n"]):
        mu = gacs.universal_mixture(family, n, cap, verify_dominance=False)
        for k, e in enumerate(eps_list):
            rep = typicality.verify_items_1_2_3(state, family, n, e, cfg["samples"],
                                                seed=_derived_seeds(cfg.seed, 100 * n + k, 1)[0], s=s,
                                                cap=cap, mu=mu)
            reports[e].append(rep)
        del mu
    curves = {e: typicality.verify_item_4(reports[e]) for e in eps_list}
    for e in eps_list:
        for rep, row in zip(reports[e], curves[e].rows):
            v3 = rep.item3.values
            items.add(rep.n, e, rep.s, rep.item2.dim, rep.sets.b_complement_size, rep.alpha_n,
                      rep.sets.alpha_over_n, rep.item1.value, rep.item1.bound, rep.item1.passed,
                      rep.item2.lower_statement, rep.item2.lower_proof, rep.item2.upper,
                      rep.item2.passed, rep.item2.passed_proof_form,
                      _min(v3), _max(v3), rep.item3.lower, rep.item3.upper, rep.item3.passed,
                      _min(row.values), _max(row.values), row.lower, row.upper, row.slack, row.passed)

    member_rows = Table(["n", "member", "weight", "H_upper", "H_lower", "bound", "pass", "min_dominance_eig"])
    member_ok = True
    for n in range(1, cfg["dominance_n_max"] + 1):
        mu = gacs.universal_mixture(family, n, cap, verify_dominance=True)
        for k, (m, w) in enumerate(family):
            rho = spinchain.local_density(m, n, cap)
            upper, bound = gacs.member_bound(mu, k)
            lower = gacs.gacs_lower(rho, mu)
            ok = upper <= bound + 1e-9
            member_ok &= ok
            member_rows.add(n, k, w, upper, lower, bound, ok, mu.dominance[k])

    compat = Table(["n", "end", "max_deviation"])
    compat_ok = True
    for n in range(1, cfg["compatibility_n_max"] + 1):
        big = spinchain.local_density(state, n + 1, cap)
        small = spinchain.local_density(state, n, cap).matrix
        for end in ("first", "last"):
            dev = float(np.abs(spinchain.partial_trace(big, end).matrix - small).max())
            compat_ok &= dev <= 1e-10
            compat.add(n, end, dev)

    eta = gacs.limit_of_quasi_increasing(gacs.eta_sequence(state, min(8, cap)))

    checks_extra, metrics = [], {}
    reduction = Table(["n", "eps", "quantum_count", "classical_count", "equal"])
    if _diagonal_qubit(state):
        red_ok = True
        levels = np.diag(state.single_site).real
        bern = symbolic.Bernoulli(levels)
        for n in range(1, cfg["reduction_n_max"] + 1):
            spec = spinchain.local_density(state, n, cap).spectrum
            dist = symbolic.block_distribution(bern, n)
            for e in eps_list:
                qa = typicality.typical_index_sets(spec.values, spec.values, s, e).A
                q_words = set(spec.basis_index[qa].tolist())
                c_mask = classical.typical_sets(dist, s, e, bern).masks["A"]
                c_words = set(np.flatnonzero(c_mask).tolist())
                red_ok &= q_words == c_words
                reduction.add(n, e, len(q_words), len(c_words), q_words == c_words)
        checks_extra.append(Check("classical_reduction", red_ok,
                                  "diagonal quantum typical set equals the Bernoulli typical set"))
    large = Table(["n", "eps", "item1_value", "item1_bound", "item1_pass", "dim", "item2_lower", "item2_upper", "item2_pass"])
    if cfg["large_n_max"] and _diagonal_qubit(state) and all(_diagonal_qubit(m) for m, _ in family):
        for e in eps_list:
            first = typicality.first_passing_n(state, family, e, cfg["large_n_max"])
            metrics[f"items_1_2_hold_from_n[eps={e}]"] = first
            for n in sorted({max(cfg["n"]), 50, 100, 200, 300, 400, 600, 1000} & set(range(1, cfg["large_n_max"] + 1))):
                c = typicality.class_items_1_2(state, family, n, e, s)
                large.add(n, e, c.item1.value, c.item1.bound, c.item1.passed, c.item2.dim,
                          c.item2.lower_statement, c.item2.upper, c.item2.passed)

    top_n = max(cfg["n"])
    slack_top = max(c.rows[-1].slack for c in curves.values())
    checks = [
        Check("item1_high_probability", all(r.item1.passed for v in reports.values() for r in v),
              "Tr(rho p) >= 1 - eps - 2^(-n eps + alpha_n) on every (n, eps)"),
        Check("item2_dimension", all(r.item2.passed for v in reports.values() for r in v),
              "(1 - eps - 2^(-n eps + alpha_n)) 2^(n(s-eps)) < dim p < 2^(n(s+eps))"),
        Check("item3_minimal_projections", all(r.item3.passed for v in reports.values() for r in v),
              f"2^(-n(s+eps)) <= <psi|rho|psi> <= 2^(-n(s-eps)) for {cfg['samples']} Haar vectors plus 2 eigenvectors"),
        Check("item4_complexity_band", all(c.passed for c in curves.values()),
              "-(1/n) log2 <psi|mu|psi> in [s - 2 eps - slack_n, s + eps + slack_n]"),
        Check("item4_slack_limit", slack_top <= cfg["slack_limit"],
              f"slack at n = {top_n} is {slack_top:.4f} (limit {cfg['slack_limit']})"),
        Check("item4_slack_trend", all(c.slack_decreasing for c in curves.values()), "slack_n non-increasing in n"),
        Check("member_bound", member_ok, "H_upper(rho_k) <= S(rho_k) + log2(1/w_k) for every member and n"),
        Check("compatibility", compat_ok, "both partial traces reproduce the smaller marginal to 1e-10"),
        Check("quasi_increasing_traces", eta.trace_monotone, "traces of the eta sequence never decrease"),
    ] + checks_extra
    metrics.update({"s": s, "slack_at_max_n": slack_top})
    series = {}
    for e, c in curves.items():
        series[f"eps={e} value"] = [(r.n, float(np.mean(r.values))) for r in c.rows]
        series[f"eps={e} lower"] = [(r.n, r.lower) for r in c.rows]
        series[f"eps={e} upper"] = [(r.n, r.upper) for r in c.rows]
    chart = line_chart(series, title=f"{cfg.name}: complexity rate of minimal projections",
                       xlabel="n", ylabel="bits per site", hlines={"s": s} if s is not None else None)
    tables = {"items": items, "members": member_rows, "compatibility": compat,
              "reduction": reduction, "large_n": large}
    return RunResult(cfg, tables, checks, metrics, {"item4": chart})


def _min(v):
    return float(np.min(v)) if len(v) else math.nan


def _max(v):
    return float(np.max(v)) if len(v) else math.nan


# -- encoding self-test -------------------------------------------------------------------

def _random_spec(rng, max_degree: int, max_coef: int) -> encoding.AlgebraicNumberSpec:
    degree = int(rng.integers(1, max_degree + 1))
    coeffs = rng.integers(-max_coef, max_coef + 1, size=degree + 1)
    while coeffs[0] == 0:
        coeffs[0] = rng.integers(-max_coef, max_coef + 1)
    return encoding.AlgebraicNumberSpec(tuple(int(c) for c in coeffs), int(rng.integers(0, degree)))


def random_elementary_vector(rng, max_degree=3, max_coef=9, max_word_length=3) -> dict:
    count = int(rng.integers(1, 5))
    out = {}
    while len(out) < count:
        length = int(rng.integers(0, max_word_length + 1))
        word = encoding.SymbolString(tuple(int(b) for b in rng.integers(0, 2, size=length)))
        out[word] = _random_spec(rng, max_degree, max_coef)
    return out


def run_encoding(cfg: ExperimentConfig, jobs: int = 1) -> RunResult:
    suites = Table(["suite", "cases", "failures"])

    fails, cases = 0, 0
    for index in range(2 ** (cfg["max_length"] + 1) - 1):
        w = encoding.index_to_string(index)
        cases += 1
        fails += encoding.string_to_index(w) != index or len(w) > cfg["max_length"]
    suites.add("tau_bijection", cases, fails)

    bound = cfg["pair_bound"]
    pf, pc = 0, 0
    for z in range(bound):
        p, q = encoding.unpair(z)
        pc += 1
        pf += encoding.pair(p, q) != z
    for p in range(bound.bit_length()):
        for q in range(((bound + 1) >> p) // 2 + 1):
            if encoding.pair(p, q) < bound:
                pc += 1
                pf += encoding.unpair(encoding.pair(p, q)) != (p, q)
    suites.add("pair_unpair", pc, pf)

    examples = {2: 22, -1: 21, 1: 10, 0: 0}
    ef = sum(encoding.int_to_nat(z) != v for z, v in examples.items())
    suites.add("int_code_examples", len(examples), ef)
    r = cfg["int_range"]
    codes = [encoding.int_to_nat(z) for z in range(-r, r + 1)]
    rf = sum(encoding.nat_to_int(c) != z for z, c in zip(range(-r, r + 1), codes))
    rf += len(set(codes)) != len(codes)
    suites.add("int_code_roundtrip", 2 * r + 1, rf)

    rng = np.random.default_rng(cfg.seed)
    vf = 0
    for _ in range(cfg["random_vectors"]):
        v = random_elementary_vector(rng, cfg["max_degree"], cfg["max_coefficient"], cfg["max_word_length"])
        vf += encoding.decode_elementary_vector(encoding.encode_elementary_vector(v)) != v
    suites.add("elementary_vector_roundtrip", cfg["random_vectors"], vf)

    checks = [Check(row[0], row[2] == 0, f"{row[2]} failures in {row[1]} cases") for row in suites.rows]
    return RunResult(cfg, {"suites": suites}, checks, {"suites": len(suites.rows)})


# -- semi-measure audit -------------------------------------------------------------------

def run_audit(cfg: ExperimentConfig, jobs: int = 1) -> RunResult:
    family = build_family(cfg["family"])
    mu = semimeasure.SemiMeasure(family)
    cap = cfg["enumeration_cap"]
    masses = Table(["member", "model", "weight", "n", "length_mass"])
    mass_ok = True
    for k, (m, w) in enumerate(family):
        total = 0.0
        for n in range(cfg["n_max"] + 1):
            lm = semimeasure.length_mass(m, n)
            total += lm
            masses.add(k, repr(m), w, n, lm)
        mass_ok &= total <= 1 + 1e-9
    mix_total = sum(semimeasure.length_mass(mu, n) for n in range(cfg["n_max"] + 1))

    dominance = Table(["member", "weight", "passed", "worst_ratio", "words_checked"])
    dom_ok = True
    for k, (m, w) in enumerate(family):
        rep = semimeasure.dominance_check(mu, m, w, cfg["dominance_n_max"], cap)
        dom_ok &= rep.passed
        dominance.add(k, w, rep.passed, rep.worst_ratio, rep.words_checked)

    counting = _counting_table(mu, range(1, cfg["n_max"] + 1), cfg["counting_c"], cap)
    violations = sum(1 for r in counting.rows if not r[-1])
    weighting = semimeasure.LengthWeighting(cfg["family"].get("weighting", "log-squared"))
    checks = [
        Check("member_mass", mass_ok, f"every member has mass <= 1 over lengths 0..{cfg['n_max']}"),
        Check("mixture_mass", mix_total <= family.total_weight + 1e-9,
              f"mixture mass {mix_total:.6f} <= total weight {family.total_weight:.6f}"),
        Check("dominance", dom_ok, f"w_k nu_k <= mu on all words up to length {cfg['dominance_n_max']}"),
        Check("counting_bound", violations == 0, f"{violations} violations in {len(counting.rows)} cases"),
    ]
    metrics = {"members": len(family), "total_weight": family.total_weight,
               "mixture_mass": mix_total, "normalizer": weighting.normalizer}
    return RunResult(cfg, {"masses": masses, "dominance": dominance, "counting": counting}, checks, metrics)


RUNNERS = {
    "classical-brudno": run_classical,
    "quantum-brudno": run_quantum,
    "encoding-selftest": run_encoding,
    "semimeasure-audit": run_audit,
}


def run(cfg: ExperimentConfig, jobs: int = 1) -> RunResult:
    return RUNNERS[cfg.kind](cfg, jobs)


# -- artifacts ----------------------------------------------------------------------------

def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".12g")
    return str(x)


def table_csv(t: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(t.header)
    for row in t.rows:
        w.writerow([_cell(x) for x in row])
    return buf.getvalue()


def _json_safe(x):
    if isinstance(x, dict):
        return {str(k): _json_safe(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_safe(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else _cell(x)
    return x


def git_hash(data: bytes) -> str:
    """SHA-1 of ``b"blob <len>\\0" + data``, as ``git hash-object`` computes it."""
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def summary(result: RunResult, files: dict) -> dict:
    cfg = result.config
    body = {
        "schema_version": SCHEMA_VERSION,
        "kind": cfg.kind,
        "name": cfg.name,
        "config": cfg.echo,
        "input_hash": git_hash(cfg.canonical_json().encode("utf-8")),
        "passed": result.passed,
        "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in result.checks],
        "metrics": result.metrics,
        "artifacts": sorted(files),
    }
    body = _json_safe(body)
    digest = hashlib.sha1()
    digest.update(json.dumps(body, sort_keys=True, separators=(",", ":")).encode("utf-8"))
    for name in sorted(files):
        digest.update(name.encode("utf-8") + b"\0" + files[name])
    body["content_hash"] = digest.hexdigest()
    body["generated_at"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return body


def write_artifacts(result: RunResult, out_dir) -> Path:
    """Write CSV tables, SVG charts and ``summary.json`` under ``out_dir/<name>``."""
    target = Path(out_dir) / result.config.name
    target.mkdir(parents=True, exist_ok=True)
    files = {f"{k}.csv": table_csv(t).encode("utf-8") for k, t in result.tables.items()}
    files.update({f"{k}.svg": svg.encode("utf-8") for k, svg in result.charts.items()})
    for name, data in files.items():
        (target / name).write_bytes(data)
    body = summary(result, files)
    (target / "summary.json").write_text(json.dumps(body, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return target
