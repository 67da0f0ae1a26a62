"""Experiment plumbing: seeded streams, empirical laws, regime sweeps, oracle gates.

Randomness contract: one integer master seed; every stream is
``SeedSequence(master, spawn_key=key)`` for a key built from the experiment
name, the grid point and a role index, so any cell can be recomputed alone.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
import zlib
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from . import fragmentation, limit_laws, noisy_sort
from .inversions import exact_expected_inversions, exact_expected_toll, toll_mean_formula
from .moments import mergesort_series

log = logging.getLogger(__name__)

REGIMES = ("fixed_c", "vanishing_p", "lambda_over_n", "mergesort_exploratory")
MEAN_SIGMAS = 3.0
ORACLE_SIGMAS = 4.0
VAR_REL_TOL = 0.05


class ConfigError(ValueError):
    pass


def stream(seed: int, *key) -> np.random.Generator:
    """Generator for ``key`` under master ``seed``; strings are hashed with CRC-32."""
    words = tuple(zlib.crc32(k.encode()) if isinstance(k, str) else int(k) for k in key)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=words)))


# --- empirical laws -----------------------------------------------------------


@dataclass(frozen=True)
class EmpiricalDistribution:
    samples: np.ndarray  # sorted ascending

    @classmethod
    def of(cls, values) -> "EmpiricalDistribution":
        if isinstance(values, EmpiricalDistribution):
            return values
        x = np.sort(np.asarray(values, dtype=float).ravel())
        if x.size == 0:
            raise ValueError("empirical distribution needs at least one sample")
        if not np.all(np.isfinite(x)):
            raise ValueError("samples must be finite")
        return cls(x)

    @property
    def size(self) -> int:
        return int(self.samples.size)

    def mean(self) -> float:
        return float(self.samples.mean())

    def variance(self) -> float:
        return float(self.samples.var(ddof=1)) if self.size > 1 else 0.0

    def std_error(self) -> float:
        return math.sqrt(self.variance() / self.size)

    def var_std_error(self) -> float:
        """Delta-method standard error of the sample variance."""
        if self.size < 2:
            return 0.0
        d = self.samples - self.samples.mean()
        m4 = float(np.mean(d**4))
        v = float(np.mean(d**2))
        return math.sqrt(max(m4 - v * v, 0.0) / self.size)

    def quantile(self, q: float) -> float:
        """Generalized inverse ``inf {x : F(x) >= q}``."""
        if not 0 <= q <= 1:
            raise ValueError("q must lie in [0, 1]")
        i = max(math.ceil(q * self.size) - 1, 0)
        return float(self.samples[i])

    def wasserstein1(self, other) -> float:
        return wasserstein1(self, other)


def wasserstein1(a, b) -> float:
    """d1 between two empirical laws: the L1 distance of their quantile functions."""
    a = EmpiricalDistribution.of(a).samples
    b = EmpiricalDistribution.of(b).samples
    if a.size == b.size:
        return float(np.mean(np.abs(a - b)))
    # equal to the integral of |F - G| over the merged support
    pts = np.concatenate([a, b])
    pts.sort(kind="mergesort")
    dx = np.diff(pts)
    F = np.searchsorted(a, pts[:-1], side="right") / a.size
    G = np.searchsorted(b, pts[:-1], side="right") / b.size
    return float(np.sum(np.abs(F - G) * dx))


def mean_gate(dist: EmpiricalDistribution, target: float, sigmas: float = MEAN_SIGMAS) -> bool:
    se = dist.std_error()
    return abs(dist.mean() - target) <= sigmas * se if se > 0 else dist.mean() == target


def variance_gate(dist: EmpiricalDistribution, target: float, rel: float = VAR_REL_TOL,
                  sigmas: float = MEAN_SIGMAS) -> bool:
    return abs(dist.variance() - target) <= rel * target + sigmas * dist.var_std_error()


# --- configuration --------------------------------------------------------------


CONFIG_SCHEMA = {
    "regime": "one of " + ", ".join(REGIMES),
    "n_values": "list of int >= 2",
    "c_values": "list of c in [0, 1] (fixed_c)",
    "lambda_values": "list of lam > 0 (lambda_over_n, mergesort_exploratory)",
    "p_exponent": "a in (0, 1), p = n^-a (vanishing_p)",
    "replicates": "int >= 2",
    "seed": "int >= 0",
    "pool_size": "int >= 1000 (fixed_c limit pool)",
    "generations": "int >= 1 (fixed_c limit pool)",
    "depth": "int in 0..30 (fragmentation depth of the limit samplers)",
    "max_work": "budget on sum of n * replicates",
    "out": "output path stem or null",
    "format": "csv or json",
}


@dataclass
class ExperimentConfig:
    regime: str = "lambda_over_n"
    n_values: list = field(default_factory=lambda: [1000])
    c_values: list = field(default_factory=lambda: [0.25])
    lambda_values: list = field(default_factory=lambda: [2.0])
    p_exponent: float = 0.5
    replicates: int = 1000
    seed: int = 0
    pool_size: int = 100_000
    generations: int = 60
    depth: int = fragmentation.DEFAULT_DEPTH
    max_work: float = 1e10
    out: str | None = None
    format: str = "csv"

    def validate(self) -> "ExperimentConfig":
        if self.regime not in REGIMES:
            raise ConfigError(f"unknown regime {self.regime!r}; expected one of {REGIMES}")
        if not self.n_values or any(int(n) < 2 for n in self.n_values):
            raise ConfigError("n_values must be a nonempty list of integers >= 2")
        if self.replicates < 2:
            raise ConfigError("replicates must be at least 2")
        if self.seed < 0:
            raise ConfigError("seed must be nonnegative")
        if self.regime == "fixed_c" and not all(0 <= c <= 1 for c in self.c_values):
            raise ConfigError("c_values must lie in [0, 1]")
        if self.regime in ("lambda_over_n", "mergesort_exploratory"):
            if not self.lambda_values or any(lam <= 0 for lam in self.lambda_values):
                raise ConfigError("lambda_values must be positive")
            for lam in self.lambda_values:
                for n in self.n_values:
                    if lam > n:
                        raise ConfigError(f"p = lam/n exceeds 1 for lam={lam}, n={n}")
        if self.regime == "vanishing_p" and not 0 < self.p_exponent < 1:
            raise ConfigError("p_exponent must lie in (0, 1) so that n p -> infinity")
        if self.pool_size < 1000 or self.generations < 1:
            raise ConfigError("pool_size must be >= 1000 and generations >= 1")
        if not 0 <= self.depth <= fragmentation.MAX_DEPTH:
            raise ConfigError(f"depth must lie in 0..{fragmentation.MAX_DEPTH}")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        work = sum(int(n) for n in self.n_values) * self.replicates * max(1, len(self._params()))
        if work > self.max_work:
            raise ConfigError(f"budget exceeded: {work:.3g} element-runs > max_work={self.max_work:.3g}")
        return self

    def _params(self) -> list:
        if self.regime == "fixed_c":
            return list(self.c_values)
        if self.regime in ("lambda_over_n", "mergesort_exploratory"):
            return list(self.lambda_values)
        return [self.p_exponent]

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        unknown = set(data) - set(CONFIG_SCHEMA)
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        try:
            cfg = cls(**data)
            cfg.n_values = [int(n) for n in cfg.n_values]
            cfg.c_values = [float(c) for c in cfg.c_values]
            cfg.lambda_values = [float(v) for v in cfg.lambda_values]
            cfg.p_exponent = float(cfg.p_exponent)
            cfg.replicates = int(cfg.replicates)
            cfg.seed = int(cfg.seed)
            cfg.pool_size = int(cfg.pool_size)
            cfg.generations = int(cfg.generations)
            cfg.depth = int(cfg.depth)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        return cfg

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return asdict(self)


# --- regime sweeps ---------------------------------------------------------------


COLUMNS = [
    "regime", "param_name", "param", "n", "p", "replicates",
    "mean", "var", "se_mean", "se_var",
    "theory_mean", "theory_var", "mean_ok", "var_ok", "exact_ok", "bound_ok",
    "d1", "d1_floor", "limit_mean", "limit_var",
    "stream_key",
]


@dataclass
class RegimeResult:
    config: ExperimentConfig
    rows: list
    samples: dict  # (param, n) -> X_{n,p} draws
    timings: dict
    gated: bool = False

    @property
    def passed(self) -> bool:
        """All gates of a gated regime hold; exploratory runs always pass."""
        if not self.gated:
            return True
        return all(r[k] is not False for r in self.rows for k in ("mean_ok", "var_ok", "bound_ok"))

    def metadata(self) -> dict:
        return {
            # the output location is left out so reruns elsewhere stay byte-identical
            "config": {k: v for k, v in self.config.to_dict().items() if k != "out"},
            "columns": COLUMNS,
            "package_version": __version__,
            "numpy_version": np.__version__,
            "stream_rule": "PCG64(SeedSequence(seed, spawn_key=(crc32(regime), param_index, n_index, role)))",
            "p_rule": _p_rule_text(self.config),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for row in self.rows:
            w.writerow([_fmt(row[c]) for c in COLUMNS])
        return buf.getvalue()

    def to_json(self) -> str:
        rows = [{c: row[c] for c in COLUMNS} for row in self.rows]
        return json.dumps({"metadata": self.metadata(), "rows": rows}, indent=2, sort_keys=True)

    def write(self, stem, fmt: str = "csv") -> list:
        stem = Path(stem)
        stem.parent.mkdir(parents=True, exist_ok=True)
        if fmt == "csv":
            table = stem.with_suffix(".csv")
            table.write_text(self.to_csv())
            meta = stem.with_suffix(".meta.json")
            meta.write_text(json.dumps(self.metadata(), indent=2, sort_keys=True) + "\n")
            return [table, meta]
        out = stem.with_suffix(".json")
        out.write_text(self.to_json() + "\n")
        return [out]


def _fmt(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else str(v)


def _p_rule_text(cfg: ExperimentConfig) -> str:
    return {
        "fixed_c": "p = c",
        "vanishing_p": f"p = n^-{cfg.p_exponent} (n p -> infinity)",
        "lambda_over_n": "p = lam / n",
        "mergesort_exploratory": ("p = lam / n, merge sort; theory_mean is the conjectured series constant, "
                                  "which simulations match at half the flip rate (errors answered at random)"),
    }[cfg.regime]


def _grid(cfg: ExperimentConfig):
    for i, param in enumerate(cfg._params()):
        for j, n in enumerate(cfg.n_values):
            if cfg.regime == "fixed_c":
                p = float(param)
            elif cfg.regime == "vanishing_p":
                p = float(n) ** (-cfg.p_exponent)
            else:
                p = float(param) / n
            yield i, param, j, int(n), p


def _param_name(regime: str) -> str:
    return {"fixed_c": "c", "vanishing_p": "p_exponent"}.get(regime, "lambda")


def _theory(cfg: ExperimentConfig, param) -> tuple:
    if cfg.regime == "fixed_c":
        return limit_laws.mean_var_Xc(float(param))
    if cfg.regime == "vanishing_p":
        return limit_laws.mean_var_Xc(0.0)
    if cfg.regime == "lambda_over_n":
        return limit_laws.mean_var_X_lambda(float(param))
    return mergesort_series(1e-12), None


def limit_sample(cfg: ExperimentConfig, param, size: int, rng: np.random.Generator):
    """``size`` draws of the limit law matching the regime, or None when there is none."""
    if cfg.regime == "fixed_c":
        pool = limit_laws.sample_Xc_pool(float(param), cfg.pool_size, cfg.generations, rng)
        return pool.draw(size, rng)
    if cfg.regime == "vanishing_p":
        return fragmentation.sample_X_hat(cfg.depth, rng, size)
    if cfg.regime == "lambda_over_n":
        return limit_laws.sample_X_lambda(float(param), cfg.depth, rng, size)
    return None


def run_regime(cfg: ExperimentConfig) -> RegimeResult:
    """Simulate every grid point and compare it with its limit law.

    Deterministic given ``cfg.seed``; the limit sample for a parameter is
    shared by all n of that parameter.
    """
    cfg.validate()
    R = cfg.replicates
    rows = []
    samples = {}
    timings = {}
    limits = {}
    for i, param, j, n, p in _grid(cfg):
        t0 = time.perf_counter()
        rng = stream(cfg.seed, cfg.regime, i, j, 0)
        if cfg.regime == "mergesort_exploratory":
            x = noisy_sort.sample_mergesort_X(n, p, rng, R)
        else:
            x = noisy_sort.sample_X_np(n, p, rng, R)
        if i not in limits:
            limits[i] = limit_sample(cfg, param, R, stream(cfg.seed, cfg.regime, i, 0, 1))
        lim = limits[i]
        dist = EmpiricalDistribution.of(x)
        mean_t, var_t = _theory(cfg, param)
        gate_mean, gate_var = float(mean_t), None if var_t is None else float(var_t)
        if cfg.regime == "fixed_c" and float(param) == 1.0:
            # deterministic case: every run equals (n-1)/(2n) exactly
            gate_mean, gate_var = (n - 1) / (2 * n), 0.0
        row = {
            "regime": cfg.regime,
            "param_name": _param_name(cfg.regime),
            "param": float(param),
            "n": n,
            "p": p,
            "replicates": R,
            "mean": dist.mean(),
            "var": dist.variance(),
            "se_mean": dist.std_error(),
            "se_var": dist.var_std_error(),
            "theory_mean": float(mean_t),
            "theory_var": None if var_t is None else float(var_t),
            "mean_ok": None if cfg.regime == "mergesort_exploratory" else mean_gate(dist, gate_mean),
            "var_ok": None if gate_var is None else variance_gate(dist, gate_var),
            "exact_ok": None,
            "bound_ok": dist.mean() <= 1.0 + MEAN_SIGMAS * dist.std_error(),
            "d1": None,
            "d1_floor": None,
            "limit_mean": None,
            "limit_var": None,
            "stream_key": f"{cfg.regime}/{i}/{j}",
        }
        if gate_var == 0.0:
            same = bool(np.all(x == x[0])) and math.isclose(float(x[0]), gate_mean, rel_tol=1e-12)
            row["exact_ok"] = row["mean_ok"] = row["var_ok"] = same
        if lim is not None:
            ld = EmpiricalDistribution.of(lim)
            half = lim.size // 2
            row["d1"] = wasserstein1(dist, ld)
            # two half-samples of the limit law, rescaled to the full sample size
            row["d1_floor"] = wasserstein1(lim[:half], lim[half : 2 * half]) / math.sqrt(2.0)
            row["limit_mean"] = ld.mean()
            row["limit_var"] = ld.variance()
        rows.append(row)
        samples[(float(param), n)] = x
        timings[(float(param), n)] = time.perf_counter() - t0
        log.info("%s %s=%s n=%d done in %.1fs", cfg.regime, row["param_name"], param, n, timings[(float(param), n)])
    result = RegimeResult(cfg, rows, samples, timings)
    if cfg.regime != "mergesort_exploratory":
        result.gated = True
    if cfg.out:
        result.write(cfg.out, cfg.format)
    return result


# --- oracle suite -------------------------------------------------------------------


@dataclass
class OracleReport:
    rows: list

    @property
    def passed(self) -> bool:
        return all(r["ok"] for r in self.rows)

    def failures(self) -> list:
        return [r for r in self.rows if not r["ok"]]

    def to_json(self) -> str:
        return json.dumps({"passed": self.passed, "rows": self.rows}, indent=2, sort_keys=True)

    def to_csv(self) -> str:
        cols = ["check", "n", "p", "exact", "estimate", "se", "z", "ok"]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in self.rows:
            w.writerow([_fmt(r[c]) for c in cols])
        return buf.getvalue()


def run_oracle_suite(n_values=range(2, 7), p_values=(Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)),
                     runs: int = 10**6, seed: int = 0, sigmas: float = ORACLE_SIGMAS) -> OracleReport:
    """Bind the exact enumeration oracle to Monte Carlo and to the mean-toll formula."""
    rows = []
    for n in n_values:
        for p in p_values:
            p = Fraction(p)
            exact = exact_expected_inversions(n, p)
            inv = noisy_sort.quicksort_inversions(n, float(p), stream(seed, "oracle", n, p.numerator, p.denominator), runs)
            est = float(inv.mean())
            se = float(inv.std(ddof=1) / math.sqrt(runs))
            z = (est - float(exact)) / se if se > 0 else (0.0 if est == float(exact) else math.inf)
            rows.append({"check": "mean_inversions", "n": n, "p": str(p), "exact": str(exact),
                         "estimate": est, "se": se, "z": z, "ok": abs(z) <= sigmas})
            toll = exact_expected_toll(n, p)
            formula = toll_mean_formula(n, p)
            rows.append({"check": "mean_toll", "n": n, "p": str(p), "exact": str(toll),
                         "estimate": str(formula), "se": None, "z": None, "ok": toll == formula})
    return OracleReport(rows)


# --- exploratory: n p -> 0 -------------------------------------------------------------


NP0_COLUMNS = ["n", "p", "replicates", "frac_zero", "mean_log_stat", "var_log_stat", "d1_log_uniform"]


def run_np0(n_values=(10**3, 10**4), replicates: int = 2000, seed: int = 0, beta: float = 0.5) -> str:
    """Data for the conjectured slow ``n p -> 0`` regime, returned as CSV text.

    Uses ``p = 1 / (n (log n)**beta)`` with ``beta < 1`` and records the share of
    error-free runs and the law of ``2 n p log(I / n)`` among runs with ``I > 0``,
    next to its conjectured limit ``log U``.  Nothing is gated.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(NP0_COLUMNS)
    for j, n in enumerate(n_values):
        n = int(n)
        p = 1.0 / (n * math.log(n) ** beta)
        inv = noisy_sort.quicksort_inversions(n, p, stream(seed, "np0", j, 0), replicates).astype(float)
        pos = inv[inv > 0]
        row = [n, p, replicates, float(np.mean(inv == 0))]
        if pos.size >= 2:
            stat = 2 * n * p * np.log(pos / n)
            ref = np.log(stream(seed, "np0", j, 1).random(pos.size))
            row += [float(stat.mean()), float(stat.var(ddof=1)), wasserstein1(stat, ref)]
        else:
            row += [None, None, None]
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()
