"""Command-line experiment runner.

    python -m charsums --q 10007 --char legendre --H 50 --experiment ks1d --out out/

Settings come from built-in defaults, then an optional ``--config`` file of
``key = value`` lines, then command-line flags (flags win).  Every CSV starts
with a ``# manifest_hash=...`` comment; the hash covers the resolved,
deterministic part of the configuration (thread count, output directory and
timings are excluded), so identical configs give byte-identical tables.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import logging
import math
import platform
import sys
import time
from contextlib import contextmanager
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .characters import CharacterSpec, make_character, random_nonreal_exponent
from .charfn import GaussianCF, EmpiricalCF, MAX_N, empirical_cf, theorem31_report, write_cfgrid_csv
from .distribution import conjecture1_preset, discrepancy, interval_report, rect_frequency
from .errors import MemoryCapError, PreconditionError, QuadratureError, WeilViolation
from .modarith import DEFAULT_MAX_Q, PrimeContext, factorize, is_prime, next_prime, prime_context
from .moments import MAX_ORDER, moment_pairs, moment_table, weil_check
from .selberg import fejer_budget, gaussian_smoothed_interval, paper_preset, smoothed_rect_frequency
from .specfun import Rectangle, gauss_interval, gauss_rect_prob
from .window import WindowSeries, default_normalization, exact_second_moment

log = logging.getLogger("charsums")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PRECONDITION = 3
EXIT_MEMORY = 4
EXIT_QUADRATURE = 5
EXIT_CHECK = 6

EXPERIMENTS = ("moments", "weil", "cf", "selberg", "discrepancy", "ks1d", "conjecture1")
NONREAL_ONLY = {"selberg", "discrepancy"}
REAL_ONLY = {"ks1d"}


class ConfigError(Exception):
    pass


@dataclass
class ExperimentConfig:
    q: str = "10007"
    char: str = "legendre"
    H: list = field(default_factory=lambda: [50])
    experiment: str = "moments"
    N: int | None = None
    t: float | None = None
    paper_preset: bool = False
    grid: str = "-2:2:17"
    rects: str = "default"
    selberg_rect: str = "-1,1,-1,1"
    out: str = "out"
    threads: int = 1
    seed: int = 0
    dump: bool = False
    check: bool = False
    criteria: list = field(default_factory=list)
    moment_order: int = MAX_ORDER
    weil_samples: int = 20
    weil_degree: int = 3
    max_q: int = DEFAULT_MAX_Q


# --- parsing ---------------------------------------------------------------

def _int_list(text) -> list[int]:
    if isinstance(text, (list, tuple)):
        text = ",".join(str(t) for t in text)
    try:
        return [int(p) for p in str(text).replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError(f"expected a list of integers, got {text!r}") from exc


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _opt(conv):
    return lambda text: None if str(text).strip().lower() in ("", "none") else conv(text)


_CONVERTERS = {
    "q": str, "char": str, "H": _int_list, "experiment": str, "N": _opt(int), "t": _opt(float),
    "paper_preset": _bool, "grid": str, "rects": str, "selberg_rect": str, "out": str, "threads": int,
    "seed": int, "dump": _bool, "check": _bool, "criteria": _int_list, "moment_order": int,
    "weil_samples": int, "weil_degree": int, "max_q": int,
}


def _convert(key, value):
    try:
        return _CONVERTERS[key](value)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key}: {value!r}") from exc


def read_config_file(path) -> dict:
    """Flat ``key = value`` file; '#' starts a comment, dashes in keys are allowed."""
    values = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        key, value = (p.strip() for p in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CONVERTERS:
            raise ConfigError(f"{path}:{n}: unknown key {key!r}")
        values[key] = _convert(key, value)
    return values


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="charsums", description="Distribution experiments for short character sums.")
    p.add_argument("--config", help="key = value file; flags given here override it")
    p.add_argument("--q", help="prime modulus, or auto:N for the next prime >= N")
    p.add_argument("--char", help="exponent k | legendre | order:d | random-nonreal:seed")
    p.add_argument("--H", nargs="+", help="window length(s)")
    p.add_argument("--experiment", choices=EXPERIMENTS + ("all",))
    p.add_argument("--N", help="truncation order for the CF budget (1..8)")
    p.add_argument("--t", help="smoothing bandwidth")
    p.add_argument("--paper-preset", action="store_const", const=True, dest="paper_preset",
                   help="derive t and N from (q, H)")
    p.add_argument("--rects", help="'default' or a CSV of a,b,c,d rows")
    p.add_argument("--grid", help="CF grid lo:hi:count on both axes")
    p.add_argument("--threads", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output directory")
    p.add_argument("--dump", action="store_const", const=True, help="also write the binary series dump")
    p.add_argument("--check", action="store_const", const=True, help="evaluate pass/fail checks")
    p.add_argument("--criteria", help="acceptance criteria ids to run in --check mode, e.g. 1,2,5")
    p.add_argument("--verbose", "-v", action="store_true")
    return p


def load_config(argv=None) -> tuple[ExperimentConfig, bool]:
    args = build_parser().parse_args(argv)
    values = read_config_file(args.config) if args.config else {}
    for f in fields(ExperimentConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = _convert(f.name, v)
    return ExperimentConfig(**values), args.verbose


# --- resolution and validation (all O(1) or O(sqrt q) work) ------------------

def resolve_q(spec: str) -> int:
    spec = spec.strip()
    try:
        if spec.startswith("auto:"):
            return next_prime(int(float(spec[5:])))
        q = int(spec)
    except ValueError as exc:
        raise ConfigError(f"cannot parse q={spec!r}") from exc
    if q < 5 or not is_prime(q):
        raise PreconditionError(f"q={q} is not a prime >= 5")
    return q


def resolve_exponent(q: int, spec: str, factors) -> int:
    spec = spec.strip().lower()
    if spec == "legendre":
        return (q - 1) // 2
    if spec.startswith("order:"):
        try:
            d = int(spec[6:])
        except ValueError as exc:
            raise ConfigError(f"cannot parse character {spec!r}") from exc
        if d < 2 or (q - 1) % d:
            small = [p for p, _ in factors]
            raise PreconditionError(f"no character of order {d} mod {q} (prime factors of q-1: {small})")
        return (q - 1) // d
    if spec.startswith("random-nonreal:"):
        try:
            seed = int(spec[15:])
        except ValueError as exc:
            raise ConfigError(f"cannot parse character {spec!r}") from exc
        return random_nonreal_exponent(q, seed)
    try:
        k = int(spec)
    except ValueError as exc:
        raise ConfigError(f"cannot parse character {spec!r}") from exc
    if k % (q - 1) == 0 or not 1 <= k <= q - 2:
        raise PreconditionError(f"exponent k={k} must lie in [1, q-2] (k=0 is principal)")
    return k


def parse_grid(spec: str) -> np.ndarray:
    try:
        lo, hi, n = spec.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError as exc:
        raise ConfigError(f"grid must be lo:hi:count, got {spec!r}") from exc
    if n < 1 or not lo <= hi:
        raise PreconditionError(f"empty grid {spec!r}")
    return np.linspace(lo, hi, n)


def parse_rect(spec: str) -> Rectangle:
    try:
        a, b, c, d = (float(v) for v in spec.split(","))
    except ValueError as exc:
        raise ConfigError(f"rectangle must be a,b,c,d, got {spec!r}") from exc
    return Rectangle(a, b, c, d)


def read_rects(spec: str):
    if spec == "default":
        return None
    try:
        rows = [r for r in csv.reader(Path(spec).read_text().splitlines()) if r and not r[0].startswith("#")]
    except OSError as exc:
        raise ConfigError(f"cannot read rectangle file {spec}: {exc}") from exc
    return [parse_rect(",".join(r)) for r in rows]


@dataclass
class Resolved:
    config: ExperimentConfig
    q: int
    k: int
    d: int
    is_real: bool
    experiments: tuple[str, ...]
    grid: np.ndarray
    rects: list | None
    selberg_rect: Rectangle

    def deterministic_items(self, g: int) -> list[tuple[str, str]]:
        c = self.config
        return [("version", __version__), ("q", str(self.q)), ("g", str(g)), ("k", str(self.k)),
                ("d", str(self.d)), ("char", c.char), ("H", ",".join(map(str, c.H))),
                ("experiments", ",".join(self.experiments)), ("N", str(c.N)), ("t", str(c.t)),
                ("paper_preset", str(int(c.paper_preset))), ("grid", c.grid), ("rects", c.rects),
                ("selberg_rect", c.selberg_rect), ("seed", str(c.seed)), ("moment_order", str(c.moment_order)),
                ("weil_samples", str(c.weil_samples)), ("weil_degree", str(c.weil_degree))]


def resolve(config: ExperimentConfig) -> Resolved:
    """Validate everything that can be checked without touching O(q) data."""
    q = resolve_q(config.q)
    if q > config.max_q:
        raise MemoryCapError(f"q={q} exceeds the index-table cap {config.max_q}")
    factors = factorize(q - 1)
    k = resolve_exponent(q, config.char, factors)
    d = (q - 1) // math.gcd(k, q - 1)
    is_real = d == 2
    if not config.H:
        raise ConfigError("at least one H is required")
    for H in config.H:
        if not 1 <= H < q:
            raise PreconditionError(f"window length must satisfy 1 <= H < q, got H={H}, q={q}")
    if config.threads < 1:
        raise PreconditionError("threads must be >= 1")
    if config.N is not None and not 1 <= config.N <= MAX_N:
        raise PreconditionError(f"N must lie in [1, {MAX_N}], got {config.N}")
    if config.t is not None and not config.t > 0:
        raise PreconditionError("t must be positive")
    if not 0 <= config.moment_order <= MAX_ORDER:
        raise PreconditionError(f"moment_order must lie in [0, {MAX_ORDER}]")
    if not 1 <= config.weil_degree <= 12 or config.weil_samples < 1:
        raise PreconditionError("weil_degree must lie in [1, 12] and weil_samples be positive")
    if config.experiment == "all":
        if is_real:
            experiments = ("moments", "weil", "ks1d", "conjecture1")
        else:
            experiments = ("moments", "weil", "cf", "selberg", "discrepancy", "conjecture1")
    elif config.experiment in EXPERIMENTS:
        experiments = (config.experiment,)
        if is_real and config.experiment in NONREAL_ONLY:
            raise PreconditionError(f"experiment {config.experiment} needs a non-real character")
        if not is_real and config.experiment in REAL_ONLY:
            raise PreconditionError(f"experiment {config.experiment} needs the Legendre symbol")
    else:
        raise ConfigError(f"unknown experiment {config.experiment!r}")
    bad = [i for i in config.criteria if not 1 <= i <= 11]
    if bad:
        raise ConfigError(f"unknown acceptance criteria {bad}")
    return Resolved(config, q, k, d, is_real, experiments, parse_grid(config.grid), read_rects(config.rects),
                    parse_rect(config.selberg_rect))


# --- running ---------------------------------------------------------------

@dataclass
class CheckLine:
    name: str
    passed: bool
    measured: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name} {self.measured}"


class Runner:
    def __init__(self, res: Resolved, context: PrimeContext | None = None):
        self.res = res
        self.cfg = res.config
        self.context = context
        self.timings: list[tuple[str, float]] = []
        self.checks: list[CheckLine] = []
        self.written: list[Path] = []

    @contextmanager
    def phase(self, name):
        log.info("phase %s", name)
        t0 = time.perf_counter()
        yield
        self.timings.append((name, time.perf_counter() - t0))

    def check(self, name, passed, **measured):
        text = " ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in measured.items())
        self.checks.append(CheckLine(name, bool(passed), text))

    def header(self, H, experiment) -> str:
        return (f"manifest_hash={self.manifest_hash} q={self.res.q} k={self.res.k} d={self.res.d} "
                f"H={H} experiment={experiment}")

    def _path(self, out_dir: Path, name: str) -> Path:
        p = out_dir / name
        self.written.append(p)
        return p

    def run(self) -> int:
        res, cfg = self.res, self.cfg
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        with self.phase("context"):
            ctx = self.context or prime_context(res.q, cfg.max_q)
        self.ctx = ctx
        det = res.deterministic_items(ctx.g)
        self.manifest_hash = hashlib.sha256("\n".join(f"{k}={v}" for k, v in det).encode()).hexdigest()[:16]
        chi = make_character(ctx, res.k)
        healthy = True
        if cfg.check:
            with self.phase("check_context"):
                problems = ctx.verify(seed=cfg.seed)
                self.check("index_table", not problems, problems="; ".join(problems) or "none")
                healthy = not problems
        if healthy:
            multi = len(cfg.H) > 1
            for H in cfg.H:
                out_dir = out / f"H{H}" if multi else out
                out_dir.mkdir(parents=True, exist_ok=True)
                self.run_H(chi, H, out_dir)
            if cfg.check:
                self.generic_checks(chi)
        self.write_manifest(out, det)
        if cfg.check:
            (out / "check.txt").write_text("".join(c.line() + "\n" for c in self.checks))
            for c in self.checks:
                print(c.line())
            if not all(c.passed for c in self.checks):
                return EXIT_CHECK
        return EXIT_OK

    def run_H(self, chi: CharacterSpec, H: int, out_dir: Path):
        cfg = self.cfg
        series = WindowSeries(chi, H, "none", threads=cfg.threads)
        if cfg.dump:
            with self.phase(f"H{H}_dump"):
                WindowSeries(chi, H, default_normalization(chi), threads=cfg.threads).dump(
                    self._path(out_dir, "series.csum"))
        for name in self.res.experiments:
            with self.phase(f"H{H}_{name}"):
                getattr(self, f"exp_{name}")(chi, series, out_dir)
        if cfg.check:
            with self.phase(f"H{H}_identities"):
                self.check(f"H{H}_sum_zero", series.exact_sum_is_zero(), mode=series.mode)
                m2 = math.fsum(np.abs(series.raw_values()) ** 2) / chi.q
                exact = float(exact_second_moment(chi.q, H))
                rel = abs(m2 - exact) / exact
                self.check(f"H{H}_second_moment", rel <= 1e-10, rel_err=rel, tol=1e-10)

    def smoothing(self, H):
        cfg = self.cfg
        preset = paper_preset(self.res.q, H)
        t = cfg.t if cfg.t is not None else preset.t
        N = cfg.N if cfg.N is not None else (preset.N if cfg.paper_preset else 1)
        return t, min(N, MAX_N)

    # experiments ---------------------------------------------------------

    def exp_moments(self, chi, series, out_dir):
        table = moment_table(series, moment_pairs(self.cfg.moment_order))
        table.write_csv(self._path(out_dir, "moments.csv"), self.header(series.H, "moments"))
        if self.cfg.check:
            checked = [e for e in table.entries.values() if e.hypothesis_ok and e.bound > 0]
            worst = max((e.ratio for e in checked), default=0.0)
            self.check(f"H{series.H}_moments", worst <= 10, max_ratio=worst, tol=10.0, entries=len(checked))

    def exp_weil(self, chi, series, out_dir):
        cfg = self.cfg
        path = self._path(out_dir, "weil.csv")
        worst, n = 0.0, 0
        with open(path, "w", newline="") as fh:
            fh.write(f"# {self.header(series.H, 'weil')}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["k", "l", "ys", "zs", "re", "im", "abs", "bound", "ratio", "degenerate"])
            for deg in range(1, cfg.weil_degree + 1):
                for k in range(deg, -1, -1):
                    l = deg - k
                    rep = weil_check(chi, cfg.weil_samples, k, l, series.H, seed=cfg.seed * 1000 + 31 * k + l)
                    worst = max(worst, rep.max_ratio)
                    n += len(rep.checks)
                    for c in rep.checks + rep.flagged:
                        w.writerow([k, l, ";".join(map(str, c.ys)), ";".join(map(str, c.zs)),
                                    f"{c.value.real:.17g}", f"{c.value.imag:.17g}", f"{abs(c.value):.17g}",
                                    f"{c.bound:.17g}", f"{c.ratio:.17g}", int(c.degenerate)])
        if cfg.check:
            self.check(f"H{series.H}_weil", worst <= 1.0, max_ratio=worst, sums=n)

    def exp_cf(self, chi, series, out_dir):
        t, N = self.smoothing(series.H)
        norm = "real" if chi.is_real else "complex"
        grid = empirical_cf(series, self.res.grid, self.res.grid, normalization=norm)
        rows = theorem31_report(grid, N)
        write_cfgrid_csv(self._path(out_dir, "cfgrid.csv"), rows, self.header(series.H, f"cf N={N}"))
        if self.cfg.check:
            over = sum(r.gap > r.budget for r in rows if r.hypothesis_ok)
            self.check(f"H{series.H}_cf", over == 0, max_gap=max(r.gap for r in rows), nodes_over_budget=over)

    def exp_selberg(self, chi, series, out_dir):
        t, N = self.smoothing(series.H)
        R = self.res.selberg_rect
        provider = EmpiricalCF(series)
        smoothed = smoothed_rect_frequency(provider, R, t)
        direct = rect_frequency(series, R)
        budget = fejer_budget(provider, R, t)
        gauss_smoothed = smoothed_rect_frequency(GaussianCF(), R, t)
        rows = [("t", t), ("N", N), ("rect_a", R.a), ("rect_b", R.b), ("rect_c", R.c), ("rect_d", R.d),
                ("smoothed_freq", smoothed), ("direct_freq", direct), ("gap", abs(smoothed - direct)),
                ("I_a", budget["I_a"]), ("I_b", budget["I_b"]), ("J_c", budget["J_c"]), ("J_d", budget["J_d"]),
                ("fejer_budget", budget["total"]), ("gauss_prob", gauss_rect_prob(R)),
                ("gauss_smoothed", gauss_smoothed),
                ("interval_re_smoothed", gaussian_smoothed_interval(R.a, R.b, t)),
                ("interval_re_exact", gauss_interval(R.a, R.b))]
        with open(self._path(out_dir, "selberg.csv"), "w", newline="") as fh:
            fh.write(f"# {self.header(series.H, 'selberg')}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["quantity", "value"])
            for key, val in rows:
                w.writerow([key, val if isinstance(val, int) else f"{val:.17g}"])
        if self.cfg.check:
            gap = abs(smoothed - direct)
            self.check(f"H{series.H}_selberg", gap <= 3 * budget["total"], gap=gap, budget_x3=3 * budget["total"])

    def exp_discrepancy(self, chi, series, out_dir):
        rep = discrepancy(series, self.res.rects)
        rep.write_csv(self._path(out_dir, "discrepancy.csv"), self.header(series.H, "discrepancy"))

    def exp_ks1d(self, chi, series, out_dir):
        rep = interval_report(series)
        rep.write_csv(self._path(out_dir, "discrepancy.csv"), self.header(series.H, "ks1d"))

    def exp_conjecture1(self, chi, series, out_dir):
        rep = conjecture1_preset(chi, series.H, self.cfg.threads)
        rep.write_csv(self._path(out_dir, "conjecture1.csv"), self.header(series.H, "conjecture1"))

    # checks and manifest -------------------------------------------------

    def generic_checks(self, chi):
        from .acceptance import criterion_2, run_criteria
        from .characters import orthogonality_check

        orth = orthogonality_check(chi)
        self.check("orthogonality", orth <= 1e-8 * chi.q, abs_sum=orth)
        for r in run_criteria([2] + [i for i in self.cfg.criteria if i != 2]):
            self.check(f"criterion_{r.id}", r.passed,
                       **{k: (v if isinstance(v, (int, float)) else str(v).replace(" ", "")) for k, v in r.measured.items()})

    def write_manifest(self, out: Path, det):
        lines = [f"manifest_hash={self.manifest_hash}"] + [f"{k}={v}" for k, v in det]
        lines += [f"threads={self.cfg.threads}", f"is_real={int(self.res.is_real)}",
                  f"numpy_version={np.__version__}", f"python_version={platform.python_version()}",
                  f"files={','.join(str(p.relative_to(out)) for p in self.written)}"]
        lines += [f"time_{name}={secs:.3f}" for name, secs in self.timings]
        (out / "manifest.txt").write_text("\n".join(lines) + "\n")


def run(config: ExperimentConfig, context: PrimeContext | None = None) -> int:
    """Resolve, validate and execute; returns the process exit status."""
    try:
        res = resolve(config)
        if context is not None and context.q != res.q:
            raise PreconditionError("supplied context does not match q")
        return Runner(res, context).run()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except MemoryError as exc:
        print(f"memory cap: {exc}", file=sys.stderr)
        return EXIT_MEMORY
    except QuadratureError as exc:
        print(f"quadrature failed: {exc}", file=sys.stderr)
        return EXIT_QUADRATURE
    except WeilViolation as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK


def main(argv=None) -> int:
    try:
        config, verbose = load_config(argv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(asctime)s %(message)s")
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
