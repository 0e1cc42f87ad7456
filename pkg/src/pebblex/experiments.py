"""Threshold predictions and experiment drivers.

Prediction formulas are pure functions of their numeric inputs.  The
constants that are only known to exist (the minimum arm count ``G0``, the
minimum arm length ``L0``, the spectrum factor ``K`` and the sizes ``n0``,
``n1`` above which the global bounds are asserted) are gathered in
:class:`Knobs` and printed with every report.

Each experiment returns an :class:`ExperimentResult`: its CSV rendering is
deterministic (no wall time), and a JSON manifest records parameters, seed,
knobs, library versions and wall time.
"""

from __future__ import annotations

import csv
import io
import json
import math
import platform
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from importlib import metadata
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import mc
from .errors import PreconditionError
from .graphs import BouquetSpec, make_bouquet, make_path
from .multiset import sample_geometric_batch
from .thresholds import geometric_pebbling_threshold

E = math.e
LOG2 = math.log(2.0)


@dataclass(frozen=True)
class Knobs:
    """Stand-ins for constants that are only known to exist.

    ``G0``: smallest arm count for the many-arm bouquet prediction.
    ``L0``: margin keeping the arm length inside ``[L0, log2 n - L0]``.
    ``K``: allowed factor between a spectrum target and its prediction.
    ``n0``/``n1``: sizes from which the global upper/lower bounds are asserted.
    ``eps``: relative band of the short-arm bouquet prediction.
    """

    G0: int = 1 << 16
    L0: int = 8
    K: float = 8.0
    n0: int = 3
    n1: int = 3
    eps: float = 0.5

    def __post_init__(self):
        if self.G0 < 2 or self.L0 < 0 or self.K < 1 or self.n0 < 3 or self.n1 < 3:
            raise PreconditionError(f"invalid knobs {self}")
        if not 0 < self.eps < 1:
            raise PreconditionError("eps must lie in (0, 1)")


DEFAULT_KNOBS = Knobs()
# Small enough that both spectrum branches are reachable at n <= 2^20.
DESK_KNOBS = Knobs(G0=3, L0=2)


# -- Phi ------------------------------------------------------------------------

def phi(alpha: float) -> float:
    """``alpha^2 / (2 alpha + 1)``: mean of ``floor(Z/2)`` for a geometric ``Z`` of mean ``alpha``."""
    if alpha < 0:
        raise PreconditionError("phi needs alpha >= 0")
    return alpha * alpha / (2 * alpha + 1)


def phi_inv(y: float) -> float:
    """Inverse of :func:`phi` on the nonnegative reals: ``y + sqrt(y^2 + y)``."""
    if y < 0:
        raise PreconditionError("phi_inv needs y >= 0")
    return y + math.sqrt(y * y + y)


# -- predictions ------------------------------------------------------------------

def path_threshold_prediction(n: int) -> float:
    """Leading term ``e 2^sqrt(log2 n) n / sqrt(log2 n)`` of the path threshold."""
    if n < 2:
        raise PreconditionError("path prediction needs n >= 2")
    s = math.sqrt(math.log2(n))
    return E * 2.0 ** s * n / s


def many_arm_beta(g: float) -> float:
    """``2^sqrt(2 log2 g) e / (2 sqrt(log2 g))`` (increasing for ``g >= 3``)."""
    if g <= 1:
        raise PreconditionError("needs g > 1")
    lg = math.log2(g)
    return 2.0 ** math.sqrt(2 * lg) * E / (2 * math.sqrt(lg))


@dataclass(frozen=True)
class Prediction:
    """Predicted threshold ``beta * n`` with its band and any failed preconditions."""

    regime: str
    n: int
    beta: float
    value: float
    band_low: float
    band_high: float
    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        d = asdict(self)
        d["violations"] = list(self.violations)
        return d


def _finish(pred: Prediction, strict: bool) -> Prediction:
    if strict and pred.violations:
        raise PreconditionError(f"{pred.regime}: " + "; ".join(pred.violations))
    return pred


def bouquet_prediction_large_g(n: int, g: int, L: int, g_floor: int = DEFAULT_KNOBS.G0,
                               strict: bool = True) -> Prediction:
    """Many-arm bouquet prediction ``beta n``, ``beta = many_arm_beta(g)``.

    Preconditions: ``2gL <= n``, ``sqrt(2 log2 g) <= L - log2 n <=
    exp((2 log2 g)^(1/4))`` and ``g >= g_floor``.  The band is
    ``beta n / (1 +- eta)`` with ``eta = (log2 g)^(-1/4)``; an upper end
    with ``eta >= 1`` is infinite.  With ``strict`` any failed precondition
    raises; otherwise failures are listed in ``violations``.
    """
    if n < 2 or g < 2 or L < 1:
        raise PreconditionError("needs n >= 2, g >= 2 and L >= 1")
    lg, ln = math.log2(g), math.log2(n)
    excess = L - ln
    bad = []
    if 2 * g * L > n:
        bad.append(f"2gL = {2 * g * L} exceeds n = {n}")
    if excess < math.sqrt(2 * lg):
        bad.append(f"L - log2 n = {excess:.6g} below sqrt(2 log2 g) = {math.sqrt(2 * lg):.6g}")
    if excess > math.exp((2 * lg) ** 0.25):
        bad.append(f"L - log2 n = {excess:.6g} above exp((2 log2 g)^(1/4)) = "
                   f"{math.exp((2 * lg) ** 0.25):.6g}")
    if g < g_floor:
        bad.append(f"g = {g} below the arm-count floor {g_floor}")
    beta = many_arm_beta(g)
    eta = lg ** -0.25
    value = beta * n
    high = value / (1 - eta) if eta < 1 else math.inf
    return _finish(Prediction("many-arm", n, beta, value, value / (1 + eta), high,
                              tuple(bad)), strict)


def bouquet_prediction_small(n: int, g: int, L: int, eps: float = DEFAULT_KNOBS.eps,
                             L0: int = DEFAULT_KNOBS.L0, strict: bool = True) -> Prediction:
    """Short-arm bouquet prediction ``beta n`` with ``phi(beta) = 2^(L-1)/n``.

    Preconditions: ``0 < eps < 1``, ``2gL <= eps n`` and
    ``L0 <= L <= log2 n - L0``.  The band is ``(1 +- eps) beta n``.
    """
    if n < 2 or g < 0 or L < 1:
        raise PreconditionError("needs n >= 2, g >= 0 and L >= 1")
    if not 0 < eps < 1:
        raise PreconditionError("eps must lie in (0, 1)")
    bad = []
    if 2 * g * L > eps * n:
        bad.append(f"2gL = {2 * g * L} exceeds eps n = {eps * n:.6g}")
    if L < L0:
        bad.append(f"L = {L} below L0 = {L0}")
    if L > math.log2(n) - L0:
        bad.append(f"L = {L} above log2 n - L0 = {math.log2(n) - L0:.6g}")
    beta = phi_inv(2.0 ** (L - 1) / n)
    value = beta * n
    return _finish(Prediction("short-arm", n, beta, value, (1 - eps) * value,
                              (1 + eps) * value, tuple(bad)), strict)


def bouquet_predictions(n: int, g: int, L: int, knobs: Knobs = DEFAULT_KNOBS) -> list[Prediction]:
    """Both bouquet predictions (non-strict), those with satisfied preconditions first."""
    preds = [bouquet_prediction_small(n, g, L, knobs.eps, knobs.L0, strict=False)]
    if g >= 2:
        preds.append(bouquet_prediction_large_g(n, g, L, knobs.G0, strict=False))
    return sorted(preds, key=lambda p: not p.ok)


# -- spectrum ------------------------------------------------------------------------

def spectrum_upper(n: int) -> float:
    lg = math.log2(n)
    return 2.0 ** math.sqrt(2 * lg) * n / math.sqrt(lg)


@dataclass(frozen=True)
class SpectrumTarget:
    """Target threshold ``t`` with ``sqrt(n) <= t <= 2^sqrt(2 log2 n) n / sqrt(log2 n)``."""

    n: int
    t: float

    def __post_init__(self):
        if self.n < 4:
            raise PreconditionError("spectrum targets need n >= 4")
        lo, hi = math.sqrt(self.n), spectrum_upper(self.n)
        if not lo * (1 - 1e-12) <= self.t <= hi * (1 + 1e-12):
            raise PreconditionError(f"t = {self.t} outside [{lo:.6g}, {hi:.6g}]")

    @property
    def beta(self) -> float:
        return self.t / self.n


@dataclass(frozen=True)
class SpectrumResult:
    """Bouquet chosen for a spectrum target, or why none was found."""

    target: SpectrumTarget
    branch: str
    spec: BouquetSpec | None
    prediction: Prediction | None
    reasons: tuple = ()

    @property
    def feasible(self) -> bool:
        return self.spec is not None and self.prediction is not None and self.prediction.ok

    @property
    def ratio(self) -> float:
        """Predicted threshold over target (``nan`` when infeasible)."""
        return self.prediction.value / self.target.t if self.prediction else math.nan


def critical_beta(knobs: Knobs = DEFAULT_KNOBS) -> float:
    """Switch point between the branches: the many-arm ``beta`` at ``g = G0``."""
    return many_arm_beta(knobs.G0)


def spectrum_construct(target: SpectrumTarget, knobs: Knobs = DEFAULT_KNOBS) -> SpectrumResult:
    """Pick a bouquet whose predicted threshold approximates ``target.t``.

    Below the critical ``beta`` a single arm of length near
    ``1 + log2(phi(beta) n)`` (clamped to ``[L0, floor(log2 n) - L0]``) is
    used; above it, the largest ``g <= n / (4 log2 n)`` with
    ``many_arm_beta(g) <= beta`` and ``L = ceil(log2 n + sqrt(2 log2 g))``.
    """
    n, beta = target.n, target.beta
    ln = math.log2(n)
    if beta < critical_beta(knobs):
        lo, hi = knobs.L0, int(math.floor(ln)) - knobs.L0
        if lo > hi or hi < 1:
            return SpectrumResult(target, "short-arm", None, None,
                                  (f"arm-length window [{lo}, {hi}] is empty",))
        L_hat = 1 + math.log2(phi(beta) * n)
        L = min(max(int(round(L_hat)), lo, 1), hi)
        spec = BouquetSpec(n, 1, L)
        pred = bouquet_prediction_small(n, 1, L, knobs.eps, knobs.L0, strict=False)
        return SpectrumResult(target, "short-arm", spec, pred, pred.violations)
    g_max = int(n // (4 * ln))
    g_min = max(knobs.G0, 3)
    if g_max < g_min or many_arm_beta(g_min) > beta:
        return SpectrumResult(target, "many-arm", None, None,
                              (f"no arm count in [{g_min}, {g_max}] has beta <= {beta:.6g}",))
    a, b = g_min, g_max  # many_arm_beta(a) <= beta; find the largest such g
    if many_arm_beta(b) <= beta:
        a = b
    while b - a > 1:
        mid = (a + b) // 2
        if many_arm_beta(mid) <= beta:
            a = mid
        else:
            b = mid
    g = a
    L = int(math.ceil(ln + math.sqrt(2 * math.log2(g))))
    try:
        spec = BouquetSpec(n, g, L)
    except PreconditionError as exc:
        return SpectrumResult(target, "many-arm", None, None, (str(exc),))
    pred = bouquet_prediction_large_g(n, g, L, knobs.G0, strict=False)
    return SpectrumResult(target, "many-arm", spec, pred, pred.violations)


def spectrum_grid(n: int, points: int) -> list[float]:
    """``points`` log-spaced targets spanning the admissible range for ``n``."""
    lo, hi = math.sqrt(n), spectrum_upper(n)
    if points == 1:
        return [lo]
    return [lo * (hi / lo) ** (i / (points - 1)) for i in range(points)]


# -- distance bound and global bounds -------------------------------------------------

@dataclass(frozen=True)
class DistanceBound:
    """Unpebblability bound for a vertex within distance ``d`` of everything."""

    n: int
    d: int
    alpha: float
    k: int
    m: int
    bound: float
    sharper: float


def _ceil_root_minus_one(n: int, d: int) -> int:
    """``ceil(n^(1/d) - 1)`` computed exactly on integers."""
    r = max(int(round(n ** (1.0 / d))) - 1, 0)
    while r ** d < n:
        r += 1
    while r > 0 and (r - 1) ** d >= n:
        r -= 1
    return r - 1  # r = ceil(n^(1/d))


def distance_unpebblability_bound(n: int, d: int, alpha: float) -> DistanceBound:
    """``min(1, (e m / (k (1 + phi(alpha))))^k)`` for a vertex within distance ``d`` of all others.

    Here ``k = ceil(n^(1/d) - 1)`` and ``m = 2^(d-1) + k - 1``.

    ``sharper`` is the binomial tail bound ``exp(-m Omega)`` with
    ``Omega = p' log(p'/p) + (1-p') log((1-p')/(1-p))``, ``p = 1/(1+phi(alpha))``,
    ``p' = k/m``; both are 1 when ``k (1 + phi(alpha)) <= m``.
    """
    if n < 2:
        raise PreconditionError("needs n >= 2")
    if int(d) != d or d < 2:
        raise PreconditionError("d must be an integer >= 2")
    if alpha <= 0:
        raise PreconditionError("alpha must be positive")
    d = int(d)
    k = _ceil_root_minus_one(n, d)
    m = 2 ** (d - 1) + k - 1
    f = 1 + phi(alpha)
    if k == 0 or k * f <= m:
        return DistanceBound(n, d, alpha, k, m, 1.0, 1.0)
    log_bound = k * (1 + math.log(m) - math.log(k) - math.log(f))
    p, pp = 1 / f, k / m
    omega = pp * math.log(pp / p) + ((1 - pp) * math.log((1 - pp) / (1 - p)) if pp < 1 else 0.0)
    return DistanceBound(n, d, alpha, k, m, math.exp(min(log_bound, 0.0)),
                         math.exp(-m * omega))


@dataclass(frozen=True)
class GlobalBounds:
    n: int
    lower: float
    upper: float
    lower_asserted: bool
    upper_asserted: bool


def global_bounds(n: int, knobs: Knobs = DEFAULT_KNOBS) -> GlobalBounds:
    """``(sqrt(n log 2), many_arm_beta(n) (1 - (log2 n)^(-1/4))^(-1) n)`` for connected graphs."""
    if n < 3:
        raise PreconditionError("global bounds need n >= 3")
    lower = math.sqrt(n * LOG2)
    upper = many_arm_beta(n) / (1 - math.log2(n) ** -0.25) * n
    return GlobalBounds(n, lower, upper, n >= knobs.n1, n >= knobs.n0)


def lower_bound_q(n: int) -> tuple[float, float]:
    """``(p, q)``: ``p = 1/(1 + sqrt(log 2 / n))`` and
    ``q = (1 - (1-p)^2)^n - (p(1-p))^n``, the chance that no vertex holds two
    pebbles while some vertex holds none."""
    if n < 1:
        raise PreconditionError("needs n >= 1")
    p = 1 / (1 + math.sqrt(LOG2 / n))
    q = math.exp(n * math.log1p(-(1 - p) ** 2)) - math.exp(n * math.log(p * (1 - p)))
    return p, q


def lower_bound_mc(n: int, samples: int, seed: int = 0, workers: int = 1) -> mc.Estimate:
    """Direct Monte Carlo frequency of the event counted by :func:`lower_bound_q`."""
    p, _ = lower_bound_q(n)
    mean_total = n * (1 / p - 1)

    def trial(rng, rows):
        Z = sample_geometric_batch(n, mean_total, rows, rng)
        return (Z.max(axis=1) <= 1) & (Z.min(axis=1) == 0)

    return mc.estimate(trial, samples, seed, ("lower-bound", n), mc.chunk_rows(n), workers)


def lower_bound_min_n(cap: int = 1 << 20) -> int:
    """Smallest ``n >= 1`` with ``q > 1/2``."""
    for n in range(1, cap + 1):
        if lower_bound_q(n)[1] > 0.5:
            return n
    raise PreconditionError(f"no n <= {cap} has q > 1/2")


def lower_bound_scan(ns: Sequence[int]) -> list[dict]:
    """Rows ``(n, p, q, q > 1/2)`` for each ``n``."""
    rows = []
    for n in ns:
        p, q = lower_bound_q(n)
        rows.append({"n": n, "p": p, "q": q, "q_above_half": q > 0.5})
    return rows


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


# -- results ------------------------------------------------------------------------------

def _versions() -> dict:
    out = {"python": platform.python_version()}
    for pkg in ("artifact", "numpy", "scipy", "numba"):
        try:
            out[pkg] = metadata.version(pkg)
        except metadata.PackageNotFoundError:
            out[pkg] = None
    return out


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return str(v)


@dataclass
class ExperimentResult:
    """Rows of one experiment plus the settings needed to reproduce them."""

    name: str
    params: dict
    rows: list
    seed: int
    knobs: Knobs | None = None
    wall_time: float = 0.0
    columns: list = field(default_factory=list)

    def __post_init__(self):
        if not self.columns:
            cols = []
            for r in self.rows:
                cols.extend(k for k in r if k not in cols)
            self.columns = cols

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_cell(r.get(c)) for c in self.columns])
        return buf.getvalue()

    def manifest(self) -> dict:
        return {
            "experiment": self.name,
            "params": self.params,
            "seed": self.seed,
            "knobs": asdict(self.knobs) if self.knobs else None,
            "columns": self.columns,
            "rows": len(self.rows),
            "versions": _versions(),
            "wall_time_s": self.wall_time,
        }

    def to_json(self) -> str:
        doc = self.manifest()
        doc["data"] = [{c: r.get(c) for c in self.columns} for r in self.rows]
        return json.dumps(doc, indent=2, default=_json_default, allow_nan=True)

    def write(self, out_dir: str | Path, fmt: str = "csv") -> list[Path]:
        """Write ``<name>.csv`` or ``<name>.json`` plus ``<name>.manifest.json``."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = []
        if fmt == "csv":
            paths.append(out / f"{self.name}.csv")
            paths[-1].write_text(self.to_csv())
        elif fmt == "json":
            paths.append(out / f"{self.name}.json")
            paths[-1].write_text(self.to_json())
        else:
            raise PreconditionError(f"unknown format {fmt!r}")
        paths.append(out / f"{self.name}.manifest.json")
        paths[-1].write_text(json.dumps(self.manifest(), indent=2, default=_json_default))
        return paths

    @property
    def budget_exhausted(self) -> bool:
        return any(r.get("budget_exhausted") for r in self.rows)


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (tuple, set)):
        return list(o)
    raise TypeError(f"not serializable: {type(o)}")


def _map_points(fn: Callable, points: Sequence, workers: int) -> list:
    """Evaluate ``fn`` on every point; results come back in input order."""
    if workers <= 1 or len(points) <= 1:
        return [fn(p) for p in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, points))


def _threshold_cols(est) -> dict:
    return {"measured": float(est.value), "ci_low": float(est.ci_low),
            "ci_high": float(est.ci_high), "samples": est.samples_used,
            "budget_exhausted": est.budget_exhausted}


# -- drivers ------------------------------------------------------------------------------

def run_path_experiment(ns: Sequence[int], budget: int, seed: int = 0, workers: int = 1,
                        rel_tol: float = 0.02) -> ExperimentResult:
    """Geometric pebbling threshold of the path ``P_n`` against the prediction, per ``n``."""
    ns = [int(n) for n in ns]
    if any(n < 2 for n in ns):
        raise PreconditionError("path experiment needs every n >= 2")
    start = time.perf_counter()

    def point(n):
        est = geometric_pebbling_threshold(make_path(n), budget, mc.derive_seed(seed, "path", n),
                                           rel_tol=rel_tol)
        pred = path_threshold_prediction(n)
        return {"n": n, **_threshold_cols(est), "prediction": pred,
                "ratio": float(est.value) / pred}

    rows = _map_points(point, ns, workers)
    return ExperimentResult("path", {"n": ns, "budget": budget, "rel_tol": rel_tol}, rows,
                            seed, None, time.perf_counter() - start)


def run_bouquet_experiment(instances: Sequence[tuple], budget: int, seed: int = 0,
                           workers: int = 1, knobs: Knobs = DEFAULT_KNOBS,
                           rel_tol: float = 0.02) -> ExperimentResult:
    """Measured bouquet thresholds next to the first prediction whose preconditions hold."""
    instances = [tuple(int(v) for v in inst) for inst in instances]
    start = time.perf_counter()

    def point(inst):
        n, g, L = inst
        spec = BouquetSpec(n, g, L)
        pred = bouquet_predictions(n, g, L, knobs)[0]
        est = geometric_pebbling_threshold(make_bouquet(spec), budget,
                                           mc.derive_seed(seed, "bouquet", n, g, L),
                                           rel_tol=rel_tol)
        return {"n": n, "g": g, "L": L, "regime": pred.regime,
                "preconditions_ok": pred.ok, "beta": pred.beta, **_threshold_cols(est),
                "prediction": pred.value, "band_low": pred.band_low,
                "band_high": pred.band_high, "ratio": float(est.value) / pred.value,
                "violations": " | ".join(pred.violations)}

    rows = _map_points(point, instances, workers)
    return ExperimentResult("bouquet", {"instances": [list(i) for i in instances],
                                        "budget": budget, "rel_tol": rel_tol},
                            rows, seed, knobs, time.perf_counter() - start)


def run_spectrum_experiment(n: int, points: int = 9, knobs: Knobs = DESK_KNOBS,
                            measure: bool = False, budget: int = 10_000, seed: int = 0,
                            workers: int = 1, rel_tol: float = 0.05) -> ExperimentResult:
    """Spectrum construction over a log-spaced target grid; optionally measure each bouquet."""
    start = time.perf_counter()

    def point(t):
        res = spectrum_construct(SpectrumTarget(n, t), knobs)
        row = {"n": n, "target": t, "beta": res.target.beta, "branch": res.branch,
               "feasible": res.feasible,
               "g": res.spec.g if res.spec else None, "L": res.spec.L if res.spec else None,
               "prediction": res.prediction.value if res.prediction else None,
               "pred_over_target": res.ratio,
               "within_K": bool(res.feasible and 1 / knobs.K <= res.ratio <= knobs.K),
               "reasons": " | ".join(res.reasons)}
        if measure and res.spec is not None:
            est = geometric_pebbling_threshold(make_bouquet(res.spec), budget,
                                               mc.derive_seed(seed, "spectrum", n, res.spec.g,
                                                              res.spec.L), rel_tol=rel_tol)
            row.update(_threshold_cols(est))
            row["measured_over_target"] = float(est.value) / t
        return row

    rows = _map_points(point, spectrum_grid(n, points), workers)
    return ExperimentResult("spectrum", {"n": n, "points": points, "measure": measure,
                                         "budget": budget, "rel_tol": rel_tol},
                            rows, seed, knobs, time.perf_counter() - start)


def run_lower_bound_experiment(ns: Sequence[int], mc_n: int = 100, samples: int = 1_000_000,
                         seed: int = 0, workers: int = 1) -> ExperimentResult:
    """Formula ``q`` over ``ns``, the Monte Carlo cross-check at ``mc_n`` and the minimal ``n``."""
    start = time.perf_counter()
    rows = [dict(r, source="formula") for r in lower_bound_scan(ns)]
    est = lower_bound_mc(mc_n, samples, seed, workers)
    p, q = lower_bound_q(mc_n)
    rows.append({"n": mc_n, "p": p, "q": est.value, "q_above_half": est.value > 0.5,
                 "source": "monte-carlo", "sigma": est.sigma,
                 "z_score": (est.value - q) / est.sigma if est.sigma else 0.0})
    n_min = lower_bound_min_n()
    rows.append({"n": n_min, "p": lower_bound_q(n_min)[0], "q": lower_bound_q(n_min)[1],
                 "q_above_half": True, "source": "minimal-n"})
    return ExperimentResult("lower_bound", {"n": list(ns), "mc_n": mc_n, "samples": samples},
                            rows, seed, None, time.perf_counter() - start,
                            ["source", "n", "p", "q", "q_above_half", "sigma", "z_score"])
