"""Weighted least-squares recovery of beat parameters from count series.

The objective is chi2 = sum(((observed - model) / sigma)^2) with the
model integrated over each bin, exactly how the simulator generates
expectations.  The beat phase makes the landscape multimodal, so the fit
runs a deterministic multistart over a phase grid and keeps the best
local optimum; the scale parameter n0 enters the model linearly and is
re-solved in closed form after each local search.

Accepted series are duck-typed: anything with ``edges`` and ``counts``
arrays fits as a count series (sigma = sqrt(max(counts, 1))), anything
with ``edges``, ``ratio``, ``sigma`` and ``valid`` fits as a ratio series
(the model ratio uses a unit-scale fluorescence denominator, so the
fitted n0 is measured in units of the fluorescence scale).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import scipy.optimize

from .beat import BeatParams, bin_expected_counts
from .errors import DomainError, StructuralError
from .spectra import kalpha_bin_expected

_FREE_CHOICES = ("n0", "tau_d", "phi0", "background")
_DEFAULT_BOUNDS = {
    "n0": (0.0, 1e12),
    "tau_d": (1e-3, 1e12),
    "phi0": (0.0, np.pi),
    "background": (0.0, 1e9),
}


@dataclass(frozen=True)
class FitConfig:
    """Controls for ``fit_beat``.

    ``base`` supplies every parameter that is not free (tau0 and t_pump
    are never fitted) and the starting values of free ones other than
    phi0, which starts from a grid of ``phase_grid`` points over [0, pi).
    """

    free_params: tuple[str, ...] = ("n0", "tau_d", "phi0")
    bounds: dict[str, tuple[float, float]] = field(default_factory=dict)
    phase_grid: int = 8
    max_iters: int = 2000
    tolerance: float = 1e-9
    base: BeatParams = field(default_factory=BeatParams)

    def __post_init__(self):
        free = tuple(self.free_params)
        if len(free) == 0 or len(set(free)) != len(free):
            raise DomainError("free_params must be a nonempty set of names")
        for name in free:
            if name not in _FREE_CHOICES:
                raise DomainError(f"cannot free {name!r}; choose from {_FREE_CHOICES}")
        merged = dict(_DEFAULT_BOUNDS)
        merged.update(self.bounds)
        for name, (lo, hi) in merged.items():
            if name not in _FREE_CHOICES:
                raise DomainError(f"bounds given for unknown parameter {name!r}")
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise DomainError(f"bounds for {name} must be finite with lo < hi, got ({lo!r}, {hi!r})")
        if self.phase_grid < 1:
            raise DomainError("phase_grid must be >= 1")
        if self.max_iters < 1:
            raise DomainError("max_iters must be >= 1")
        if not (np.isfinite(self.tolerance) and self.tolerance > 0.0):
            raise DomainError("tolerance must be positive")
        object.__setattr__(self, "free_params", free)
        object.__setattr__(self, "bounds", merged)


@dataclass(frozen=True)
class FitResult:
    """Outcome of a multistart fit.

    ``covariance`` rows/columns follow ``free_names`` (natural units,
    from the quadratic model 2 H^-1 at the optimum, clipped to positive
    semidefinite).  ``message`` carries per-start diagnostics when the
    fit did not converge and bound-contact notes when it did.
    """

    params: BeatParams
    chi2: float
    dof: int
    covariance: np.ndarray | None
    converged: bool
    message: str
    free_names: tuple[str, ...]

    def __post_init__(self):
        if self.chi2 < 0.0:
            raise DomainError("chi2 must be nonnegative")
        if self.covariance is not None:
            cov = np.asarray(self.covariance, dtype=float)
            n = len(self.free_names)
            if cov.shape != (n, n):
                raise DomainError("covariance shape must match free parameter count")
            cov = cov.copy()
            cov.setflags(write=False)
            object.__setattr__(self, "covariance", cov)


def _series_arrays(series):
    """(edges, observed, sigma, kind) for either series flavor."""
    if hasattr(series, "ratio"):
        edges = np.asarray(series.edges, dtype=float)
        keep = np.asarray(series.valid, dtype=bool)
        obs = np.asarray(series.ratio, dtype=float)
        sig = np.asarray(series.sigma, dtype=float)
        if len(obs) == 0 or not np.any(keep & (sig > 0.0)):
            raise StructuralError("series has no valid bins with positive sigma")
        return edges, obs, sig, keep & (sig > 0.0), "ratio"
    edges = np.asarray(series.edges, dtype=float)
    obs = np.asarray(series.counts, dtype=float)
    if len(obs) == 0:
        raise StructuralError("series is empty")
    sig = np.sqrt(np.maximum(obs, 1.0))
    return edges, obs, sig, np.ones(len(obs), dtype=bool), "counts"


def _model_bins(params: BeatParams, edges: np.ndarray, kind: str) -> np.ndarray:
    mu = bin_expected_counts(params, edges)
    if kind == "counts":
        return mu
    denom = kalpha_bin_expected(1.0, params.tau0, params.t_pump, edges)
    return mu / denom


def chi2(series, params: BeatParams) -> float:
    """Weighted residual sum of squares of the bin-integrated model."""
    edges, obs, sig, keep, kind = _series_arrays(series)
    model = _model_bins(params, edges, kind)
    r = (obs[keep] - model[keep]) / sig[keep]
    return float(np.dot(r, r))


def _solve_n0(params: BeatParams, edges, obs, sig, keep, kind, bounds):
    """Exact weighted least-squares scale given all other parameters."""
    unit = _model_bins(replace(params, n0=1.0, background=0.0), edges, kind)
    if kind == "counts":
        offset = params.background * params.t_pump * np.diff(edges)
    else:
        denom = kalpha_bin_expected(1.0, params.tau0, params.t_pump, edges)
        offset = params.background * params.t_pump * np.diff(edges) / denom
    a = unit[keep] / sig[keep]
    y = (obs[keep] - offset[keep]) / sig[keep]
    den = float(np.dot(a, a))
    if den == 0.0:
        return params.n0
    return float(np.clip(np.dot(a, y) / den, bounds[0], bounds[1]))


def _hessian(fun, x0, steps):
    n = len(x0)
    h = np.empty((n, n))
    f0 = fun(x0)
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = steps[i]
        fpp = fun(x0 + ei)
        fmm = fun(x0 - ei)
        h[i, i] = (fpp - 2.0 * f0 + fmm) / steps[i] ** 2
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = steps[j]
            fpj = fun(x0 + ei + ej)
            fmj = fun(x0 - ei - ej)
            fpm = fun(x0 + ei - ej)
            fmp = fun(x0 - ei + ej)
            h[i, j] = h[j, i] = (fpj + fmj - fpm - fmp) / (4.0 * steps[i] * steps[j])
    return h


def fit_beat(series, cfg: FitConfig) -> FitResult:
    """Best multistart local optimum of chi2 over the free parameters.

    Deterministic for fixed inputs.  Free parameters are optimized in
    normalized coordinates (n0 and background divided by data-derived
    scales, tau_d in log10) by bounded Nelder-Mead; ties between starts
    within 1e-9 relative chi2 break toward lower tau_d.
    """
    edges, obs, sig, keep, kind = _series_arrays(series)
    free = cfg.free_params
    base = cfg.base
    bounds = {k: cfg.bounds[k] for k in _FREE_CHOICES}
    widths = np.diff(edges)

    # data-derived normalization scales; exactly proportional to the
    # count scale so refits of rescaled data follow identical paths
    n0_guess = _solve_n0(base, edges, obs, sig, keep, kind, bounds["n0"])
    n0_scale = n0_guess if n0_guess > 0.0 else 1.0
    pump_mass = base.t_pump * float(np.mean(widths))
    bg_scale = max(float(np.median(obs[keep])), 1.0) / pump_mass

    def pack(params: BeatParams) -> np.ndarray:
        vals = []
        for name in free:
            v = getattr(params, name)
            if name == "n0":
                vals.append(v / n0_scale)
            elif name == "tau_d":
                vals.append(np.log10(v))
            elif name == "background":
                vals.append(v / bg_scale)
            else:
                vals.append(v)
        return np.array(vals)

    def unpack(x: np.ndarray) -> BeatParams:
        kw = {}
        for name, v in zip(free, x):
            if name == "n0":
                kw[name] = max(v * n0_scale, 0.0)
            elif name == "tau_d":
                kw[name] = 10.0**v
            elif name == "background":
                kw[name] = max(v * bg_scale, 0.0)
            else:
                kw[name] = v
        return replace(base, **kw)

    def objective(x: np.ndarray) -> float:
        model = _model_bins(unpack(x), edges, kind)
        r = (obs[keep] - model[keep]) / sig[keep]
        return float(np.dot(r, r))

    nm_bounds = []
    for name in free:
        lo, hi = bounds[name]
        if name == "n0":
            nm_bounds.append((lo / n0_scale, hi / n0_scale))
        elif name == "tau_d":
            if lo <= 0.0:
                raise DomainError("tau_d lower bound must be positive")
            nm_bounds.append((np.log10(lo), np.log10(hi)))
        elif name == "background":
            nm_bounds.append((lo / bg_scale, hi / bg_scale))
        else:
            nm_bounds.append((lo, hi))

    if "phi0" in free:
        lo, hi = bounds["phi0"]
        grid = lo + (hi - lo) * np.arange(cfg.phase_grid) / cfg.phase_grid
        starts = [replace(base, phi0=float(v)) for v in grid]
    else:
        starts = [base]

    def clip_start(params: BeatParams) -> BeatParams:
        kw = {}
        for name in free:
            lo, hi = bounds[name]
            kw[name] = float(np.clip(getattr(params, name), lo, hi))
        if "n0" in free:
            kw["n0"] = _solve_n0(replace(params, **kw), edges, obs, sig, keep, kind, bounds["n0"])
        return replace(params, **kw)

    results = []
    notes = []
    for i, start in enumerate(starts):
        x0 = pack(clip_start(start))
        fatol = cfg.tolerance * max(objective(x0), 1.0)
        res = scipy.optimize.minimize(
            objective,
            x0,
            method="Nelder-Mead",
            bounds=nm_bounds,
            options={
                "maxiter": cfg.max_iters,
                "maxfev": 4 * cfg.max_iters,
                "xatol": 1e-8,
                "fatol": fatol,
                "adaptive": False,
            },
        )
        params = unpack(res.x)
        if "n0" in free:
            params = replace(params, n0=_solve_n0(params, edges, obs, sig, keep, kind, bounds["n0"]))
        val = chi2_of(params, edges, obs, sig, keep, kind)
        results.append((val, params, bool(res.success)))
        if not res.success:
            notes.append(f"start {i} (phi0 = {start.phi0:.4f}): {res.message}")

    best_val, best_params, best_ok = results[0]
    for val, params, ok in results[1:]:
        if val < best_val - 1e-9 * (1.0 + best_val):
            best_val, best_params, best_ok = val, params, ok
        elif abs(val - best_val) <= 1e-9 * (1.0 + best_val) and params.tau_d < best_params.tau_d:
            best_val, best_params, best_ok = val, params, ok

    if "phi0" in free:
        best_params = replace(best_params, phi0=float(best_params.phi0 % np.pi))

    dof = int(np.count_nonzero(keep)) - len(free)

    steps = []
    for name in free:
        v = getattr(best_params, name)
        if name == "phi0":
            steps.append(1e-4)
        elif name == "n0":
            steps.append(1e-4 * max(abs(v), n0_scale * 1e-6, 1e-300))
        elif name == "background":
            steps.append(1e-4 * max(abs(v), bg_scale * 1e-6, 1e-300))
        else:
            steps.append(1e-4 * v)

    def chi2_natural(vec):
        return chi2_of(replace(best_params, **dict(zip(free, vec))), edges, obs, sig, keep, kind)

    center = np.array([getattr(best_params, name) for name in free])
    try:
        hess = _hessian(chi2_natural, center, np.array(steps))
        cov = 2.0 * np.linalg.pinv(hess)
        cov = 0.5 * (cov + cov.T)
        w, v = np.linalg.eigh(cov)
        cov = (v * np.clip(w, 0.0, None)) @ v.T
    except (np.linalg.LinAlgError, DomainError):
        cov = None

    # bound contact judged in the optimizer's normalized coordinates,
    # where the search actually saturates
    msgs = []
    x_best = pack(best_params)
    for name, v_norm, (lo_n, hi_n) in zip(free, x_best, nm_bounds):
        lo, hi = bounds[name]
        tol = 1e-6 * max(1.0, abs(v_norm))
        if abs(v_norm - lo_n) <= tol:
            msgs.append(f"{name} at lower bound {lo:g}")
        elif abs(v_norm - hi_n) <= tol:
            msgs.append(f"{name} at upper bound {hi:g}")
    converged = best_ok
    if not any(ok for _, _, ok in results):
        converged = False
        msgs.append("no start converged: " + "; ".join(notes))
    message = "; ".join(msgs) if msgs else "ok"

    return FitResult(best_params, float(best_val), dof, cov, converged, message, free)


def chi2_of(params, edges, obs, sig, keep, kind) -> float:
    """chi2 from pre-extracted arrays; shared by the public paths."""
    model = _model_bins(params, edges, kind)
    r = (obs[keep] - model[keep]) / sig[keep]
    return float(np.dot(r, r))
