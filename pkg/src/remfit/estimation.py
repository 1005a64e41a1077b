"""Maximum likelihood fitting, standard errors, and model comparison.

Both likelihoods are globally concave in the parameters, so the optimizer
strategy is a quasi-Newton pass followed, when the gradient tolerance is not
yet met, by a deterministic Newton polish using a finite-difference Hessian
of the analytic gradient. Failure to reach tolerance raises ConvergenceError
with the best iterate attached.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize
from scipy.stats import chi2, norm

from .diagnostics import compute_rank_match
from .effects import EffectSpecification, build_statistics
from .errors import ComparabilityError, ConvergenceError, ParameterError
from .history import CovariateSet, EventHistory
from .likelihood import value_and_gradient

_FD_STEP = float(np.cbrt(np.finfo(np.float64).eps))


@dataclass(frozen=True)
class FitOptions:
    """Estimation controls.

    ``mode`` overrides the likelihood (an exact-time history may be fit
    ordinally; the reverse is rejected). ``initial`` defaults to zeros.
    """

    mode: str | None = None
    max_iter: int = 500
    tol: float = 1e-6
    initial: np.ndarray | None = None
    compute_hessian: bool = True

    def __post_init__(self):
        if self.mode is not None and self.mode not in ("ordinal", "exact"):
            raise ParameterError(f"unknown timing mode {self.mode!r}")
        if self.max_iter < 1:
            raise ParameterError("max_iter must be at least 1")
        if not self.tol > 0:
            raise ParameterError("tol must be positive")


@dataclass(eq=False)
class FitResult:
    """Everything a fitted model reports, including per-event diagnostics."""

    theta: np.ndarray
    se: np.ndarray
    z: np.ndarray
    p: np.ndarray
    names: tuple[str, ...]
    timing: str
    n: int
    m: int
    k: int
    loglik: float
    null_loglik: float
    deviance: float
    null_deviance: float
    chi_square: float
    chi_df: int
    chi_p: float
    aic: float
    aicc: float
    bic: float
    df_model: int
    df_resid: int
    df_null: int
    converged: bool
    iterations: int
    gradient_norm: float
    residuals: np.ndarray
    censoring_deviance: float
    observed_ranks: np.ndarray
    sender_match: np.ndarray
    receiver_match: np.ndarray
    vcov: np.ndarray | None
    history: EventHistory
    spec: EffectSpecification
    warnings: list[str] = field(default_factory=list)


def information_criteria(loglik: float, k: int, m: int) -> dict[str, float]:
    """Deviance, AIC, small-sample AIC, and BIC from a log likelihood."""
    deviance = -2.0 * loglik
    aic = deviance + 2.0 * k
    if m - k - 1 > 0:
        aicc = aic + 2.0 * k * (k + 1) / (m - k - 1)
    else:
        aicc = math.inf
    bic = deviance + k * math.log(m)
    return {"deviance": deviance, "aic": aic, "aicc": aicc, "bic": bic}


def null_loglik(timing: str, m: int, n: int, horizon: float | None = None) -> float:
    """Log likelihood of the no-effect baseline model."""
    nn = n * (n - 1)
    if timing == "exact":
        if horizon is None or horizon <= 0:
            raise ParameterError("exact null model needs a positive horizon")
        return m * math.log(m / (nn * horizon)) - m
    return -m * math.log(nn)


def standard_errors(information: np.ndarray) -> tuple[np.ndarray, np.ndarray | None, str | None]:
    """Invert the observed information; singular cases yield NaN with a note."""
    k = information.shape[0]
    nan = np.full(k, np.nan)
    try:
        vcov = np.linalg.inv(information)
    except np.linalg.LinAlgError:
        return nan, None, "observed information matrix is singular; standard errors unavailable"
    diag = np.diag(vcov)
    if not np.all(np.isfinite(diag)) or np.any(diag <= 0):
        se = np.where(diag > 0, np.sqrt(np.abs(diag)), np.nan)
        return se, vcov, "observed information is not positive definite; some standard errors unavailable"
    return np.sqrt(diag), vcov, None


def _fd_hessian(grad_fn, theta: np.ndarray) -> np.ndarray:
    k = theta.size
    hess = np.empty((k, k))
    steps = _FD_STEP * np.maximum(1.0, np.abs(theta))
    for j in range(k):
        e = np.zeros(k)
        e[j] = steps[j]
        hess[:, j] = (grad_fn(theta + e) - grad_fn(theta - e)) / (2.0 * steps[j])
    return 0.5 * (hess + hess.T)


def _objective(stats):
    def obj(theta: np.ndarray) -> tuple[float, np.ndarray]:
        value, grad = value_and_gradient(stats, theta)
        if not np.isfinite(value):
            return np.inf, np.zeros_like(theta)
        return -value, -grad

    return obj


def _newton_polish(obj, theta, f0, g0, tol, max_iter=50):
    iters = 0
    for _ in range(max_iter):
        gn = np.max(np.abs(g0))
        if gn < tol:
            break
        hess = _fd_hessian(lambda t: obj(t)[1], theta)
        try:
            direction = np.linalg.solve(hess, -g0)
        except np.linalg.LinAlgError:
            direction = -g0
        # near the optimum the objective sits on a float plateau, so a step
        # that leaves f unchanged but shrinks the gradient still counts
        plateau = 4.0 * np.finfo(np.float64).eps * max(1.0, abs(f0))
        alpha = 1.0
        accepted = False
        for _ in range(40):
            cand = theta + alpha * direction
            fc, gc = obj(cand)
            if fc < f0 or (fc <= f0 + plateau and np.max(np.abs(gc)) < 0.9 * gn):
                theta, f0, g0 = cand, fc, gc
                accepted = True
                break
            alpha *= 0.5
        iters += 1
        if not accepted:
            break
    return theta, f0, g0, iters


def fit(
    history: EventHistory,
    spec: EffectSpecification,
    covariates: CovariateSet | None = None,
    options: FitOptions | None = None,
) -> FitResult:
    """Fit the relational event model by maximum likelihood.

    Returns a fully populated FitResult. If the gradient tolerance cannot be
    met the same result (flagged unconverged) rides on the ConvergenceError.
    """
    options = options or FitOptions()
    mode = options.mode or history.timing
    if history.m == 0:
        raise ParameterError("cannot fit a model to zero events")
    stats = build_statistics(history, spec, covariates, mode)
    k, m = stats.k, stats.m

    theta0 = np.zeros(k) if options.initial is None else np.asarray(options.initial, dtype=np.float64)
    if theta0.shape != (k,):
        raise ParameterError(f"initial values have shape {theta0.shape}, expected ({k},)")

    obj = _objective(stats)
    res = optimize.minimize(
        obj,
        theta0,
        jac=True,
        method="BFGS",
        options={"maxiter": options.max_iter, "gtol": options.tol},
    )
    theta, f_val, grad = res.x, float(res.fun), np.asarray(res.jac)
    iterations = int(res.nit)
    budget = min(50, options.max_iter - iterations)
    if budget > 0 and (not np.isfinite(f_val) or np.max(np.abs(grad)) >= options.tol):
        f_val, grad = obj(theta)
        theta, f_val, grad, extra = _newton_polish(
            obj, theta, f_val, grad, options.tol, max_iter=budget
        )
        iterations += extra
    gradient_norm = float(np.max(np.abs(grad)))
    converged = bool(np.isfinite(f_val) and gradient_norm < options.tol)

    warnings: list[str] = []
    if options.compute_hessian:
        info = _fd_hessian(lambda t: obj(t)[1], theta)
        se, vcov, note = standard_errors(info)
        if note:
            warnings.append(note)
    else:
        se, vcov = np.full(k, np.nan), None
    with np.errstate(invalid="ignore", divide="ignore"):
        z = theta / se
    p = 2.0 * norm.sf(np.abs(z))

    ll = -f_val
    horizon = history.horizon if mode == "exact" else None
    ll0 = null_loglik(mode, m, history.n, horizon)
    ics = information_criteria(ll, k, m)
    if not math.isfinite(ics["aicc"]):
        warnings.append("AICC is undefined for m <= k + 1")
    null_dev = -2.0 * ll0
    chi_sq = null_dev - ics["deviance"]
    df_null = m
    df_resid = m - k + 1 if mode == "exact" else m - k
    chi_df = df_null - df_resid
    if chi_df > 0:
        chi_p = float(chi2.sf(chi_sq, chi_df))
    else:
        chi_p = 1.0 if chi_sq < 1e-8 else 0.0

    from .likelihood import loglik as _loglik  # local import keeps module load acyclic

    lres = _loglik(stats, theta)
    rm = compute_rank_match(stats, theta)

    result = FitResult(
        theta=theta,
        se=se,
        z=z,
        p=p,
        names=stats.names,
        timing=mode,
        n=history.n,
        m=m,
        k=k,
        loglik=ll,
        null_loglik=ll0,
        deviance=ics["deviance"],
        null_deviance=null_dev,
        chi_square=chi_sq,
        chi_df=chi_df,
        chi_p=chi_p,
        aic=ics["aic"],
        aicc=ics["aicc"],
        bic=ics["bic"],
        df_model=k,
        df_resid=df_resid,
        df_null=df_null,
        converged=converged,
        iterations=iterations,
        gradient_norm=gradient_norm,
        residuals=-2.0 * lres.per_event,
        censoring_deviance=-2.0 * lres.censoring,
        observed_ranks=rm.ranks,
        sender_match=rm.sender_match,
        receiver_match=rm.receiver_match,
        vcov=vcov,
        history=history,
        spec=spec,
        warnings=warnings,
    )
    if not converged:
        result.warnings.append(
            f"gradient norm {gradient_norm:.3e} above tolerance {options.tol:g} after {iterations} iterations"
        )
        raise ConvergenceError(
            f"estimation did not reach gradient tolerance {options.tol:g}", result=result
        )
    return result


@dataclass(frozen=True)
class ComparisonResult:
    """Information-criterion comparison of two fits on the same data."""

    deviance: tuple[float, float]
    aic: tuple[float, float]
    aicc: tuple[float, float]
    bic: tuple[float, float]
    k: tuple[int, int]
    delta_aic: float
    delta_bic: float
    preferred_aic: str
    preferred_bic: str

    def to_dict(self) -> dict:
        return {
            "models": [
                {"k": self.k[i], "deviance": self.deviance[i], "aic": self.aic[i],
                 "aicc": self.aicc[i], "bic": self.bic[i]}
                for i in (0, 1)
            ],
            "delta_aic": self.delta_aic,
            "delta_bic": self.delta_bic,
            "preferred_aic": self.preferred_aic,
            "preferred_bic": self.preferred_bic,
        }


def _prefer(delta: float) -> str:
    if delta < 0:
        return "A"
    if delta > 0:
        return "B"
    return "tie"


def compare(a: FitResult, b: FitResult) -> ComparisonResult:
    """Compare two fits; they must share the data and the likelihood mode."""
    if a.timing != b.timing:
        raise ComparabilityError(f"cannot compare {a.timing} and {b.timing} likelihoods")
    if a.n != b.n or a.m != b.m:
        raise ComparabilityError("fits cover different event histories")
    if a.history is not None and b.history is not None and a.history != b.history:
        raise ComparabilityError("fits cover different event histories")
    return ComparisonResult(
        deviance=(a.deviance, b.deviance),
        aic=(a.aic, b.aic),
        aicc=(a.aicc, b.aicc),
        bic=(a.bic, b.bic),
        k=(a.k, b.k),
        delta_aic=a.aic - b.aic,
        delta_bic=a.bic - b.bic,
        preferred_aic=_prefer(a.aic - b.aic),
        preferred_bic=_prefer(a.bic - b.bic),
    )
