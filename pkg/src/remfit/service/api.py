"""Service handlers and the FastAPI application.

Each handler is a plain request-to-response function. The HTTP routes call
them, and the CLI calls them directly in local mode, so one code path serves
both transports. Domain errors map to HTTP 400 with the error type and exit
code in the body; a fit that runs but fails to converge is not an error at
this layer (the response carries converged=false and the best iterate).
"""
from __future__ import annotations

import math

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..diagnostics import adequacy_report, surprise_events, surprise_flags
from ..effects import EffectSpecification
from ..errors import ConvergenceError, IdRangeError, RemError
from ..estimation import FitOptions, FitResult, compare, fit
from ..history import CovariateSet, EventHistory, parse_edgelist, to_rows, validate_covariates
from ..simulate import SimulationConfig, simulate_history
from .schemas import (
    AdequacyPayload,
    CompareRequest,
    CompareResponse,
    CovariatePayload,
    DiagnoseRequest,
    DiagnoseResponse,
    FitRequest,
    FitResponse,
    ModelSummary,
    SimulateRequest,
    SimulateResponse,
)


def _clean(x: float) -> float | None:
    x = float(x)
    return x if math.isfinite(x) else None


def _clean_list(arr) -> list[float | None]:
    return [_clean(v) for v in np.asarray(arr, dtype=np.float64)]


def _wire_group(group: int | None, n: int) -> int | None:
    if group is None:
        return None
    if not 1 <= group <= n:
        raise IdRangeError(f"group actor {group} outside 1..{n}")
    return group - 1


def _build_spec(effects: list[str], group_actor: int | None, n: int) -> EffectSpecification:
    return EffectSpecification(entries=tuple(effects), group_actor=_wire_group(group_actor, n))


def _build_cov(payload: CovariatePayload | None) -> CovariateSet | None:
    if payload is None:
        return None
    return CovariateSet(
        snd=None if payload.snd is None else np.asarray(payload.snd, dtype=np.float64),
        rec=None if payload.rec is None else np.asarray(payload.rec, dtype=np.float64),
        inter=None if payload.inter is None else np.asarray(payload.inter, dtype=np.float64),
        event=None if payload.event is None else np.asarray(payload.event, dtype=np.float64),
    )


def _wire_rows(h: EventHistory) -> list[list[float | None]]:
    return [
        [float(t), None if s is None else int(s), None if r is None else int(r)]
        for t, s, r in to_rows(h)
    ]


def fitresult_to_response(result: FitResult) -> FitResponse:
    group = result.spec.group_actor
    return FitResponse(
        converged=result.converged,
        timing=result.timing,
        n=result.n,
        m=result.m,
        k=result.k,
        names=list(result.names),
        theta=[float(v) for v in result.theta],
        se=_clean_list(result.se),
        z=_clean_list(result.z),
        p=_clean_list(result.p),
        loglik=result.loglik,
        null_loglik=result.null_loglik,
        deviance=result.deviance,
        null_deviance=result.null_deviance,
        chi_square=result.chi_square,
        chi_df=result.chi_df,
        chi_p=result.chi_p,
        aic=result.aic,
        aicc=_clean(result.aicc),
        bic=result.bic,
        df_model=result.df_model,
        df_resid=result.df_resid,
        df_null=result.df_null,
        iterations=result.iterations,
        gradient_norm=result.gradient_norm,
        residuals=[float(v) for v in result.residuals],
        censoring_deviance=result.censoring_deviance,
        observed_ranks=[int(v) for v in result.observed_ranks],
        sender_match=[bool(v) for v in result.sender_match],
        receiver_match=[bool(v) for v in result.receiver_match],
        warnings=list(result.warnings),
        effects=list(result.spec.entries),
        group_actor=None if group is None else group + 1,
        edgelist=_wire_rows(result.history),
    )


def response_to_fitresult(resp: FitResponse) -> FitResult:
    """Rebuild the FitResult a diagnose/compare call needs from a response.

    The variance matrix is not transported; fields that require it stay
    unavailable downstream.
    """
    history = parse_edgelist(resp.edgelist, resp.n, resp.timing)
    spec = _build_spec(resp.effects, resp.group_actor, resp.n)
    nan = np.nan
    return FitResult(
        theta=np.asarray(resp.theta, dtype=np.float64),
        se=np.asarray([nan if v is None else v for v in resp.se], dtype=np.float64),
        z=np.asarray([nan if v is None else v for v in resp.z], dtype=np.float64),
        p=np.asarray([nan if v is None else v for v in resp.p], dtype=np.float64),
        names=tuple(resp.names),
        timing=resp.timing,
        n=resp.n,
        m=resp.m,
        k=resp.k,
        loglik=resp.loglik,
        null_loglik=resp.null_loglik,
        deviance=resp.deviance,
        null_deviance=resp.null_deviance,
        chi_square=resp.chi_square,
        chi_df=resp.chi_df,
        chi_p=resp.chi_p,
        aic=resp.aic,
        aicc=math.inf if resp.aicc is None else resp.aicc,
        bic=resp.bic,
        df_model=resp.df_model,
        df_resid=resp.df_resid,
        df_null=resp.df_null,
        converged=resp.converged,
        iterations=resp.iterations,
        gradient_norm=resp.gradient_norm,
        residuals=np.asarray(resp.residuals, dtype=np.float64),
        censoring_deviance=resp.censoring_deviance,
        observed_ranks=np.asarray(resp.observed_ranks, dtype=np.int64),
        sender_match=np.asarray(resp.sender_match, dtype=bool),
        receiver_match=np.asarray(resp.receiver_match, dtype=bool),
        vcov=None,
        history=history,
        spec=spec,
        warnings=list(resp.warnings),
    )


def handle_fit(req: FitRequest) -> FitResponse:
    history = parse_edgelist(req.edgelist, req.n, req.timing)
    cov = _build_cov(req.covariates)
    if cov is not None:
        validate_covariates(cov, history)
    spec = _build_spec(req.effects, req.group_actor, req.n)
    options = FitOptions(
        max_iter=req.max_iter,
        tol=req.tol,
        initial=None if req.initial is None else np.asarray(req.initial, dtype=np.float64),
        compute_hessian=req.compute_hessian,
    )
    try:
        result = fit(history, spec, cov, options)
    except ConvergenceError as err:
        if err.result is None:
            raise
        result = err.result
    return fitresult_to_response(result)


def handle_diagnose(req: DiagnoseRequest) -> DiagnoseResponse:
    result = response_to_fitresult(req.fit)
    report = adequacy_report(result, req.cutoff)
    flags = surprise_flags(result, req.rule, req.q)
    subset = surprise_events(result, req.rule, req.q)
    counts, edges = np.histogram(result.residuals, bins="sturges")
    socio = np.zeros((result.n, result.n), dtype=np.int64)
    for ev in subset.events:
        socio[ev.s, ev.r] += 1
    return DiagnoseResponse(
        adequacy=AdequacyPayload(**report.to_dict()),
        rule=req.rule,
        q=req.q,
        surprise_count=int(flags.sum()),
        hist_edges=[float(e) for e in edges],
        hist_counts=[int(c) for c in counts],
        surprise_edgelist=_wire_rows(subset),
        surprise_sociomatrix=socio.tolist(),
    )


def handle_simulate(req: SimulateRequest) -> SimulateResponse:
    spec = _build_spec(req.effects, req.group_actor, req.n)
    cfg = SimulationConfig(
        n=req.n,
        theta=np.asarray(req.theta, dtype=np.float64),
        spec=spec,
        cov=_build_cov(req.covariates),
        max_events=req.max_events,
        horizon=req.horizon,
        seed=req.seed,
    )
    history = simulate_history(cfg)
    return SimulateResponse(
        n=history.n,
        m=history.m,
        horizon=float(history.horizon),
        seed=req.seed,
        theta=list(req.theta),
        effects=list(req.effects),
        group_actor=req.group_actor,
        edgelist=_wire_rows(history),
    )


def handle_compare(req: CompareRequest) -> CompareResponse:
    result = compare(response_to_fitresult(req.fit_a), response_to_fitresult(req.fit_b))
    return CompareResponse(
        models=[
            ModelSummary(
                k=result.k[i],
                deviance=result.deviance[i],
                aic=result.aic[i],
                aicc=_clean(result.aicc[i]),
                bic=result.bic[i],
            )
            for i in (0, 1)
        ],
        delta_aic=result.delta_aic,
        delta_bic=result.delta_bic,
        preferred_aic=result.preferred_aic,
        preferred_bic=result.preferred_bic,
    )


def create_app() -> FastAPI:
    app = FastAPI(title="remfit", version=__version__)

    @app.exception_handler(RemError)
    async def _rem_error(_request: Request, exc: RemError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={
                "error": {
                    "type": type(exc).__name__,
                    "exit_code": exc.exit_code,
                    "message": str(exc),
                }
            },
        )

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/fit", response_model=FitResponse)
    def fit_route(req: FitRequest) -> FitResponse:
        return handle_fit(req)

    @app.post("/diagnose", response_model=DiagnoseResponse)
    def diagnose_route(req: DiagnoseRequest) -> DiagnoseResponse:
        return handle_diagnose(req)

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate_route(req: SimulateRequest) -> SimulateResponse:
        return handle_simulate(req)

    @app.post("/compare", response_model=CompareResponse)
    def compare_route(req: CompareRequest) -> CompareResponse:
        return handle_compare(req)

    return app
