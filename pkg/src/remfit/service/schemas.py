"""Request/response models for the HTTP service and the in-process client.

Wire conventions match the file formats: actor ids are 1-based, exact-mode
edgelists end with a terminal (horizon, null, null) row, and non-finite
floats are transported as null.
"""
from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict

Row = list[Optional[float]]


class CovariatePayload(BaseModel):
    snd: Optional[list[list[float]]] = None
    rec: Optional[list[list[float]]] = None
    inter: Optional[list[list[float]]] = None
    event: Optional[list[list[list[float]]]] = None


class FitRequest(BaseModel):
    edgelist: list[Row]
    n: int
    timing: Literal["ordinal", "exact"] = "ordinal"
    effects: list[str]
    group_actor: Optional[int] = None
    covariates: Optional[CovariatePayload] = None
    max_iter: int = 500
    tol: float = 1e-6
    initial: Optional[list[float]] = None
    compute_hessian: bool = True


class FitResponse(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="null")

    converged: bool
    timing: Literal["ordinal", "exact"]
    n: int
    m: int
    k: int
    names: list[str]
    theta: list[float]
    se: list[Optional[float]]
    z: list[Optional[float]]
    p: list[Optional[float]]
    loglik: float
    null_loglik: float
    deviance: float
    null_deviance: float
    chi_square: float
    chi_df: int
    chi_p: float
    aic: float
    aicc: Optional[float]
    bic: float
    df_model: int
    df_resid: int
    df_null: int
    iterations: int
    gradient_norm: float
    residuals: list[float]
    censoring_deviance: float
    observed_ranks: list[int]
    sender_match: list[bool]
    receiver_match: list[bool]
    warnings: list[str]
    effects: list[str]
    group_actor: Optional[int] = None
    edgelist: list[Row]


class DiagnoseRequest(BaseModel):
    fit: FitResponse
    rule: Literal["residual", "rank"] = "residual"
    q: float = 0.05
    cutoff: float = 3.0


class AdequacyPayload(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="null")

    m: int
    n: int
    timing: Literal["ordinal", "exact"]
    null_residual: Optional[float]
    null_guessing_equivalent: Optional[float]
    frac_below_null: Optional[float]
    frac_at_null: Optional[float]
    frac_above_null: Optional[float]
    frac_below_cutoff: float
    cutoff: float
    guessing_equivalent_quantiles: dict[str, float]
    sender_match_rate: float
    receiver_match_rate: float
    all_match_rate: float
    any_match_rate: float
    rank_ecdf: list[list[float]]
    residuals: list[float]
    observed_ranks: list[int]


class DiagnoseResponse(BaseModel):
    adequacy: AdequacyPayload
    rule: Literal["residual", "rank"]
    q: float
    surprise_count: int
    hist_edges: list[float]
    hist_counts: list[int]
    surprise_edgelist: list[Row]
    surprise_sociomatrix: list[list[int]]


class SimulateRequest(BaseModel):
    n: int
    theta: list[float]
    effects: list[str]
    group_actor: Optional[int] = None
    covariates: Optional[CovariatePayload] = None
    max_events: Optional[int] = None
    horizon: Optional[float] = None
    seed: int = 0


class SimulateResponse(BaseModel):
    n: int
    m: int
    horizon: float
    seed: int
    theta: list[float]
    effects: list[str]
    group_actor: Optional[int] = None
    edgelist: list[Row]


class CompareRequest(BaseModel):
    fit_a: FitResponse
    fit_b: FitResponse


class ModelSummary(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="null")

    k: int
    deviance: float
    aic: float
    aicc: Optional[float]
    bic: float


class CompareResponse(BaseModel):
    models: list[ModelSummary]
    delta_aic: float
    delta_bic: float
    preferred_aic: Literal["A", "B", "tie"]
    preferred_bic: Literal["A", "B", "tie"]
