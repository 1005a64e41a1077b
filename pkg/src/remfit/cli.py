"""Command-line front end.

Subcommands cover the full workflow: fit, diagnose, simulate, compare, and
serve. By default every command runs in process; pass --server URL to send
the same request to a running service instead. Options may also come from a
JSON config file (--config); explicit flags win over config values.

Exit codes: 0 success, 2 input or configuration error, 3 numerical or
convergence failure. A fit that fails to converge still writes its artifacts
from the best iterate before exiting 3.
"""
from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import click
import httpx
import numpy as np

from . import __version__
from .errors import (
    BindingError,
    ConvergenceError,
    MissingValueError,
    ParameterError,
    RemError,
    ShapeError,
)
from .errors import BY_NAME
from .history import _read_csv_rows
from .service.api import (
    handle_compare,
    handle_diagnose,
    handle_fit,
    handle_simulate,
)
from .service.schemas import (
    CompareRequest,
    CompareResponse,
    CovariatePayload,
    DiagnoseRequest,
    DiagnoseResponse,
    FitRequest,
    FitResponse,
    SimulateRequest,
    SimulateResponse,
)

_EPS_P = 2.220446049250313e-16
_COV_SLOTS = {"CovSnd": "snd", "CovRec": "rec", "CovInt": "inter", "CovEvent": "event"}


class ServiceClient:
    """Dispatches requests locally or to a remote service."""

    _ROUTES = {
        "fit": (handle_fit, "/fit", FitResponse),
        "diagnose": (handle_diagnose, "/diagnose", DiagnoseResponse),
        "simulate": (handle_simulate, "/simulate", SimulateResponse),
        "compare": (handle_compare, "/compare", CompareResponse),
    }

    def __init__(self, server: str | None = None):
        self.server = server.rstrip("/") if server else None

    def call(self, name: str, request):
        handler, path, response_cls = self._ROUTES[name]
        if self.server is None:
            return handler(request)
        resp = httpx.post(
            self.server + path, json=request.model_dump(mode="json"), timeout=600.0
        )
        if resp.status_code != 200:
            self._raise_remote(resp)
        return response_cls.model_validate(resp.json())

    @staticmethod
    def _raise_remote(resp: httpx.Response):
        try:
            payload = resp.json()
        except ValueError:
            raise RemError(f"server returned status {resp.status_code}") from None
        err = payload.get("error") if isinstance(payload, dict) else None
        if isinstance(err, dict):
            cls = BY_NAME.get(err.get("type", ""), RemError)
            raise cls(err.get("message", "server error"))
        raise ParameterError(f"server rejected request: {json.dumps(payload)}")


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ParameterError(f"config {path}: invalid JSON ({e})") from None
    if not isinstance(data, dict):
        raise ParameterError(f"config {path}: expected a JSON object")
    return data


def _opt(flag, cfg: dict, key: str, default=None):
    if flag is not None:
        return flag
    return cfg.get(key, default)


def _require(value, name: str):
    if value is None:
        raise ParameterError(f"--{name} is required (flag or config)")
    return value


def _parse_effects(value) -> list[str]:
    if isinstance(value, str):
        items = [e.strip() for e in value.split(",")]
    else:
        items = [str(e).strip() for e in value]
    items = [e for e in items if e]
    if not items:
        raise ParameterError("--effects is empty")
    return items


def _load_matrix(path: str) -> np.ndarray:
    try:
        return np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64)
    except ValueError:
        return np.loadtxt(path, ndmin=2, dtype=np.float64)


def _covariate_payload(bindings: dict, n: int) -> CovariatePayload | None:
    if not bindings:
        return None
    fields: dict = {}
    for name, path in bindings.items():
        slot = _COV_SLOTS.get(name)
        if slot is None:
            raise BindingError(f"unknown covariate slot {name!r} (expected one of {sorted(_COV_SLOTS)})")
        arr = _load_matrix(str(path))
        if name == "CovEvent":
            if arr.shape[1] != n or arr.shape[0] % n != 0:
                raise ShapeError(
                    f"{name}: file is {arr.shape[0]}x{arr.shape[1]}, expected p*{n} rows x {n} cols"
                )
            arr = arr.reshape(-1, n, n)
        fields[slot] = arr.tolist()
    return CovariatePayload(**fields)


def _parse_covar_flags(items: tuple[str, ...]) -> dict:
    out: dict = {}
    for item in items:
        if "=" not in item:
            raise ParameterError(f"--covar expects NAME=PATH, got {item!r}")
        name, path = item.split("=", 1)
        out[name.strip()] = path.strip()
    return out


def _covar_bindings(covar_flags, cfg) -> dict:
    """Merge --covar flags with the config 'covar' key (mapping or NAME=PATH list)."""
    if covar_flags:
        return _parse_covar_flags(covar_flags)
    raw = cfg.get("covar", {})
    if isinstance(raw, dict):
        return dict(raw)
    return _parse_covar_flags(tuple(raw))


def _apply_intercept(effects: list[str], payload: CovariatePayload | None, n: int):
    """Translate the 'intercept' pseudo-effect into a constant CovSnd column."""
    if "intercept" not in effects:
        return effects, payload
    translated: list[str] = []
    for e in effects:
        if e == "intercept":
            if "CovSnd" not in effects:
                translated.append("CovSnd")
        else:
            translated.append(e)
    snd = None if payload is None else payload.snd
    ones = [[1.0] for _ in range(n)]
    if snd is None:
        snd = ones
    else:
        if len(snd) != n:
            raise ShapeError(f"CovSnd: {len(snd)} rows for {n} actors")
        snd = [[1.0] + list(row) for row in snd]
    if payload is None:
        payload = CovariatePayload(snd=snd)
    else:
        payload = payload.model_copy(update={"snd": snd})
    return translated, payload


def _load_edgelist_rows(path: str) -> list[list]:
    """Raw (t, s, r) rows in wire form; empty cells become null."""
    if str(path).endswith(".json"):
        data = json.loads(Path(path).read_text())
        if not isinstance(data, list):
            raise ShapeError(f"{path}: expected a JSON array of triples")
        rows = data
    else:
        rows = [list(row) for row in _read_csv_rows(path)]
    wire: list[list] = []
    for i, row in enumerate(rows, start=1):
        if len(row) != 3:
            raise ShapeError(f"{path} row {i}: expected 3 fields, got {len(row)}")
        cells = []
        for cell in row:
            if cell is None or (isinstance(cell, str) and cell.strip() == ""):
                cells.append(None)
            else:
                cells.append(float(cell))
        wire.append(cells)
    if not wire:
        raise MissingValueError(f"{path}: empty edgelist")
    return wire


def _load_theta(path: str) -> list[float]:
    text = Path(path).read_text()
    if str(path).endswith(".json"):
        data = json.loads(text)
        flat = np.asarray(data, dtype=np.float64).ravel()
    else:
        try:
            flat = np.asarray(
                [float(tok) for tok in text.replace(",", " ").split()], dtype=np.float64
            )
        except ValueError:
            raise ParameterError(f"theta file {path}: could not parse numbers") from None
    if flat.size == 0:
        raise MissingValueError(f"theta file {path}: no values")
    return [float(v) for v in flat]


def _outdir(out: str) -> Path:
    p = Path(out)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _fmt_p(p: float | None) -> str:
    if p is None or math.isnan(p):
        return "NaN"
    if p < _EPS_P:
        return "< 2.2e-16"
    return f"{p:.5g}"


def _stars(p: float | None) -> str:
    if p is None or math.isnan(p):
        return ""
    if p <= 0.001:
        return "***"
    if p <= 0.01:
        return "**"
    if p <= 0.05:
        return "*"
    if p <= 0.1:
        return "."
    return " "


def _g7(x: float | None) -> str:
    if x is None:
        return "Inf"
    if math.isinf(x):
        return "Inf" if x > 0 else "-Inf"
    return f"{x:.7g}"


def render_summary(resp: FitResponse) -> str:
    """Human-readable fit summary, laid out like a regression printout."""
    flavor = "Ordinal" if resp.timing == "ordinal" else "Temporal"
    lines = [f"Relational Event Model ({flavor} Likelihood)", ""]
    table = []
    for name, est, se, z, p in zip(resp.names, resp.theta, resp.se, resp.z, resp.p):
        table.append(
            (
                name,
                f"{est:.6f}",
                "NaN" if se is None else f"{se:.6f}",
                "NaN" if z is None else f"{z:.3f}",
                _fmt_p(p),
                _stars(p),
            )
        )
    headers = ("", "Estimate", "Std.Err", "Z value", "Pr(>|z|)", "")
    widths = [
        max(len(headers[j]), max(len(row[j]) for row in table)) for j in range(6)
    ]
    def lay(row):
        name = row[0].ljust(widths[0])
        cells = [row[j].rjust(widths[j]) for j in range(1, 5)]
        return " ".join([name, *cells, row[5]]).rstrip()
    lines.append(lay(headers))
    lines.extend(lay(row) for row in table)
    lines.append("---")
    lines.append("Signif. codes:  0 '***' 0.001 '**' 0.01 '*' 0.05 '.' 0.1 ' ' 1")
    lines.append(f"Null deviance: {_g7(resp.null_deviance)} on {resp.df_null} degrees of freedom")
    lines.append(f"Residual deviance: {_g7(resp.deviance)} on {resp.df_resid} degrees of freedom")
    lines.append(
        f"\tChi-square: {_g7(resp.chi_square)} on {resp.chi_df} degrees of freedom,"
        f" asymptotic p-value {_g7(resp.chi_p)}"
    )
    lines.append(f"AIC: {_g7(resp.aic)} AICC: {_g7(resp.aicc)} BIC: {_g7(resp.bic)}")
    if not resp.converged:
        lines.append("")
        lines.append("Warning: estimation did not converge; estimates are the best iterate")
    for w in resp.warnings:
        lines.append(f"Warning: {w}")
    return "\n".join(lines) + "\n"


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_rows_csv(path: Path, header: str, rows) -> None:
    lines = [header]
    for row in rows:
        lines.append(",".join(_csv_cell(c) for c in row))
    path.write_text("\n".join(lines) + "\n")


def _edge_cells(row) -> list:
    t, s, r = row
    return [float(t), None if s is None else int(s), None if r is None else int(r)]


def write_fit_artifacts(resp: FitResponse, out: Path) -> None:
    (out / "fit.json").write_text(resp.model_dump_json(indent=2) + "\n")
    (out / "summary.txt").write_text(render_summary(resp))
    _write_rows_csv(
        out / "residuals.csv",
        "event,residual",
        ((i + 1, float(d)) for i, d in enumerate(resp.residuals)),
    )
    _write_rows_csv(
        out / "ranks.csv",
        "event,rank,sender_match,receiver_match",
        (
            (i + 1, rank, int(sm), int(rm))
            for i, (rank, sm, rm) in enumerate(
                zip(resp.observed_ranks, resp.sender_match, resp.receiver_match)
            )
        ),
    )


def write_diagnose_artifacts(resp: DiagnoseResponse, out: Path) -> None:
    (out / "adequacy.json").write_text(resp.adequacy.model_dump_json(indent=2) + "\n")
    _write_rows_csv(
        out / "residual_hist.csv",
        "bin_left,bin_right,count",
        (
            (float(resp.hist_edges[i]), float(resp.hist_edges[i + 1]), resp.hist_counts[i])
            for i in range(len(resp.hist_counts))
        ),
    )
    _write_rows_csv(
        out / "rank_ecdf.csv",
        "rank_fraction,coverage",
        ((float(f), float(c)) for f, c in resp.adequacy.rank_ecdf),
    )
    _write_rows_csv(
        out / "surprise_edgelist.csv",
        "t,s,r",
        (_edge_cells(row) for row in resp.surprise_edgelist),
    )
    _write_rows_csv(
        out / "surprise_sociomatrix.csv",
        ",".join(str(i + 1) for i in range(len(resp.surprise_sociomatrix))),
        resp.surprise_sociomatrix,
    )


def write_simulate_artifacts(resp: SimulateResponse, out: Path) -> None:
    _write_rows_csv(
        out / "simulated_edgelist.csv",
        "t,s,r",
        (_edge_cells(row) for row in resp.edgelist),
    )
    provenance = {
        "version": __version__,
        "n": resp.n,
        "m": resp.m,
        "horizon": resp.horizon,
        "seed": resp.seed,
        "theta": resp.theta,
        "effects": resp.effects,
        "group_actor": resp.group_actor,
    }
    (out / "provenance.json").write_text(json.dumps(provenance, indent=2, sort_keys=True) + "\n")


def _invoke(action):
    try:
        return action()
    except RemError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(e.exit_code)
    except httpx.HTTPError as e:
        click.echo(f"error: server request failed: {e}", err=True)
        sys.exit(2)
    except OSError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)


@click.group()
@click.version_option(version=__version__, prog_name="remfit")
def main():
    """Relational event model fitting, diagnostics, and simulation."""


_out_option = click.option(
    "--out", envvar="REMFIT_OUT", default=".", show_default=True,
    help="Output directory for artifacts (env REMFIT_OUT).",
)
_server_option = click.option("--server", default=None, help="Remote service URL; default runs in process.")
_config_option = click.option("--config", "config_path", default=None, help="JSON config file; flags override it.")


@main.command("fit")
@click.option("--edgelist", default=None, help="Event list CSV or JSON (t,s,r header; 1-based ids).")
@click.option("--n", "n_actors", type=int, default=None, help="Number of actors.")
@click.option("--timing", type=click.Choice(["ordinal", "exact"]), default=None,
              help="Likelihood and edgelist convention.  [default: ordinal]")
@click.option("--effects", default=None, help="Comma-separated effect names ('intercept' allowed).")
@click.option("--covar", multiple=True, help="Covariate binding NAME=PATH (repeatable).")
@click.option("--group-actor", type=int, default=None, help="1-based id of the group pseudo-actor.")
@click.option("--max-iter", type=int, default=None, help="Optimizer iteration cap.  [default: 500]")
@click.option("--tol", type=float, default=None, help="Gradient tolerance.  [default: 1e-6]")
@click.option("--no-hessian", is_flag=True, default=False, help="Skip standard errors.")
@_out_option
@_server_option
@_config_option
def fit_cmd(edgelist, n_actors, timing, effects, covar, group_actor, max_iter, tol,
            no_hessian, out, server, config_path):
    """Fit a model and write summary.txt, fit.json, residuals.csv, ranks.csv."""

    def action():
        cfg = _load_config(config_path)
        n = int(_require(_opt(n_actors, cfg, "n"), "n"))
        path = _require(_opt(edgelist, cfg, "edgelist"), "edgelist")
        effect_list = _parse_effects(_require(_opt(effects or None, cfg, "effects"), "effects"))
        bindings = _covar_bindings(covar, cfg)
        payload = _covariate_payload(bindings, n)
        effect_list, payload = _apply_intercept(effect_list, payload, n)
        request = FitRequest(
            edgelist=_load_edgelist_rows(path),
            n=n,
            timing=_opt(timing, cfg, "timing", "ordinal"),
            effects=effect_list,
            group_actor=_opt(group_actor, cfg, "group_actor"),
            covariates=payload,
            max_iter=int(_opt(max_iter, cfg, "max_iter", 500)),
            tol=float(_opt(tol, cfg, "tol", 1e-6)),
            compute_hessian=not (no_hessian or cfg.get("no_hessian", False)),
        )
        resp = ServiceClient(_opt(server, cfg, "server")).call("fit", request)
        outdir = _outdir(_opt(None if out == "." else out, cfg, "out", out))
        write_fit_artifacts(resp, outdir)
        click.echo(render_summary(resp), nl=False)
        click.echo(f"artifacts written to {outdir}")
        if not resp.converged:
            click.echo("error: estimation did not converge (artifacts hold the best iterate)", err=True)
            sys.exit(3)

    _invoke(action)


@main.command("diagnose")
@click.option("--fit", "fit_path", default=None, help="fit.json produced by the fit subcommand.")
@click.option("--rule", type=click.Choice(["residual", "rank"]), default=None,
              help="Surprise rule.  [default: residual; rank for exact fits]")
@click.option("--q", type=float, default=None, help="Rank-rule quantile.  [default: 0.05]")
@click.option("--cutoff", type=float, default=None, help="Fixed residual cutoff.  [default: 3.0]")
@_out_option
@_server_option
@_config_option
def diagnose_cmd(fit_path, rule, q, cutoff, out, server, config_path):
    """Adequacy report and surprise extraction from a fit artifact."""

    def action():
        cfg = _load_config(config_path)
        path = _require(_opt(fit_path, cfg, "fit"), "fit")
        fit_resp = FitResponse.model_validate_json(Path(path).read_text())
        chosen_rule = _opt(rule, cfg, "rule")
        if chosen_rule is None:
            chosen_rule = "residual" if fit_resp.timing == "ordinal" else "rank"
        request = DiagnoseRequest(
            fit=fit_resp,
            rule=chosen_rule,
            q=float(_opt(q, cfg, "q", 0.05)),
            cutoff=float(_opt(cutoff, cfg, "cutoff", 3.0)),
        )
        resp = ServiceClient(_opt(server, cfg, "server")).call("diagnose", request)
        outdir = _outdir(_opt(None if out == "." else out, cfg, "out", out))
        write_diagnose_artifacts(resp, outdir)
        a = resp.adequacy
        click.echo(
            f"match rates: sender {a.sender_match_rate:.7g}, receiver {a.receiver_match_rate:.7g},"
            f" all {a.all_match_rate:.7g}, any {a.any_match_rate:.7g}"
        )
        click.echo(f"surprising events ({resp.rule} rule): {resp.surprise_count} of {a.m}")
        click.echo(f"artifacts written to {outdir}")

    _invoke(action)


@main.command("simulate")
@click.option("--n", "n_actors", type=int, default=None, help="Number of actors.")
@click.option("--theta", "theta_path", default=None, help="Parameter file (JSON array or plain numbers).")
@click.option("--effects", default=None, help="Comma-separated effect names ('intercept' allowed).")
@click.option("--covar", multiple=True, help="Covariate binding NAME=PATH (repeatable).")
@click.option("--group-actor", type=int, default=None, help="1-based id of the group pseudo-actor.")
@click.option("--max-events", type=int, default=None, help="Stop after this many events.")
@click.option("--horizon", type=float, default=None, help="Stop (censor) at this time.")
@click.option("--seed", type=int, default=None, help="RNG seed (counter-based generator).  [default: 0]")
@_out_option
@_server_option
@_config_option
def simulate_cmd(n_actors, theta_path, effects, covar, group_actor, max_events, horizon,
                 seed, out, server, config_path):
    """Sample a history; writes simulated_edgelist.csv and provenance.json."""

    def action():
        cfg = _load_config(config_path)
        n = int(_require(_opt(n_actors, cfg, "n"), "n"))
        effect_list = _parse_effects(_require(_opt(effects or None, cfg, "effects"), "effects"))
        bindings = _covar_bindings(covar, cfg)
        payload = _covariate_payload(bindings, n)
        effect_list, payload = _apply_intercept(effect_list, payload, n)
        theta_file = _opt(theta_path, cfg, "theta")
        theta = _load_theta(str(_require(theta_file, "theta")))
        request = SimulateRequest(
            n=n,
            theta=theta,
            effects=effect_list,
            group_actor=_opt(group_actor, cfg, "group_actor"),
            covariates=payload,
            max_events=_opt(max_events, cfg, "max_events"),
            horizon=_opt(horizon, cfg, "horizon"),
            seed=int(_opt(seed, cfg, "seed", 0)),
        )
        resp = ServiceClient(_opt(server, cfg, "server")).call("simulate", request)
        outdir = _outdir(_opt(None if out == "." else out, cfg, "out", out))
        write_simulate_artifacts(resp, outdir)
        click.echo(f"simulated {resp.m} events over horizon {resp.horizon!r} (seed {resp.seed})")
        click.echo(f"artifacts written to {outdir}")

    _invoke(action)


@main.command("compare")
@click.option("--fit-a", "fit_a_path", default=None, help="First fit.json.")
@click.option("--fit-b", "fit_b_path", default=None, help="Second fit.json.")
@_out_option
@_server_option
@_config_option
def compare_cmd(fit_a_path, fit_b_path, out, server, config_path):
    """Information-criterion comparison of two fits; writes compare.json."""

    def action():
        cfg = _load_config(config_path)
        a = FitResponse.model_validate_json(Path(_require(_opt(fit_a_path, cfg, "fit_a"), "fit-a")).read_text())
        b = FitResponse.model_validate_json(Path(_require(_opt(fit_b_path, cfg, "fit_b"), "fit-b")).read_text())
        request = CompareRequest(fit_a=a, fit_b=b)
        resp = ServiceClient(_opt(server, cfg, "server")).call("compare", request)
        outdir = _outdir(_opt(None if out == "." else out, cfg, "out", out))
        (outdir / "compare.json").write_text(resp.model_dump_json(indent=2) + "\n")
        click.echo(f"delta AIC (A - B): {resp.delta_aic:.7g}; preferred by AIC: {resp.preferred_aic}")
        click.echo(f"delta BIC (A - B): {resp.delta_bic:.7g}; preferred by BIC: {resp.preferred_bic}")
        click.echo(f"artifacts written to {outdir}")

    _invoke(action)


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve_cmd(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service.api import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
