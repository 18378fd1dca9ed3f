"""Thin command-line client for the compute service.

Subcommands map one-to-one onto service endpoints.  By default requests run
against an in-process application instance (no server needed); pass
``--base-url`` to target a running ``gaussderiv serve`` instead.  File inputs
are read client-side and shipped as plain data.

Exit codes: 0 success, 1 numeric failure, 2 usage error, 3 size-cap refusal.
Errors print machine-readable JSON on stderr.
"""

from __future__ import annotations

import sys

import click

from .dataio import dumps_full_precision, load_sample_csv, parse_matrix, parse_vector, rows_to_csv

_EXIT_BY_CODE = {"usage": 2, "cap": 3, "numeric": 1}


class ClientError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.exit_code = _EXIT_BY_CODE.get(code, 1)


class ServiceClient:
    """POSTs JSON to the service, in-process unless a base URL is given."""

    def __init__(self, base_url: str | None = None):
        if base_url:
            import httpx

            self._client = httpx.Client(base_url=base_url, timeout=None)
        else:
            from fastapi.testclient import TestClient

            from .service.app import create_app

            self._client = TestClient(create_app(), raise_server_exceptions=False)

    def post(self, path: str, payload: dict) -> dict:
        resp = self._client.post(path, json=payload)
        try:
            body = resp.json()
        except ValueError:
            body = {}
        if resp.status_code != 200:
            err = body.get("error") if isinstance(body, dict) else None
            if err:
                raise ClientError(err.get("code", "numeric"), err.get("message", ""))
            code = {400: "usage", 422: "usage", 413: "cap"}.get(resp.status_code, "numeric")
            raise ClientError(code, str(body) or f"HTTP {resp.status_code}")
        return body


def _emit(ctx: click.Context, payload: dict, csv_rows=None, csv_fields=None) -> None:
    fmt = ctx.obj["format"]
    if fmt == "json":
        click.echo(dumps_full_precision(payload))
    else:
        rows = csv_rows if csv_rows is not None else [payload]
        click.echo(rows_to_csv(rows, csv_fields), nl=False)


def _vector_rows(values) -> list[dict]:
    return [{"index": i + 1, "value": v} for i, v in enumerate(values)]


def _run(ctx: click.Context, path: str, payload: dict) -> dict:
    client: ServiceClient = ctx.obj["client"]
    try:
        return client.post(path, payload)
    except ClientError as exc:
        sys.stderr.write(dumps_full_precision({"error": {"code": exc.code, "message": str(exc)}}) + "\n")
        sys.exit(exc.exit_code)


@click.group()
@click.option("--base-url", default=None, help="URL of a running service; default runs in-process.")
@click.option(
    "--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True
)
@click.pass_context
def main(ctx: click.Context, base_url: str | None, fmt: str) -> None:
    """Gaussian density derivative toolkit (thin service client)."""
    ctx.ensure_object(dict)
    ctx.obj["client"] = ServiceClient(base_url)
    ctx.obj["format"] = fmt


@main.command()
@click.option("--d", type=int, required=True)
@click.option("--r", type=int, required=True)
@click.option("--method", type=click.Choice(["direct", "recursive"]), default="recursive")
@click.option(
    "--output",
    type=click.Choice(["nnz", "triplets", "export"]),
    default="nnz",
    show_default=True,
    help="'export' prints the text format: a 'd r denominator' header, then 1-based 'row col count' lines.",
)
@click.option("--cap-bytes", type=int, default=None)
@click.pass_context
def symmetrizer(ctx, d, r, method, output, cap_bytes):
    """Symmetrizer matrix: sparse triplet export or stored-entry count."""
    body = _run(
        ctx,
        "/symmetrizer",
        {
            "d": d,
            "r": r,
            "method": method,
            "output": "triplets" if output == "export" else output,
            "cap_bytes": cap_bytes,
        },
    )
    if output == "export":
        lines = [f"{body['d']} {body['r']} {body['scale_denominator']}"]
        lines += [f"{t[0]} {t[1]} {t[2]}" for t in body["triplets"]]
        click.echo("\n".join(lines))
    elif output == "triplets":
        rows = [{"row": t[0], "col": t[1], "count": t[2]} for t in body["triplets"]]
        _emit(ctx, body, rows, ["row", "col", "count"])
    else:
        _emit(
            ctx,
            body,
            [{k: body[k] for k in ("d", "r", "side", "scale_denominator", "nnz_lower")}],
        )


@main.command()
@click.option("--d", type=int, required=True)
@click.option("--r", type=int, required=True)
@click.option("--method", type=click.Choice(["direct", "recursive"]), default="recursive")
@click.option("--v", default=None, help="Inline comma list or CSV file; default seeded normal.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_context
def symv(ctx, d, r, method, v, seed):
    """Apply the symmetrizer to a vector without forming the matrix."""
    vec = parse_vector(v, d**r).tolist() if v is not None else None
    body = _run(ctx, "/symv", {"d": d, "r": r, "method": method, "v": vec, "seed": seed})
    _emit(ctx, body, _vector_rows(body["w"]), ["index", "value"])


@main.command()
@click.option("--d", type=int, default=None, help="Inferred from --x when omitted.")
@click.option("--r", type=int, required=True)
@click.option("--x", "x_arg", required=True, help="Evaluation point: comma list or CSV file.")
@click.option("--sigma", default="identity", show_default=True)
@click.option(
    "--method",
    type=click.Choice(["direct", "full_recursive", "unique"]),
    default="unique",
    show_default=True,
)
@click.pass_context
def deriv(ctx, d, r, x_arg, sigma, method):
    """Derivative vector of the centred Gaussian density."""
    x = parse_vector(x_arg, d)
    sig = parse_matrix(sigma, len(x), name="sigma")
    body = _run(
        ctx, "/deriv", {"x": x.tolist(), "sigma": sig.tolist(), "r": r, "method": method}
    )
    _emit(ctx, body, _vector_rows(body["values"]), ["index", "value"])


@main.command()
@click.option("--d", type=int, default=None, help="Inferred from --mu when omitted.")
@click.option("--r", type=int, required=True)
@click.option("--mu", default=None, help="Mean vector; default zeros.")
@click.option("--sigma", default="identity", show_default=True)
@click.option("--method", type=click.Choice(["explicit", "hermite"]), default="explicit")
@click.pass_context
def moments(ctx, d, r, mu, sigma, method):
    """Raw vector moment of a multivariate normal."""
    if mu is None and d is None:
        raise click.UsageError("give --mu or --d")
    mu_vec = parse_vector(mu, d) if mu is not None else parse_vector("zeros", d)
    sig = parse_matrix(sigma, len(mu_vec), name="sigma")
    body = _run(
        ctx, "/moments", {"mu": mu_vec.tolist(), "sigma": sig.tolist(), "r": r, "method": method}
    )
    _emit(ctx, body, _vector_rows(body["values"]), ["index", "value"])


@main.command()
@click.option("--d", type=int, default=None, help="Inferred from --mu/--sigma when omitted.")
@click.option("--r", type=int, required=True)
@click.option("--s", type=int, default=0, show_default=True)
@click.option("--A", "a_arg", required=True, help="Symmetric matrix: CSV file or inline rows.")
@click.option("--B", "b_arg", default=None)
@click.option("--mu", default=None, help="Mean vector; default zeros.")
@click.option("--sigma", default="identity", show_default=True)
@click.option(
    "--method",
    type=click.Choice(["vector_moment", "cumulant_recursive"]),
    default="cumulant_recursive",
)
@click.option("--check-mp", is_flag=True, help="Also report the published joint-cumulant formula.")
@click.pass_context
def quadform(ctx, d, r, s, a_arg, b_arg, mu, sigma, method, check_mp):
    """Moments and cumulants of quadratic forms in a Gaussian vector."""
    a_mat = parse_matrix(a_arg, d, name="A")
    dd = a_mat.shape[0]
    payload = {
        "a_mat": a_mat.tolist(),
        "b_mat": parse_matrix(b_arg, dd, name="B").tolist() if b_arg else None,
        "mu": (parse_vector(mu, dd) if mu is not None else parse_vector("zeros", dd)).tolist(),
        "sigma": parse_matrix(sigma, dd, name="sigma").tolist(),
        "r": r,
        "s": s,
        "method": method,
        "check_mp": check_mp,
    }
    body = _run(ctx, "/quadform", payload)
    row = {k: body[k] for k in ("d", "r", "s", "method", "nu", "kappa_joint")}
    if body.get("mp_comparison"):
        row.update(body["mp_comparison"])
    _emit(ctx, body, [row])


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--skip-header", is_flag=True)
@click.option("--r", type=int, required=True)
@click.option("--sigma", default="identity", show_default=True)
@click.option("--method", type=click.Choice(["direct", "cumulant"]), default="cumulant")
@click.pass_context
def vstat(ctx, input_path, skip_header, r, sigma, method):
    """Pairwise V-statistic of derivative functionals over a data file."""
    data = load_sample_csv(input_path, skip_header)
    sig = parse_matrix(sigma, data.shape[1], name="sigma")
    body = _run(
        ctx,
        "/vstat",
        {"data": data.tolist(), "sigma": sig.tolist(), "r": r, "method": method},
    )
    _emit(ctx, body, [body])


@main.command("select-bw")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--skip-header", is_flag=True)
@click.option("--r", type=int, default=0, show_default=True)
@click.option("--criterion", type=click.Choice(["CV", "PI", "SCV"]), default="CV", show_default=True)
@click.option("--G", "g_arg", default=None, help="Pilot bandwidth; default normal-scale.")
@click.option("--init", default=None, help="Starting bandwidth; default normal-scale.")
@click.pass_context
def select_bw(ctx, input_path, skip_header, r, criterion, g_arg, init):
    """Minimize a bandwidth-selection criterion over SPD matrices."""
    data = load_sample_csv(input_path, skip_header)
    d = data.shape[1]
    payload = {
        "data": data.tolist(),
        "r": r,
        "criterion": criterion,
        "g_mat": parse_matrix(g_arg, d, name="G").tolist() if g_arg else None,
        "init": parse_matrix(init, d, name="init").tolist() if init else None,
    }
    body = _run(ctx, "/select-bw", payload)
    row = {k: body[k] for k in ("criterion", "r", "value", "converged", "iterations")}
    for i, hrow in enumerate(body["h_mat"]):
        for j, val in enumerate(hrow):
            row[f"h_{i + 1}_{j + 1}"] = val
    _emit(ctx, body, [row])


@main.command()
@click.option(
    "--suite",
    type=click.Choice(
        ["acceptance", "symmetrizer", "symv", "deriv", "moments", "quadform", "vstat"]
    ),
    default="acceptance",
    show_default=True,
)
@click.option("--reps", type=int, default=3, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--d", "d_list", default=None, help="Comma list of dimensions.")
@click.option("--r", "r_list", default=None, help="Comma list of orders.")
@click.option("--n", "n_list", default=None, help="Comma list of sample sizes (vstat).")
@click.pass_context
def bench(ctx, suite, reps, seed, d_list, r_list, n_list):
    """Correctness-gated direct-vs-recursive timing grids."""
    payload = {"suite": suite, "reps": reps, "seed": seed}
    if d_list:
        payload["d_values"] = [int(t) for t in d_list.split(",")]
    if r_list:
        payload["r_values"] = [int(t) for t in r_list.split(",")]
    if n_list:
        payload["n_values"] = [int(t) for t in n_list.split(",")]
    body = _run(ctx, "/bench", payload)
    fields = [
        "scenario", "module", "d", "r", "s", "n", "method_a", "method_b", "reps",
        "mean_a_s", "min_a_s", "mean_b_s", "min_b_s", "ratio", "agree", "tol",
        "skipped", "skip_reason",
    ]
    _emit(ctx, body, body["reports"], fields)


@main.command()
@click.option("--d", "d_list", required=True, help="Comma list of dimensions.")
@click.option("--r", "r_list", required=True, help="Comma list of orders.")
@click.option("--cap-bytes", type=int, default=None)
@click.pass_context
def sparsity(ctx, d_list, r_list, cap_bytes):
    """Stored-entry proportions of the lower triangle per (d, r)."""
    payload = {
        "d_values": [int(t) for t in d_list.split(",")],
        "r_values": [int(t) for t in r_list.split(",")],
        "cap_bytes": cap_bytes,
    }
    body = _run(ctx, "/sparsity", payload)
    fields = ["d", "r", "nnz_lower", "total_lower", "proportion", "skipped", "skip_reason"]
    _emit(ctx, body, body["rows"], fields)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8321, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("gaussderiv.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
