"""Command-line front end: a thin client of the HTTP service.

``fwmsim <scenario> --config file.yaml [--out path] [--format csv|json]
[--seed N]`` loads the YAML config, posts it to the service's /run endpoint,
and writes the returned table.  By default the service app is invoked
in-process (no server needed); ``--server URL`` targets a running instance
instead, and ``fwmsim serve`` starts one.

Exit codes: 0 success, 2 config error, 3 tolerance violation in oracle-check.
"""

from __future__ import annotations

import argparse
import sys

import httpx

from .config import SCENARIOS, ConfigError, load_config
from .tables import ResultTable

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_TOLERANCE = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fwmsim",
        description="Dual four-wave-mixing interferometer scenario runner.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SCENARIOS:
        p = sub.add_parser(name, help=f"run the {name} scenario")
        p.add_argument("--config", required=True, help="YAML scenario config")
        p.add_argument("--out", default=None, help="output file (default: config's output.path, else stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=None)
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--server", default=None, help="base URL of a running service; default runs in-process")
    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _post_run(payload: dict, server: str | None) -> tuple[int, dict]:
    """POST the config to /run, remotely or against the in-process app."""
    if server is not None:
        with httpx.Client(base_url=server, timeout=600.0) as client:
            resp = client.post("/run", json=payload)
            return resp.status_code, resp.json()

    import asyncio

    from .service.app import app  # deferred: keeps --help fast

    async def go() -> tuple[int, dict]:
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://fwmsim.local", timeout=600.0
        ) as client:
            resp = await client.post("/run", json=payload)
            return resp.status_code, resp.json()

    return asyncio.run(go())


def _run_scenario(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    payload = cfg.echo()
    payload["scenario"] = args.command
    if args.seed is not None:
        payload["seed"] = args.seed

    status, doc = _post_run(payload, args.server)
    if status == 422:
        print(f"config error: {doc.get('detail', doc)}", file=sys.stderr)
        return EXIT_CONFIG
    if status != 200:
        print(f"service error {status}: {doc}", file=sys.stderr)
        return 1
    table = ResultTable(doc["columns"], doc["rows"], doc["metadata"])

    fmt = args.format
    if fmt is None:
        fmt = cfg.output.format if cfg.output is not None else "csv"
    out = args.out
    if out is None and cfg.output is not None:
        out = cfg.output.path
    if out is None:
        sys.stdout.write(table.to_csv_text() if fmt == "csv" else table.to_json_text())
    else:
        table.write(out, fmt)
        print(f"wrote {out}", file=sys.stderr)

    violations = table.metadata.get("violations", [])
    if violations:
        print(f"{len(violations)} tolerance violation(s):", file=sys.stderr)
        for v in violations:
            print(
                f"  T={v['T']} alpha_sq={v['alpha_sq']} metric={v['metric']} "
                f"closed_vs_density={v['closed_vs_density']:.3e} "
                f"closed_vs_nonperturbative={v['closed_vs_nonperturbative']:.3e}",
                file=sys.stderr,
            )
        return EXIT_TOLERANCE
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        uvicorn.run("fwmsim.service.app:app", host=args.host, port=args.port)
        return EXIT_OK
    return _run_scenario(args)


if __name__ == "__main__":
    raise SystemExit(main())
