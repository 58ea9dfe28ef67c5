"""Command-line client for the detection service.

Every command speaks HTTP to the service layer. With no ``--server``
the service app runs in-process over an ASGI transport, so single-shot
benchmarking needs no daemon; ``--server http://host:port`` targets a
running ``ladkit serve`` instance (paths in requests are resolved on
the server host).

Exit codes: 0 success, 2 configuration error, 3 input/output error,
4 numeric overflow, 1 anything else.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys

import httpx

EXIT_CODES = {"config": 2, "data": 3, "io": 3, "not_found": 3, "overflow": 4}


class CliError(Exception):
    def __init__(self, message, exit_code):
        super().__init__(message)
        self.exit_code = exit_code


def _parse_set(pairs):
    overrides = {}
    for pair in pairs or []:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise CliError(f"--set expects key=value, got {pair!r}", 2)
        overrides[key.strip()] = value.strip()
    return overrides


def _parse_variant(text):
    parts = text.split()
    if not parts:
        raise CliError("--variant expects 'NAME [key=value ...]'", 2)
    return {"name": parts[0], "overrides": _parse_set(parts[1:])}


async def _request(server, method, path, body=None):
    if server:
        async with httpx.AsyncClient(base_url=server, timeout=None) as client:
            response = await client.request(method, path, json=body)
    else:
        from .service.app import create_app

        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(
            transport=transport, base_url="http://ladkit.local", timeout=None
        ) as client:
            response = await client.request(method, path, json=body)
    return response.status_code, response.json()


def call(server, method, path, body=None):
    try:
        status, doc = asyncio.run(_request(server, method, path, body))
    except httpx.HTTPError as exc:
        raise CliError(f"cannot reach service: {exc}", 1) from None
    if status >= 400:
        kind = doc.get("kind", "error") if isinstance(doc, dict) else "error"
        message = doc.get("message", doc) if isinstance(doc, dict) else doc
        raise CliError(f"{kind}: {message}", EXIT_CODES.get(kind, 1))
    return doc


def cmd_run(args):
    body = {
        "algorithm": args.algorithm,
        "input_path": args.input,
        "labels_path": args.labels,
        "preset": args.preset,
        "overrides": _parse_set(args.set),
        "duplicate_n": args.duplicate,
        "k": args.k,
        "seed": args.seed,
        "out_dir": args.out,
        "name": args.name,
    }
    doc = call(args.server, "POST", "/runs", body)
    metrics = doc["report"]["metrics"]
    evaluation = doc["report"]["evaluation"]
    print(f"run {doc['name']}: {doc['report']['algorithm']} on {doc['report']['series']['name']}")
    print(
        "  precision={precision:.3f} recall={recall:.3f} fscore={fscore:.3f} "
        "training_ratio={training_ratio:.4f}".format(**metrics)
    )
    print(
        f"  adt_nt={metrics['adt_nt_mean']:.4f}s adt_t={metrics['adt_t_mean']:.4f}s "
        f"events={evaluation['events']} trainings={evaluation['trainings']}"
    )
    for path in doc["files"]:
        print(f"  wrote {path}")
    return 0


def cmd_compare(args):
    variants = [_parse_variant(v) for v in args.variant or []]
    body = {
        "algorithm": args.algorithm,
        "input_path": args.input,
        "labels_path": args.labels,
        "preset": args.preset,
        "overrides": _parse_set(args.set),
        "duplicate_n": args.duplicate,
        "k": args.k,
        "seed": args.seed,
        "out_dir": args.out,
        "variants": variants,
    }
    doc = call(args.server, "POST", "/compare", body)
    print(doc["table"])
    for path in doc["files"]:
        print(f"wrote {path}")
    return 0


def cmd_presets(args):
    doc = call(args.server, "GET", "/presets")
    for name, flat in doc["presets"].items():
        print(f"[{name}]")
        for key in sorted(flat):
            print(f"  {key}={flat[key]}")
    return 0


def cmd_serve(args):
    import uvicorn

    uvicorn.run("ladkit.service.app:app", host=args.host, port=args.port, log_level="info")
    return 0


def _add_common(parser):
    parser.add_argument("--server", default=None,
                        help="service URL; default runs the service in-process")


def _add_run_flags(parser):
    parser.add_argument("--algorithm", choices=("repad", "salad"), default="repad")
    parser.add_argument("--input", required=True, help="series CSV (timestamp,value)")
    parser.add_argument("--labels", default=None, help="label JSON (points/collectives)")
    parser.add_argument("--preset", default=None,
                        help="table4 | table5_nyc | table5_tmrt")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="config override; repeatable")
    parser.add_argument("--duplicate", type=int, default=1, metavar="N",
                        help="repeat the series N times (labels tiled to match)")
    parser.add_argument("--k", type=int, default=None,
                        help="matching window slack (default from the interval)")
    parser.add_argument("--seed", type=int, default=None, help="override the model seed")
    parser.add_argument("--out", default=None, metavar="DIR",
                        help="write verdicts.csv/report.json/plot.csv here")
    _add_common(parser)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ladkit",
        description="Online adaptive lightweight time-series anomaly detection",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one detector over one series")
    _add_run_flags(run_p)
    run_p.add_argument("--name", default="run")
    run_p.set_defaults(func=cmd_run)

    cmp_p = sub.add_parser("compare", help="run >= 2 config variants on one series")
    _add_run_flags(cmp_p)
    cmp_p.add_argument("--variant", action="append", metavar="'NAME KEY=VALUE ...'",
                       help="named variant; repeat for each run")
    cmp_p.set_defaults(func=cmd_compare)

    presets_p = sub.add_parser("presets", help="print every preset's full expansion")
    _add_common(presets_p)
    presets_p.set_defaults(func=cmd_presets)

    serve_p = sub.add_parser("serve", help="start the HTTP service")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8460)
    serve_p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except json.JSONDecodeError as exc:
        print(f"error: bad response from service: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
