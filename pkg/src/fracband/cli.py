"""Command line: solve | convergence | spy | bench | serve.

Every data command is a thin client of the HTTP service.  By default the
app is mounted in-process (no socket); --server points the same requests
at a running instance instead.  Exit codes: 0 success, 2 parse or problem
file errors, 3 solver errors.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys

import httpx


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _fmt_complex(re: float, im: float) -> str:
    return f"{float(re):.17g}{float(im):+.17g}j"


def _request(path: str, payload: dict, server: str | None):
    async def go():
        if server is None:
            from .service import app

            transport = httpx.ASGITransport(app=app)
            async with httpx.AsyncClient(
                transport=transport, base_url="http://fracband", timeout=None
            ) as client:
                return await client.post(path, json=payload)
        async with httpx.AsyncClient(base_url=server, timeout=None) as client:
            return await client.post(path, json=payload)

    return asyncio.run(go())


def _load_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        print(f"cannot read {path}: {exc}", file=sys.stderr)
        raise SystemExit(2)
    except json.JSONDecodeError as exc:
        print(f"{path}: invalid JSON: {exc}", file=sys.stderr)
        raise SystemExit(2)


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")


def _run(path: str, payload: dict, server: str | None) -> dict:
    try:
        resp = _request(path, payload, server)
    except httpx.HTTPError as exc:
        print(f"request failed: {exc}", file=sys.stderr)
        raise SystemExit(3)
    if resp.status_code == 200:
        return resp.json()
    try:
        detail = resp.json().get("detail")
    except ValueError:
        detail = None
    if isinstance(detail, dict) and "message" in detail:
        print(detail["message"], file=sys.stderr)
        raise SystemExit(2 if detail.get("kind") == "parse" else 3)
    if isinstance(detail, list):
        # request-model validation straight from the service layer
        msgs = "; ".join(
            f"{'.'.join(str(p) for p in d.get('loc', []))}: {d.get('msg')}"
            for d in detail[:4]
        )
        print(f"bad request: {msgs}", file=sys.stderr)
        raise SystemExit(2)
    print(f"service error (HTTP {resp.status_code})", file=sys.stderr)
    raise SystemExit(3)


def _ns_list(text: str) -> list[int]:
    try:
        return [int(p) for p in text.replace(" ", "").split(",") if p]
    except ValueError:
        raise argparse.ArgumentTypeError("expected a comma-separated list of integers")


def cmd_solve(args) -> int:
    payload = {"problem": _load_file(args.file), "grid": args.grid}
    if args.n is not None:
        payload["n"] = args.n
    if args.tol is not None:
        payload["tol"] = args.tol
    data = _run("/solve", payload, args.server)
    if args.format == "json":
        _emit(json.dumps(data, indent=2), args.out)
    else:
        lines = ["x,u_re,u_im"]
        for p in data["points"]:
            lines.append(f"{_fmt(p['x'])},{_fmt(p['re'])},{_fmt(p['im'])}")
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_convergence(args) -> int:
    payload = {"problem": _load_file(args.file), "ns": args.ns}
    if args.reference is not None:
        payload["reference"] = args.reference
    if args.tol is not None:
        payload["tol"] = args.tol
    data = _run("/convergence", payload, args.server)
    rows = data["rows"]
    with_true = any(r.get("true_error") is not None for r in rows)
    lines = ["N,estimate,true_error" if with_true else "N,estimate"]
    for r in rows:
        line = f"{r['n']},{_fmt(r['estimate'])}"
        if with_true:
            line += f",{_fmt(r['true_error'])}"
        lines.append(line)
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_spy(args) -> int:
    payload = {"problem": _load_file(args.file)}
    if args.n is not None:
        payload["n"] = args.n
    if args.tol is not None:
        payload["tol"] = args.tol
    data = _run("/spy", payload, args.server)
    entries = data["entries"]
    complex_valued = any(e["im"] != 0.0 for e in entries)
    lines = ["row,col,value"]
    for e in entries:
        value = (
            _fmt_complex(e["re"], e["im"]) if complex_valued else _fmt(e["re"])
        )
        lines.append(f"{e['row']},{e['col']},{value}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_bench(args) -> int:
    payload = {
        "problem": _load_file(args.file),
        "ns": args.ns,
        "repeats": args.repeats,
    }
    if args.tol is not None:
        payload["tol"] = args.tol
    data = _run("/bench", payload, args.server)
    lines = ["N,build_seconds,solve_seconds"]
    for r in data["rows"]:
        lines.append(
            f"{r['n']},{_fmt(r['build_seconds'])},{_fmt(r['solve_seconds'])}"
        )
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("fracband.service:app", host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracband",
        description="Spectral solver for half-integer fractional equations on [-1, 1]",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("file", help="JSON problem file")
        p.add_argument("--server", help="URL of a running service (default: in-process)")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--tol", type=float, help="override the file tolerance")

    p = sub.add_parser("solve", help="solve and emit the solution on a grid")
    common(p)
    p.add_argument("--n", type=int, help="override the truncation size")
    p.add_argument("--grid", type=int, default=100, help="grid point count (default 100)")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("convergence", help="error estimates over a list of sizes")
    common(p)
    p.add_argument("--ns", type=_ns_list, required=True, help="comma-separated sizes")
    p.add_argument("--reference", help="expression for the true solution")
    p.set_defaults(fn=cmd_convergence)

    p = sub.add_parser("spy", help="dump the assembled system's nonzeros")
    common(p)
    p.add_argument("--n", type=int, help="truncation size (required unless the file sets N)")
    p.set_defaults(fn=cmd_spy)

    p = sub.add_parser("bench", help="build/solve timings over sizes")
    common(p)
    p.add_argument("--ns", type=_ns_list, required=True, help="comma-separated sizes")
    p.add_argument("--repeats", type=int, default=3)
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1


if __name__ == "__main__":
    sys.exit(main())
