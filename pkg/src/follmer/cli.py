"""Thin command-line client for the experiment service.

By default the CLI talks HTTP to an in-process copy of the service (no
server needed); pass --url to target a running instance instead. File
artifacts are written by the service side, i.e. locally in the default mode.
"""

import argparse
import json
import sys


def _add_target_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--example", type=int, default=None,
                   help="benchmark example id (1..11)")
    p.add_argument("--mixture", default=None, metavar="PATH.json",
                   help="mixture JSON file (read client-side and sent inline)")
    p.add_argument("--dim", type=int, default=None,
                   help="dimension for example 11")
    p.add_argument("--sampler", default="follmer_closed",
                   help="follmer_closed | follmer_mc | mh | tula | tmala | hybrid_*")
    p.add_argument("--k", type=int, default=100, help="flow Euler steps")
    p.add_argument("--m", type=int, default=0,
                   help="Monte Carlo draws per velocity evaluation (0 = closed form)")
    p.add_argument("--eps", type=float, default=1e-3, help="time truncation")
    p.add_argument("--grid", choices=["uniform", "exp"], default="uniform")
    p.add_argument("--n", type=int, default=10_000, help="sample count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--chains", type=int, default=50)
    p.add_argument("--burn-in", type=int, default=10_000, dest="burn_in")
    p.add_argument("--step", type=float, default=0.2, help="MCMC step size")
    p.add_argument("--precond-sigma", type=float, default=None,
                   dest="precond_sigma",
                   help="override the reference covariance with sigma^2 I")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--traj", type=int, default=0,
                   help="record trajectories for this many particles (flow runs)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="follmer",
        description="flow/MCMC sampling experiments over Gaussian-mixture targets",
    )
    parser.add_argument("--url", default=None,
                        help="base URL of a running service (default: in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sample = sub.add_parser("sample", help="run one sampling experiment")
    _add_target_args(p_sample)

    p_sweep = sub.add_parser("sweep", help="run a parameter sweep")
    _add_target_args(p_sweep)
    p_sweep.add_argument("--axis", choices=["K", "M", "sigma", "d"], required=True)
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated axis values, e.g. 5,20,80")

    p_list = sub.add_parser("list-examples", help="list benchmark targets")
    p_list.add_argument("--json", action="store_true", help="print raw JSON")

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    return parser


def _client(url: str | None):
    if url:
        import httpx

        return httpx.Client(base_url=url, timeout=None)
    from fastapi.testclient import TestClient

    from .service import create_app

    return TestClient(create_app())


def _sample_payload(args) -> dict:
    payload = {
        "out_dir": args.out, "sampler": args.sampler, "example": args.example,
        "dim": args.dim, "n": args.n, "seed": args.seed, "k": args.k,
        "m": args.m, "eps": args.eps, "grid": args.grid, "chains": args.chains,
        "burn_in": args.burn_in, "step": args.step,
        "precond_sigma": args.precond_sigma, "traj": args.traj,
    }
    if args.mixture is not None:
        with open(args.mixture) as fh:
            payload["mixture"] = json.load(fh)
    return payload


def _fail(resp) -> None:
    try:
        detail = resp.json().get("detail", resp.text)
    except ValueError:
        detail = resp.text
    print(f"error ({resp.status_code}): {detail}", file=sys.stderr)
    raise SystemExit(1)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "serve":
        import uvicorn

        from .service import create_app

        uvicorn.run(create_app(), host=args.host, port=args.port)
        return 0

    with _client(args.url) as client:
        if args.command == "list-examples":
            resp = client.get("/examples")
            if resp.status_code != 200:
                _fail(resp)
            rows = resp.json()
            if args.json:
                print(json.dumps(rows, indent=2))
            else:
                print(f"{'id':>3} {'dim':>4} {'modes':>6} {'pc sigma':>9}  notes")
                for r in rows:
                    print(f"{r['id']:>3} {r['dim']:>4} {r['components']:>6} "
                          f"{r['precond_sigma']:>9.2f}  {r['notes']}")
            return 0

        if args.command == "sample":
            resp = client.post("/sample", json=_sample_payload(args))
            if resp.status_code != 200:
                _fail(resp)
            report = resp.json()["report"]
            m = report["metrics"]
            cov = report["mode_coverage"]
            print(f"sampler={args.sampler} n={args.n} seed={args.seed}")
            print(f"adjusted W2  = {m['adj_w2']:+.4f}   (raw {m['raw_w2']:.4f})")
            print(f"adjusted MMD = {m['adj_mmd']:+.4f}   (raw {m['raw_mmd']:.4f})")
            print(f"mode coverage: {cov['n_covered']}/{cov['n_modes']}")
            print(f"report: {report['files']['report']}")
            return 0

        # sweep
        values = [float(v) for v in args.values.split(",") if v.strip()]
        payload = {"base": _sample_payload(args), "axis": args.axis,
                   "values": values}
        resp = client.post("/sweep", json=payload)
        if resp.status_code != 200:
            _fail(resp)
        body = resp.json()
        print(f"sweep over {args.axis}: {len(body['rows'])} rows "
              f"({body['status']})")
        print(f"csv: {body['csv_path']}")
        return 0


if __name__ == "__main__":
    raise SystemExit(main())
