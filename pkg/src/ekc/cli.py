"""``ekc`` command-line entry point."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys

from . import experiments as ex
from .field_core import field_from_discriminant_or_d
from .ideals import enumerate_ideals

log = logging.getLogger("ekc")

SUBCOMMANDS = ["field-info", "ideals", "ray-class", "gamma", "average", "verify", "sieve-demo"]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ekc", description="Euler-Kronecker constants of ray class fields "
                                "of imaginary quadratic fields, with numerical checks.")
    p.add_argument("command", choices=SUBCOMMANDS)
    p.add_argument("--config", help="key=value file; explicit flags override it")
    p.add_argument("--d", help="comma-separated squarefree d < 0 or fundamental discriminants")
    p.add_argument("--q-norm", dest="q_norm", type=int)
    p.add_argument("--Q", help="comma-separated Q values")
    p.add_argument("--x", type=float)
    p.add_argument("--z", type=float)
    p.add_argument("--t", help="shift element as 'x' or 'x,y' (x + y*omega)")
    p.add_argument("--u", type=float, help="range for the sieve demo")
    p.add_argument("--threads", type=int)
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def make_config(args: argparse.Namespace) -> ex.ExperimentConfig:
    raw: dict[str, str] = {}
    if args.config:
        raw.update(ex.read_config_file(args.config))
    for key in ("d", "q_norm", "Q", "x", "z", "t", "u", "threads", "out", "format"):
        v = getattr(args, key)
        if v is not None:
            raw[key] = str(v)
    cfg = ex.ExperimentConfig()
    if "d" in raw:
        cfg.d_values = ex.parse_int_list(raw["d"])
    if "Q" in raw:
        cfg.Q_values = ex.parse_int_list(raw["Q"])
    if "x" in raw:
        cfg.x = float(raw["x"])
    if "q_norm" in raw:
        cfg.q_norm = int(float(raw["q_norm"]))
    if "z" in raw:
        cfg.z = float(raw["z"])
    if "t" in raw:
        cfg.t = ex.parse_element(raw["t"])
    if "u" in raw:
        cfg.u = float(raw["u"])
    if "threads" in raw:
        cfg.threads = int(raw["threads"])
    if "out" in raw:
        cfg.out = raw["out"]
    if "format" in raw:
        cfg.format = raw["format"]
    return cfg


def _emit(text: str, cfg: ex.ExperimentConfig) -> None:
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n"


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = make_config(args)
        fields = [field_from_discriminant_or_d(d) for d in cfg.d_values]
    except ValueError as exc:
        print(f"ekc: {exc}", file=sys.stderr)
        return 2
    cmd = args.command
    flags: list[str] = []
    try:
        if cmd == "field-info":
            _emit(_json([ex.field_info(K) for K in fields]), cfg)
        elif cmd == "ideals":
            x = cfg.x if cfg.x is not None else 20
            if x > 10**4:
                raise ValueError("ideal listing is capped at x = 10^4")
            rows = [{"d_K": K.d_K, "norm": I.norm, "a": I.a, "b": I.b, "c": I.c}
                    for K in fields for I in enumerate_ideals(K, x)]
            if cfg.format == "json":
                _emit(_json(rows), cfg)
            else:
                buf = io.StringIO()
                w = csv.DictWriter(buf, fieldnames=["d_K", "norm", "a", "b", "c"], lineterminator="\n")
                w.writeheader()
                w.writerows(rows)
                _emit(buf.getvalue(), cfg)
        elif cmd == "ray-class":
            if cfg.q_norm is None:
                raise ValueError("--q-norm is required")
            _emit(_json([r for K in fields for r in ex.ray_class_info(K, cfg.q_norm)]), cfg)
        elif cmd == "gamma":
            if cfg.q_norm is None:
                raise ValueError("--q-norm is required")
            x = cfg.x if cfg.x is not None else 1e6
            rows = [ex.run_gamma(K, cfg.q_norm, x) for K in fields]
            flags = [r["flag"] for r in rows if "flag" in r]
            if cfg.format == "json":
                _emit(_json(rows[0] if len(rows) == 1 else rows), cfg)
            else:
                hdr = ["d_K", "Nq", "gamma_est", "budget"]
                _emit(ex.table_csv(rows, hdr), cfg)
        elif cmd == "average":
            rows, flags = ex.run_average(cfg)
            _emit(ex.average_json(rows) + "\n" if cfg.format == "json" else ex.average_csv(rows), cfg)
        elif cmd == "verify":
            rows, flags = ex.run_verify(cfg)
            if cfg.format == "json":
                _emit(_json({"grh_conditional": True, "rows": rows}), cfg)
            else:
                _emit(ex.table_csv(rows, ex.VERIFY_HEADER), cfg)
        elif cmd == "sieve-demo":
            rows, flags = [], []
            for K in fields:
                r, f = ex.run_sieve_demo(K, cfg.t, cfg.z, cfg.u)
                rows.extend({"d_K": K.d_K, **row} for row in r)
                flags.extend(f)
            if cfg.format == "json":
                _emit(_json(rows), cfg)
            else:
                _emit(ex.table_csv(rows, ["d_K"] + ex.SIEVE_HEADER, grh=False), cfg)
    except ValueError as exc:
        print(f"ekc: {exc}", file=sys.stderr)
        return 2
    for f in flags:
        log.warning(f)
        print(f"ekc: flagged: {f}", file=sys.stderr)
    return 1 if flags else 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
