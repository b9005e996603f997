"""Command-line front end: ``ipdecode-sim``."""

from __future__ import annotations

import argparse
import sys

from .sim import (
    ALL_DECODERS,
    CSV_COLUMNS,
    SimConfig,
    config_from_mapping,
    parse_config_text,
    run_sweep,
)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ipdecode-sim",
        description="Monte Carlo BER sweeps for interior point and joint message-passing decoders over PR channels.",
    )
    # every default is None so that only explicit flags override the config file
    p.add_argument("--config", help="flat key=value file; flags override it")
    p.add_argument("--code", help="alist parity-check matrix (default: bundled (3,6)-regular n=204 code)")
    p.add_argument("--channel", help="preset (dicode, epr4, pr-deg3, longtail16) or h0,h1,...")
    p.add_argument("--snr", dest="snr_db", help="SNR grid in dB, start:step:stop")
    p.add_argument("--decoder", choices=ALL_DECODERS)
    p.add_argument("--imax", dest="i_max", type=int, help="inner iterations per outer iteration")
    p.add_argument("--omax", dest="o_max", type=int, help="outer iterations")
    p.add_argument("--t0", type=float, help="initial objective weight")
    p.add_argument("--alpha", type=float, help="objective weight growth factor")
    p.add_argument("--kappa", type=float, help="min-sum scaling factor")
    p.add_argument("--lmax", type=int, help="min-sum iterations")
    p.add_argument("--omega", type=float, help="Jacobi under-relaxation factor")
    p.add_argument("--jacobi-iters", type=int, help="Jacobi sweeps per Newton solve")
    p.add_argument("--trials", type=int, help="minimum trials per SNR point")
    p.add_argument("--min-errors", type=int, help="minimum bit errors per SNR point (default 200)")
    p.add_argument("--max-trials", type=int, help="trial cap per SNR point (default 10x trials)")
    p.add_argument("--seed", type=int)
    p.add_argument("--codewords", choices=("zero", "random"))
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--trace", help="mean objective trace output path")
    p.add_argument("--workers", type=int, help="worker processes")
    p.add_argument("--no-timing", dest="timing", action="store_const", const=False,
                   help="write nan for wall_sec and blocks_per_sec so output is reproducible byte for byte")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        values: dict[str, object] = {}
        if args.config:
            with open(args.config) as fh:
                values.update(parse_config_text(fh.read()))
        flags = {k: v for k, v in vars(args).items() if k != "config" and v is not None}
        values.update(flags)
        cfg: SimConfig = config_from_mapping(values)
        summaries = run_sweep(cfg)
    except (ValueError, OSError) as exc:
        print(f"ipdecode-sim: error: {exc}", file=sys.stderr)
        return 2
    if not cfg.out:
        print(",".join(CSV_COLUMNS))
        for s in summaries:
            print(",".join(s.row(cfg.timing)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
