"""Generate a random (wc, wr)-regular parity-check matrix, by default without 4-cycles.

Columns are filled one at a time; each column picks ``wc`` checks among
those with spare capacity, never reusing a pair of checks already shared by
an earlier column. Restarts on dead ends.

    python tools/make_regular_code.py 204 3 6 --seed 1 > regular_204_102.alist
"""

import argparse
import sys

import numpy as np

sys.path.insert(0, "src")
from ipdecode.code import SparseParityCheck, write_alist  # noqa: E402


def generate(n, wc, wr, rng, attempts=2000, allow_4cycles=False):
    m = n * wc // wr
    if m * wr != n * wc:
        raise SystemExit("n * wc must be divisible by wr")
    for _ in range(attempts):
        room = np.full(m, wr)
        used_pairs = set()
        seen_cols = set()
        rows = [[] for _ in range(m)]
        ok = True
        for j in range(n):
            chosen = []
            # mostly spare-capacity-first, with random jitter
            order = sorted(range(m), key=lambda i: -room[i] + 1.5 * rng.random())
            for i in order:
                if room[i] == 0:
                    continue
                if not allow_4cycles and any((min(i, c), max(i, c)) in used_pairs for c in chosen):
                    continue
                chosen.append(i)
                if len(chosen) == wc:
                    break
            if len(chosen) < wc or tuple(sorted(chosen)) in seen_cols:
                ok = False
                break
            seen_cols.add(tuple(sorted(chosen)))
            for a in chosen:
                room[a] -= 1
                rows[a].append(j)
                for b in chosen:
                    if a < b:
                        used_pairs.add((a, b))
        if ok:
            return SparseParityCheck.from_rows(n, rows)
    raise SystemExit("no 4-cycle-free matrix found")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("n", type=int)
    ap.add_argument("wc", type=int)
    ap.add_argument("wr", type=int)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--allow-4cycles", action="store_true", help="needed for very short codes")
    args = ap.parse_args()
    H = generate(args.n, args.wc, args.wr, np.random.default_rng(args.seed), allow_4cycles=args.allow_4cycles)
    sys.stdout.write(write_alist(H))


if __name__ == "__main__":
    main()
