"""Mean query counts over a path-plus-clique sweep against n/C^(1/k) + m^(k/2)/C."""

from __future__ import annotations

import argparse
import math
import statistics

from subclique.baseline import count_cliques_exact, gen_path_plus_clique
from subclique.cli import query_bound
from subclique.estimator import approximate_cliques
from subclique.graph import QueryOracle
from subclique.params import Constants, derive_params


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--ts", type=int, nargs="+", default=[6, 8, 10, 12])
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--eps", type=float, default=0.5)
    ap.add_argument("--delta", type=float, default=0.1)
    ap.add_argument("--s-const", type=float, default=None, help="shrink S below n to see the sampled regime")
    ap.add_argument("--t-const", type=float, default=None)
    args = ap.parse_args()

    over = {"s": args.s_const, "t": args.t_const}
    constants = Constants(**{k: v for k, v in over.items() if v is not None})
    print(f"{'t':>4} {'C_k':>6} {'s':>6} {'queries':>10} {'bound':>10} {'constant':>9} {'rel_err':>8}")
    fitted = []
    for t in args.ts:
        g = gen_path_plus_clique(args.n, t)
        c = count_cliques_exact(g, args.k).total
        p = derive_params(g.n, args.k, (1 - args.eps / 5) * g.m, c / 2, args.eps, args.delta, constants=constants)
        reps = [approximate_cliques(QueryOracle(g), p, s) for s in range(args.trials)]
        mean_q = statistics.fmean(r.query_counts.total for r in reps)
        err = statistics.fmean(abs(r.estimate - c) / c for r in reps if r.ok)
        bound = query_bound(g.n, g.m, c, args.k)
        fitted.append(mean_q / bound)
        print(f"{t:>4} {c:>6} {p.s:>6} {mean_q:>10.0f} {bound:>10.0f} {fitted[-1]:>9.3f} {err:>8.4f}")
    spread = max(fitted) / min(fitted)
    print(f"max/min fitted constant: {spread:.2f}" + ("" if math.isfinite(spread) else " (undefined)"))


if __name__ == "__main__":
    main()
