"""Run the guess-free search once and print its guess trajectory."""

from __future__ import annotations

import argparse

from subclique.baseline import count_cliques_exact, gen_gnm, gen_path_plus_clique
from subclique.graph import QueryOracle
from subclique.search import approximate_cliques_auto


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--family", choices=["path-clique", "gnm"], default="path-clique")
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--t", type=int, default=8, help="clique size for path-clique")
    ap.add_argument("--m-edges", type=int, default=4000, help="edge count for gnm")
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--eps", type=float, default=0.5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if args.family == "path-clique":
        g = gen_path_plus_clique(args.n, args.t)
    else:
        g = gen_gnm(args.n, args.m_edges, args.seed)
    exact = count_cliques_exact(g, args.k).total
    rep = approximate_cliques_auto(QueryOracle(g), args.k, args.eps, seed=args.seed)
    print(f"n={g.n} m={g.m} k={args.k} exact={exact} B={rep.B:g} r_search={rep.config.r_search}")
    print(f"{'outer':>8} {'guess':>8} {'min X':>12} {'fails':>6}")
    for s in rep.trajectory:
        mark = "  <- accepted" if s.accepted else ""
        print(f"{s.a_tilde:>8g} {s.a_bar:>8g} {s.x:>12.3f} {s.failures:>6}{mark}")
    print(f"estimate={rep.estimate} outcome={rep.outcome} flags={rep.flags} "
          f"invocations={rep.invocations} queries={rep.query_counts.total}")


if __name__ == "__main__":
    main()
