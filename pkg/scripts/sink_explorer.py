"""Print the sink of every conjugacy-class representative of one group."""

import argparse

from engel.catalog import resolve_group
from engel.rank import rank
from engel.sinks import sink_profile
from engel.structure import gamma_infinity, is_nilpotent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("group", help="catalog label, recipe (e.g. semidirect:7,1,3,2) or group file")
    args = ap.parse_args()
    G = resolve_group(args.group)
    prof = sink_profile(G)
    print(f"{G.label or args.group}: order {G.order}, nilpotent {is_nilpotent(G)}, r* = {prof.r_star}, "
          f"rank gamma_inf = {rank(gamma_infinity(G)).rank_value}")
    for r in prof.class_reps:
        rep = prof.rep_reports[r]
        print(f"  {rep.element.to_cycle_string():28s} |E| = {rep.size:4d}  |<E>| = {rep.sink_subgroup.order:4d}  "
              f"rank {rep.sink_rank}  tail {rep.max_tail}")


if __name__ == "__main__":
    main()
