#!/usr/bin/env python3
"""Tour of the r-robustness checker.

Robustness measures how hard it is to split a digraph into two camps that
can each ignore the outside world: a graph is r-robust when every pair of
disjoint nonempty node sets contains, in one set or the other, a node with
at least r in-neighbors outside its own set.  Resilient synchronization
with up to f misbehaving in-neighbors per node needs (2f+1)-robustness.
"""

import argparse

from pcosync import (
    DirectedGraph,
    complete_digraph,
    demo_graph_8,
    directed_ring,
    format_graph_text,
    is_r_robust,
    max_robustness,
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-n", type=int, default=7,
                        help="largest complete/ring size to scan")
    args = parser.parse_args()

    demo = demo_graph_8()
    print("shipped 8-node demo graph:")
    print(format_graph_text(demo))
    print(f"max robustness: {max_robustness(demo)}")
    print(f"3-robust (needed for f=1): {is_r_robust(demo, 3)}")
    print(f"4-robust: {is_r_robust(demo, 4)}")
    print()

    print("complete graphs: robustness grows with size")
    for n in range(2, args.max_n + 1):
        print(f"  K{n}: {max_robustness(complete_digraph(n))}")
    print("directed rings: never better than 1-robust")
    for n in range(3, args.max_n + 1):
        print(f"  ring({n}): {max_robustness(directed_ring(n))}")
    print()

    # Two triangles with no edges between them can each ignore the other,
    # so no r works; one bridge edge already restores 1-robustness, but a
    # single shared voice is not enough for 2.
    split = DirectedGraph.from_lists([
        [1, 2], [0, 2], [0, 1],
        [4, 5], [3, 5], [3, 4],
    ])
    bridged = DirectedGraph.from_lists([
        [1, 2], [0, 2], [0, 1],
        [4, 5, 2], [3, 5], [3, 4],
    ])
    print("two disconnected triangles:")
    print(f"  1-robust: {is_r_robust(split, 1)}")
    print("same, plus one bridge edge into the second triangle:")
    print(f"  1-robust: {is_r_robust(bridged, 1)}")
    print(f"  2-robust: {is_r_robust(bridged, 2)}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
