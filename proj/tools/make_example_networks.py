#!/usr/bin/env python3
"""Regenerates the bundled example networks in data/.

Both graphs are synthetic stand-ins shipped so the example configs run out of
the box: no anatomical connectivity data is distributed with this repository.
Swap in your own matrix or edge list to study a real network.
"""
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "data"


def write_hr6() -> None:
    # Two triangles joined by one weak bridge. All seven weights are distinct
    # so the graph has no non-trivial automorphism. The scale is chosen so
    # sigma = 4e-4 gives an effective per-edge coupling of ~0.06 intra and
    # ~0.012 across the bridge: strong enough to lock burst patterns, weak
    # enough to leave many coexisting lag configurations.
    edges = [
        (0, 1, 170.0),
        (0, 2, 150.0),
        (1, 2, 160.0),
        (3, 4, 155.0),
        (3, 5, 165.0),
        (4, 5, 145.0),
        (2, 3, 30.0),
    ]
    lines = [
        "# 6-node weighted graph: two triangles (0-1-2, 3-4-5) bridged by 2-3",
        "# i j weight",
    ]
    lines += [f"{i} {j} {w:.17g}" for i, j, w in edges]
    (OUT / "hr6-graph.txt").write_text("\n".join(lines) + "\n")


def write_surrogate83(seed: int = 20240817) -> None:
    # 83-node modular surrogate: four communities with dense strong intra
    # edges and sparse weak bridges, symmetrized and Sinkhorn-balanced so
    # every weighted degree is 1. Unit row sums keep the coupled map
    # bounded at sigma = 0.8.
    rng = random.Random(seed)
    n = 83
    sizes = [21, 21, 21, 20]
    comm = []
    for c, s in enumerate(sizes):
        comm += [c] * s
    a = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            same = comm[i] == comm[j]
            p = 0.55 if same else 0.04
            if rng.random() < p:
                w = rng.lognormvariate(0.0, 0.4)
                a[i][j] = a[j][i] = w if same else 0.15 * w

    # guarantee inter-community connectivity with one weak ring of bridges
    starts = [0, 21, 42, 63]
    for c in range(4):
        i, j = starts[c], starts[(c + 1) % 4]
        if a[i][j] == 0.0:
            a[i][j] = a[j][i] = 0.1

    for _ in range(80):  # symmetric Sinkhorn balancing towards unit degrees
        deg = [sum(row) for row in a]
        for i in range(n):
            for j in range(n):
                if a[i][j]:
                    a[i][j] /= (deg[i] * deg[j]) ** 0.5

    body = "\n".join(" ".join(f"{v:.17g}" for v in row) for row in a)
    (OUT / "dti-surrogate-83.txt").write_text(body + "\n")


if __name__ == "__main__":
    OUT.mkdir(exist_ok=True)
    write_hr6()
    write_surrogate83()
    print(f"wrote {OUT / 'hr6-graph.txt'} and {OUT / 'dti-surrogate-83.txt'}")
