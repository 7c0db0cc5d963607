"""Shared generators and from-scratch reference computations for the tests."""
from __future__ import annotations

import time

import numpy as np
import scipy.sparse as sp

from hetmod import HetGraph, Partition


def random_graph(
    rng: np.random.Generator,
    num_types: int | None = None,
    max_size: int = 8,
    weighted: bool = False,
    allow_empty_blocks: bool = True,
) -> HetGraph:
    """Random graph with a random mix of dense, sparse and empty blocks."""
    L = num_types if num_types is not None else int(rng.integers(1, 4))
    sizes = [int(rng.integers(1, max_size + 1)) for _ in range(L)]

    def density() -> float:
        if allow_empty_blocks and rng.random() < 0.2:
            return 0.0
        return float(rng.uniform(0.1, 0.9))

    homo = []
    for n in sizes:
        upper = np.triu(rng.random((n, n)) < density(), k=1).astype(float)
        if weighted:
            upper *= rng.integers(1, 4, size=(n, n))
        A = upper + upper.T
        if weighted:
            A[np.diag_indices(n)] = 2.0 * rng.integers(0, 3, size=n) * (rng.random(n) < 0.3)
        homo.append(sp.csr_matrix(A))
    cross = {}
    for a in range(L):
        for b in range(a + 1, L):
            B = (rng.random((sizes[a], sizes[b])) < density()).astype(float)
            if weighted:
                B *= rng.integers(1, 4, size=B.shape)
            cross[(a, b)] = sp.csr_matrix(B)
    return HetGraph(sizes, homo, cross)


def random_partition(rng: np.random.Generator, type_sizes, max_k: int | None = None) -> Partition:
    n = sum(type_sizes)
    k = int(rng.integers(1, (max_k or n) + 1))
    labels = [rng.integers(0, k, size=s) for s in type_sizes]
    return Partition.from_labels(labels)


def naive_modularity(g: HetGraph, p: Partition) -> float:
    """Entrywise double loop over dense blocks, straight from the definition."""
    L = g.num_types
    total = 0.0
    for s in range(L):
        for t in range(L):
            A = g.block(s, t).toarray()
            m = A.sum() / 2.0 if s == t else A.sum()
            if m == 0:
                continue
            ds, dt = A.sum(axis=1), A.sum(axis=0)
            norm = 2.0 * m if s == t else m
            acc = 0.0
            for i in range(A.shape[0]):
                for j in range(A.shape[1]):
                    if p.labels[s][i] == p.labels[t][j]:
                        acc += A[i, j] - ds[i] * dt[j] / norm
            total += acc / norm
    return total / (L * L)


# -- acceptance reporting ---------------------------------------------------------------

ACCEPTANCE_REPORT: dict[int, str] = {}


class criterion:
    """Context manager recording one PASS/FAIL/SKIP line for the terminal summary."""

    def __init__(self, number: int, title: str):
        self.number, self.title = number, title
        self.details: list[str] = []

    def note(self, text: str) -> None:
        self.details.append(text)

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        if exc_type is None:
            verdict = "PASS"
        elif exc_type.__name__ == "Skipped":
            verdict = "SKIP"
            self.details.append(str(exc))
        else:
            verdict = "FAIL"
        detail = "; ".join(self.details)
        line = f"criterion {self.number:2d} {verdict}  {self.title} ({elapsed:.1f}s){': ' + detail if detail else ''}"
        ACCEPTANCE_REPORT[self.number] = line
        print(line)
        return False
