"""Heterogeneous stochastic blockmodel: sampling, the simulation settings, and
the sign conditions under which modularity maximization is consistent.
"""
from __future__ import annotations

import warnings
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .graph import HetGraph
from .modularity import Partition

__all__ = [
    "ConsistencyReport",
    "SETTINGS",
    "SbmSpec",
    "SpecError",
    "check_consistency",
    "read_spec",
    "sample",
    "setting_spec",
    "write_spec",
]

_COND_TOL = 1e-12


class SpecError(ValueError):
    pass


@dataclass
class SbmSpec:
    """Parameters of a heterogeneous SBM with ``L`` types and ``K`` communities.

    ``community_sizes[l][k]`` nodes of type ``l`` belong to community ``k``.
    ``homo_probs[l]`` is the symmetric ``K x K`` matrix ``P^[l]``;
    ``cross_probs[(l1, l2)]`` (``l1 < l2``) is ``P^[l1 l2]``, rows indexed by the
    type-``l1`` community.  Every probability is multiplied by ``rho``.
    """

    community_sizes: list[np.ndarray]
    homo_probs: list[np.ndarray]
    cross_probs: dict[tuple[int, int], np.ndarray] = field(default_factory=dict)
    rho: float = 1.0
    type_names: tuple[str, ...] | None = None

    def __post_init__(self):
        self.community_sizes = [np.asarray(x, dtype=np.int64) for x in self.community_sizes]
        self.homo_probs = [np.asarray(P, dtype=np.float64) for P in self.homo_probs]
        cross = {}
        for (a, b), P in self.cross_probs.items():
            P = np.asarray(P, dtype=np.float64)
            if a > b:
                a, b, P = b, a, P.T
            cross[(a, b)] = P
        self.cross_probs = cross
        if self.type_names is None:
            self.type_names = tuple(str(l + 1) for l in range(self.num_types))
        self.validate()

    @property
    def num_types(self) -> int:
        return len(self.community_sizes)

    @property
    def num_communities(self) -> int:
        return len(self.community_sizes[0]) if self.community_sizes else 0

    @property
    def type_sizes(self) -> tuple[int, ...]:
        return tuple(int(x.sum()) for x in self.community_sizes)

    @property
    def proportions(self) -> list[np.ndarray]:
        """``pi^[l]_k``: community counts of type ``l`` over the total node count ``n``."""
        n = sum(self.type_sizes)
        return [x / n for x in self.community_sizes]

    @property
    def expected_degree_scale(self) -> float:
        """``lambda_n = n * rho``."""
        return sum(self.type_sizes) * self.rho

    def probs(self, l1: int, l2: int) -> np.ndarray:
        """Scaled probability matrix of block ``(l1, l2)``; rows index type ``l1``."""
        K = self.num_communities
        if l1 == l2:
            P = self.homo_probs[l1]
        elif l1 < l2:
            P = self.cross_probs.get((l1, l2), np.zeros((K, K)))
        else:
            P = self.cross_probs.get((l2, l1), np.zeros((K, K))).T
        return self.rho * P

    def validate(self) -> None:
        L, K = self.num_types, self.num_communities
        if L < 1 or K < 1:
            raise SpecError("need at least one type and one community")
        if any(len(x) != K for x in self.community_sizes):
            raise SpecError("every type needs K community sizes")
        if any((x < 0).any() for x in self.community_sizes):
            raise SpecError("community sizes must be non-negative")
        if len(self.homo_probs) != L:
            raise SpecError(f"expected {L} homo probability matrices")
        if not 0 < self.rho <= 1:
            raise SpecError("rho must lie in (0, 1]")
        if len(self.type_names) != L:
            raise SpecError("type_names must have one entry per type")
        for l, P in enumerate(self.homo_probs):
            if P.shape != (K, K):
                raise SpecError(f"P[{l}] must be {K}x{K}")
            if not np.array_equal(P, P.T):
                raise SpecError(f"P[{l}] must be symmetric")
        for (a, b), P in self.cross_probs.items():
            if not (0 <= a < b < L):
                raise SpecError(f"bad cross block {(a, b)}")
            if P.shape != (K, K):
                raise SpecError(f"P[{a},{b}] must be {K}x{K}")
        for P in [*self.homo_probs, *self.cross_probs.values()]:
            scaled = self.rho * P
            if not np.all(np.isfinite(scaled)) or scaled.min() < 0 or scaled.max() > 1:
                raise SpecError("probabilities must lie in [0, 1] after scaling")

    def planted(self) -> Partition:
        return Partition.from_labels([np.repeat(np.arange(self.num_communities), x) for x in self.community_sizes])


def _sample_homo(rng: np.random.Generator, sizes: np.ndarray, P: np.ndarray) -> sp.csr_matrix:
    n = int(sizes.sum())
    labels = np.repeat(np.arange(len(sizes)), sizes)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(len(iu)) < P[labels[iu], labels[ju]]
    rows, cols = iu[keep], ju[keep]
    upper = sp.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    return (upper + upper.T).tocsr()


def _sample_cross(rng: np.random.Generator, sizes1: np.ndarray, sizes2: np.ndarray, P: np.ndarray) -> sp.csr_matrix:
    lab1 = np.repeat(np.arange(len(sizes1)), sizes1)
    lab2 = np.repeat(np.arange(len(sizes2)), sizes2)
    keep = rng.random((len(lab1), len(lab2))) < P[lab1[:, None], lab2[None, :]]
    return sp.csr_matrix(keep.astype(np.float64))


def sample(spec: SbmSpec, seed: int) -> tuple[HetGraph, Partition]:
    """Draw one network and return it with its planted partition.

    Nodes of each type are ordered by community.  Every block has its own
    random stream keyed by ``(seed, l1, l2)``, so a block's draw does not depend
    on which other blocks exist.
    """
    spec.validate()
    L = spec.num_types
    homo = []
    for l in range(L):
        rng = np.random.default_rng([seed, l, l])
        homo.append(_sample_homo(rng, spec.community_sizes[l], spec.probs(l, l)))
    cross = {}
    for a in range(L):
        for b in range(a + 1, L):
            rng = np.random.default_rng([seed, a, b])
            cross[(a, b)] = _sample_cross(rng, spec.community_sizes[a], spec.community_sizes[b], spec.probs(a, b))
    g = HetGraph(spec.type_sizes, homo, cross, type_names=spec.type_names)
    return g, spec.planted()


SETTINGS = {
    1: dict(p1=0.1, r1=0.05, p2=0.2, r2=0.1, p3=0.05, r3_range=(0.05, 0.15)),
    2: dict(p1=0.1, r1=0.05, p2=0.2, r2=0.0, p3=0.05, r3_range=(0.05, 0.15)),
    3: dict(p1=0.1, r1=0.0, p2=0.2, r2=0.0, p3=0.05, r3_range=(0.05, 0.20)),
}


def setting_spec(which: int, r3: float, type_sizes: Sequence[int] = (600, 300)) -> SbmSpec:
    """Two-type, three-community simulation settings 1-3.

    ``P^[1] = p1 + r1 I``, ``P^[2] = p2 + r2 I`` and ``P^[12] = p3 + r3 I``
    (constants broadcast over all entries); each type is split evenly into the
    three communities.  Default sizes are 600 type-1 and 300 type-2 nodes.
    """
    if which not in SETTINGS:
        raise ValueError(f"unknown simulation setting {which!r}; choose 1, 2 or 3")
    par = SETTINGS[which]
    lo, hi = par["r3_range"]
    if not lo - 1e-12 <= r3 <= hi + 1e-12:
        warnings.warn(f"r3={r3} is outside the studied range [{lo}, {hi}] for setting {which}", stacklevel=2)
    K = 3
    sizes = []
    for n in type_sizes:
        if n % K:
            raise ValueError(f"type size {n} is not divisible by {K}")
        sizes.append(np.full(K, n // K))
    ones, eye = np.ones((K, K)), np.eye(K)
    return SbmSpec(
        community_sizes=sizes,
        homo_probs=[par["p1"] * ones + par["r1"] * eye, par["p2"] * ones + par["r2"] * eye],
        cross_probs={(0, 1): par["p3"] * ones + r3 * eye},
    )


# -- consistency conditions -------------------------------------------------------------


@dataclass
class ConsistencyReport:
    """Normalized block weights ``T``, centered matrices ``W`` and the verdict.

    ``T`` and ``W`` are keyed by ordered block ``(l1, l2)``; ``(l, l)`` denotes
    the within-type block.  ``diagonal[a]`` and ``off_diagonal[a, b]`` are the
    sums of ``W`` over all blocks (cross blocks in both orders).
    """

    T: dict[tuple[int, int], np.ndarray]
    W: dict[tuple[int, int], np.ndarray]
    diagonal: np.ndarray
    off_diagonal: np.ndarray
    diagonal_ok: np.ndarray
    off_diagonal_ok: np.ndarray
    satisfied: bool
    skipped: list[tuple[int, int]]

    def summary(self) -> str:
        lines = []
        for key in sorted(self.T):
            name = f"[{key[0] + 1}]" if key[0] == key[1] else f"[{key[0] + 1}{key[1] + 1}]"
            lines.append(f"T{name} =\n{np.array2string(self.T[key], precision=5)}")
            lines.append(f"W{name} =\n{np.array2string(self.W[key], precision=5)}")
        for key in self.skipped:
            lines.append(f"block {key} skipped: all probabilities are zero")
        K = len(self.diagonal)
        for a in range(K):
            verdict = "ok" if self.diagonal_ok[a] else "VIOLATED"
            lines.append(f"sum W_aa for a={a + 1}: {self.diagonal[a]:+.6g} (> 0) {verdict}")
        for a in range(K):
            for b in range(K):
                if a != b:
                    verdict = "ok" if self.off_diagonal_ok[a, b] else "VIOLATED"
                    lines.append(f"sum W_ab for a={a + 1}, b={b + 1}: {self.off_diagonal[a, b]:+.6g} (< 0) {verdict}")
        lines.append("conditions satisfied" if self.satisfied else "conditions violated")
        return "\n".join(lines)


def check_consistency(spec: SbmSpec) -> ConsistencyReport:
    """Evaluate the sign conditions on the summed ``W`` matrices.

    ``T = (pi_a pi_b P_ab) / sum`` and ``W = T - (T 1)(T 1)'`` for every block,
    cross blocks in both orders.  The conditions require every diagonal sum
    ``> 0`` and every off-diagonal sum ``< 0`` (beyond ``1e-12``).  The scale
    ``rho`` cancels.  Blocks whose probabilities are all zero are skipped.
    """
    spec.validate()
    L, K = spec.num_types, spec.num_communities
    pi = spec.proportions
    if any((x <= 0).any() for x in pi):
        raise SpecError("community proportions must be strictly positive")
    T, W, skipped = {}, {}, []
    for a in range(L):
        for b in range(L):
            P = spec.probs(a, b) / spec.rho
            weights = np.outer(pi[a], pi[b]) * P
            total = weights.sum()
            if total <= 0:
                if a <= b:
                    skipped.append((a, b))
                continue
            T[(a, b)] = weights / total
            rs = T[(a, b)].sum(axis=1)
            W[(a, b)] = T[(a, b)] - np.outer(rs, rs)
    summed = sum(W.values()) if W else np.zeros((K, K))
    diagonal = np.diag(summed).copy()
    off = summed.copy()
    np.fill_diagonal(off, 0.0)
    diagonal_ok = diagonal > _COND_TOL
    off_ok = off < -_COND_TOL
    np.fill_diagonal(off_ok, True)
    satisfied = bool(W) and bool(diagonal_ok.all() and off_ok.all())
    return ConsistencyReport(T, W, diagonal, off, diagonal_ok, off_ok, satisfied, skipped)


# -- key = value spec files -------------------------------------------------------------


def _floats(text: str, key: str) -> np.ndarray:
    try:
        return np.array([float(x) for x in text.replace(";", ",").split(",") if x.strip()])
    except ValueError:
        raise SpecError(f"{key}: expected comma-separated numbers") from None


def read_spec(path: str | Path) -> tuple[SbmSpec, int | None]:
    """Parse a ``key = value`` spec file; returns the spec and its optional seed.

    Keys: ``L``, ``K``, ``sizes.<l>`` (K community sizes of type ``l``),
    ``P.<l>`` and ``P.<l1>.<l2>`` (K*K probabilities, row-major), optional
    ``rho``, ``seed`` and ``types`` (comma-separated names).  Type indices in
    the file are 1-based.  ``#`` starts a comment.
    """
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise SpecError(f"line {lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            if key in values:
                raise SpecError(f"line {lineno}: duplicate key {key!r}")
            values[key] = value
    try:
        L, K = int(values.pop("L")), int(values.pop("K"))
    except KeyError as exc:
        raise SpecError(f"missing key {exc.args[0]!r}") from None
    except ValueError:
        raise SpecError("L and K must be integers") from None
    try:
        rho = float(values.pop("rho", "1"))
        seed = int(values.pop("seed")) if "seed" in values else None
    except ValueError:
        raise SpecError("rho must be a number and seed an integer") from None
    names = tuple(s.strip() for s in values.pop("types").split(",")) if "types" in values else None
    sizes = []
    for l in range(1, L + 1):
        key = f"sizes.{l}"
        if key not in values:
            raise SpecError(f"missing key {key!r}")
        x = _floats(values.pop(key), key)
        if len(x) != K or np.any(x != np.round(x)):
            raise SpecError(f"{key}: expected {K} integers")
        sizes.append(x.astype(np.int64))

    def matrix(key: str) -> np.ndarray:
        x = _floats(values.pop(key), key)
        if len(x) != K * K:
            raise SpecError(f"{key}: expected {K * K} values, got {len(x)}")
        return x.reshape(K, K)

    homo = []
    for l in range(1, L + 1):
        key = f"P.{l}"
        homo.append(matrix(key) if key in values else np.zeros((K, K)))
    cross = {}
    for a in range(1, L + 1):
        for b in range(1, L + 1):
            key = f"P.{a}.{b}"
            if a != b and key in values:
                if (min(a, b) - 1, max(a, b) - 1) in cross:
                    raise SpecError(f"{key}: block given in both orders")
                P = matrix(key)
                cross[(min(a, b) - 1, max(a, b) - 1)] = P if a < b else P.T
    if values:
        raise SpecError(f"unknown keys: {', '.join(sorted(values))}")
    return SbmSpec(sizes, homo, cross, rho=rho, type_names=names), seed


def write_spec(spec: SbmSpec, path: str | Path, seed: int | None = None) -> None:
    def fmt(x: np.ndarray) -> str:
        return ", ".join(repr(float(v)) if not float(v).is_integer() else str(int(v)) for v in np.ravel(x))

    lines = [f"L = {spec.num_types}", f"K = {spec.num_communities}", f"types = {', '.join(spec.type_names)}"]
    lines += [f"sizes.{l + 1} = {fmt(x)}" for l, x in enumerate(spec.community_sizes)]
    lines += [f"P.{l + 1} = {fmt(P)}" for l, P in enumerate(spec.homo_probs)]
    lines += [f"P.{a + 1}.{b + 1} = {fmt(P)}" for (a, b), P in sorted(spec.cross_probs.items())]
    lines.append(f"rho = {spec.rho!r}")
    if seed is not None:
        lines.append(f"seed = {seed}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
