"""Compiled inner loop of the optimizer.

Arrays describe a "flat" graph: nodes of every type concatenated, one CSR
adjacency (diagonal entries hold ``2w`` for self-loops), ``node_type`` and
``deg[i, t]``, each node's total weight towards type ``t``.  Units are groups of
nodes moved together, given as ``unit_of`` plus a CSR member list.
"""
import numpy as np
from numba import njit

TIE_TOL = 1e-13
MOVE_TOL = 1e-13


@njit(cache=True)
def _penalty(gamma, totals, ud):
    L = gamma.shape[0]
    acc = 0.0
    for s in range(L):
        for t in range(L):
            acc += gamma[s, t] * totals[s, t] * ud[t, s]
    return acc


@njit(cache=True)
def local_move(
    indptr,
    indices,
    data,
    node_type,
    deg,
    unit_of,
    unit_ptr,
    unit_members,
    order,
    edge_coef,
    gamma,
    comm,
    max_sweeps,
    target_k,
    seed,
):
    """Greedy unit moves until a full sweep changes nothing.

    ``comm[u]`` is updated in place.  ``edge_coef`` is twice the pair coefficient
    table.  Returns ``(moves, communities, reached)``; ``reached`` is True when
    the community count hit ``target_k`` (> 0) and the phase stopped there.
    """
    np.random.seed(seed)
    U = unit_ptr.shape[0] - 1
    L = gamma.shape[0]

    unit_deg = np.zeros((U, L, L))
    for u in range(U):
        for k in range(unit_ptr[u], unit_ptr[u + 1]):
            i = unit_members[k]
            s = node_type[i]
            for t in range(L):
                unit_deg[u, s, t] += deg[i, t]
    totals = np.zeros((U, L, L))
    sizes = np.zeros(U, dtype=np.int64)
    for u in range(U):
        c = comm[u]
        sizes[c] += 1
        totals[c] += unit_deg[u]
    n_comm = 0
    for c in range(U):
        if sizes[c] > 0:
            n_comm += 1
    if target_k > 0 and n_comm <= target_k:
        return 0, n_comm, n_comm == target_k

    links = np.zeros(U)
    seen = np.zeros(U, dtype=np.bool_)
    touched = np.empty(U, dtype=np.int64)
    remaining = np.zeros((L, L))
    moves = 0
    for _ in range(max_sweeps):
        moved = 0
        for pos in range(U):
            u = order[pos]
            a = comm[u]
            ud = unit_deg[u]
            n_touched = 0
            for k in range(unit_ptr[u], unit_ptr[u + 1]):
                i = unit_members[k]
                s = node_type[i]
                for e in range(indptr[i], indptr[i + 1]):
                    j = indices[e]
                    if unit_of[j] == u:
                        continue
                    c = comm[unit_of[j]]
                    if not seen[c]:
                        seen[c] = True
                        touched[n_touched] = c
                        n_touched += 1
                    links[c] += edge_coef[s, node_type[j]] * data[e]
            for s in range(L):
                for t in range(L):
                    remaining[s, t] = totals[a, s, t] - ud[s, t]
            stay = links[a] - _penalty(gamma, remaining, ud)
            best = -1
            best_gain = 0.0
            n_ties = 0
            for q in range(n_touched):
                c = touched[q]
                if c == a:
                    continue
                gain = links[c] - _penalty(gamma, totals[c], ud) - stay
                if best < 0 or gain > best_gain + TIE_TOL:
                    best = c
                    best_gain = gain
                    n_ties = 1
                elif gain >= best_gain - TIE_TOL:
                    # uniform choice among equal maximizers
                    n_ties += 1
                    if np.random.random() * n_ties < 1.0:
                        best = c
            for q in range(n_touched):
                c = touched[q]
                links[c] = 0.0
                seen[c] = False
            if best >= 0 and best_gain > MOVE_TOL:
                totals[a] -= ud
                totals[best] += ud
                sizes[a] -= 1
                sizes[best] += 1
                comm[u] = best
                moved += 1
                moves += 1
                if sizes[a] == 0:
                    n_comm -= 1
                    if target_k > 0 and n_comm == target_k:
                        return moves, n_comm, True
        if moved == 0:
            break
    return moves, n_comm, False
