"""Shared test helpers: brute-force oracles kept independent of the library."""
from itertools import combinations

import numpy as np


def lp_vertex_minimum(c, A_ub, b_ub):
    """Brute-force LP minimum of c@z over {A_ub z <= b_ub, z >= 0}.

    Enumerates every vertex (each choice of n active constraints among the
    inequality rows and the nonnegativity bounds) and returns the best
    feasible objective value. Only viable for a handful of variables.
    """
    c = np.asarray(c, float)
    A_ub = np.asarray(A_ub, float)
    b_ub = np.asarray(b_ub, float)
    n = c.size
    rows = [(A_ub[i], b_ub[i]) for i in range(A_ub.shape[0])]
    rows += [(-np.eye(n)[i], 0.0) for i in range(n)]
    best = np.inf
    for combo in combinations(range(len(rows)), n):
        A = np.array([rows[i][0] for i in combo])
        b = np.array([rows[i][1] for i in combo])
        if abs(np.linalg.det(A)) < 1e-12:
            continue
        z = np.linalg.solve(A, b)
        if np.all(A_ub @ z <= b_ub + 1e-9) and np.all(z >= -1e-9):
            best = min(best, float(c @ z))
    return best


def dantzig_l1_optimum(H, y, tau):
    """Optimal l1 norm of the correlation-constrained program, via vertex
    enumeration of its positive/negative-split LP."""
    H = np.asarray(H, float)
    G = H.T @ H
    beta = H.T @ y
    p = H.shape[1]
    A_ub = np.block([[G, -G], [-G, G]])
    b_ub = np.concatenate([tau + beta, tau - beta])
    return lp_vertex_minimum(np.ones(2 * p), A_ub, b_ub)
