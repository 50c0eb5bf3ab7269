"""
Element kernels for quadratic axisymmetric triangles.

Local dofs are interleaved (u_rho, u_z) per node in the element order v0, v1, v2, m01, m12,
m20. Strains are [e_rhorho, e_zz, e_thetatheta = u_rho / rho, g_rhoz]. Every integral carries
the 2 pi rho revolution weight, so energies are those of the revolved body.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

# Degree-5 seven-point triangle rule: barycentric points, weights summing to 1
_A1, _B1, _W1 = 0.059715871789770, 0.470142064105115, 0.132394152788506
_A2, _B2, _W2 = 0.797426985353087, 0.101286507323456, 0.125939180544827

TRI_POINTS = np.array(
    [
        [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
        [_A1, _B1, _B1],
        [_B1, _A1, _B1],
        [_B1, _B1, _A1],
        [_A2, _B2, _B2],
        [_B2, _A2, _B2],
        [_B2, _B2, _A2],
    ]
)
TRI_WEIGHTS = np.array([0.225, _W1, _W1, _W1, _W2, _W2, _W2])

# Three-point Gauss rule on [0, 1]
EDGE_POINTS = np.array([0.5 - 0.5 * np.sqrt(0.6), 0.5, 0.5 + 0.5 * np.sqrt(0.6)])
EDGE_WEIGHTS = np.array([5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0])


def p2_shape(bary: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Quadratic shape functions and their (xi, eta) derivatives at barycentric points.

    Returns
    -------
    N : (Q, 6) values
    dN : (Q, 6, 2) derivatives with respect to the reference coordinates (L2, L3)

    """
    L1, L2, L3 = bary[:, 0], bary[:, 1], bary[:, 2]
    N = np.stack(
        [
            L1 * (2 * L1 - 1),
            L2 * (2 * L2 - 1),
            L3 * (2 * L3 - 1),
            4 * L1 * L2,
            4 * L2 * L3,
            4 * L3 * L1,
        ],
        axis=1,
    )
    zero = np.zeros_like(L1)
    d_xi = np.stack(
        [1 - 4 * L1, 4 * L2 - 1, zero, 4 * (L1 - L2), 4 * L3, -4 * L3],
        axis=1,
    )
    d_eta = np.stack(
        [1 - 4 * L1, zero, 4 * L3 - 1, -4 * L2, 4 * L2, 4 * (L1 - L3)],
        axis=1,
    )
    return N, np.stack([d_xi, d_eta], axis=2)


def p2_edge_shape(t: np.ndarray) -> np.ndarray:
    """(Q, 3) quadratic edge shape functions for (a, b, midside) at parameters ``t``."""
    return np.stack([(1 - t) * (1 - 2 * t), t * (2 * t - 1), 4 * t * (1 - t)], axis=1)


TRI_N, TRI_DN = p2_shape(TRI_POINTS)
EDGE_N = p2_edge_shape(EDGE_POINTS)


@njit(parallel=True, cache=True)
def element_stiffness(nodes, elements, lam, mu, shape, dshape, weights, out):
    """
    Fill ``out[e]`` with the 12 x 12 stiffness of element ``e``.

    Each element writes only its own slot, so the result does not depend on thread count.
    """
    n_elem = elements.shape[0]
    n_q = weights.shape[0]
    c11 = lam + 2.0 * mu
    for e in prange(n_elem):
        x0 = nodes[elements[e, 0], 0]
        z0 = nodes[elements[e, 0], 1]
        j00 = nodes[elements[e, 1], 0] - x0
        j01 = nodes[elements[e, 2], 0] - x0
        j10 = nodes[elements[e, 1], 1] - z0
        j11 = nodes[elements[e, 2], 1] - z0
        det = j00 * j11 - j01 * j10
        area = 0.5 * abs(det)
        ke = np.zeros((12, 12))
        b = np.zeros((4, 12))
        db = np.zeros((4, 12))
        for q in range(n_q):
            rho = 0.0
            for k in range(6):
                rho += shape[q, k] * nodes[elements[e, k], 0]
            wq = weights[q] * area * 2.0 * np.pi * rho
            for k in range(6):
                # grad = J^-T grad_ref
                dr = (j11 * dshape[q, k, 0] - j10 * dshape[q, k, 1]) / det
                dz = (-j01 * dshape[q, k, 0] + j00 * dshape[q, k, 1]) / det
                b[0, 2 * k] = dr
                b[2, 2 * k] = shape[q, k] / rho
                b[3, 2 * k] = dz
                b[1, 2 * k + 1] = dz
                b[3, 2 * k + 1] = dr
            for j in range(12):
                s0 = b[0, j]
                s1 = b[1, j]
                s2 = b[2, j]
                db[0, j] = c11 * s0 + lam * s1 + lam * s2
                db[1, j] = lam * s0 + c11 * s1 + lam * s2
                db[2, j] = lam * s0 + lam * s1 + c11 * s2
                db[3, j] = mu * b[3, j]
            for i in range(12):
                for j in range(12):
                    acc = 0.0
                    for r in range(4):
                        acc += b[r, i] * db[r, j]
                    ke[i, j] += wq * acc
        for i in range(12):
            for j in range(12):
                out[e, i, j] = ke[i, j]


def stiffness_blocks(nodes: np.ndarray, elements: np.ndarray, lam: float, mu: float) -> np.ndarray:
    out = np.empty((elements.shape[0], 12, 12))
    element_stiffness(
        np.ascontiguousarray(nodes, dtype=np.float64),
        np.ascontiguousarray(elements, dtype=np.int64),
        float(lam),
        float(mu),
        TRI_N,
        TRI_DN,
        TRI_WEIGHTS,
        out,
    )
    return out


def element_dofs(elements: np.ndarray) -> np.ndarray:
    """(E, 12) global dof indices, interleaved (u_rho, u_z) per node."""
    dofs = np.empty((elements.shape[0], 12), dtype=np.int64)
    dofs[:, 0::2] = 2 * elements
    dofs[:, 1::2] = 2 * elements + 1
    return dofs


def quadrature_points(nodes: np.ndarray, elements: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Quadrature points and revolution-weighted weights of every element.

    Returns
    -------
    points : (E, Q, 2)
    weights : (E, Q), including area and 2 pi rho

    """
    corners = nodes[elements[:, :3]]
    points = np.einsum("qk,ekd->eqd", TRI_POINTS, corners)
    d1 = corners[:, 1] - corners[:, 0]
    d2 = corners[:, 2] - corners[:, 0]
    area = 0.5 * np.abs(d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
    weights = TRI_WEIGHTS[None, :] * area[:, None] * 2.0 * np.pi * points[:, :, 0]
    return points, weights


def body_force_vector(
    nodes: np.ndarray,
    elements: np.ndarray,
    force: np.ndarray,
    weights: np.ndarray,
) -> np.ndarray:
    """
    Consistent nodal forces of a body-force field sampled at the quadrature points.

    ``force`` is (E, Q, 2); returns the global load vector.
    """
    fe = np.einsum("eq,qk,eqd->ekd", weights, TRI_N, force).reshape(elements.shape[0], 12)
    f = np.zeros(2 * nodes.shape[0])
    np.add.at(f, element_dofs(elements).ravel(), fe.ravel())
    return f
