"""
Metric Oracle Service
Classical coordinate curvature from the induced metric alone, used to cross-check the
Clifford pipelines
"""

from typing import Dict, List, Sequence

import numpy as np

from services.frame_service import Chart, Component
from services.jet_service import JetSpace, get_space, lift


def _matmul(A: np.ndarray, B: np.ndarray, space: JetSpace) -> np.ndarray:
    """Product of jet-valued matrices with trailing coefficient axes"""
    return np.einsum('ija,jkb,abc->ikc', A, B, space.mult)


def _inverse(G: np.ndarray, space: JetSpace) -> np.ndarray:
    """Jet inverse via the terminating Neumann series around the value part"""
    m = G.shape[0]
    base = np.linalg.inv(G[:, :, 0])
    base_jet = np.zeros_like(G)
    base_jet[:, :, 0] = base
    nilpotent = G.copy()
    nilpotent[:, :, 0] = 0.0
    step = -_matmul(base_jet, nilpotent, space)
    term = base_jet
    total = base_jet.copy()
    for _ in range(space.order):
        term = _matmul(step, term, space)
        total = total + term
    return total


def _derivative(A: np.ndarray, space: JetSpace, var: int) -> np.ndarray:
    return A @ space.derivative_matrix(var).T


def metric_jets(chart: Chart, u: Sequence[float], order: int = 3):
    """
    Induced metric g_ij = sum_k eta_k (dx^k/du^i)(dx^k/du^j) as jets.

    Returns:
        (G, space) with G of shape (m, m, space.size)
    """
    x = chart.embedding_jets(u, order)
    m, n = chart.m, chart.n
    space = get_space(m, order - 1)
    tangents = np.zeros((m, n, space.size))
    for i in range(m):
        for k in range(n):
            d = x[k].derivative(i)
            tangents[i, k] = lift(d.coeffs, d.space, space)
    etas = np.array(chart.signature.etas, dtype=float)
    G = np.einsum('ika,jkb,k,abc->ijc', tangents, tangents, etas, space.mult)
    return G, space


def christoffel_jets(chart: Chart, u: Sequence[float], order: int = 3):
    """Gamma^i_jk = 1/2 g^il (d_j g_lk + d_k g_lj - d_l g_jk), one order below the metric"""
    G, space = metric_jets(chart, u, order)
    m = chart.m
    lower = get_space(m, space.order - 1)
    dG = np.stack([_derivative(G, space, l) for l in range(m)])  # dG[l, i, j] = d_l g_ij
    inverse = lift(_inverse(G, space), space, lower)
    first_kind = 0.5 * (np.einsum('jlka->ljka', dG) + np.einsum('klja->ljka', dG) - dG)
    gamma = np.einsum('ila,ljkb,abc->ijkc', inverse, first_kind, lower.mult)
    return gamma, lower


def classical_curvature(chart: Chart, u: Sequence[float], order: int = 3) -> Dict:
    """
    Riemann R^i_jkl = d_k Gamma^i_lj - d_l Gamma^i_kj + Gamma^i_km Gamma^m_lj - Gamma^i_lm Gamma^m_kj,
    Ricci R_jl = R^i_jil, scalar g^jl R_jl and, for m = 2, Gaussian curvature R_1212 / det g.
    """
    G, _ = metric_jets(chart, u, order)
    g = G[:, :, 0]
    gamma_jets, space = christoffel_jets(chart, u, order)
    m = chart.m
    gamma = gamma_jets[..., 0]
    d_gamma = np.stack([_derivative(gamma_jets, space, k)[..., 0] for k in range(m)])  # [k, i, j, l]
    riemann = (np.einsum('kilj->ijkl', d_gamma)
               - np.einsum('likj->ijkl', d_gamma)
               + np.einsum('ikm,mlj->ijkl', gamma, gamma)
               - np.einsum('ilm,mkj->ijkl', gamma, gamma))
    ricci = np.einsum('ijil->jl', riemann)
    g_inv = np.linalg.inv(g)
    scalar = float(np.einsum('jl,jl->', g_inv, ricci))
    result = {
        'metric': g,
        'christoffel': gamma,
        'riemann': riemann,
        'ricci': ricci,
        'scalar': scalar,
    }
    if m == 2:
        lowered = np.einsum('im,mjkl->ijkl', g, riemann)
        result['gaussian'] = float(lowered[0, 1, 0, 1] / np.linalg.det(g))
    return result


def killing_lie_derivative(chart: Chart, u: Sequence[float], components: List[Component],
                           order: int = 3) -> np.ndarray:
    """(L_X g)_ij = X^k d_k g_ij + g_kj d_i X^k + g_ik d_j X^k"""
    G, space = metric_jets(chart, u, order)
    m = chart.m
    X = chart.evaluate_components(components, u, order)
    g = G[:, :, 0]
    dG = np.stack([_derivative(G, space, k)[:, :, 0] for k in range(m)])
    values = np.array([x.value for x in X])
    dX = np.array([[X[k].derivative(i).value for k in range(m)] for i in range(m)])  # dX[i, k]
    return (np.einsum('k,kij->ij', values, dG)
            + np.einsum('kj,ik->ij', g, dX)
            + np.einsum('ik,jk->ij', g, dX))


def geodesic_acceleration(chart: Chart, u: Sequence[float], velocity: Sequence[float]) -> np.ndarray:
    """Coordinate acceleration -Gamma^i_jk v^j v^k of the geodesic through u with velocity v"""
    gamma_jets, _ = christoffel_jets(chart, u, 2)
    v = np.asarray(velocity, dtype=float)
    return -np.einsum('ijk,j,k->i', gamma_jets[..., 0], v, v)


def fd_jacobian(chart: Chart, u: Sequence[float], step: float = 1e-5) -> np.ndarray:
    """Central finite-difference dx^j/du^i, shape (m, n)"""
    u = np.asarray(u, dtype=float)
    rows = []
    for i in range(chart.m):
        h = step * max(1.0, abs(chart.domain[i][1] - chart.domain[i][0]))
        forward, backward = u.copy(), u.copy()
        forward[i] += h
        backward[i] -= h
        rows.append((chart.position(forward) - chart.position(backward)) / (2.0 * h))
    return np.array(rows)
