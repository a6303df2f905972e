"""
Utilidades Numéricas
====================
Malla de búsqueda en λ, sección áurea vectorizada sobre filas,
cuadratura de Simpson por tramos y bisección sobre predicados monótonos.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy import integrate

LOG_GRID_LOW = 1e-6
LOG_GRID_HIGH = 0.1
SMALLEST_QUALITY = 1e-300
EXPANSION_DECADES = 8
EXPANSION_POINTS = 32
PLATEAU_ATOL = 1e-9
MAX_GOLDEN_ITER = 200

INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0


# ============================================================================
# MALLA DE CALIDADES
# ============================================================================

def quality_search_grid(n_points, low=LOG_GRID_LOW):
    """
    Malla gruesa de λ: logarítmica en [low, 0.1) y uniforme en [0.1, 1].

    Args:
        n_points (int): Número total de puntos
        low (float): Extremo inferior de la parte logarítmica

    Returns:
        np.ndarray: Malla estrictamente creciente que termina en 1
    """
    n_log = n_points // 2
    log_part = np.geomspace(low, LOG_GRID_HIGH, n_log, endpoint=False)
    lin_part = np.linspace(LOG_GRID_HIGH, 1.0, n_points - n_log)
    return np.concatenate([log_part, lin_part])


def last_argmax(values):
    """Índice del último máximo por fila (empates hacia λ grande)."""
    n = values.shape[1]
    return n - 1 - np.argmax(values[:, ::-1], axis=1)


# ============================================================================
# SECCIÓN ÁUREA
# ============================================================================

def _evaluate_column(objective, log_lam, rows):
    return objective(np.exp(log_lam)[:, None], rows)[:, 0]


def golden_section_max(objective, lo, hi, rows, tol, max_iter=MAX_GOLDEN_ITER):
    """
    Maximiza por sección áurea, una fila por problema, en escala log λ.

    ``objective(lam, rows)`` recibe λ con forma (len(rows), k) y devuelve
    una matriz de la misma forma. En empates se avanza hacia la derecha.

    Args:
        objective (callable): Función objetivo vectorizada
        lo (np.ndarray): Extremos inferiores (> 0)
        hi (np.ndarray): Extremos superiores
        rows (np.ndarray): Índices de fila que se pasan a objective
        tol (float): Ancho final relativo del intervalo

    Returns:
        tuple: (λ óptimo, valor) por fila
    """
    a = np.log(lo)
    b = np.log(hi)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    yc = _evaluate_column(objective, c, rows)
    yd = _evaluate_column(objective, d, rows)

    for _ in range(max_iter):
        active = (b - a) > tol
        if not active.any():
            break
        go_left = yc > yd
        left = active & go_left
        right = active & ~go_left
        b = np.where(left, d, b)
        a = np.where(right, c, a)
        c_next = np.where(left, b - INV_PHI * (b - a), np.where(right, d, c))
        d_next = np.where(right, a + INV_PHI * (b - a), np.where(left, c, d))
        yc_next = np.where(right, yd, yc)
        yd_next = np.where(left, yc, yd)

        moved = np.flatnonzero(active)
        probe = np.where(left, c_next, d_next)[moved]
        fresh = _evaluate_column(objective, probe, rows[moved])
        moved_left = left[moved]
        yc_next[moved[moved_left]] = fresh[moved_left]
        yd_next[moved[~moved_left]] = fresh[~moved_left]
        c, d, yc, yd = c_next, d_next, yc_next, yd_next

    points = np.stack([a, c, d, b], axis=1)
    values = np.stack([
        _evaluate_column(objective, a, rows), yc, yd,
        _evaluate_column(objective, b, rows),
    ], axis=1)
    pick = last_argmax(values)
    idx = np.arange(points.shape[0])
    return np.exp(points[idx, pick]), values[idx, pick]


def _refine_bracket(objective, grid, values, best, rows, tol):
    n = grid.size
    lo = grid[np.maximum(best - 1, 0)]
    hi = grid[np.minimum(best + 1, n - 1)]
    lam, val = golden_section_max(objective, lo, hi, rows, tol)
    coarse = values[np.arange(best.size), best]
    better = coarse > val
    return np.where(better, grid[best], lam), np.where(better, coarse, val)


def maximize_quality(objective, n_rows, n_coarse, tol, plateau_atol=PLATEAU_ATOL):
    """
    Mayor maximizador en (0, 1] de una familia de funciones de λ.

    Pasos: malla gruesa (extendida hacia 0 por bloques de décadas
    mientras el máximo quede en el primer punto), sección áurea en el
    bracket del último máximo, revisión de mesetas a la derecha dentro
    de ``plateau_atol`` y comparación final con λ = 1.

    Args:
        objective (callable): objective(lam, rows) -> matriz de valores
        n_rows (int): Número de problemas independientes
        n_coarse (int): Puntos de la malla gruesa
        tol (float): Tolerancia relativa del refinamiento

    Returns:
        tuple: (λ*, valor) como arrays de longitud n_rows
    """
    rows = np.arange(n_rows)
    grid = quality_search_grid(n_coarse)
    values = objective(np.broadcast_to(grid, (n_rows, grid.size)), rows)

    floor = grid[0]
    while floor * 10.0 ** -EXPANSION_DECADES >= SMALLEST_QUALITY:
        stuck = last_argmax(values) == 0
        if not stuck.any():
            break
        block = np.geomspace(floor * 10.0 ** -EXPANSION_DECADES, floor,
                             EXPANSION_POINTS + 1)[:-1]
        block_values = np.full((n_rows, block.size), -np.inf)
        block_values[stuck] = objective(
            np.broadcast_to(block, (int(stuck.sum()), block.size)), rows[stuck])
        grid = np.concatenate([block, grid])
        values = np.concatenate([block_values, values], axis=1)
        floor = block[0]

    best = last_argmax(values)
    lam, val = _refine_bracket(objective, grid, values, best, rows, tol)

    columns = np.arange(grid.size)
    near = (values >= val[:, None] - plateau_atol) & (columns[None, :] > best[:, None] + 1)
    has_plateau = near.any(axis=1)
    if has_plateau.any():
        far = last_argmax(near[has_plateau].astype(float))
        lam_far, val_far = _refine_bracket(
            objective, grid, values[has_plateau], far, rows[has_plateau], tol)
        take = val_far >= val[has_plateau] - plateau_atol
        lam[has_plateau] = np.where(take, lam_far, lam[has_plateau])
        val[has_plateau] = np.where(take, val_far, val[has_plateau])

    at_one = objective(np.ones((n_rows, 1)), rows)[:, 0]
    snap = at_one >= val
    return np.where(snap, 1.0, lam), np.where(snap, at_one, val)


# ============================================================================
# CUADRATURA
# ============================================================================

def break_indices(x, breaks):
    """Índices de x que coinciden con los puntos de quiebre."""
    x = np.asarray(x)
    cuts = {0, x.size - 1}
    for point in breaks:
        i = int(np.searchsorted(x, point))
        for j in (i - 1, i):
            if 0 <= j < x.size and x[j] == point:
                cuts.add(j)
    return sorted(cuts)


def piecewise_simpson(x, y, breaks=()):
    """
    Simpson compuesto por tramos entre quiebres (que deben ser nodos).

    Los tramos de dos puntos se integran por trapecio. ``y`` puede ser
    1-D o 2-D (integración a lo largo del eje 0).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    cuts = break_indices(x, breaks)
    total = 0.0
    for i0, i1 in zip(cuts[:-1], cuts[1:]):
        segment = slice(i0, i1 + 1)
        if i1 - i0 == 1:
            total = total + integrate.trapezoid(y[segment], x=x[segment], axis=0)
        else:
            total = total + integrate.simpson(y[segment], x=x[segment], axis=0)
    return total


def cumulative_piecewise_simpson(x, y, breaks=()):
    """
    Incrementos de ∫ y por celda con Simpson acumulado entre quiebres.

    Devuelve un array de tamaño len(x) - 1: el incremento k es la
    integral sobre [x_k, x_{k+1}]. Los tramos de dos puntos usan trapecio.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    increments = np.empty(max(x.size - 1, 0))
    cuts = break_indices(x, breaks)
    for i0, i1 in zip(cuts[:-1], cuts[1:]):
        xs, ys = x[i0:i1 + 1], y[i0:i1 + 1]
        if i1 - i0 == 1:
            running = integrate.cumulative_trapezoid(ys, x=xs, initial=0.0)
        else:
            running = integrate.cumulative_simpson(ys, x=xs, initial=0.0)
        increments[i0:i1] = np.diff(running)
    return increments


# ============================================================================
# MALLAS Y UMBRALES
# ============================================================================

class Bracket(NamedTuple):
    last_false: float | None
    first_true: float


def locate_threshold(predicate, lo, hi, tol, max_iter=200):
    """
    Bisección sobre un predicado monótono (falso y luego verdadero).

    Returns:
        Bracket | None: None si el predicado es falso en ``hi``
    """
    if predicate(lo):
        return Bracket(None, lo)
    if not predicate(hi):
        return None
    a, b = lo, hi
    for _ in range(max_iter):
        if b - a <= tol:
            break
        mid = 0.5 * (a + b)
        if predicate(mid):
            b = mid
        else:
            a = mid
    return Bracket(a, b)


def merge_grid(base, extra, tol):
    """
    Une la malla base con puntos extra estrictamente interiores.

    Los nodos base se conservan exactamente. Un extra a menos de ``tol``
    de un nodo base, o de otro extra, se identifica con ese nodo.

    Returns:
        tuple: (malla unida, nodos de la malla que corresponden a extras)
    """
    base = np.asarray(base, dtype=float)
    points = np.asarray([p for p in extra if p is not None and np.isfinite(p)], dtype=float)
    points = np.sort(points[(points > base[0]) & (points < base[-1])])
    if points.size == 0:
        return base, points
    idx = np.searchsorted(base, points)
    left = base[np.clip(idx - 1, 0, base.size - 1)]
    right = base[np.clip(idx, 0, base.size - 1)]
    snapped = np.where(np.abs(points - left) <= tol, left,
                       np.where(np.abs(right - points) <= tol, right, np.nan))
    fresh = points[np.isnan(snapped)]
    if fresh.size > 1:
        fresh = fresh[np.concatenate([[True], np.diff(fresh) > tol])]
    return np.union1d(base, fresh), np.union1d(snapped[~np.isnan(snapped)], fresh)
