"""Direction providers: quasi-Newton steps from residual information.

A provider turns the residual computed at the current forward point into a
candidate direction d.  The default is limited-memory BFGS on the inverse
secant pairs (s, y) = (point difference, residual difference); a structured
Newton provider exploits box-constrained problems where the prox Jacobian
is a 0/1 diagonal; the zero provider degrades any solver to its plain
proximal-gradient behaviour.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .fbstep import FbState
from .oracles import Box, SmoothOracle


class DirectionProvider:
    """Contract shared by all providers.

    ``initialize`` is called once with the first point/residual pair,
    ``update`` with consecutive differences (s, y), and ``direction`` maps
    the current residual (plus optional iteration state) to a finite vector
    of matching dimension, or None to signal that the caller should fall
    back to a safe direction.
    """

    def initialize(self, point: np.ndarray, residual: np.ndarray) -> None:
        pass

    def update(self, s: np.ndarray, y: np.ndarray) -> None:
        pass

    def direction(self, residual: np.ndarray, state: FbState | None = None) -> np.ndarray | None:
        raise NotImplementedError


def _cap_norm(d: np.ndarray, residual: np.ndarray, cap_factor: float | None) -> np.ndarray:
    """Clip ||d|| to cap_factor * max(1, ||residual||) to keep candidates finite."""
    if cap_factor is None:
        return d
    limit = cap_factor * max(1.0, float(np.linalg.norm(residual)))
    norm = float(np.linalg.norm(d))
    if norm > limit:
        d = d * (limit / norm)
    return d


# ---------------------------------------------------------------------------
# L-BFGS
# ---------------------------------------------------------------------------

@dataclass
class LbfgsBuffer:
    """Ring buffer of inverse-secant pairs implementing the two-loop recursion.

    Pairs are accepted only when their curvature ``<s, y>`` clears a cautious
    threshold; rejected pairs leave the buffer untouched.  The seed matrix is
    ``gamma0 I`` with ``gamma0 = <s,y>/<y,y>`` of the newest pair (identity
    when empty).
    """

    capacity: int
    eps_curv: float = 1e-12
    _s: deque = field(default_factory=deque, repr=False)
    _y: deque = field(default_factory=deque, repr=False)
    _rho: deque = field(default_factory=deque, repr=False)

    def __len__(self) -> int:
        return len(self._s)

    def reset(self) -> None:
        self._s.clear()
        self._y.clear()
        self._rho.clear()

    def push(self, s: np.ndarray, y: np.ndarray) -> bool:
        """Store the pair iff its curvature is safely positive; returns acceptance."""
        s = np.asarray(s, dtype=float)
        y = np.asarray(y, dtype=float)
        if s.shape != y.shape:
            raise ValueError(f"secant pair shapes differ: {s.shape} vs {y.shape}")
        sy = float(s @ y)
        if not np.isfinite(sy) or sy <= self.eps_curv * float(np.linalg.norm(s)) * float(np.linalg.norm(y)):
            return False
        if len(self._s) == self.capacity:
            self._s.popleft()
            self._y.popleft()
            self._rho.popleft()
        self._s.append(s)
        self._y.append(y)
        self._rho.append(1.0 / sy)
        return True

    def direction(self, r: np.ndarray) -> np.ndarray:
        """-H r via the two-loop recursion (so an empty buffer gives -r)."""
        q = np.array(r, dtype=float, copy=True)
        m = len(self._s)
        if m == 0:
            return -q
        alpha = np.empty(m)
        for i in range(m - 1, -1, -1):
            alpha[i] = self._rho[i] * float(self._s[i] @ q)
            q -= alpha[i] * self._y[i]
        y_last = self._y[-1]
        seed = (1.0 / self._rho[-1]) / float(y_last @ y_last)
        q *= seed
        for i in range(m):
            beta = self._rho[i] * float(self._y[i] @ q)
            q += (alpha[i] - beta) * self._s[i]
        return -q


def lbfgs_push(buf: LbfgsBuffer, s: np.ndarray, y: np.ndarray) -> bool:
    return buf.push(s, y)


def lbfgs_direction(buf: LbfgsBuffer, r: np.ndarray) -> np.ndarray:
    return buf.direction(r)


class LbfgsDirections(DirectionProvider):
    """Limited-memory BFGS provider with a magnitude cap on the output."""

    def __init__(self, memory: int = 10, eps_curv: float = 1e-12,
                 cap_factor: float | None = 1e3):
        self.buffer = LbfgsBuffer(capacity=memory, eps_curv=eps_curv)
        self.cap_factor = cap_factor

    def initialize(self, point, residual):
        self.buffer.reset()

    def update(self, s, y):
        self.buffer.push(s, y)

    def direction(self, residual, state=None):
        d = self.buffer.direction(residual)
        if not np.all(np.isfinite(d)):
            return None
        return _cap_norm(d, residual, self.cap_factor)


# ---------------------------------------------------------------------------
# Structured Newton for box constraints
# ---------------------------------------------------------------------------

def structured_newton_box(x: np.ndarray, r_nor: np.ndarray, x_hat: np.ndarray,
                          grad_at_x_hat: np.ndarray, hess: SmoothOracle, box: Box,
                          gamma: float, eps_active: float = 1e-12,
                          reg_ladder: tuple[float, ...] = (1e-8, 1e-4, 1.0),
                          ) -> np.ndarray | None:
    """Newton direction of f restricted to the inactive box coordinates.

    ``x`` is the forward point where the normal residual was evaluated and
    ``x_hat = prox(x)``.  Coordinates of ``x`` at or beyond the bounds (within
    ``eps_active``) form the active set K; there the prox Jacobian vanishes
    and the direction collapses to ``-gamma`` times the residual plus a
    curvature coupling term.  On the inactive set the reduced Newton system
    is solved by Cholesky, with a diagonal regularization ladder; returns
    None when every regularization fails, so the caller can substitute a
    fallback direction.
    """
    n = x.shape[0]
    active = (x <= box.lo + eps_active) | (x >= box.hi - eps_active)
    idx_k = np.flatnonzero(active)
    idx_j = np.flatnonzero(~active)
    d = np.empty(n)

    if idx_j.size == 0:
        return -gamma * r_nor

    h_jj = hess.hess_block(x_hat, idx_j, idx_j)
    rhs = -grad_at_x_hat[idx_j]
    d_j = None
    for delta in (0.0,) + tuple(reg_ladder):
        try:
            mat = h_jj if delta == 0.0 else h_jj + delta * np.eye(idx_j.size)
            c, low = scipy.linalg.cho_factor(mat)
            d_j = scipy.linalg.cho_solve((c, low), rhs)
        except scipy.linalg.LinAlgError:
            continue
        if np.all(np.isfinite(d_j)):
            break
        d_j = None
    if d_j is None:
        return None

    d[idx_j] = d_j
    if idx_k.size:
        h_kj = hess.hess_block(x_hat, idx_k, idx_j)
        d[idx_k] = -gamma * r_nor[idx_k] - gamma * (h_kj @ d_j)
    return d


class StructuredNewtonBox(DirectionProvider):
    """Provider wrapper around :func:`structured_newton_box`.

    Needs the iteration state for the prox point and its gradient; the
    smooth oracle must expose Hessian blocks.
    """

    def __init__(self, smooth: SmoothOracle, box: Box, eps_active: float = 1e-12,
                 cap_factor: float | None = 1e3):
        self.smooth = smooth
        self.box = box
        self.eps_active = eps_active
        self.cap_factor = cap_factor

    def direction(self, residual, state=None):
        if state is None or state.grad_at_p is None:
            return None
        d = structured_newton_box(
            x=state.x_bar, r_nor=residual, x_hat=state.p,
            grad_at_x_hat=state.grad_at_p, hess=self.smooth, box=self.box,
            gamma=state.gamma, eps_active=self.eps_active,
        )
        if d is None or not np.all(np.isfinite(d)):
            return None
        return _cap_norm(d, residual, self.cap_factor)


class ZeroDirections(DirectionProvider):
    """Always returns the zero direction; reduces linesearch solvers to PG."""

    def direction(self, residual, state=None):
        return np.zeros_like(residual)
