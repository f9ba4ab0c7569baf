"""Dense linear programming kernel.

Solves  min/max  c^T x  subject to  A x = b,  lo <= x <= hi,
where individual bounds may be infinite.  The solver is a bounded-variable
two-phase primal simplex with an explicit basis inverse.  Pricing is
Dantzig's rule with a deterministic switch to Bland's rule after a run of
degenerate pivots, so the method terminates and every tie is broken by
lowest index.  No randomness, no threads: identical inputs give identical
pivot sequences and identical answers on every platform.

The per-instance class ``LinearProgram`` keeps its final basis between
calls, so a batch of objectives over one feasible region (interval hulls
need 2n of them) pays for phase 1 only once.
"""

import numpy as np

EPS_LP = 1e-9

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

# pivot element magnitudes below this are treated as zero
_PIVOT_TOL = 1e-10
# refactorize the basis inverse after this many eta updates
_REFACTOR_EVERY = 64


class NumericalError(RuntimeError):
    """The simplex lost feasibility or hit its iteration cap."""


class LpResult:
    """Outcome of one solve.

    Attributes:
        status: "optimal", "infeasible" or "unbounded".
        value: optimal objective (None unless optimal).
        x: optimizer, length n (None unless optimal).
    """

    __slots__ = ("status", "value", "x")

    def __init__(self, status, value=None, x=None):
        self.status = status
        self.value = value
        self.x = x

    def __repr__(self):
        return f"LpResult(status={self.status!r}, value={self.value!r})"


class LinearProgram:
    """A fixed feasible region ``{x : A x = b, lo <= x <= hi}``.

    ``solve`` may be called repeatedly with different objectives; after the
    first call the previous optimal basis warm-starts the next one.
    """

    def __init__(self, A, b, lo, hi):
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float).ravel()
        lo = np.asarray(lo, dtype=float).ravel()
        hi = np.asarray(hi, dtype=float).ravel()
        if A.ndim != 2:
            raise ValueError("A must be a 2-d array")
        m, n = A.shape
        if b.shape[0] != m:
            raise ValueError(f"b has length {b.shape[0]}, expected {m}")
        if lo.shape[0] != n or hi.shape[0] != n:
            raise ValueError("bound vectors must have length n")
        if np.any(np.isnan(A)) or np.any(np.isnan(b)):
            raise ValueError("NaN in constraint data")
        if np.any(lo > hi):
            raise ValueError("lo > hi for some variable")
        self.m = m
        self.n = n
        # extended columns: n structural + m artificial.  Artificial signs
        # are fixed at setup so the initial phase-1 basis is feasible.
        self.ncols = n + m
        self._A = A
        self._b = b
        self.lo = np.concatenate([lo, np.zeros(m)])
        self.hi = np.concatenate([hi, np.zeros(m)])  # artificials pinned to 0 in phase 2
        self._feasible_basis = None  # (basis, at_upper) after a successful phase 1

    # -- internal state helpers ------------------------------------------

    def _setup_cold(self):
        """Phase-1 start: artificial identity basis, structural vars at bounds."""
        n, m = self.n, self.m
        at_upper = np.zeros(self.ncols, dtype=bool)
        x = np.zeros(self.ncols)
        for j in range(n):
            if np.isfinite(self.lo[j]):
                x[j] = self.lo[j]
            elif np.isfinite(self.hi[j]):
                x[j] = self.hi[j]
                at_upper[j] = True
            else:
                x[j] = 0.0
        resid = self._b - self._A @ x[:n]
        signs = np.where(resid >= 0.0, 1.0, -1.0)
        self._art_sign = signs
        basis = np.arange(n, n + m)
        x[n:] = np.abs(resid)
        Binv = np.diag(signs)  # inverse of diag(signs) is itself
        return basis, at_upper, x, Binv

    def _column(self, j):
        if j < self.n:
            return self._A[:, j]
        col = np.zeros(self.m)
        col[j - self.n] = self._art_sign[j - self.n]
        return col

    def _basis_matrix(self, basis):
        n = self.n
        B = np.empty((self.m, self.m))
        for i, j in enumerate(basis):
            B[:, i] = self._column(j)
        return B

    def _refactor(self, basis, at_upper):
        """Recompute Binv and basic values from scratch; None if singular."""
        try:
            Binv = np.linalg.inv(self._basis_matrix(basis))
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(Binv)):
            return None
        x = np.zeros(self.ncols)
        nonbasic = np.ones(self.ncols, dtype=bool)
        nonbasic[basis] = False
        idx = np.where(nonbasic)[0]
        for j in idx:
            if at_upper[j] and np.isfinite(self.hi[j]):
                x[j] = self.hi[j]
            elif np.isfinite(self.lo[j]):
                x[j] = self.lo[j]
            elif np.isfinite(self.hi[j]):
                x[j] = self.hi[j]
            else:
                x[j] = 0.0
        rhs = self._b.copy()
        for j in idx:
            if x[j] != 0.0:
                rhs -= self._column(j) * x[j]
        x[basis] = Binv @ rhs
        return Binv, x

    # -- core simplex loop ------------------------------------------------

    def _iterate(self, c_ext, basis, at_upper, x, Binv, phase):
        """Run primal simplex to optimality for the given costs.

        Returns (status, basis, at_upper, x, Binv).  Mutates its array
        arguments in place.
        """
        m, ncols = self.m, self.ncols
        lo, hi = self.lo, self.hi
        # enterable columns: positive range or free; artificials have
        # lo == hi == 0 outside phase 1 and are skipped automatically.
        if phase == 1:
            rng_ok = hi > lo
        else:
            rng_ok = hi > lo
        max_iter = 200 * (m + ncols) + 2000
        degen_run = 0
        bland = False
        since_refactor = 0
        nonbasic_mask = np.ones(ncols, dtype=bool)
        nonbasic_mask[basis] = False
        free = ~np.isfinite(lo) & ~np.isfinite(hi)
        for _ in range(max_iter):
            y = Binv.T @ c_ext[basis]
            d = c_ext - y @ self._Aext()
            # improving directions; free variables may move either way
            at_lo_side = ~at_upper
            cand_dn = nonbasic_mask & rng_ok & at_lo_side & (d < -EPS_LP)
            cand_up = nonbasic_mask & rng_ok & at_upper & (d > EPS_LP)
            cand_fr = nonbasic_mask & free & (d > EPS_LP)
            cand = cand_dn | cand_up | cand_fr
            if not cand.any():
                return OPTIMAL, basis, at_upper, x, Binv
            idxs = np.where(cand)[0]
            if bland:
                e = idxs[0]
            else:
                e = idxs[np.argmax(np.abs(d[idxs]))]
            if free[e]:
                sigma = 1.0 if d[e] < 0.0 else -1.0
            else:
                sigma = 1.0 if not at_upper[e] else -1.0
            w = Binv @ self._column(e)
            # ratio test: smallest step t >= 0 that drives a basic variable
            # to one of its bounds, or the entering variable across its range
            rates = -sigma * w
            xb = x[basis]
            hi_b = hi[basis]
            lo_b = lo[basis]
            with np.errstate(divide="ignore", invalid="ignore"):
                t_up = np.where(
                    (rates > _PIVOT_TOL) & np.isfinite(hi_b), (hi_b - xb) / rates, np.inf
                )
                t_dn = np.where(
                    (rates < -_PIVOT_TOL) & np.isfinite(lo_b), (lo_b - xb) / rates, np.inf
                )
            t_row = np.maximum(np.minimum(t_up, t_dn), 0.0)
            t_best = t_row.min() if m else np.inf
            if np.isfinite(t_best):
                near = np.where(t_row <= t_best + 1e-12)[0]
                if bland:
                    leave_pos = near[np.argmin(basis[near])]
                else:
                    leave_pos = near[np.argmax(np.abs(rates[near]))]
                leave_to_upper = bool(t_up[leave_pos] <= t_dn[leave_pos])
                t_best = t_row[leave_pos]
            else:
                leave_pos = -1
                leave_to_upper = False
            t_range = hi[e] - lo[e]  # inf if either bound infinite
            if t_range < t_best:
                # bound flip: entering variable crosses to its other bound
                x[basis] = xb + rates * t_range
                x[e] += sigma * t_range
                at_upper[e] = not at_upper[e]
                degen_run = 0
                continue
            if not np.isfinite(t_best):
                if phase == 1:
                    raise NumericalError("phase-1 objective unbounded")
                return UNBOUNDED, basis, at_upper, x, Binv
            # pivot
            x[basis] = xb + rates * t_best
            x[e] += sigma * t_best
            lv = basis[leave_pos]
            x[lv] = hi[lv] if leave_to_upper else lo[lv]
            basis[leave_pos] = e
            nonbasic_mask[e] = False
            nonbasic_mask[lv] = True
            at_upper[lv] = leave_to_upper
            piv = w[leave_pos]
            if abs(piv) < _PIVOT_TOL:
                raise NumericalError("zero pivot")
            row = Binv[leave_pos] / piv
            Binv -= np.outer(w, row)
            Binv[leave_pos] = row
            since_refactor += 1
            if since_refactor >= _REFACTOR_EVERY:
                ref = self._refactor(basis, at_upper)
                if ref is None:
                    raise NumericalError("singular basis on refactor")
                Binv[...], x[...] = ref[0], ref[1]
                since_refactor = 0
            if t_best <= 1e-12:
                degen_run += 1
                if degen_run > m + 16:
                    bland = True
            else:
                degen_run = 0
                bland = False
        raise NumericalError("simplex iteration cap reached")

    def _Aext(self):
        Aext = getattr(self, "_Aext_cache", None)
        if Aext is None:
            Aext = np.zeros((self.m, self.ncols))
            Aext[:, : self.n] = self._A
            Aext[:, self.n :] = np.diag(self._art_sign)
            self._Aext_cache = Aext
        return Aext

    # -- public API --------------------------------------------------------

    def solve(self, c, sense="min"):
        """Optimize c^T x over the region.  Returns LpResult."""
        c = np.asarray(c, dtype=float).ravel()
        if c.shape[0] != self.n:
            raise ValueError(f"objective has length {c.shape[0]}, expected {self.n}")
        if sense not in ("min", "max"):
            raise ValueError("sense must be 'min' or 'max'")
        csign = 1.0 if sense == "min" else -1.0
        m, n = self.m, self.n
        if m == 0:
            return self._solve_boxonly(c, csign)
        if not hasattr(self, "_art_sign"):
            self._art_sign = np.ones(m)

        warm = self._feasible_basis
        if warm is not None:
            basis, at_upper = warm[0].copy(), warm[1].copy()
            ref = self._refactor(basis, at_upper)
            if ref is not None:
                Binv, x = ref
                viol = self._bound_violation(x, basis)
                if viol <= 1e-7 * max(1.0, np.abs(self._b).max(initial=1.0)):
                    status = self._phase2(c * csign, basis, at_upper, x, Binv)
                    return self._finish(status, c, csign)
            # warm basis went stale; fall through to a cold start
            self._feasible_basis = None

        basis, at_upper, x, Binv = self._setup_cold()
        # phase 1: minimize the sum of artificial values
        c1 = np.zeros(self.ncols)
        c1[n:] = 1.0
        hi_save = self.hi[n:].copy()
        self.hi[n:] = np.inf
        status, basis, at_upper, x, Binv = self._iterate(c1, basis, at_upper, x, Binv, phase=1)
        self.hi[n:] = hi_save
        if status != OPTIMAL:
            raise NumericalError("phase 1 ended " + status)
        atol = EPS_LP * 10.0 * max(1.0, np.abs(self._b).max(initial=1.0))
        if float(x[n:].sum()) > atol:
            self._state = None
            return LpResult(INFEASIBLE)
        # pin any artificial stuck in the basis to zero (its bounds are [0,0]
        # outside phase 1, so it can never move again)
        x[n:] = np.where(np.abs(x[n:]) < atol, 0.0, x[n:])
        status = self._phase2(c * csign, basis, at_upper, x, Binv)
        return self._finish(status, c, csign)

    def _phase2(self, c_scaled, basis, at_upper, x, Binv):
        c_ext = np.zeros(self.ncols)
        c_ext[: self.n] = c_scaled
        status, basis, at_upper, x, Binv = self._iterate(c_ext, basis, at_upper, x, Binv, phase=2)
        self._last = (basis, at_upper, x)
        if status == OPTIMAL:
            self._feasible_basis = (basis.copy(), at_upper.copy())
        return status

    def _finish(self, status, c, csign):
        if status != OPTIMAL:
            return LpResult(status)
        x = self._last[2][: self.n].copy()
        return LpResult(OPTIMAL, float(c @ x), x)

    def _bound_violation(self, x, basis):
        xb = x[basis]
        lo = self.lo[basis]
        hi = self.hi[basis]
        below = np.where(np.isfinite(lo), lo - xb, -np.inf)
        above = np.where(np.isfinite(hi), xb - hi, -np.inf)
        return float(max(below.max(initial=0.0), above.max(initial=0.0)))

    def _solve_boxonly(self, c, csign):
        cs = c * csign
        x = np.zeros(self.n)
        for j in range(self.n):
            if cs[j] > 0.0:
                if not np.isfinite(self.lo[j]):
                    return LpResult(UNBOUNDED)
                x[j] = self.lo[j]
            elif cs[j] < 0.0:
                if not np.isfinite(self.hi[j]):
                    return LpResult(UNBOUNDED)
                x[j] = self.hi[j]
            else:
                if np.isfinite(self.lo[j]):
                    x[j] = self.lo[j]
                elif np.isfinite(self.hi[j]):
                    x[j] = self.hi[j]
        return LpResult(OPTIMAL, float(c @ x), x)


def lp_solve(c, A_eq, b_eq, lo, hi, sense="min"):
    """One-shot solve of min/max c^T x s.t. A_eq x = b_eq, lo <= x <= hi.

    Bounds may contain ±inf.  Returns an LpResult whose status is
    "optimal", "infeasible" or "unbounded".
    """
    n = np.asarray(c).size
    if A_eq is None:
        A_eq = np.zeros((0, n))
        b_eq = np.zeros(0)
    return LinearProgram(A_eq, b_eq, lo, hi).solve(c, sense=sense)


def lp_feasible(A_eq, b_eq, lo, hi):
    """True iff {x : A_eq x = b_eq, lo <= x <= hi} is nonempty."""
    A_eq = np.asarray(A_eq, dtype=float)
    n = A_eq.shape[1] if A_eq.ndim == 2 else np.asarray(lo).size
    res = lp_solve(np.zeros(n), A_eq, b_eq, lo, hi)
    return res.status == OPTIMAL
