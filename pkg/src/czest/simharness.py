"""Simulation harness: scenarios, trials, metrics, Monte Carlo.

A scenario document (JSON-compatible dict) fixes the system, horizon,
algorithms and sampling rules.  ``run_trial`` simulates the truth,
generates measurements, drives the requested filters and logs per-step
metrics; ``run_monte_carlo`` repeats over deterministically derived
per-trial seeds, optionally on a process pool capped by the
CZEST_THREADS environment variable.  Identical configuration and seed
give byte-identical logs regardless of worker count.

Hull and containment queries for the centralized and fixed-lag filters
are answered by an equivalent sparse "trajectory" LP over the history
window (states and noises as explicit variables) instead of the
accumulated generator form; both describe the same set and the test
suite asserts their hulls agree.  The distributed filter's hulls come
from the filter itself.
"""

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from . import czono, filters, sysmodel
from .czono import Box

__all__ = [
    "ScenarioConfig",
    "TrialLog",
    "McResult",
    "run_trial",
    "run_monte_carlo",
    "build_uav_scenario",
    "build_pair1d_scenario",
    "builtin_scenario",
    "metrics_rows",
    "write_metrics_csv",
]

_HIGHS_OPTS = {
    "primal_feasibility_tolerance": 1e-9,
    "dual_feasibility_tolerance": 1e-9,
    "presolve": True,
}

ALGORITHMS = ("centralized", "oit", "distributed")


def _as_box(Z):
    """Return the Box a CZ exactly equals, or None.

    An unconstrained CZ whose generator columns each touch at most one
    output row is an axis-aligned box; its interval hull is then exact.
    """
    if Z.n_constraints:
        return None
    touched = (Z.G != 0.0).sum(axis=0)
    if np.any(touched > 1):
        return None
    return czono.interval_hull(Z)


# -- scenario documents ------------------------------------------------------


def build_uav_scenario(horizon=30, seed=1):
    """Five planar vehicles on the default ring-and-hub measurement graph.

    State per agent is (px, vx, py, vy) with a unit-frequency coordinated
    turn, sampling period pi/12.  Every agent measures both of its
    position coordinates absolutely; relative position measurements
    follow the edge list.  All noise ranges are unit boxes.
    """
    T = math.pi / 12.0
    B = [[T * T / 2.0, 0.0], [T, 0.0], [0.0, T * T / 2.0], [0.0, T]]
    C = [[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]]
    D = [[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]]
    unit2 = {"lo": [-1.0, -1.0], "hi": [1.0, 1.0]}
    edges = [[1, 2], [2, 1], [2, 3], [2, 4], [3, 2], [4, 2], [4, 3], [5, 4]]
    in_nbrs = {1: [2], 2: [1, 3, 4], 3: [2], 4: [2, 3], 5: [4]}
    agents = []
    for i in range(1, 6):
        agents.append(
            {
                "id": i,
                "dynamics": {"kind": "coordinated-turn", "omega": 1.0, "T": T},
                "B": B,
                "C": C,
                "D": D,
                "process_noise": dict(unit2),
                "measurement_noise": dict(unit2),
                "relative_noise": {str(j): dict(unit2) for j in in_nbrs[i]},
            }
        )
    return {
        "name": "uav5",
        "description": "five planar vehicles, absolute + relative position measurements",
        "plot_coords": [0, 2],
        "agents": agents,
        "edges": edges,
        "horizon": horizon,
        "seed": seed,
        "delta_bar": None,
        "algorithms": list(ALGORITHMS),
        "initial": {
            "mode": "sampled",
            "center_low": -10.0,
            "center_high": 10.0,
            "half_width": 2.0,
        },
    }


def build_pair1d_scenario(horizon=5, seed=1):
    """Two scalar agents measuring each other; used by the grid oracle."""
    unit1 = {"lo": [-1.0], "hi": [1.0]}
    agents = []
    for i, rng_lo, rng_hi in ((1, -2.0, 2.0), (2, -1.0, 3.0)):
        agents.append(
            {
                "id": i,
                "dynamics": {"kind": "constant", "A": [[1.0]]},
                "B": [[1.0]],
                "C": [[1.0]],
                "D": [[1.0]],
                "process_noise": dict(unit1),
                "measurement_noise": dict(unit1),
                "relative_noise": {str(j): dict(unit1) for j in ([2] if i == 1 else [1])},
                "initial_range": {"lo": [rng_lo], "hi": [rng_hi]},
            }
        )
    return {
        "name": "pair1d",
        "description": "two scalar agents with mutual relative measurements",
        "agents": agents,
        "edges": [[1, 2], [2, 1]],
        "horizon": horizon,
        "seed": seed,
        "delta_bar": None,
        "algorithms": list(ALGORITHMS),
        "initial": {"mode": "fixed"},
        "noise_grid": 0.05,
    }


_BUILTINS = {"uav5": build_uav_scenario, "pair1d": build_pair1d_scenario}


def builtin_scenario(name):
    if name not in _BUILTINS:
        raise sysmodel.SchemaError(
            f"unknown scenario '{name}' (built-ins: {', '.join(sorted(_BUILTINS))})"
        )
    return _BUILTINS[name]()


class ScenarioConfig:
    """Parsed scenario plus run options; reconstructible from its doc."""

    def __init__(self, doc):
        self.doc = doc
        self.name = doc.get("name", "scenario")
        self.system = sysmodel.system_from_dict(doc)
        self.K = int(doc.get("horizon", 30))
        if self.K < 1:
            raise sysmodel.SchemaError("scenario.horizon: must be >= 1")
        self.seed = int(doc.get("seed", 1))
        algs = doc.get("algorithms", list(ALGORITHMS))
        for a in algs:
            if a not in ALGORITHMS:
                raise sysmodel.SchemaError(
                    f"scenario.algorithms: unknown algorithm '{a}'"
                )
        self.algorithms = tuple(algs)
        self.mu0 = sysmodel.observability_index(self.system)
        db = doc.get("delta_bar")
        self.delta_bar = self.mu0 + 1 if db is None else int(db)
        self.noise_scale = float(doc.get("injected_noise_scale", 1.0))
        grid = doc.get("noise_grid")
        self.noise_grid = None if grid is None else float(grid)
        if self.noise_grid is not None and self.noise_grid <= 0:
            raise sysmodel.SchemaError("scenario.noise_grid: must be positive")
        self.hull_backend = doc.get("hull_backend", "auto")
        if self.hull_backend not in ("auto", "czono"):
            raise sysmodel.SchemaError("scenario.hull_backend: 'auto' or 'czono'")
        init = doc.get("initial", {"mode": "fixed"})
        self.initial_mode = init.get("mode", "fixed")
        if self.initial_mode not in ("fixed", "sampled"):
            raise sysmodel.SchemaError("scenario.initial.mode: 'fixed' or 'sampled'")
        if self.initial_mode == "sampled":
            self.init_center_low = float(init.get("center_low", -10.0))
            self.init_center_high = float(init.get("center_high", 10.0))
            self.init_half_width = float(init.get("half_width", 2.0))
        else:
            for idx, ad in enumerate(doc["agents"]):
                if "initial_range" not in ad:
                    raise sysmodel.SchemaError(
                        f"agents[{idx}]: fixed initial mode needs 'initial_range'"
                    )

    @classmethod
    def from_doc(cls, doc, **overrides):
        doc = dict(doc)
        for key, val in overrides.items():
            if val is not None:
                doc[key] = val
        return cls(doc)

    def doc_json(self):
        return json.dumps(self.doc, sort_keys=True)


# -- sampling ---------------------------------------------------------------


class NoiseSampler:
    """Uniform draws from noise ranges with a fixed, documented order.

    When a grid step is set, every draw is snapped to the nearest multiple
    of that step (then clipped to the range).  Gridded scenarios make the
    exhaustive lattice oracle exact, since every reachable state and every
    measurement stays on the lattice.
    """

    def __init__(self, rng, scale=1.0, grid=None):
        self.rng = rng
        self.scale = scale
        self.grid = grid

    def _snap(self, x, lo, hi):
        if self.grid is None:
            return x
        return np.clip(np.round(x / self.grid) * self.grid, lo, hi)

    def from_box(self, box):
        if box.dim == 0:
            return np.zeros(0)
        c, r = box.center, box.radius * self.scale
        return self._snap(self.rng.uniform(c - r, c + r), c - r, c + r)

    def from_cz(self, Z, max_tries=1000):
        box = _as_box(Z)
        if box is not None:
            return self.from_box(box)
        if self.scale != 1.0:
            raise ValueError("injected_noise_scale supports box noise ranges only")
        if self.grid is not None:
            raise ValueError("noise_grid supports box noise ranges only")
        hull = czono.interval_hull(Z)
        for _ in range(max_tries):
            x = self.rng.uniform(hull.lo, hull.hi)
            if czono.contains(Z, x):
                return x
        raise RuntimeError("rejection sampling failed; noise range too thin")


def _initial_ranges(cfg, rng):
    """Per-agent initial boxes, drawn or fixed per the scenario."""
    out = {}
    for idx, i in enumerate(cfg.system.agent_ids):
        n = cfg.system.agents[i].n
        if cfg.initial_mode == "sampled":
            center = rng.uniform(cfg.init_center_low, cfg.init_center_high, n)
            out[i] = Box(center - cfg.init_half_width, center + cfg.init_half_width)
        else:
            bd = cfg.doc["agents"][idx]["initial_range"]
            out[i] = Box(bd["lo"], bd["hi"])
    return out


# -- trajectory-LP metrics backend -------------------------------------------


class _History:
    """Per-trial record of stacked data, one entry per measurement step."""

    def __init__(self, x0_box):
        self.x0_box = x0_box
        self.steps = []  # dicts: A_prev, B, w_box, H, v_box, Y
        self._lp_cache = {}

    def append(self, A_prev, B, w_box, H, v_box, Y):
        self.steps.append(
            {"A": A_prev, "B": B, "w": w_box, "H": H, "v": v_box, "Y": Y}
        )
        self._lp_cache.clear()

    def lp(self, t0, k, x0_box, meas_at_t0):
        key = (t0, k, x0_box is None, meas_at_t0)
        if key not in self._lp_cache:
            self._lp_cache[key] = _TrajectoryLP(self, t0, k, x0_box, meas_at_t0)
        return self._lp_cache[key]


class _TrajectoryLP:
    """Sparse LP over (x_{t0}, w, x, v) for one window of the history.

    The feasible set projected on x_k equals the filter posterior: the
    dynamics rows encode the prediction, the measurement rows the update.
    ``x0_box=None`` leaves the window's initial state free, matching the
    fixed-lag rebuild from an unbounded prior.
    """

    def __init__(self, history, t0, k, x0_box, meas_at_t0):
        steps = history.steps
        n = steps[0]["A"].shape[0]
        self.n = n
        rows = []
        cols = []
        vals = []
        beq = []
        lb = []
        ub = []
        nvar = 0

        def add_vars(count, lo, hi):
            nonlocal nvar
            start = nvar
            nvar += count
            lb.extend(np.broadcast_to(lo, (count,)).tolist())
            ub.extend(np.broadcast_to(hi, (count,)).tolist())
            return start

        if x0_box is None:
            x_prev = add_vars(n, -np.inf, np.inf)
        else:
            x_prev = add_vars(n, 0.0, 0.0)
            lb[x_prev : x_prev + n] = x0_box.lo.tolist()
            ub[x_prev : x_prev + n] = x0_box.hi.tolist()
        nrow = 0

        def add_meas(entry, x_at):
            nonlocal nrow
            H, vbox, Y = entry["H"], entry["v"], entry["Y"]
            m = H.shape[0]
            if m == 0:
                return
            v_at = add_vars(m, vbox.lo, vbox.hi)
            hr, hc = np.nonzero(H)
            rows.extend((nrow + hr).tolist())
            cols.extend((x_at + hc).tolist())
            vals.extend(H[hr, hc].tolist())
            rows.extend(range(nrow, nrow + m))
            cols.extend(range(v_at, v_at + m))
            vals.extend([1.0] * m)
            beq.extend(Y.tolist())
            nrow += m

        if meas_at_t0:
            add_meas(steps[t0 - 1], x_prev)
        for t in range(t0 + 1, k + 1):
            entry = steps[t - 1]
            A, B, wbox = entry["A"], entry["B"], entry["w"]
            p = B.shape[1]
            w_at = add_vars(p, wbox.lo, wbox.hi)
            x_at = add_vars(n, -np.inf, np.inf)
            ar, ac = np.nonzero(A)
            rows.extend((nrow + ar).tolist())
            cols.extend((x_prev + ac).tolist())
            vals.extend((-A[ar, ac]).tolist())
            br, bc = np.nonzero(B)
            rows.extend((nrow + br).tolist())
            cols.extend((w_at + bc).tolist())
            vals.extend((-B[br, bc]).tolist())
            rows.extend(range(nrow, nrow + n))
            cols.extend(range(x_at, x_at + n))
            vals.extend([1.0] * n)
            beq.extend([0.0] * n)
            nrow += n
            x_prev = x_at
            add_meas(entry, x_at)
        self.x_final = x_prev
        self.nvar = nvar
        self.A_eq = sparse.csc_matrix(
            sparse.coo_matrix((vals, (rows, cols)), shape=(nrow, nvar))
        )
        self.b_eq = np.array(beq)
        self.lb = np.array(lb)
        self.ub = np.array(ub)

    def _solve(self, c, lb=None, ub=None):
        return linprog(
            c,
            A_eq=self.A_eq,
            b_eq=self.b_eq,
            bounds=np.column_stack([self.lb if lb is None else lb, self.ub if ub is None else ub]),
            method="highs",
            options=_HIGHS_OPTS,
        )

    def hull(self, coords):
        """Interval hull of the listed coordinates of the final state."""
        lo = np.empty(len(coords))
        hi = np.empty(len(coords))
        for out, j in enumerate(coords):
            c = np.zeros(self.nvar)
            c[self.x_final + j] = 1.0
            rmin = self._solve(c)
            if rmin.status == 2:
                raise czono.EmptySetError("trajectory LP infeasible")
            c[self.x_final + j] = -1.0
            rmax = self._solve(c)
            lo[out] = -np.inf if rmin.status == 3 else rmin.fun
            hi[out] = np.inf if rmax.status == 3 else -rmax.fun
        return Box(lo, hi)

    def contains_final(self, x, coords=None):
        """True iff some trajectory ends at x (on the listed coords)."""
        lb = self.lb.copy()
        ub = self.ub.copy()
        coords = range(self.n) if coords is None else coords
        for out, j in enumerate(coords):
            lb[self.x_final + j] = x[out]
            ub[self.x_final + j] = x[out]
        res = self._solve(np.zeros(self.nvar), lb, ub)
        return res.status == 0


def _boxes_or_none(cfg):
    """Noise ranges as exact boxes, or None if any range is not a box."""
    sys_ = cfg.system
    out = {"w": {}, "v": {}, "r": {}}
    for i in sys_.agent_ids:
        a = sys_.agents[i]
        bw = _as_box(a.Wset)
        bv = _as_box(a.Vset)
        if bw is None or bv is None:
            return None
        out["w"][i] = bw
        out["v"][i] = bv
        for j, R in a.Rset_of.items():
            br = _as_box(R)
            if br is None:
                return None
            out["r"][(i, j)] = br
    return out


# -- trial logs ---------------------------------------------------------------


class TrialLog:
    """Pure-python record of one trial; serializes to JSON lines."""

    def __init__(self, header):
        self.header = header
        self.steps = []
        self.end = None

    def finish(self, aborted=None):
        violations = 0
        for s in self.steps:
            for alg in s["algs"].values():
                violations += sum(0 if a["contained"] else 1 for a in alg.values())
        self.end = {"type": "end", "aborted": aborted, "violations": violations}
        return self

    @property
    def violations(self):
        return self.end["violations"] if self.end else None

    @property
    def aborted(self):
        return self.end.get("aborted") if self.end else None

    def lines(self):
        recs = [self.header] + self.steps + ([self.end] if self.end else [])
        return [json.dumps(r, sort_keys=True, separators=(",", ":")) for r in recs]

    def dumps(self):
        return "\n".join(self.lines()) + "\n"

    def write(self, path):
        with open(path, "w") as f:
            f.write(self.dumps())

    @classmethod
    def read(cls, path):
        with open(path) as f:
            recs = [json.loads(line) for line in f if line.strip()]
        log = cls(recs[0])
        for r in recs[1:]:
            if r.get("type") == "end":
                log.end = r
            else:
                log.steps.append(r)
        return log


def _box_out(box):
    return [[float(v) for v in box.lo], [float(v) for v in box.hi]]


def run_trial(cfg, trial_index=0, metrics="full"):
    """Simulate one trial and return its TrialLog.

    metrics="full" logs hull, diameter and generator norm per algorithm,
    agent and step; metrics="containment" logs only the containment
    booleans (hull metrics are null), which is much cheaper for the
    history-based filters.
    """
    if metrics not in ("full", "containment"):
        raise ValueError("metrics must be 'full' or 'containment'")
    system = cfg.system
    ids = system.agent_ids
    slices = system.state_slices()
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, trial_index]))
    sampler = NoiseSampler(rng, scale=cfg.noise_scale, grid=cfg.noise_grid)

    init_boxes = _initial_ranges(cfg, rng)
    truth = np.concatenate(
        [sampler._snap(rng.uniform(init_boxes[i].lo, init_boxes[i].hi),
                       init_boxes[i].lo, init_boxes[i].hi) for i in ids]
    )
    x0_box = Box(
        np.concatenate([init_boxes[i].lo for i in ids]),
        np.concatenate([init_boxes[i].hi for i in ids]),
    )
    Z0 = czono.cartesian_product([czono.from_box(init_boxes[i]) for i in ids])

    flt = {}
    if "centralized" in cfg.algorithms:
        flt["centralized"] = filters.CentralizedFilter(system, Z0)
    if "oit" in cfg.algorithms:
        flt["oit"] = filters.OitFilter(system, Z0, cfg.delta_bar, mu0=cfg.mu0)
    if "distributed" in cfg.algorithms:
        flt["distributed"] = filters.DistributedFilter(
            system, {i: czono.from_box(init_boxes[i]) for i in ids}
        )

    noise_boxes = _boxes_or_none(cfg)
    use_traj = cfg.hull_backend == "auto" and noise_boxes is not None
    history = _History(x0_box) if use_traj else None

    log = TrialLog(
        {
            "type": "header",
            "name": cfg.name,
            "trial": trial_index,
            "seed": cfg.seed,
            "K": cfg.K,
            "delta_bar": cfg.delta_bar,
            "algorithms": list(cfg.algorithms),
            "metrics": metrics,
            "initial": {str(i): _box_out(init_boxes[i]) for i in ids},
        }
    )
    aborted = None
    for k in range(1, cfg.K + 1):
        w = np.concatenate([sampler.from_cz(system.agents[i].Wset) for i in ids])
        truth = sysmodel.step_truth(system, k - 1, truth, w)
        v = {i: sampler.from_cz(system.agents[i].Vset) for i in ids}
        r = {
            (i, j): sampler.from_cz(system.agents[i].Rset_of[j])
            for i in ids
            for j in system.topology.in_neighbors(i)
        }
        batch = sysmodel.measure(system, k, truth, v, r)
        if history is not None:
            prev = sysmodel.build_centralized(system, k - 1)
            cur = sysmodel.build_centralized(system, k)
            wlo = np.concatenate([noise_boxes["w"][i].lo for i in ids])
            whi = np.concatenate([noise_boxes["w"][i].hi for i in ids])
            vparts = [
                noise_boxes["v"][e[1]] if e[0] == "y" else noise_boxes["r"][(e[1], e[2])]
                for e in cur.meas_layout
            ]
            history.append(
                prev.A,
                prev.B,
                Box(wlo, whi),
                cur.H,
                Box(
                    np.concatenate([b.lo for b in vparts]),
                    np.concatenate([b.hi for b in vparts]),
                ),
                sysmodel.stack_measurements(cur, batch),
            )
        step_rec = {"type": "step", "truth": truth.tolist()}
        step_rec.update(batch.to_dict())
        algs_rec = {}
        try:
            for alg, f in flt.items():
                f.step(k, batch)
                algs_rec[alg] = _step_metrics(
                    alg, f, cfg, history, k, truth, slices, metrics
                )
        except filters.EmptyPosteriorError as e:
            aborted = {"k": e.k, "agent": e.agent, "reason": "empty posterior"}
        except czono.EmptySetError:
            aborted = {"k": k, "agent": None, "reason": "empty posterior"}
        if aborted:
            break
        step_rec["algs"] = algs_rec
        step_rec["sizes"] = {
            alg: _rep_size(alg, f) for alg, f in flt.items()
        }
        log.steps.append(step_rec)
    return log.finish(aborted)


def _rep_size(alg, f):
    if alg == "distributed":
        if not f.last_refined:
            return {}
        return {
            str(i): [Z.n_generators, Z.n_constraints]
            for i, Z in sorted(f.last_refined.items())
        }
    return [f.posterior.n_generators, f.posterior.n_constraints]


def _step_metrics(alg, f, cfg, history, k, truth, slices, metrics):
    ids = cfg.system.agent_ids
    rec = {}
    if alg == "distributed":
        for i in ids:
            hull = f.hulls[i]
            contained = hull.contains_point(truth[slices[i]], tol=1e-9)
            rec[str(i)] = _agent_rec(hull if metrics == "full" else None, contained)
        return rec
    # history-backed filters: centralized over the whole past, fixed-lag
    # over its window with a free initial state
    if history is not None:
        if alg == "oit" and k > cfg.delta_bar:
            lp = history.lp(k - cfg.delta_bar, k, None, True)
        else:
            lp = history.lp(0, k, history.x0_box, False)
        contained_all = lp.contains_final(truth)
        for i in ids:
            coords = range(slices[i].start, slices[i].stop)
            if contained_all:
                contained = True
            else:
                contained = lp.contains_final(truth[slices[i]], coords)
            hull = lp.hull(coords) if metrics == "full" else None
            rec[str(i)] = _agent_rec(hull, contained)
        return rec
    Z = f.posterior
    contained_all = czono.contains(Z, truth)
    for i in ids:
        sub = f.agent_set(i)
        contained = contained_all or czono.contains(sub, truth[slices[i]])
        hull = czono.interval_hull(sub) if metrics == "full" else None
        rec[str(i)] = _agent_rec(hull, contained)
    return rec


def _agent_rec(hull, contained):
    if hull is None:
        return {"hull": None, "d": None, "gnorm": None, "contained": bool(contained)}
    widths = hull.widths()
    d = float(widths.max()) if widths.size else 0.0
    gnorm = float(hull.radius.max()) if hull.radius.size else 0.0
    assert abs(d - 2.0 * gnorm) <= 1e-12 * max(1.0, d)
    return {
        "hull": _box_out(hull),
        "d": d,
        "gnorm": gnorm,
        "contained": bool(contained),
    }


# -- Monte Carlo --------------------------------------------------------------


class McResult:
    """All logs of a Monte Carlo run plus summary counters."""

    def __init__(self, logs, elapsed):
        self.logs = logs
        self.elapsed = elapsed

    @property
    def violations(self):
        return sum(log.violations for log in self.logs)

    @property
    def aborts(self):
        return [log.aborted for log in self.logs if log.aborted]


def _worker(args):
    doc_json, trial_index, metrics = args
    cfg = ScenarioConfig(json.loads(doc_json))
    return run_trial(cfg, trial_index, metrics).__dict__


def thread_budget():
    """Worker cap from CZEST_THREADS; defaults to 1 (fully sequential)."""
    raw = os.environ.get("CZEST_THREADS", "")
    try:
        val = int(raw)
    except ValueError:
        val = 0
    return max(1, val) if val else 1


def run_monte_carlo(cfg, trials, metrics="full", workers=None):
    """Run `trials` independent trials; trial t uses seed (seed, t).

    Results are ordered by trial index and independent of worker count.
    """
    t0 = time.perf_counter()
    if workers is None:
        workers = thread_budget()
    workers = max(1, min(workers, trials))
    if workers == 1:
        logs = [run_trial(cfg, t, metrics) for t in range(trials)]
    else:
        doc_json = cfg.doc_json()
        args = [(doc_json, t, metrics) for t in range(trials)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            raw = list(pool.map(_worker, args))
        logs = []
        for d in raw:
            log = TrialLog(d["header"])
            log.steps = d["steps"]
            log.end = d["end"]
            logs.append(log)
    return McResult(logs, time.perf_counter() - t0)


# -- metrics extraction --------------------------------------------------------


def metrics_rows(log):
    """Flatten a TrialLog into (trial, k, algorithm, agent, d, gnorm, contained)."""
    rows = []
    trial = log.header["trial"]
    for s in log.steps:
        for alg in log.header["algorithms"]:
            arec = s["algs"][alg]
            for agent in sorted(arec, key=int):
                a = arec[agent]
                rows.append(
                    {
                        "trial": trial,
                        "k": s["k"],
                        "algorithm": alg,
                        "agent": int(agent),
                        "d": a["d"],
                        "gnorm": a["gnorm"],
                        "contained": a["contained"],
                    }
                )
    return rows


def _csv_cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_metrics_csv(path, logs):
    cols = ["trial", "k", "algorithm", "agent", "d", "gnorm", "contained"]
    with open(path, "w") as f:
        f.write(",".join(cols) + "\n")
        for log in logs:
            for row in metrics_rows(log):
                f.write(",".join(_csv_cell(row[c]) for c in cols) + "\n")
