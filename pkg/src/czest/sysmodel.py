"""Multi-agent system models with absolute and relative measurements.

Each agent i evolves as x_{i,k+1} = A_i(k) x_{i,k} + B_i w_{i,k} and takes

    y_i  = C_i x_i + v_i            (absolute measurement)
    z_ij = D_i (x_i - x_j) + r_ij   (relative measurement, j in N_i)

on a directed measurement graph.  An edge (i, j) means "agent i measures
agent j", so j is an in-neighbor of i.  Communication follows the same
edges.  Noise ranges are extended constrained zonotopes (boxes in all the
built-in scenarios).

This module builds the stacked matrices used by the filters: the
centralized stack over all agents and the neighborhood stack over
N̄_i = (i, then in-neighbors ascending), both with a fixed, documented
row order so measurement vectors can be serialized and re-stacked
deterministically.
"""

import numpy as np

from . import czono
from .czono import Box, ConstrainedZonotope

__all__ = [
    "AgentModel",
    "Topology",
    "MultiAgentSystem",
    "MeasurementBatch",
    "StackedSystem",
    "NotObservableError",
    "SchemaError",
    "build_centralized",
    "build_neighborhood",
    "stack_measurements",
    "step_truth",
    "measure",
    "observability_index",
    "system_from_dict",
]

EPS_RANK = 1e-8


class NotObservableError(RuntimeError):
    """The stacked system never reaches full rank within the horizon."""


class SchemaError(ValueError):
    """A scenario document violates the schema."""


class AgentModel:
    """One agent: dynamics, measurement maps and noise ranges.

    Args:
        agent_id: positive integer identifier (1-based).
        A_of_k: callable k -> (n, n) system matrix at step k.
        B: (n, p) input matrix.
        C: (m_y, n) absolute measurement matrix (m_y may be 0).
        D: (m_z, n) relative measurement matrix.
        Wset: process noise range, CZ of dim p.
        Vset: absolute measurement noise range, CZ of dim m_y.
        Rset_of: mapping in-neighbor id -> relative noise range (dim m_z).
    """

    def __init__(self, agent_id, A_of_k, B, C, D, Wset, Vset, Rset_of=None):
        if agent_id < 1:
            raise ValueError("agent ids are 1-based positive integers")
        self.id = int(agent_id)
        self.A_of_k = A_of_k
        self.B = np.atleast_2d(np.asarray(B, dtype=float))
        self.C = np.asarray(C, dtype=float).reshape(-1, self.B.shape[0])
        self.D = np.asarray(D, dtype=float).reshape(-1, self.B.shape[0])
        self.Wset = Wset
        self.Vset = Vset
        self.Rset_of = dict(Rset_of or {})
        n = self.B.shape[0]
        A0 = np.asarray(A_of_k(0), dtype=float)
        if A0.shape != (n, n):
            raise ValueError(f"agent {self.id}: A(k) must be {n}x{n}, got {A0.shape}")
        if Wset.dim != self.B.shape[1]:
            raise ValueError(f"agent {self.id}: Wset dim {Wset.dim} != B columns {self.B.shape[1]}")
        if Vset.dim != self.C.shape[0]:
            raise ValueError(f"agent {self.id}: Vset dim {Vset.dim} != C rows {self.C.shape[0]}")

    @property
    def n(self):
        return self.B.shape[0]

    @property
    def p(self):
        return self.B.shape[1]

    @property
    def m_y(self):
        return self.C.shape[0]

    @property
    def m_z(self):
        return self.D.shape[0]


class Topology:
    """Directed measurement/communication graph on agents 1..n_agents.

    Edge (i, j) reads "i measures j": j becomes an in-neighbor of i and
    agent i also receives what agent j publishes.
    """

    def __init__(self, n_agents, edges):
        self.n_agents = int(n_agents)
        es = set()
        for e in edges:
            i, j = int(e[0]), int(e[1])
            if i == j:
                raise ValueError(f"self-loop ({i},{j}) not allowed")
            if not (1 <= i <= self.n_agents and 1 <= j <= self.n_agents):
                raise ValueError(f"edge ({i},{j}) out of range 1..{self.n_agents}")
            es.add((i, j))
        self.edges = frozenset(es)

    def in_neighbors(self, i):
        """N_i: agents that i measures, ascending."""
        return sorted(j for (a, j) in self.edges if a == i)

    def out_neighbors(self, i):
        """M_i: agents that measure i, ascending."""
        return sorted(a for (a, j) in self.edges if j == i)

    def nbar(self, i):
        """N̄_i = (i, then in-neighbors ascending): joint state order."""
        return [i] + self.in_neighbors(i)

    def q(self, i):
        return len(self.nbar(i))

    def peers(self, i):
        """M_i ∩ N_i: agents whose joint sets agent i receives and uses."""
        ni = set(self.in_neighbors(i))
        return sorted(l for l in self.out_neighbors(i) if l in ni)


class MeasurementBatch:
    """All measurements of one step: y per agent, z per edge."""

    __slots__ = ("k", "y", "z")

    def __init__(self, k, y, z):
        self.k = int(k)
        self.y = {int(i): np.asarray(v, dtype=float).ravel() for i, v in y.items()}
        self.z = {(int(i), int(j)): np.asarray(v, dtype=float).ravel() for (i, j), v in z.items()}

    def to_dict(self):
        return {
            "k": self.k,
            "y": {str(i): v.tolist() for i, v in sorted(self.y.items())},
            "z": {f"{i},{j}": v.tolist() for (i, j), v in sorted(self.z.items())},
        }

    @classmethod
    def from_dict(cls, d):
        y = {int(i): v for i, v in d["y"].items()}
        z = {tuple(int(t) for t in key.split(",")): v for key, v in d["z"].items()}
        return cls(d["k"], y, z)


class StackedSystem:
    """Matrices of a stacked (centralized or neighborhood) system.

    Attributes:
        state_order: agent ids in block order.
        state_slices: id -> slice into the stacked state.
        A, B: stacked dynamics at the build step.
        H: stacked measurement matrix.
        Wset, Vset: stacked noise ranges (CZ).
        meas_layout: row blocks of H in order, entries ("y", i) or ("z", i, j).
    """

    __slots__ = ("state_order", "state_slices", "A", "B", "H", "Wset", "Vset", "meas_layout")

    def __init__(self, state_order, state_slices, A, B, H, Wset, Vset, meas_layout):
        self.state_order = state_order
        self.state_slices = state_slices
        self.A = A
        self.B = B
        self.H = H
        self.Wset = Wset
        self.Vset = Vset
        self.meas_layout = meas_layout

    @property
    def dim(self):
        return self.A.shape[0]


class MultiAgentSystem:
    """Agents plus topology, with consistency checks."""

    def __init__(self, agents, topology):
        agents = {a.id: a for a in agents}
        if sorted(agents) != list(range(1, topology.n_agents + 1)):
            raise ValueError("agent ids must be exactly 1..n_agents")
        self.agents = agents
        self.topology = topology
        for i, a in agents.items():
            ni = topology.in_neighbors(i)
            if sorted(a.Rset_of) != ni:
                raise ValueError(
                    f"agent {i}: relative noise ranges given for {sorted(a.Rset_of)}, "
                    f"in-neighbors are {ni}"
                )
            for j, R in a.Rset_of.items():
                if R.dim != a.m_z:
                    raise ValueError(f"agent {i}: Rset[{j}] dim {R.dim} != D rows {a.m_z}")

    @property
    def n_agents(self):
        return self.topology.n_agents

    @property
    def agent_ids(self):
        return list(range(1, self.n_agents + 1))

    def state_dim(self):
        return sum(self.agents[i].n for i in self.agent_ids)

    def state_slices(self, order=None):
        order = order or self.agent_ids
        slices = {}
        ofs = 0
        for i in order:
            n = self.agents[i].n
            slices[i] = slice(ofs, ofs + n)
            ofs += n
        return slices


def _stack(system, order, meas_agents, k):
    """Common builder: stacked A/B/W over `order`, H/V rows from `meas_agents`."""
    agents = system.agents
    slices = system.state_slices(order)
    dim = sum(agents[i].n for i in order)
    A = np.zeros((dim, dim))
    for i in order:
        A[slices[i], slices[i]] = np.asarray(agents[i].A_of_k(k), dtype=float)
    B_blocks = [agents[i].B for i in order]
    pdim = sum(b.shape[1] for b in B_blocks)
    B = np.zeros((dim, pdim))
    ofs = 0
    for i, blk in zip(order, B_blocks):
        B[slices[i], ofs : ofs + blk.shape[1]] = blk
        ofs += blk.shape[1]
    Wset = czono.cartesian_product([agents[i].Wset for i in order])

    rows = []
    vparts = []
    layout = []
    in_order = set(order)
    for i in meas_agents:
        a = agents[i]
        if a.m_y:
            blk = np.zeros((a.m_y, dim))
            blk[:, slices[i]] = a.C
            rows.append(blk)
            vparts.append(a.Vset)
            layout.append(("y", i))
    for i in meas_agents:
        a = agents[i]
        for j in system.topology.in_neighbors(i):
            if j not in in_order:
                raise ValueError(f"relative measurement ({i},{j}) leaves the stacked state")
            blk = np.zeros((a.m_z, dim))
            blk[:, slices[i]] = a.D
            blk[:, slices[j]] = -a.D
            rows.append(blk)
            vparts.append(a.Rset_of[j])
            layout.append(("z", i, j))
    H = np.vstack(rows) if rows else np.zeros((0, dim))
    Vset = czono.cartesian_product(vparts) if vparts else ConstrainedZonotope(np.zeros((0, 0)), [])
    return StackedSystem(list(order), slices, A, B, H, Wset, Vset, layout)


def build_centralized(system, k):
    """Stack all agents (ascending id) with every measurement row."""
    ids = system.agent_ids
    return _stack(system, ids, ids, k)


def build_neighborhood(system, i, k):
    """Stack N̄_i = (i, in-neighbors ascending) with agent i's rows only."""
    return _stack(system, system.topology.nbar(i), [i], k)


def stack_measurements(stacked, batch):
    """Assemble the Y vector matching the stacked H row order."""
    parts = []
    for entry in stacked.meas_layout:
        if entry[0] == "y":
            parts.append(batch.y[entry[1]])
        else:
            parts.append(batch.z[(entry[1], entry[2])])
    return np.concatenate(parts) if parts else np.zeros(0)


def step_truth(system, k, x, w):
    """Advance the stacked truth one step with stacked process noise."""
    x = np.asarray(x, dtype=float).ravel()
    w = np.asarray(w, dtype=float).ravel()
    slices = system.state_slices()
    out = np.empty_like(x)
    wofs = 0
    for i in system.agent_ids:
        a = system.agents[i]
        Ai = np.asarray(a.A_of_k(k), dtype=float)
        out[slices[i]] = Ai @ x[slices[i]] + a.B @ w[wofs : wofs + a.p]
        wofs += a.p
    return out


def measure(system, k, x, v, r):
    """Generate all measurements at the stacked truth x.

    v maps agent id to its absolute noise draw; r maps (i, j) edges to
    relative noise draws.
    """
    x = np.asarray(x, dtype=float).ravel()
    slices = system.state_slices()
    y = {}
    z = {}
    for i in system.agent_ids:
        a = system.agents[i]
        if a.m_y:
            y[i] = a.C @ x[slices[i]] + np.asarray(v[i], dtype=float).ravel()
        for j in system.topology.in_neighbors(i):
            z[(i, j)] = a.D @ (x[slices[i]] - x[slices[j]]) + np.asarray(
                r[(i, j)], dtype=float
            ).ravel()
    return MeasurementBatch(k, y, z)


def observability_index(system, k0=0, mu_max=None):
    """Smallest mu with [H; H Phi(1); ...; H Phi(mu-1)] of full column rank.

    Phi(t) is the state transition product A(k0+t-1)...A(k0).  Raises
    NotObservableError if no mu <= mu_max works.
    """
    dim = system.state_dim()
    if mu_max is None:
        mu_max = 2 * dim
    H = build_centralized(system, k0).H
    blocks = [H]
    Phi = np.eye(dim)
    for mu in range(1, mu_max + 1):
        O = np.vstack(blocks)
        s = np.linalg.svd(O, compute_uv=False)
        if s.size and s[0] > 0 and np.sum(s > EPS_RANK * s[0]) == dim:
            return mu
        Phi = build_centralized(system, k0 + mu - 1).A @ Phi
        blocks.append(H @ Phi)
    raise NotObservableError(f"system not observable within {mu_max} steps from k0={k0}")


# -- scenario schema --------------------------------------------------------


def _need(d, key, path):
    if key not in d:
        raise SchemaError(f"{path}: missing key '{key}'")
    return d[key]


def _box_from_dict(d, path):
    try:
        return Box(d["lo"], d["hi"])
    except KeyError as e:
        raise SchemaError(f"{path}: box needs 'lo' and 'hi'") from e
    except ValueError as e:
        raise SchemaError(f"{path}: {e}") from e


def _dynamics_from_dict(d, path):
    kind = _need(d, "kind", path)
    if kind == "constant":
        A = np.atleast_2d(np.asarray(_need(d, "A", path), dtype=float))

        def A_of_k(k, A=A):
            return A

        return A_of_k, A.shape[0]
    if kind == "coordinated-turn":
        omega = float(_need(d, "omega", path))
        T = float(_need(d, "T", path))

        def A_of_k(k, omega=omega, T=T):
            s1, s0 = np.sin((k + 1) * omega * T), np.sin(k * omega * T)
            c1, c0 = np.cos((k + 1) * omega * T), np.cos(k * omega * T)
            a11 = 1.0 + (s1 - s0) / omega
            a12 = -(c1 - c0) / omega
            A2 = np.array([[a11, a12], [-a12, a11]])
            return np.kron(np.eye(2), A2)

        return A_of_k, 4
    raise SchemaError(f"{path}.kind: unknown dynamics kind '{kind}'")


def _is_meta(key):
    return key.startswith("_") or key == "description"


def system_from_dict(doc):
    """Build a MultiAgentSystem from the scenario schema's 'agents'/'edges'.

    Unknown keys prefixed with '_' and 'description' fields are ignored so
    scenario files can carry commentary.
    """
    agents_doc = _need(doc, "agents", "scenario")
    edges_doc = _need(doc, "edges", "scenario")
    if not isinstance(agents_doc, list) or not agents_doc:
        raise SchemaError("scenario.agents: expected a non-empty list")
    try:
        topo = Topology(len(agents_doc), edges_doc)
    except ValueError as e:
        raise SchemaError(f"scenario.edges: {e}") from e
    agents = []
    for idx, ad in enumerate(agents_doc):
        path = f"agents[{idx}]"
        aid = int(_need(ad, "id", path))
        A_of_k, n = _dynamics_from_dict(_need(ad, "dynamics", path), f"{path}.dynamics")
        B = np.atleast_2d(np.asarray(_need(ad, "B", path), dtype=float))
        C = np.asarray(_need(ad, "C", path), dtype=float).reshape(-1, n)
        D = np.asarray(_need(ad, "D", path), dtype=float).reshape(-1, n)
        W = czono.from_box(_box_from_dict(_need(ad, "process_noise", path), f"{path}.process_noise"))
        V = czono.from_box(
            _box_from_dict(_need(ad, "measurement_noise", path), f"{path}.measurement_noise")
        )
        rel = {}
        for jkey, rd in _need(ad, "relative_noise", path).items():
            if _is_meta(jkey):
                continue
            rel[int(jkey)] = czono.from_box(
                _box_from_dict(rd, f"{path}.relative_noise[{jkey}]")
            )
        try:
            agents.append(AgentModel(aid, A_of_k, B, C, D, W, V, rel))
        except ValueError as e:
            raise SchemaError(f"{path}: {e}") from e
    try:
        return MultiAgentSystem(agents, topo)
    except ValueError as e:
        raise SchemaError(f"scenario: {e}") from e
