"""Aggregative problem instances: local costs coupled through an aggregate.

Each agent i owns a cost f_i(x_i, u) evaluated at the network aggregate
u(x) = mean_i phi_i(x_i), together with closed-form partial gradients.
Three concrete families are provided: planar optimal placement, a
Nash-Cournot market, and a scalar quadratic family used for rate analysis.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidArgument

FD_STEP = 1e-6


@dataclass(frozen=True)
class RegularityConstants:
    """Strong convexity / smoothness constants of the global objective.

    mu: strong convexity of F; L1: Lipschitz constant of the combined
    local-gradient map; L2: Lipschitz constant of the aggregate-partial;
    L3: bound on the aggregation-map Jacobian norm.
    """

    mu: float
    L1: float
    L2: float
    L3: float

    def __post_init__(self):
        if not (0 < self.mu <= self.L1):
            raise InvalidArgument(f"need 0 < mu <= L1, got mu={self.mu}, L1={self.L1}")
        if self.L2 < 0 or self.L3 < 0:
            raise InvalidArgument("L2 and L3 must be nonnegative")

    @property
    def kappa(self):
        return self.L1 / self.mu


@dataclass(frozen=True)
class AggregativeProblem:
    """Bundle of evaluators defining one aggregative optimization instance.

    All evaluation methods are pure; instances are immutable and
    thread-safe. States are stacked 1-D vectors of length
    n_agents * local_dim; trackers are (n_agents, agg_dim) arrays.
    """

    name: str
    n_agents: int
    local_dim: int
    agg_dim: int
    constants: RegularityConstants
    # vectorized evaluators over (N, local_dim) / (N, agg_dim) arrays
    _f_local: callable = field(repr=False)
    _phi: callable = field(repr=False)
    _grad1: callable = field(repr=False)
    _grad2: callable = field(repr=False)
    _dphi_apply: callable = field(repr=False)
    _grad_phi_mat: callable = field(repr=False)
    # (hessian, linear, constant) of F when F is quadratic, else None
    quadratic_model: tuple = field(default=None, repr=False)

    # -- layout helpers -------------------------------------------------
    @property
    def dim(self):
        return self.n_agents * self.local_dim

    @property
    def local_dims(self):
        return [self.local_dim] * self.n_agents

    def as_agents(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape == (self.n_agents, self.local_dim):
            return x
        if x.size != self.dim:
            raise InvalidArgument(f"state has size {x.size}, expected {self.dim}")
        return x.reshape(self.n_agents, self.local_dim)

    def stack(self, x_agents):
        return np.asarray(x_agents, dtype=float).reshape(-1)

    # -- vectorized evaluators -----------------------------------------
    def f_local_all(self, x_agents, u_agents):
        return self._f_local(x_agents, u_agents)

    def phi_all(self, x_agents):
        return self._phi(x_agents)

    def grad1_all(self, x_agents, u_agents):
        return self._grad1(x_agents, u_agents)

    def grad2_all(self, x_agents, u_agents):
        return self._grad2(x_agents, u_agents)

    def dphi_all(self, x_agents, s_agents):
        """Per-agent product of the aggregation Jacobian with a tracker."""
        return self._dphi_apply(x_agents, s_agents)

    # -- per-agent accessors ---------------------------------------------
    # the vectorized closures are row-wise maps, so agent i's value is row i
    # of a full evaluation with x_i placed in row i
    def _rows(self, i, x_i, u=None):
        x = np.zeros((self.n_agents, self.local_dim))
        x[i] = np.asarray(x_i, dtype=float).reshape(self.local_dim)
        if u is None:
            return x, None
        ub = np.broadcast_to(
            np.asarray(u, dtype=float).reshape(self.agg_dim), (self.n_agents, self.agg_dim)
        )
        return x, ub

    def eval_f_i(self, i, x_i, u):
        x, ub = self._rows(i, x_i, u)
        return float(self._f_local(x, ub)[i])

    def eval_phi_i(self, i, x_i):
        x, _ = self._rows(i, x_i)
        return self._phi(x)[i]

    def grad1_f_i(self, i, x_i, u):
        x, ub = self._rows(i, x_i, u)
        return self._grad1(x, ub)[i]

    def grad2_f_i(self, i, x_i, u):
        x, ub = self._rows(i, x_i, u)
        return self._grad2(x, ub)[i]

    def grad_phi_i(self, i, x_i):
        """Aggregation-map Jacobian of agent i as a (local_dim, agg_dim) matrix."""
        return np.asarray(self._grad_phi_mat(i, np.asarray(x_i, dtype=float)))

    # -- global quantities -----------------------------------------------
    def aggregate(self, x):
        xa = self.as_agents(x)
        return self.phi_all(xa).mean(axis=0)

    def global_gradient(self, x):
        xa = self.as_agents(x)
        u = self.phi_all(xa).mean(axis=0)
        ub = np.broadcast_to(u, (self.n_agents, self.agg_dim))
        g2_mean = self.grad2_all(xa, ub).mean(axis=0)
        sb = np.broadcast_to(g2_mean, (self.n_agents, self.agg_dim))
        return self.stack(self.grad1_all(xa, ub) + self.dphi_all(xa, sb))

    def objective(self, x):
        xa = self.as_agents(x)
        u = self.phi_all(xa).mean(axis=0)
        ub = np.broadcast_to(u, (self.n_agents, self.agg_dim))
        return float(self.f_local_all(xa, ub).sum())


@dataclass(frozen=True)
class QuadraticProblem(AggregativeProblem):
    """Scalar quadratic family: f_i = c_i/2 x_i^2 + u/N, phi_i = h_i x_i + l_i."""

    c: np.ndarray = None
    h: np.ndarray = None
    l: np.ndarray = None


def _hessian_extremes(hess):
    ev = np.linalg.eigvalsh(hess)
    return float(ev[0]), float(ev[-1])


def make_placement(r, omega):
    """Planar placement: f_i = w_i ||x_i - r_i||^2 + ||x_i - u(x)||^2, phi = id.

    Parameters
    ----------
    r : (N, 2) array-like of anchors.
    omega : scalar or length-N positive weights.

    mu and L1 are the exact extreme eigenvalues of the global Hessian
    (the objective is jointly quadratic), which is sharper than generic
    analytic bounds. L2 = 2, L3 = 1.
    """
    r = np.asarray(r, dtype=float)
    if r.ndim != 2 or r.shape[1] != 2:
        raise InvalidArgument("anchors r must be an (N, 2) array")
    n = r.shape[0]
    w = np.broadcast_to(np.asarray(omega, dtype=float), (n,)).copy()
    if w.shape != (n,):
        raise InvalidArgument("omega must broadcast to one weight per agent")
    if (w <= 0).any():
        raise InvalidArgument("placement weights must be positive")
    r.setflags(write=False)
    w.setflags(write=False)

    wcol = w[:, None]

    def f_local(x, u):
        return (wcol * (x - r) ** 2).sum(axis=1) + ((x - u) ** 2).sum(axis=1)

    def phi(x):
        return x.copy()

    def grad1(x, u):
        return 2.0 * wcol * (x - r) + 2.0 * (x - u)

    def grad2(x, u):
        return -2.0 * (x - u)

    def dphi_apply(x, s):
        return s.copy()

    def grad_phi_mat(i, x_i):
        return np.eye(2)

    eye_n = np.eye(n)
    k_n = np.full((n, n), 1.0 / n)
    hess = np.kron(2.0 * np.diag(w) + 2.0 * (eye_n - k_n), np.eye(2))
    lin = (-2.0 * wcol * r).reshape(-1)
    const = float((wcol * r**2).sum())
    mu, L1 = _hessian_extremes(hess)

    return AggregativeProblem(
        name="placement",
        n_agents=n,
        local_dim=2,
        agg_dim=2,
        constants=RegularityConstants(mu=mu, L1=L1, L2=2.0, L3=1.0),
        _f_local=f_local,
        _phi=phi,
        _grad1=grad1,
        _grad2=grad2,
        _dphi_apply=dphi_apply,
        _grad_phi_mat=grad_phi_mat,
        quadratic_model=(hess, lin, const),
    )


def make_cournot(kappa, theta, sigma, omega1, omega2):
    """Nash-Cournot market: f_i = k_i x_i^2 + t_i x_i + s_i - (w1 - w2 u) x_i.

    The aggregate is the total output u(x) = sum_i x_i, realized as
    phi_i(x_i) = N x_i so the network mean of phi equals the sum. This
    embedding changes no gradient value. mu and L1 are the exact extreme
    eigenvalues of the global Hessian; L2 = w2; L3 = N.
    """
    kappa = np.asarray(kappa, dtype=float)
    theta = np.asarray(theta, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    n = kappa.shape[0]
    if theta.shape != (n,) or sigma.shape != (n,):
        raise InvalidArgument("kappa, theta, sigma must have equal length")
    if (kappa <= 0).any():
        raise InvalidArgument("kappa entries must be positive")
    if omega2 <= 0:
        raise InvalidArgument("omega2 must be positive")
    for a in (kappa, theta, sigma):
        a.setflags(write=False)
    w1, w2 = float(omega1), float(omega2)
    kcol, tcol, scol = kappa[:, None], theta[:, None], sigma[:, None]

    def f_local(x, u):
        return (kcol * x**2 + tcol * x + scol - (w1 - w2 * u) * x).sum(axis=1)

    def phi(x):
        return n * x

    def grad1(x, u):
        return 2.0 * kcol * x + tcol - w1 + w2 * u

    def grad2(x, u):
        return w2 * x

    def dphi_apply(x, s):
        return n * s

    def grad_phi_mat(i, x_i):
        return np.array([[float(n)]])

    hess = 2.0 * np.diag(kappa) + 2.0 * w2 * np.ones((n, n))
    lin = theta - w1
    mu, L1 = _hessian_extremes(hess)

    return AggregativeProblem(
        name="cournot",
        n_agents=n,
        local_dim=1,
        agg_dim=1,
        constants=RegularityConstants(mu=mu, L1=L1, L2=w2, L3=float(n)),
        _f_local=f_local,
        _phi=phi,
        _grad1=grad1,
        _grad2=grad2,
        _dphi_apply=dphi_apply,
        _grad_phi_mat=grad_phi_mat,
        quadratic_model=(hess, lin, float(sigma.sum())),
    )


def make_quadratic(c, h, l):
    """Scalar quadratic family used for spectral-rate analysis.

    f_i = c_i/2 x_i^2 + u(x)/N with phi_i = h_i x_i + l_i; requires
    c_i > 0 and h_i >= 0 (negative h_i falls outside the analyzed family
    and is rejected). mu = min c, L1 = max c, L2 = 0, L3 = max h.
    """
    c = np.asarray(c, dtype=float)
    h = np.asarray(h, dtype=float)
    l = np.asarray(l, dtype=float)
    n = c.shape[0]
    if h.shape != (n,) or l.shape != (n,):
        raise InvalidArgument("c, h, l must have equal length")
    if (c <= 0).any():
        raise InvalidArgument("c entries must be positive")
    if (h < 0).any():
        raise InvalidArgument("h entries must be nonnegative")
    for a in (c, h, l):
        a.setflags(write=False)
    ccol, hcol, lcol = c[:, None], h[:, None], l[:, None]

    def f_local(x, u):
        return (ccol / 2.0 * x**2 + u / n).sum(axis=1)

    def phi(x):
        return hcol * x + lcol

    def grad1(x, u):
        return ccol * x

    def grad2(x, u):
        return np.full_like(u, 1.0 / n)

    def dphi_apply(x, s):
        return hcol * s

    def grad_phi_mat(i, x_i):
        return np.array([[h[i]]])

    hess = np.diag(c)
    lin = h / n
    mu, L1 = float(c.min()), float(c.max())

    return QuadraticProblem(
        name="quadratic",
        n_agents=n,
        local_dim=1,
        agg_dim=1,
        constants=RegularityConstants(mu=mu, L1=L1, L2=0.0, L3=float(h.max())),
        _f_local=f_local,
        _phi=phi,
        _grad1=grad1,
        _grad2=grad2,
        _dphi_apply=dphi_apply,
        _grad_phi_mat=grad_phi_mat,
        quadratic_model=(hess, lin, float(l.mean())),
        c=c,
        h=h,
        l=l,
    )


def aggregate(problem, x):
    """Network aggregate u(x) = mean_i phi_i(x_i)."""
    return problem.aggregate(x)


def global_gradient(problem, x):
    """Exact gradient of F(x) = sum_i f_i(x_i, u(x)) as a stacked vector."""
    return problem.global_gradient(x)


def finite_difference_gradient(fun, x, step=FD_STEP):
    """Central finite differences of a scalar function of a stacked vector."""
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = step
        g[i] = (fun(x + e) - fun(x - e)) / (2.0 * step)
    return g
