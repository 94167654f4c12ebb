"""Flat key-value experiment configs.

Grammar (one statement per line):

    # comment                      blank lines and '#' comments are skipped
    section.key = value            keys are dotted lowercase identifiers

Values are parsed by first match: int, float, true/false, a comma list of
scalars, else a bare string (no quoting). Serialization writes floats with
repr so parse -> serialize -> parse round-trips losslessly.
"""

import numpy as np

from .exceptions import ConfigError, InvalidArgument
from .graph import build_topology
from .problems import make_cournot, make_placement, make_quadratic
from .solver import ALGORITHMS, SolverConfig


def _parse_scalar(text):
    text = text.strip()
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def parse_config(text):
    """Parse config text into a flat {dotted key: value} dict."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        if not key or any(not part.isidentifier() for part in key.split(".")):
            raise ConfigError(f"malformed key {key!r}", line=lineno)
        if key in out:
            raise ConfigError("duplicate key", line=lineno, key=key)
        value = value.strip()
        if "," in value:
            out[key] = [_parse_scalar(v) for v in value.split(",")]
        else:
            out[key] = _parse_scalar(value)
    return out


def _format_scalar(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def serialize_config(cfg):
    """Config dict back to text, keys sorted, values at full precision."""
    lines = []
    for key in sorted(cfg):
        v = cfg[key]
        if isinstance(v, (list, tuple, np.ndarray)):
            lines.append(f"{key} = {','.join(_format_scalar(x) for x in v)}")
        else:
            lines.append(f"{key} = {_format_scalar(v)}")
    return "\n".join(lines) + "\n"


def load_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def _as_array(value, name):
    if isinstance(value, (int, float)):
        return np.array([float(value)])
    if isinstance(value, (list, tuple)):
        return np.array([float(v) for v in value])
    raise ConfigError(f"expected a number or comma list", key=name)


class ExperimentConfig:
    """Typed view over a flat config dict: problem + topology + solver + init.

    Building the experiment objects validates every referenced parameter
    against the module preconditions; errors surface as ConfigError with
    the offending key.
    """

    def __init__(self, raw):
        self.raw = dict(raw)

    def get(self, key, default=None):
        return self.raw.get(key, default)

    def require(self, key):
        if key not in self.raw:
            raise ConfigError("missing required key", key=key)
        return self.raw[key]

    # -- problem ---------------------------------------------------------
    def build_problem(self):
        kind = self.require("problem.kind")
        try:
            if kind == "placement":
                r = _as_array(self.require("problem.r"), "problem.r").reshape(-1, 2)
                omega = self.get("problem.omega", 1.0)
                omega = _as_array(omega, "problem.omega") if isinstance(omega, list) else omega
                return make_placement(r, omega)
            if kind == "cournot":
                n = int(self.require("problem.n_agents"))
                rng = np.random.default_rng(int(self.get("problem.seed", 0)))
                kr = _as_array(self.get("problem.kappa_range", [0.5, 2.5]), "problem.kappa_range")
                tr = _as_array(self.get("problem.theta_range", [10, 20]), "problem.theta_range")
                sr = _as_array(self.get("problem.sigma_range", [5, 20]), "problem.sigma_range")
                kappa = rng.uniform(kr[0], kr[1], n)
                theta = rng.uniform(tr[0], tr[1], n)
                sigma = rng.uniform(sr[0], sr[1], n)
                return make_cournot(
                    kappa, theta, sigma,
                    float(self.require("problem.omega1")),
                    float(self.require("problem.omega2")),
                )
            if kind == "quadratic":
                c = _as_array(self.require("problem.c"), "problem.c")
                h = _as_array(self.get("problem.h", [0.0] * c.size), "problem.h")
                l = _as_array(self.get("problem.l", [0.0] * c.size), "problem.l")
                return make_quadratic(c, h, l)
        except InvalidArgument as exc:
            raise ConfigError(str(exc), key="problem.*") from exc
        raise ConfigError(f"unknown problem kind {kind!r}", key="problem.kind")

    # -- topology ----------------------------------------------------------
    def build_graph(self):
        kind = self.require("topology.kind")
        n = int(self.require("topology.n_agents"))
        # edge_prob/seed only apply to random patterns; a preset may carry
        # them while the kind is overridden
        edge_prob = self.get("topology.edge_prob") if kind == "random" else None
        seed = self.get("topology.seed") if kind == "random" else None
        try:
            return build_topology(
                kind, n,
                edge_prob=None if edge_prob is None else float(edge_prob),
                seed=None if seed is None else int(seed),
            )
        except InvalidArgument as exc:
            raise ConfigError(str(exc), key="topology.*") from exc

    # -- solver ------------------------------------------------------------
    def build_solver_config(self, algorithm=None, **overrides):
        kw = dict(
            algorithm=algorithm or self.get("solver.algorithm", "dagt_hb"),
            alpha=float(self.require("solver.alpha")),
            beta=float(self.get("solver.beta", 0.0)),
            gamma=float(self.get("solver.gamma", 0.0)),
            max_iter=int(self.get("solver.max_iter", 5000)),
            tol=float(self.get("solver.tol", 1e-6)),
            delay_steps=int(self.get("solver.delay_steps", 0)),
            noise_sigma=float(self.get("solver.noise_sigma", 0.0)),
            seed=int(self.get("solver.seed", 0)),
        )
        kw.update(overrides)
        if kw["algorithm"] not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {kw['algorithm']!r}", key="solver.algorithm")
        if kw["algorithm"] == "dagt":
            kw["beta"] = 0.0
            kw["gamma"] = 0.0
        elif kw["algorithm"] == "dagt_hb":
            kw["gamma"] = 0.0
        elif kw["algorithm"] == "dagt_nes":
            kw["beta"] = 0.0
        try:
            return SolverConfig(**kw)
        except InvalidArgument as exc:
            raise ConfigError(str(exc), key="solver.*") from exc

    # -- initial point -------------------------------------------------------
    def build_x0(self, problem):
        if "init.x0" in self.raw:
            x0 = _as_array(self.raw["init.x0"], "init.x0")
            if x0.size != problem.dim:
                raise ConfigError(
                    f"init.x0 has {x0.size} entries, problem needs {problem.dim}", key="init.x0"
                )
        else:
            lo, hi = _as_array(self.get("init.x0_range", [0.0, 1.0]), "init.x0_range")
            rng = np.random.default_rng(int(self.get("init.seed", 0)))
            x0 = rng.uniform(lo, hi, problem.dim)
        x_prev = None
        if "init.x_prev" in self.raw:
            x_prev = _as_array(self.raw["init.x_prev"], "init.x_prev")
            if x_prev.size != problem.dim:
                raise ConfigError(
                    f"init.x_prev has {x_prev.size} entries, problem needs {problem.dim}",
                    key="init.x_prev",
                )
        return x0, x_prev
