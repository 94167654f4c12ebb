"""Built-in experiment presets.

placement-paper and cournot-paper carry the published experiment numbers
verbatim (anchors, initial points, step sizes, momentum, parameter
intervals); the communication graph of the original runs is not published,
so each preset pins a seeded random topology instead. quadratic-demo is a
conditioned quadratic instance whose graph contraction factor (0.3806)
sits below the slowest tuned algorithm radius, so spectral predictions are
visible in measured rates.
"""

PRESETS = {
    "placement-paper": {
        "problem.kind": "placement",
        "problem.r": [10, 4, 1, 3, 2, 7, 8, 10, 3, 9],
        "problem.omega": 20,
        "topology.kind": "random",
        "topology.n_agents": 5,
        "topology.edge_prob": 0.7,
        "topology.seed": 2,
        "solver.algorithm": "dagt_hb",
        "solver.alpha": 0.005,
        "solver.beta": 0.009,
        "solver.gamma": 0.008,
        "solver.max_iter": 20000,
        "solver.tol": 1e-9,
        "solver.seed": 0,
        "init.x0": [2, 9, 8, 6, 7, 3, 4, 7, 8, 3],
        "init.x_prev": [0, 11, 9, 8, 9, 1, 1, 4, 3, 1],
        "robustness.delay_steps": 2,
        "robustness.noise_sigma": 0.001,
        "robustness.noise_max_iter": 10000,
    },
    "cournot-paper": {
        "problem.kind": "cournot",
        "problem.n_agents": 50,
        "problem.seed": 42,
        "problem.kappa_range": [0.5, 2.5],
        "problem.theta_range": [10, 20],
        "problem.sigma_range": [5, 20],
        "problem.omega1": 200.0,
        "problem.omega2": 0.01,
        "topology.kind": "random",
        "topology.n_agents": 50,
        "topology.edge_prob": 0.2,
        "topology.seed": 0,
        "solver.algorithm": "dagt_hb",
        "solver.alpha": 0.003,
        "solver.beta": 0.006,
        "solver.gamma": 0.005,
        "solver.max_iter": 60000,
        "solver.tol": 1e-6,
        "solver.seed": 0,
        "init.x0_range": [50, 100],
        "init.seed": 42,
        "robustness.delay_steps": 2,
        "robustness.noise_sigma": 0.001,
        "robustness.noise_max_iter": 10000,
        "sweep.values": [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99],
    },
    "quadratic-demo": {
        "problem.kind": "quadratic",
        "problem.c": [1.0, 2.142857142857143, 3.2857142857142856, 4.428571428571429,
                      5.571428571428571, 6.714285714285714, 7.857142857142858, 9.0],
        "problem.h": [0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5],
        "problem.l": [0.25, 0.25, 0.25, 0.25, 0.25, 0.25, 0.25, 0.25],
        "topology.kind": "random",
        "topology.n_agents": 8,
        "topology.edge_prob": 0.8,
        "topology.seed": 3,
        "solver.algorithm": "dagt",
        "solver.alpha": 0.2,
        "solver.beta": 0.25,
        "solver.gamma": 0.1,
        "solver.max_iter": 4000,
        "solver.tol": 1e-12,
        "solver.seed": 0,
        "init.x0_range": [1, 2],
        "init.seed": 3,
        "robustness.delay_steps": 2,
        "robustness.noise_sigma": 0.0001,
        "robustness.noise_max_iter": 10000,
    },
}


def preset_names():
    return sorted(PRESETS)


def get_preset(name):
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return dict(PRESETS[name])
