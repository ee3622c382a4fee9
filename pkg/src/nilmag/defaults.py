"""Every numeric default used by the library and the CLI, in one place."""

DEFAULTS = {
    # integration
    "step": 1e-3,
    "integrate_t_end": 100.0,
    "sample_stride": 10,
    # Lyapunov runs
    "lyapunov_t_end": 2000.0,
    "renorm_interval": 1.0,
    "transient_fraction": 0.1,
    "convergence_rtol": 0.3,
    "convergence_atol": 1e-3,
    # initial states
    "k1": 1.0,
    "k2": 5.0,
    "energy": 0.5,
    "orbit_sample_half_width": 2.0,
    "seed": 0,
    # lattice closure
    "max_word_len": 3,
    # symbolic dynamics
    "d_lambda_tol": 1e-12,
    # chaos thresholds used by the acceptance suite
    "positive_mle_threshold": 0.01,
    "zero_mle_threshold": 0.02,
}

SEED_ENV = "NILMAG_SEED"
