"""Sanitizing binary Markov-chain time series under Bayesian differential privacy.

The package splits into:

* :mod:`bdpmc.chain` -- the data model: lazy two-state chains, sampling,
  estimation, binarization, and the plain-text series formats.
* :mod:`bdpmc.mechanisms` -- the independent randomized-response sanitizer and
  the correlated XOR-noise variant.
* :mod:`bdpmc.hmm` -- exact forward/backward inference, Viterbi decoding, and
  the exhaustive oracles that back-check them.
* :mod:`bdpmc.privacy` -- worst-case likelihood-ratio bounds, noise
  calibration, reductions from prior work, and the exhaustive privacy-loss
  evaluator.
* :mod:`bdpmc.attacks` -- single-bit, posterior-mode, and Viterbi attackers
  with evaluation reports.
* :mod:`bdpmc.experiments` -- seeded, CSV-emitting reproductions of the
  comparative experiments.
"""

from .attacks import AttackReport, attack_correlation_aware, attack_single_bit, attack_viterbi, evaluate
from .chain import (
    BinaryMarkovChain,
    ChainEstimate,
    as_bits,
    binarize,
    estimate,
    read_bits,
    read_real_series,
    sample,
    write_bits,
)
from .errors import (
    DegenerateChainError,
    EnumerationLimitError,
    InsufficientDataError,
    ParameterDomainError,
)
from .experiments import (
    ExperimentConfig,
    ResultTable,
    charged_epsilon,
    feasible_region,
    run_dp_insufficiency,
    run_noise_privacy_comparison,
    run_reconstruction_vs_bound,
)
from .hmm import (
    LikelihoodTables,
    backward,
    brute_force_likelihood,
    correlated_likelihood,
    forward,
    likelihood_given_state,
    likelihood_tables,
    posterior,
    viterbi,
)
from .mechanisms import (
    CorrelatedNoiseChain,
    NoiseParams,
    per_index_uniform,
    sanitize_correlated,
    sanitize_independent,
)
from .privacy import (
    Adversary,
    ClosedFormConstants,
    HProfile,
    PrivacyBudget,
    argmax_index,
    bdpl_adversary,
    bdpl_ratio_at,
    calibrate_asymmetric,
    calibrate_symmetric_exact,
    closed_form_ratios,
    dp_noise,
    h_profile,
    lr_bound,
    lr_bound_symmetric,
    rho_sufficient_symmetric,
    success_bound_bdp,
    success_bound_dp,
    zhao_eps3_noise,
    zhao_eps3_noise_direct,
    zhao_eps3_threshold,
    zhao_eps6_budget,
    zhao_eps6_noise,
)

__version__ = "0.1.0"
