"""Spectral and non-spectral sets for Cantor-type measures mu_{q,b}.

Exponential sets are built from labelled q-ary trees; the package checks
orthogonality, measures the gap quantity that decides spectrality, and
tabulates the frame function sum |mu^(xi + lam)|**2.
"""
from .measure import (CertifiedComplex, Constants, MeasureParams, compute_constants,
                      decay_rate, filter_H, fourier_mu, in_Tb, partial_product_Hm,
                      positions_lower_bound)
from .tree import (FiniteTrie, KappaMapping, TreeMapping, TreeMappingError, UnknownLabelError,
                   enumerate_lambda, make_kappa, make_symbol_mapping, make_tau24, make_trie,
                   parse_word, pi_inf, pi_n, trie_from_json, trie_to_json, validate_tree_mapping)
from .ortho import (digit_expansion, in_zero_set, is_maximal_at_depth, is_orthogonal_set,
                    tree_from_set)
from .gap import (Certificate, certify_spectrum, defect_lower_bound, gap_value, min_gap,
                  n_tau, refute_linear, refute_series, sup_gap)
from .frame import frame_scan, parseval_deviation, qn
from .rescale import (RepetendWitness, classify_K_lambda4, classify_scaled, divide_set,
                      find_repetend, make_rescaled_counterexample, verify_repetend)

__version__ = "0.1.0"
