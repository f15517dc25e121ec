"""Simulation and verification of the high-girth random triple process."""
from .catalog import (DIAMOND, PASCH, Obstruction, ObstructionCatalog, automorphism_count,
                      canonical_label, enumerate_obstructions, enumerate_obstructions_naive,
                      is_minimal)
from .engine import (MemoryBudgetError, ProcessState, RunResult, add_triple, available_set_bruteforce,
                     decode_triple, encode_triple, find_closing_triples, init_process,
                     is_available_bruteforce, run_to_completion, step)
from .experiments import (RunConfig, RunRecord, SweepReport, concentration_report, fit_exponent,
                          run_trial, run_trials, sweep)
from .observables import (Snapshot, codegree_Y, count_rooted_extensions, count_W,
                          girth_check_patterns, girth_check_subsets, take_snapshot,
                          verify_triple_system)
from .trajectories import (TrajectoryPoint, counting_estimate, derivative_check, evaluate, n_uvw_count,
                           q_of, q_tilde_of, w_hat)

__version__ = "0.1.0"
