"""Numerical experiments on joint shift approximation by log zeta.

Submodules: ``primes`` (segmented sieve), ``zeta`` (Euler-Maclaurin zeta
and the continuous log zeta branch), ``dirichlet`` (prime sums on tau
grids), ``kronecker`` (Chen-type simultaneous approximation),
``targeting`` (greedy phase assignment and zero counting), ``analysis``
(measures over [T, 2T]) and ``cli``.
"""
__version__ = "0.1.0"

from .analysis import (DensityReport, ScanConfig, WindowSet, find_tau, good_set_measure,
                       scan_A_d, tail_energy, theorem_scan, tsang_meansquare)
from .dirichlet import PrimeSumSpec, ShiftVector, TauGrid, multi_eval, mv_meanvalue_check, prime_sum
from .errors import (AccuracyError, BudgetError, ContourError, EmptyTableError, JointZetaError,
                     NonConvergenceError, OutOfRangeError, PoleError, RangeError,
                     ResolutionError, ZeroOnPathError)
from .kronecker import (KroneckerInstance, KroneckerSolution, chen_bound, chen_search,
                        corollary_M, corollary_T, homogeneous_window, lambda_min)
from .primes import PrimeTable, nth_prime, primes_in_range, sieve_up_to
from .targeting import (PhaseAssignment, TargetSpec, build_phase_assignment, divergence_witness,
                        exp_poly_zero_count, first_nonvanishing, residual, wilder_count)
from .zeta import (EvalPoint, LogZetaValue, ZeroProximityReport, log_zeta, log_zeta_grid,
                   zero_proximity_scan, zeta_eval)
