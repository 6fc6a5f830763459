"""Sparse multi-term disjunctive cuts for block-diagonal binary programs."""

from .benders import CutPool, EnumerationOracle, Master, Workspace, kelley_root_loop, make_benders_cut, solve_subproblem
from .bnc import BnCResult, branch_and_bound, optimal_value, solve_instance
from .forge import fingerprint, gen_cap, gen_lla, gen_snip, generate, read_instance, write_instance
from .lp import LinearProgram, LPSolution, LPStatus, Row, SimplexLP, solve
from .model import Block, BlockDiagonalProblem, Cut, FirstStageSet, build_extensive, build_master
from .pb import pb_separate
from .rootloop import ExperimentConfig, ProfileRow, gap_closed, run_root_loop
from .selection import build_surrogate, cutpl_support, greedy_support, mixing_envelope, singleton_profile
from .sparse import NuCache, NuTable, SupportSet, eval_nu_table, gray_sequence, solve_cglp
from .tilting import tilt_cglp, tilt_cut

__version__ = "0.1.0"
