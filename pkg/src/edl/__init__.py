"""Exact counting, shifting and extremal solvers for clique and
independent-set densities."""
from ._backend import BACKEND, available as available_backends
from .extremal import (ExtremalPoint, OptimizeResult, SolverError, curve, curve_intersection,
                       kk_bound, m_bound, optimize_profile, phi_max, rho_maxmin)
from .graph import (FAMILIES, Q, QBAR, TIE, CountReport, Graph, GraphError, blowup_limit_density,
                    complement, count_cliques, edit_distance_to_q, from_edge_list, hamming_graph,
                    parse_graph, q_graph, read_graph, write_graph)
from .shifting import (SetSystem, SetSystemError, ThresholdCheck, count_labeled_copies, dominates,
                       is_shifted, is_stable_system, is_threshold, parse_set_system, shift,
                       shift_to_fixpoint)
from .threshold import (Profile, ProfileError, StepFunction, StepModel, graph_to_profile,
                        integral_margin, monomial_margin, p_density, profile_to_graph, q_density,
                        reduce_nondegenerate)
from .verify import VerificationReport, enumerate_graphs, franek_rodl_check

__version__ = "0.1.0"
