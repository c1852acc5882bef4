"""Exact tools for submodular and network representability of cost functions."""
from .extrat import INF, format_extrat, to_extrat
from .lattice import BOT, TOP, LatticeFamily, closure_meet_join, meet_join
from .costfn import (CostFunction, add, brute_force_min, builtin_function, check_property,
                     complement_function, partial_min, scale_shift)
from .encoding import (Encoding, bar_encoding, decode_tuple, encode_tuple, retract_blocks,
                       standard_encoding)
from .network import (Network, c_min, complement_network, eval_representation, gadget,
                      is_retractable, min_cut, network_sum)
from .ratlp import Feasible, Infeasible, LinSystem, feasible, nonneg_combination
from .replp import decide_representable, dom_closure, verify_witness
from .wpol import (OperationTable, WeightedPolymorphism, apply_operation, refutation_value,
                   standard_wpol, validate_wpol)
from .cone import ConeSpec, build_cone, decompose, extreme_rays, symmetry_reduce

__version__ = "0.1.0"
