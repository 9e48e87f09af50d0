"""Exact set arithmetic over prime fields and an executable sum-product argument."""

from .counting import (CountReport, b0_score, min_I0_slope, mult_energy_J, power_spectrum,
                       solution_count_I)
from .families import FamilySpec, gen_family, primitive_root
from .field_sets import (FieldError, FpSet, PrimeField, difference, dilate, intersect,
                         make_field, make_set, negate, productset, sumset)
from .lemmas import (InequalityReport, WitnessReport, check_plunnecke, check_ruzsa_triangle,
                     find_big_witness, find_gk_witness, find_xi_witness, xi_lower_bound)
from .sweep import ExperimentConfig, ResultRow, run_sweep
from .trace import (BoundValues, Check, TraceRecord, case1_chain, dyadic_partition,
                    evaluate_theorem_bounds, run_trace, select_b0, select_dyadic_class)

__version__ = "0.1.0"
