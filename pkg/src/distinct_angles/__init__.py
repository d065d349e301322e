"""Distinct-angle experiments on log-spiral, lattice-shell and polygon point sets."""

__version__ = "0.1.0"

from .census import (CensusReport, census_bruteforce, census_pinned_spiral,
                     count_translation_classes, n_r_d, pinned_bound, reduce_triple,
                     translation_class_conventions, verify_projection_property)
from .configurations import (best_shell, f_alpha, f_alpha_index_shift, generic_projection, grid,
                             regular_ngon, spiral_config)
from .geometry import (AngleKey, AngleValue, RationalPoint2, RealPoint2, angle_key_exact,
                       angle_value, angles_of_triple, concyclic, general_position_report,
                       orientation)
from .subsets import (find_equivalent_triples, repeated_angle_witness, rgen_threshold,
                      search_distinct_angle_subset)
