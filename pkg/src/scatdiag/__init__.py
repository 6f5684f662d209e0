"""
scatdiag: exact scattering diagrams for log Calabi-Yau surfaces.

The main entry points::

    >>> from scatdiag import new_case, scatter, extract_R
    >>> d = scatter(new_case("P2", 3, t_bound=6), 6, accelerate=True, y_bound=9)
    >>> extract_R(d, 3).by_degree[2]
    mpq(135,4)
"""
from .series import (Monomial, Series, TruncationPolicy, add, collapse_t, int_pow, log1,
                     mul, primitive, substitute_t_one)
from .lattice import (ALIASES, CASES, POLYTOPES, SmoothModelClasses, UnfoldingData,
                      build_unfolding, case_data, derive_case_data, kink, load_class_table,
                      resolve_case, smooth_model_classes)
from .diagram import Ancestor, Diagram, Ray, merge_parallel, new_case, new_lines, new_named
from .engine import (DefectTerm, InconsistentInput, LocalDiagram, PlaneAutomorphism,
                     WindowOverflowError, ancestry, check_consistency, consistency_defect,
                     localize, path_ordered_product, points_of, scatter, wall_crossing)
from .tropical import (AmbiguousAncestry, Leg, Terminus, TropicalCurve, automorphisms,
                       complete_ray, completions, correspondence, local_count, multiplicity,
                       tropical_sum_check, wall_correspondence)
from .invariants import (InvariantTable, NotCertified, certified_degree, class_partition,
                         display_factors, extract_R, f_beta, f_out, ray_class, t_order_for,
                         upward_rays)
from . import io

__version__ = "0.1.0"

__all__ = ['add', 'ALIASES', 'AmbiguousAncestry', 'Ancestor', 'ancestry', 'automorphisms',
           'build_unfolding', 'case_data', 'CASES', 'certified_degree', 'check_consistency',
           'class_partition', 'collapse_t', 'complete_ray', 'completions',
           'consistency_defect', 'correspondence', 'DefectTerm', 'derive_case_data',
           'Diagram', 'display_factors', 'extract_R', 'f_beta', 'f_out',
           'InconsistentInput', 'int_pow', 'InvariantTable', 'io', 'kink', 'Leg',
           'load_class_table', 'local_count', 'LocalDiagram', 'localize', 'log1',
           'merge_parallel', 'Monomial', 'mul', 'multiplicity', 'new_case', 'new_lines',
           'new_named', 'NotCertified', 'path_ordered_product', 'PlaneAutomorphism',
           'points_of', 'POLYTOPES', 'primitive', 'Ray', 'ray_class', 'resolve_case',
           'scatter', 'Series', 'smooth_model_classes', 'SmoothModelClasses',
           'substitute_t_one', 't_order_for', 'Terminus', 'tropical_sum_check',
           'TropicalCurve', 'TruncationPolicy', 'UnfoldingData', 'upward_rays',
           'wall_correspondence', 'wall_crossing', 'WindowOverflowError']
