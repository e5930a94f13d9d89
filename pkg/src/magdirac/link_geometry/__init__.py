"""Curves on S^3, Seifert frames, tubular coordinates, linking numbers and link metrics."""

from .curves import (KnotCurve, RawCurve, arclength_reparametrize, great_circle, perturbed,
                     round_circle, torus_knot)
from .distance import (LinkConfiguration, SubmanifoldSample, cap_sample, curve_sample, dist_config,
                       dist_submanifold, dist_surface)
from .flux import FluxVector, cut_lift, dist_per, flux_distance, phase_jump_single, slope_c_k
from .frames import FrameField, constant_normal, darboux_residual, projected_normal, seifert_frame
from .hopf import fibre_point, hopf_map, hopf_map_real, hopf_preimage
from .linking import gauss_linking_integral, linking_number
from .sphere import (GeometryError, cross, exp_geodesic, geodesic_distance, hopf_frame, orientation,
                     stereographic)
from .tubular import (TubularChart, coords_to_point, delta_bound, h_factor, pushforwards,
                      tubular_chart, tubular_coords, volume_factor)
