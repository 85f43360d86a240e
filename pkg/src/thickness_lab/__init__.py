"""Covering radii of unit-vector nets in finite-dimensional normed spaces."""
from .covering import (
    CoveringReport,
    ThicknessSearchResult,
    analytic_upper,
    covering_radius_estimate,
    covering_radius_lower,
    min_distance,
    nonsquareness_estimate,
    thickness_search,
)
from .errors import DomainError, InputError, ResourceError
from .nets import Net
from .spaces import INF, LpSeq, LpStep, PolyK, PSum, norm, normalize, sample_ball

__version__ = "0.1.0"
