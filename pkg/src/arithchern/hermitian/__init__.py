"""Chern-Weil forms and Bott-Chern secondary forms on the Riemann sphere."""
from .transgression import (BACKEND, FAMILIES, BottChernResult, FamilyChoice, FamilyDegenerate,
                         bott_chern, ddc_residual, family_spread, set_backend)
from .bundles import HermBundle, SingularMetric, chern_forms, curvature, surface_chern
from .expr import ExprError, parse_expr, parse_matrix
from .grid import ChartGrid, DegreeMismatch, FormGrid, integrate
from .sequences import (ExactSeqData, MetricChangeSeq, induced_metrics,
                        second_fundamental_form, sff_density)
