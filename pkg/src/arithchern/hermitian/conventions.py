"""The d^c normalization, kept in one place.

``d^c = (d - dbar) / (4 pi i)``, so on a chart ``dd^c f = (1/pi) f_{z zbar} dA``
and ``dd^c log|z|^2`` is the unit point mass.  ``DC_SCALE`` exists only so the
selftest negative control can perturb the convention and watch the
normalization suite fail; it is 1 in normal operation.
"""
import math

DC_SCALE = 1.0


def ddc_factor() -> float:
    """Coefficient turning ``f_{z zbar}`` into the ``dA`` coefficient of ``dd^c f``."""
    return DC_SCALE / math.pi
