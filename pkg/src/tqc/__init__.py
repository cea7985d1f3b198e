"""t-quasicircles: construction, turning constants, parametrizations,
quasisymmetry moduli and numerical conformal-map checks."""

__version__ = "0.1.0"
