"""Executable encodings of the summation and transformation formulas."""
from .registry import (REGISTRY, Built, ConstraintError, IdentitySpec, VerificationRecord,
                       build, get, ids, residual, verify)
from .structure import ParamSet, ar_factor, cr_factor, dr_factor

__all__ = ["REGISTRY", "Built", "ConstraintError", "IdentitySpec", "VerificationRecord",
           "build", "get", "ids", "residual", "verify", "ParamSet", "ar_factor",
           "cr_factor", "dr_factor"]
