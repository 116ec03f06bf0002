"""Exact certificates and density searches for values of relative invariants
of prehomogeneous vector spaces at primitive integer points."""
from __future__ import annotations

from .exact import FieldMismatchError, Matrix, ProjectivePoint, QScalar, parse_scalar, projective_is_rational

__all__ = ["FieldMismatchError", "Matrix", "ProjectivePoint", "QScalar", "parse_scalar", "projective_is_rational"]
__version__ = "0.1.0"
