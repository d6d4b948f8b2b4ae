"""Finitely generated abelian groups: normal forms, derived functors, extensions,
p-adic completion and towers."""

from .groups import FgGroup, GroupElement, Homomorphism, NotWellDefinedError, PreconditionError, classify
from .exactness import ShortExactSeq, SixTermSequence
from .cli import parse_group

__all__ = ["FgGroup", "GroupElement", "Homomorphism", "NotWellDefinedError", "PreconditionError",
           "classify", "ShortExactSeq", "SixTermSequence", "parse_group"]
