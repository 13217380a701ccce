"""From-below Boolean matrix factorization with formal concepts."""

from .bitmatrix import BooleanMatrix, bool_product, down, leq, residual_error, up
from .concepts import ConceptStream, FormalConcept, canonical_stream, closure, enumerate_concepts
from .factorization import Factorization, IncompleteConceptsError
from .grecon2 import grecon2_factorize
from .grecon3 import grecon3_factorize
from .grecond import grecond_factorize
from .oracle import brute_force_concepts, naive_grecon

__all__ = [
    "BooleanMatrix",
    "ConceptStream",
    "Factorization",
    "FormalConcept",
    "IncompleteConceptsError",
    "bool_product",
    "brute_force_concepts",
    "canonical_stream",
    "closure",
    "down",
    "enumerate_concepts",
    "grecon2_factorize",
    "grecon3_factorize",
    "grecond_factorize",
    "leq",
    "naive_grecon",
    "residual_error",
    "up",
]
