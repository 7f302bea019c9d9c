"""Gacs complexity, entropy rates and Brudno-type theorems at finite size.

Classical side: symbolic sources, mixture semi-measures and the rate of
``-log2 mu``.  Quantum side: product spin-chain marginals, a surrogate
universal semi-density matrix, typical subspaces and Gacs complexities.
"""

from .encoding import (
    AlgebraicNumberSpec, ExponentVector, SymbolString, decode_elementary_vector,
    encode_elementary_vector, index_to_string, int_to_nat, nat_to_int, pair, string_to_index, unpair,
)
from .symbolic import Bernoulli, MarkovSource, OrbitSource, block_distribution, ks_entropy_rate
from .semimeasure import KTEstimator, MarkovKTEstimator, SemiMeasure, WeightedFamily, default_family
from .classical import gacs_block_complexity, gacs_rate, per_sequence_rate
from .spinchain import IIDProduct, MixtureOfProducts, local_density, von_neumann_entropy
from .gacs import gacs_lower, gacs_upper, universal_mixture
from .typicality import verify_item_4, verify_items_1_2_3

__all__ = [
    "AlgebraicNumberSpec", "ExponentVector", "SymbolString", "decode_elementary_vector",
    "encode_elementary_vector", "index_to_string", "int_to_nat", "nat_to_int", "pair",
    "string_to_index", "unpair", "Bernoulli", "MarkovSource", "OrbitSource",
    "block_distribution", "ks_entropy_rate", "KTEstimator", "MarkovKTEstimator", "SemiMeasure",
    "WeightedFamily", "default_family", "gacs_block_complexity", "gacs_rate", "per_sequence_rate",
    "IIDProduct", "MixtureOfProducts", "local_density", "von_neumann_entropy", "gacs_lower",
    "gacs_upper", "universal_mixture", "verify_item_4", "verify_items_1_2_3",
]

__version__ = "0.1.0"
