"""Single-pass l1 and l2 heavy-hitter sketches with an exact oracle."""
from .core import (
    FrequencyProfile,
    HHParams,
    HHReport,
    Stream,
    exact_profile,
    gen_planted,
    gen_spike,
    gen_zipf,
    truth_l1,
    truth_l2,
)
from .countsketch import CountSketch, cs_space_bits
from .hashing import PairwiseHash, PolyHash, SignHash, hash_eval, hash_new
from .l1hh import SampledL1, l1_space_bits
from .l2sieve import (
    Amplifier,
    F2Tracker,
    IsolatedSieve,
    L2Sieve,
    SieveConfig,
    sieve_space_bits,
)
from .mg import MisraGries

__version__ = "0.1.0"

__all__ = [
    "FrequencyProfile",
    "HHParams",
    "HHReport",
    "Stream",
    "exact_profile",
    "gen_planted",
    "gen_spike",
    "gen_zipf",
    "truth_l1",
    "truth_l2",
    "CountSketch",
    "cs_space_bits",
    "PairwiseHash",
    "PolyHash",
    "SignHash",
    "hash_eval",
    "hash_new",
    "SampledL1",
    "l1_space_bits",
    "Amplifier",
    "F2Tracker",
    "IsolatedSieve",
    "L2Sieve",
    "SieveConfig",
    "sieve_space_bits",
    "MisraGries",
]
