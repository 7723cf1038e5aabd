"""QC-MDPC McEliece laboratory.

Implements the cryptosystem over GF(2)[x]/(x^k - 1), an instrumented
bit-flipping decoder, exact hypergeometric score predictors, and a simulated
timing/score attack that recovers the secret key's distance spectrum from
per-distance decoder statistics.
"""

__version__ = "0.1.0"

from .qcmdpc import CodeParams, ErrorVector, KeyPair, keygen  # noqa: F401
from .presets import PRESETS, get_preset  # noqa: F401
