"""Secure computation of the modulo-2 sum over a binary multiple-access wiretap channel.

Submodules: ``gf2`` (bit linear algebra), ``source``, ``channel``, ``compcode``
(the joint computation code), ``leakage`` (exact eavesdropper leakage),
``rates``, ``separation`` (the compress-then-wiretap baseline) and ``cli``.
"""

__version__ = "0.1.0"
