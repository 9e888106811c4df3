"""Zero-divisor graphs of Lipschitz quaternions mod n and of M_2(Z_{p^s})."""

__version__ = "0.1.0"
