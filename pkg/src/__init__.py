"""
Foliation Quotients Package
Exact computation of first integrals, stability certificates and glued quotients of algebraic foliations
"""

__version__ = "1.0.0"
__author__ = "Foliation Quotients Team"
