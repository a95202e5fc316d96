"""
Determinantal Lab

Exact computation, sampling, conditioning and coupling experiments for
discrete determinantal probability measures.
"""

__version__ = "1.0.0"
__author__ = "Determinantal Lab contributors"
