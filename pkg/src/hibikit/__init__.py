"""Combinatorial skeleton of semitoric degenerations of Hibi varieties.

Posets and distributive lattices, the maximal Groebner cone of the Hibi
ideal and its faces, regular subdivisions of order polytopes, degree-wise
ideal dimension oracles, weight polytopes with their distinguished faces,
and the Gelfand-Tsetlin specialization for Grassmannians and flag
varieties.
"""

__version__ = "0.1.0"
