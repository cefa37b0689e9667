"""Exact arithmetic for sequence-generated group topologies on countable
abelian groups: presentations, integer-lattice subgroup computations,
characters and annihilators, bounded null-sequence verification, explicit
constructions, structural decompositions, and radical computation."""

__version__ = "0.1.0"
