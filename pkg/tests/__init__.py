"""commutator-assoc tests package."""
