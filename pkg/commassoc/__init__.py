"""Commutator associativity toolkit: tree pairs, finite groups and the eventual-satisfaction machinery."""
