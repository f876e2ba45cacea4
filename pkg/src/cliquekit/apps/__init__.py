"""Scenario-to-graph reductions for communication problems."""
