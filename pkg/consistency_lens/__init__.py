"""Consistency checking of concurrent traces through epistemic logic."""
