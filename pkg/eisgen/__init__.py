"""Exact desk-scale checks of rank-1 Eisenstein series over function fields."""
