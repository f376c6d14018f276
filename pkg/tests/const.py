"""Dummy data for tests."""

# (q, traces) of curves whose numerators factor into 1 − s·t + q·t².
WEIL_TRACES = [
    (2, (1,)),
    (2, (-2,)),
    (3, (0,)),
    (2, (1, 2)),
    (3, (3, -1)),
]

CURVE_DESCRIPTOR_COUNTS = {"q": 2, "g": 1, "counts": [2]}

CURVE_DESCRIPTOR_NUMERATOR = {
    "q": 3,
    "g": 1,
    "numerator": [1, 0, 3],
    "counts": [4, 16],
}

CURVE_DESCRIPTOR_BAD_COUNTS = {
    "q": 2,
    "g": 1,
    "numerator": [1, -1, 2],
    "counts": [3],
}

REP_DESCRIPTOR = {"h0": [0], "h2": [1], "h1": [1]}

# Expressions that parse, with a hand-built description of each.
LAURENT_EXPRESSIONS = [
    ("a^2 + a^-2", {2: 1, -2: 1}),
    ("3*a - 2", {1: 3, 0: -2}),
    ("(a + 1)^2", {2: 1, 1: 2, 0: 1}),
    ("a^-3", {-3: 1}),
    ("-a", {1: -1}),
]

# (text, position of the offending token)
MALFORMED_EXPRESSIONS = [
    ("a^", 2),
    ("(a + 1", 6),
    ("a + * 2", 4),
    ("b + 1", 0),
    ("a a", 2),
    ("a^(1/2)", 4),
    ("q^(1/3)", 5),
]

KERNEL = "(q*a^2 - 1)/(a^2 - q)"
