"""Named generating functions used by the CLI and the tests."""

from __future__ import annotations

from .expr import GeneratingFunction, parse_expression

WHITNEY_PLUS = "-(1/3)*(1 - x1^2 - x2^2)^(3/2)"
WHITNEY_MINUS = "(1/3)*(1 - x1^2 - x2^2)^(3/2)"
# lower Whitney sheet plus a radial bump centred at (-1/2, 0); its gradient
# meets (1, 0) at exactly two points a < b < 0 of the x1-axis
DEFORMED_MINUS = (
    "(1/3)*(1 - x1^2 - x2^2)^(3/2)"
    " + (1/5)/(1 + ((x1 + 1/2)^2 + x2^2)/(1/100))"
)

# search box for the deformed pair: a strip around x2 = 0 inside the unit disk
DEFORMED_BOX = ((-0.95, -0.05), (-0.25, 0.25))
WHITNEY_BOX = ((-0.5, 0.5), (-0.5, 0.5))

NAMED = {
    "whitney+": WHITNEY_PLUS,
    "whitney-": WHITNEY_MINUS,
    "deformed-": DEFORMED_MINUS,
}


def resolve(name: str) -> GeneratingFunction:
    """Look up a fixture name, ``const:<expr>``, or parse ``name`` as an expression."""
    if name in NAMED:
        return parse_expression(NAMED[name])
    if name.startswith("const:"):
        return parse_expression(name[len("const:"):])
    return parse_expression(name)
