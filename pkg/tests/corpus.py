"""Shared inputs for the unit and acceptance suites."""

# canonical spellings: printing the parse of each returns the same bytes
EXPRESSIONS = [
    "x", "1", "x+1", "x-1", "-x", "x*y", "x/y", "x^2", "x^-2", "x^2/(1+x)",
    "(x+1)*(x-1)", "x-(y-z)", "x/(y/z)", "x/y/z", "x-y-z", "x*y*z", "x*(y+z)",
    "-x^2", "(-x)^2", "-(x+y)", "x^2+2*x+1", "5*x+x^3", "1/x", "1/(1+x)",
    "1/(1-5*x)", "[1,1]", "[2]e3", "[1,2]~4", "[3]e-1", "x*[1,1]+[4]",
    "root(2,6)", "root(3,x)", "root(2,1+5*x)", "qpow(1/2,x)", "qpow(3/2,x^2)",
    "qpow(-1/2,x)", "henselroot(2;5,1)", "henselroot(3;5*x,1,x)",
    "root(2,root(2,x))", "x^10-x^5+1", "(x+y)^3", "x^-3*y", "x*y-y*x",
    "(x-1)/(x+1)", "x/(x^2+5)", "2*x^3-3*x^2+x", "x^4/(1+x^2)^2",
    "(1+x)^-1", "--x", "x+y*z-w/v",
]

MALFORMED = [
    ("x^(1/2)", (1, 5)),
    ("x+", (1, 3)),
    ("(x+1", (1, 5)),
    ("2**x", (1, 3)),
    ("root(2 x)", (1, 8)),
    ("qpow(1,x)", (1, 7)),
    ("x y", (1, 3)),
    ("henselroot(2,5,1)", (1, 13)),
    ("x^y", (1, 3)),
    ("1+\n*2", (2, 1)),
]

# (numerator coefficients, denominator coefficients, expression), little endian
RATIONALS = [
    "x", "x^2", "5*x+x^3", "x^2/(1+x)", "1/(1+x)", "x/(1-x)", "(x+x^2)/(1+5*x)",
    "25*x^2", "x^3/(5+x)", "(2*x+x^2)/(3+x^3)", "x^2/(x+x^2)", "1+x", "7",
    "x/5", "(x^2-x^3)/(1+x)^2", "(5*x^2+x^4)/(1-x)", "x^4*(1+x)", "3*x/(2+x)",
    "x^2/(25+x)", "(x-5*x^2)^2",
]

# polynomial maps defined by their coefficient lists, with symbolic derivatives
POLYNOMIALS = [
    [0, 1], [1, 0, 1], [0, 5, 0, 1], [2, -3, 0, 4], [0, 0, 0, 7], [1, 1, 1, 1],
    [3, 0, 5], [0, 2, -1, 0, 1], [4, 10, 0, 0, 0, 1], [-1, 0, 0, 2],
]
