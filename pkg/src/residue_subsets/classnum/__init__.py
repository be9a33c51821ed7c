"""Class numbers of imaginary quadratic fields and L(1, chi)."""
