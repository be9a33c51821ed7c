"""Character sums: partial sums, intervals and prefix extremes."""
