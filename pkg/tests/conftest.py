from fractions import Fraction

from hypothesis import strategies as st

rationals = st.builds(Fraction, st.integers(-30, 30), st.integers(1, 12))
nonzero_rationals = rationals.filter(lambda r: r != 0)
