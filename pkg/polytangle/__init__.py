"""polytangle - poly-excellent tangles and the combinatorics that certify them."""
