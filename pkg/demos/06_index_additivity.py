"""Index additivity for maps between short exact sequences.

Random integer diagrams with exact rows 0 -> V' -> V -> V'' -> 0 and
0 -> W' -> W -> W'' -> 0 are generated; the indices of the vertical maps
add, and the six-term kernel/cokernel sequence (with its connecting map)
is exact.
"""

from oddindex import random_exact_diagram, snake_additivity_check
from oddindex.linop import long_exact_sequence, random_dimension_profile

for seed in range(8):
    dims = random_dimension_profile(seed)
    diag = random_exact_diagram(dims, seed)
    i_mid, i_left, i_right, holds = snake_additivity_check(diag)
    les = long_exact_sequence(diag)
    print(f"dims {dims}: {i_mid} = {i_left} + {i_right} ({holds}); "
          f"ker/coker dims {les['dims']}, exact {les['exact']}")
