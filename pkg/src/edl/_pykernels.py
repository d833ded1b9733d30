"""Pure-Python clique counting over integer bit rows.

Same contract as the compiled kernels; rows are Python ints with bit ``v``
set for each neighbour ``v``.
"""


def count_cliques_in(rows, cand, l):
    """Number of ``l``-cliques whose vertices all lie in the mask ``cand``."""
    if l == 0:
        return 1
    if l == 1:
        return cand.bit_count()
    total = 0
    rest = cand
    if l == 2:
        while rest:
            low = rest & -rest
            rest ^= low
            total += (rest & rows[low.bit_length() - 1]).bit_count()
        return total
    while rest:
        low = rest & -rest
        rest ^= low
        # rest now holds exactly the candidates above this vertex
        total += count_cliques_in(rows, rest & rows[low.bit_length() - 1], l - 1)
    return total
