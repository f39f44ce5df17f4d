from hypothesis import strategies as st

from ensemblectl.graph import SparsityPattern


@st.composite
def patterns(draw, n_max=6, m_max=2):
    n = draw(st.integers(0, n_max))
    m = draw(st.integers(0, m_max))
    slots = [(u, v) for u in range(n + m) for v in range(n)]
    mask = draw(st.lists(st.booleans(), min_size=len(slots), max_size=len(slots)))
    return SparsityPattern(n, m, [e for e, keep in zip(slots, mask) if keep])
