"""Product-one sequences over finite groups: exact Davenport constants,
extremal constructions and randomized checks of the supporting lemmas."""

__version__ = "0.1.0"

from .groups import (  # noqa: E402
    FiniteGroup,
    GroupSubset,
    Subgroup,
    cyclic_subgroup_generator_of_order,
    derived_subgroup,
    direct_product,
    from_cayley_table,
    from_permutation_generators,
    make_cyclic,
    make_dicyclic,
    make_dihedral,
    smallest_prime_divisor,
    subgroup_generated,
)
from .sequences import (  # noqa: E402
    ProductCache,
    Sequence,
    all_subsequence_products,
    bar_set,
    is_minimal_product_one,
    is_product_one,
    is_product_one_free,
    pi_set,
    product_set,
)
from .search import SearchConfig, large_davenport, small_davenport  # noqa: E402
from .bounds import (  # noqa: E402
    check_bounds,
    conjecture_upper_bound,
    extremal_construction,
    theorem_upper_bound,
)
from .catalog import build_group_id, load_catalog, resolve_group  # noqa: E402
