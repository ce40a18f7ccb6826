"""
Search
------
Brute-force search for covariate role sets the query leaves unset.

Candidates are subsets of the observable variables outside the query's own variables,
tried smallest first and lexicographically within a size, up to :py:data:`DEFAULT_MAX_ADJUST_SIZE`
members per role. The first admissible assignment wins, so results are deterministic.
"""

import itertools
import logging
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from regimecalc.graph.dag import Dag, descendants_of_set
from regimecalc.identify.criteria import (
    check_back_door,
    check_l2_non_descendant,
    check_nde_defined,
    check_response_mediator_stability,
    check_response_treatment_stability,
    check_roles_non_descendant,
    check_sequential,
    check_sequential_roles,
    check_zx_backdoor,
)
from regimecalc.identify.errors import InvalidRoleError, NotDefined, NotIdentified
from regimecalc.identify.query import CheckResult, Roles
from regimecalc.regimes.types import MediatorRegime

logger = logging.getLogger(__name__)

DEFAULT_MAX_ADJUST_SIZE = 4
"""Largest role set tried by the searches."""


def candidates(dag: Dag, exclude: Sequence[str], observable: bool = True) -> List[str]:
    """Sorted chance variables not in ``exclude``; observable ones only unless ``observable`` is ``False``."""
    pool = dag.observable_nodes if observable else dag.chance_nodes
    return sorted(name for name in pool if name not in exclude)


def subsets(pool: Sequence[str], max_size: int) -> Iterator[Tuple[str, ...]]:
    """Subsets of ``pool`` by increasing size, lexicographic within a size."""
    pool = sorted(pool)
    for size in range(min(max_size, len(pool)) + 1):
        yield from itertools.combinations(pool, size)


def search_back_door(
    dag: Dag, treatment: str, response: str, max_size: int = DEFAULT_MAX_ADJUST_SIZE
) -> Tuple[str, ...]:
    """
    Smallest observable set satisfying the back-door criterion.

    :raises NotIdentified: If no candidate passes; the witness is the one of the empty set.
    """
    pool = [
        name
        for name in candidates(dag, [treatment, response])
        if name not in descendants_of_set(dag, [treatment], include_self=True)
    ]
    empty: Optional[CheckResult] = None
    for c in subsets(pool, max_size):
        result = check_back_door(dag, treatment, response, c)
        if result:
            logger.info(f"Back-door set for {treatment!r} -> {response!r}: {list(c)}")
            return c
        if empty is None:
            empty = result
    raise NotIdentified(
        f"No observable set of at most {max_size} variables blocks the back-door paths "
        f"from {treatment!r} to {response!r}.",
        empty.witness,
    )


def _block_assignments(
    names: Tuple[str, ...], lowest: Dict[str, int], free: Sequence[int]
) -> Iterator[Dict[int, List[str]]]:
    """Ways of spreading ``names`` over the free block indices, each name at or after its lowest index."""
    options = [[index for index in free if index >= lowest[name]] for name in names]
    for choice in itertools.product(*options):
        blocks: Dict[int, List[str]] = {index: [] for index in free}
        for name, index in zip(names, choice):
            blocks[index].append(name)
        yield blocks


def search_sequential_blocks(
    dag: Dag,
    targets: Sequence[str],
    regimes: Sequence[MediatorRegime],
    response: str,
    blocks: Sequence[Optional[Sequence[str]]],
    max_size: int = DEFAULT_MAX_ADJUST_SIZE,
) -> Tuple[Tuple[str, ...], ...]:
    """
    Fill the unset blocks of a sequential plan so that simple stability or the weak condition holds.

    A covariate may go into block ``L_j`` only if it descends from none of ``X_j, ..., X_K``;
    the variables the regimes condition on must be placed in time.
    Candidates are ordered by total size, then lexicographically, then by block index.

    :raises NotIdentified: If no assignment passes; the witness is the one with every unset block empty.
    """
    fixed = {k: tuple(block) for k, block in enumerate(blocks) if block is not None}
    free = [k for k in range(len(targets)) if k not in fixed]
    taken = [name for block in fixed.values() for name in block]
    lowest: Dict[str, int] = {}
    for name in candidates(dag, [*targets, response, *taken]):
        later = [
            k for k, target in enumerate(targets) if name in descendants_of_set(dag, [target], include_self=True)
        ]
        lowest[name] = max(later) + 1 if later else 0
    pool = [name for name, index in lowest.items() if index < len(targets)]

    fallback: Optional[CheckResult] = None
    for chosen in subsets(pool, max_size):
        for assignment in _block_assignments(chosen, lowest, free):
            plan = [fixed[k] if k in fixed else tuple(assignment[k]) for k in range(len(targets))]
            try:
                check_sequential_roles(dag, targets, plan, response, regimes)
            except ValueError:
                continue
            result = check_sequential(dag, targets, plan, response, regimes)
            if result:
                logger.info(f"Covariate blocks for {list(targets)}: {[list(block) for block in plan]}")
                return tuple(plan)
            if fallback is None:
                fallback = result
    if fallback is None:
        raise InvalidRoleError(
            f"The regimes of {list(targets)} condition on variables that cannot be observed in time."
        )
    raise NotIdentified(
        f"No assignment of at most {max_size} observable covariates to blocks identifies "
        f"the effect of {list(targets)} on {response!r}.",
        fallback.witness,
    )


def search_w(
    dag: Dag, treatment: str, mediator: str, response: str, max_size: int = DEFAULT_MAX_ADJUST_SIZE
) -> Tuple[str, ...]:
    """
    Smallest observable ``W`` for which the natural mediator regime is well posed.

    :raises NotIdentified: If only sets containing latent variables work.
    :raises NotDefined: If no set works at all.
    """
    exclude = [treatment, mediator, response]
    empty: Optional[CheckResult] = None
    for w in subsets(candidates(dag, exclude), max_size):
        result = check_nde_defined(dag, treatment, mediator, response, w)
        if result:
            logger.info(f"Strata W={list(w)} for the natural regime on {mediator!r}")
            return w
        if empty is None:
            empty = result
    for w in subsets(candidates(dag, exclude, observable=False), max_size):
        if any(dag.is_latent(name) for name in w) and check_nde_defined(dag, treatment, mediator, response, w):
            raise NotIdentified(
                f"The natural regime on {mediator!r} is only well posed within strata of latent variables, "
                f"e.g. W={list(w)}.",
                empty.witness,
            )
    raise NotDefined(
        f"No W makes the natural regime on {mediator!r} well posed; the natural direct effect is not defined.",
        empty.witness,
    )


def search_s(
    dag: Dag,
    treatment: str,
    mediator: str,
    response: str,
    w: Sequence[str],
    max_size: int = DEFAULT_MAX_ADJUST_SIZE,
) -> Tuple[str, ...]:
    """
    Smallest observable ``S`` blocking the treatment-mediator back doors within strata of ``W``.

    :raises NotIdentified: If no candidate passes.
    """
    empty: Optional[CheckResult] = None
    for s in subsets(candidates(dag, [treatment, mediator, response, *w]), max_size):
        result = check_zx_backdoor(dag, treatment, mediator, w, s)
        if result:
            return s
        if empty is None:
            empty = result
    raise NotIdentified(
        f"No observable S identifies the effect of {treatment!r} on {mediator!r} within strata of W={list(w)}.",
        empty.witness,
    )


def search_l(
    dag: Dag,
    treatment: str,
    mediator: str,
    response: str,
    w: Sequence[str],
    l1: Optional[Sequence[str]] = None,
    l2: Optional[Sequence[str]] = None,
    max_size: int = DEFAULT_MAX_ADJUST_SIZE,
) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    """
    Covariates ``L1`` (pre-treatment, always containing ``W``) and ``L2`` (between treatment and mediator)
    for which the response is stable under both indicators.

    :raises NotIdentified: If no pair passes; the witness is the one of ``L1 = W``, ``L2 = ∅``.
    """
    exclude = [treatment, mediator, response]
    if l1 is not None:
        first = [tuple(l1)]
    else:
        first = (tuple(sorted({*w, *extra})) for extra in subsets(candidates(dag, [*exclude, *w]), max_size))
    fallback: Optional[CheckResult] = None
    for pre in first:
        result = check_roles_non_descendant(dag, treatment, mediator, pre)
        if result:
            result = check_response_treatment_stability(dag, treatment, mediator, response, w, pre)
        if not result:
            if fallback is None:
                fallback = result
            continue
        if l2 is not None:
            second = [tuple(l2)]
        else:
            second = subsets(candidates(dag, [*exclude, *pre]), max_size)
        for post in second:
            check = check_l2_non_descendant(dag, treatment, mediator, post)
            if check:
                check = check_response_mediator_stability(dag, treatment, mediator, response, w, pre, post)
            if check:
                return pre, tuple(post)
            if fallback is None:
                fallback = check
    raise NotIdentified(
        f"No covariates L1, L2 make {response!r} stable under interventions on {treatment!r} and {mediator!r}.",
        None if fallback is None else fallback.witness,
    )


def search_nde_roles(
    dag: Dag,
    treatment: str,
    mediator: str,
    response: str,
    roles: Roles,
    max_size: int = DEFAULT_MAX_ADJUST_SIZE,
) -> Roles:
    """
    Complete the unset roles ``W``, ``S``, ``L1``, ``L2`` of a natural-effect query, in that order.

    :raises NotDefined: If no ``W`` makes the natural regime well posed.
    :raises NotIdentified: If a later role cannot be found.
    """
    w = roles.w
    if w is None:
        w = search_w(dag, treatment, mediator, response, max_size)
    else:
        result = check_nde_defined(dag, treatment, mediator, response, w)
        if not result:
            raise NotDefined(
                f"The natural regime on {mediator!r} is not well posed for W={list(w)}.", result.witness
            )
    s = roles.s if roles.s is not None else search_s(dag, treatment, mediator, response, w, max_size)
    if roles.l1 is not None and roles.l2 is not None:
        l1, l2 = roles.l1, roles.l2
    else:
        l1, l2 = search_l(dag, treatment, mediator, response, w, roles.l1, roles.l2, max_size)
    completed = Roles(w=tuple(w), s=tuple(s), l1=tuple(l1), l2=tuple(l2))
    logger.info(f"Natural effect roles: {completed.as_dict()}")
    return completed
