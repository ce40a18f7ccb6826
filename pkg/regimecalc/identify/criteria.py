"""
Criteria
--------
Graphical identifiability conditions, each decided by d-separation of a regime indicator
from the variables of interest on a check diagram built by :py:mod:`regimecalc.regimes.surgery`.

Every check returns a :py:class:`~regimecalc.identify.query.CheckResult`; a failed check carries a
:py:class:`~regimecalc.identify.query.Witness` holding an open path of the diagram it was decided on.
"""

import logging
from typing import Collection, Iterable, List, Optional, Sequence, Tuple

from regimecalc.graph.dag import Dag, descendants_of_set, sigma
from regimecalc.graph.separation import find_open_path
from regimecalc.identify.errors import InvalidRoleError
from regimecalc.identify.query import GRAPHICAL_NECESSARY, CheckResult, Condition, Roles, Witness
from regimecalc.regimes.surgery import influence_diagram, surgery
from regimecalc.regimes.types import AtomicRegime, IdleRegime, MediatorRegime, NaturalRegimeSpec

logger = logging.getLogger(__name__)


def separation_check(
    diagram: Dag,
    a: Iterable[str],
    b: Iterable[str],
    given: Iterable[str],
    condition: Condition,
    label: Optional[str] = None,
) -> CheckResult:
    """
    Decide ``a ⊥⊥ b | given`` on ``diagram`` as the outcome of ``condition``.
    Members of ``a`` that are also conditioned on are independent trivially and are skipped.
    """
    given = tuple(dict.fromkeys(given))
    a = [name for name in dict.fromkeys(a) if name not in given]
    b = [name for name in dict.fromkeys(b) if name not in given]
    path = find_open_path(diagram, a, b, given)
    if path is None:
        return CheckResult(passed=True, condition=condition, label=label)
    logger.debug(f"Condition {condition.value} fails: open path {path} given {list(given)}")
    witness = Witness(
        condition=condition,
        path=tuple(path),
        given=given,
        reason=f"{path[0]} and {path[-1]} are d-connected given {list(given)}",
        diagram=diagram,
    )
    return CheckResult(passed=False, condition=condition, witness=witness)


def first_failure(results: Iterable[CheckResult]) -> Optional[CheckResult]:
    return next((result for result in results if not result.passed), None)


def _check_disjoint(role: str, members: Collection[str], forbidden: Collection[str]) -> None:
    clash = sorted(set(members) & set(forbidden))
    if clash:
        raise InvalidRoleError(f"{role} cannot contain {clash}.")


def check_back_door(dag: Dag, treatment: str, response: str, c: Sequence[str]) -> CheckResult:
    """
    Back-door criterion for ``C``: ``C`` contains no descendant of the treatment and
    ``Y ⊥⊥ σ_X | X, C`` once ``σ_X`` points into the treatment.
    Both parts are checked on the diagram in which the treatment keeps its parents and gains ``σ_X``;
    a descendant of the treatment in ``C`` shows up as a directed path from ``σ_X``.

    :raises InvalidRoleError: If ``C`` contains the treatment or the response.
    """
    _check_disjoint("C", c, [treatment, response])
    diagram = influence_diagram(dag, {treatment: IdleRegime()})
    indicator = [sigma(treatment)]
    non_descendant = separation_check(diagram, c, indicator, (), Condition.BACK_DOOR)
    if not non_descendant:
        return non_descendant
    return separation_check(diagram, [response], indicator, [treatment, *c], Condition.BACK_DOOR)


def check_sequential_roles(
    dag: Dag,
    targets: Sequence[str],
    blocks: Sequence[Sequence[str]],
    response: str,
    regimes: Sequence[MediatorRegime],
) -> None:
    """
    Validate a sequential plan: distinct targets, disjoint blocks avoiding targets and response,
    each block ``L_j`` free of descendants of ``X_j, ..., X_K``, and each regime conditioning
    only on earlier targets and covariates observed so far.

    :raises InvalidRoleError: If one of the requirements fails.
    """
    if not targets or len(targets) != len(blocks) or len(targets) != len(regimes):
        raise InvalidRoleError("Targets, blocks and regimes must be non-empty and of equal length.")
    if len(set(targets)) != len(targets):
        raise InvalidRoleError(f"Repeated target in {list(targets)}.")
    if response in targets:
        raise InvalidRoleError(f"Response {response!r} cannot be a target.")
    dag.check_nodes([*targets, response, *(name for block in blocks for name in block)])
    seen: List[str] = []
    for k, block in enumerate(blocks):
        _check_disjoint(f"L_{k + 1}", block, [*targets, response, *seen])
        later = descendants_of_set(dag, targets[k:], include_self=True)
        _check_disjoint(f"L_{k + 1} (descendants of later targets)", block, later)
        seen += list(block)
        cond_set = regimes[k].cond_set or ()
        allowed = set(targets[:k]) | set(seen)
        outside = sorted(set(cond_set) - allowed)
        if outside:
            raise InvalidRoleError(
                f"Regime on {targets[k]!r} conditions on {outside}, which are not observed before it."
            )


def check_simple_stability(
    dag: Dag,
    targets: Sequence[str],
    blocks: Sequence[Sequence[str]],
    response: str,
    regimes: Sequence[MediatorRegime],
) -> CheckResult:
    """
    Simple stability: every block ``L_k`` and finally the response are independent of all
    regime indicators given the covariates and targets observed before them.
    Decided on the diagram giving each target the union of its observational and regime parents.
    """
    diagram = influence_diagram(dag, dict(zip(targets, regimes)))
    indicators = [sigma(target) for target in targets]
    for k, block in enumerate(blocks):
        if not block:
            continue
        past = [*(name for earlier in blocks[:k] for name in earlier), *targets[:k]]
        result = separation_check(diagram, block, indicators, past, Condition.SIMPLE_STABILITY)
        if not result:
            return result
    past = [*(name for block in blocks for name in block), *targets]
    return separation_check(diagram, [response], indicators, past, Condition.SIMPLE_STABILITY)


def check_weak_condition(
    dag: Dag,
    targets: Sequence[str],
    blocks: Sequence[Sequence[str]],
    response: str,
    regimes: Sequence[MediatorRegime],
) -> CheckResult:
    """
    Weak stability, graphical part: for each ``k``, ``Y ⊥⊥ σ_k | X̄_k, L̄_k`` on the diagram in which
    the later targets follow their regimes, the earlier ones stay idle and ``X_k`` gets its union parents.

    A passing result is labelled :py:data:`~regimecalc.identify.query.GRAPHICAL_NECESSARY`.
    """
    for k, target in enumerate(targets):
        later = dict(zip(targets[k + 1 :], regimes[k + 1 :]))  # noqa: E203
        diagram = influence_diagram(surgery(dag, later), {target: regimes[k]})
        past = [*(name for block in blocks[: k + 1] for name in block), *targets[: k + 1]]
        result = separation_check(diagram, [response], [sigma(target)], past, Condition.WEAK_STABILITY)
        if not result:
            return result
    return CheckResult(passed=True, condition=Condition.WEAK_STABILITY, label=GRAPHICAL_NECESSARY)


def check_sequential(
    dag: Dag,
    targets: Sequence[str],
    blocks: Sequence[Sequence[str]],
    response: str,
    regimes: Sequence[MediatorRegime],
) -> CheckResult:
    """Simple stability, falling back to the weak condition; the witness is the simple stability one."""
    simple = check_simple_stability(dag, targets, blocks, response, regimes)
    if simple:
        return simple
    weak = check_weak_condition(dag, targets, blocks, response, regimes)
    return weak if weak else simple


def check_mediator_regime(dag: Dag, treatment: str, mediator: str, regime: MediatorRegime) -> CheckResult:
    """
    The mediator regime shields the mediator from the treatment: ``Z ⊥⊥ σ_X`` once the mediator
    follows ``regime``. An idle regime fails as soon as the mediator descends from the treatment.
    """
    diagram = influence_diagram(surgery(dag, {mediator: regime}), {treatment: IdleRegime()})
    return separation_check(diagram, [mediator], [sigma(treatment)], (), Condition.MEDIATOR_REGIME)


def _natural(w: Sequence[str]) -> NaturalRegimeSpec:
    return NaturalRegimeSpec(w=tuple(w))


def _idle_diagram(dag: Dag, treatment: str, mediator: str) -> Dag:
    return influence_diagram(dag, {treatment: IdleRegime(), mediator: IdleRegime()})


def check_nde_defined(dag: Dag, treatment: str, mediator: str, response: str, w: Sequence[str]) -> CheckResult:
    """
    Whether the natural mediator regime over strata of ``W`` is well posed:

    - ``W`` contains no descendant of treatment or mediator;
    - ``Y ⊥⊥ σ_Z | Z, X, W`` with the treatment set atomically and the mediator
      additionally depending on ``W``, i.e. ``W`` and the treatment block every
      back-door path from the mediator to the response.

    The graph test does not depend on the treatment values.

    :raises InvalidRoleError: If ``W`` contains treatment, mediator or response.
    """
    _check_disjoint("W", w, [treatment, mediator, response])
    indicators = [sigma(treatment), sigma(mediator)]
    result = separation_check(_idle_diagram(dag, treatment, mediator), w, indicators, (), Condition.NDE_DEFINED)
    if not result:
        return result
    diagram = influence_diagram(surgery(dag, {treatment: AtomicRegime(value=0)}), {mediator: _natural(w)})
    return separation_check(
        diagram, [response], [sigma(mediator)], [mediator, treatment, *w], Condition.NDE_DEFINED
    )


def check_roles_non_descendant(dag: Dag, treatment: str, mediator: str, members: Sequence[str]) -> CheckResult:
    """``members`` (``W``, ``S`` and ``L1``) contain no descendant of treatment or mediator."""
    return separation_check(
        _idle_diagram(dag, treatment, mediator),
        members,
        [sigma(treatment), sigma(mediator)],
        (),
        Condition.ROLES_NON_DESCENDANT,
    )


def check_l2_non_descendant(dag: Dag, treatment: str, mediator: str, l2: Sequence[str]) -> CheckResult:
    return separation_check(
        _idle_diagram(dag, treatment, mediator), l2, [sigma(mediator)], (), Condition.L2_NON_DESCENDANT
    )


def check_response_treatment_stability(
    dag: Dag, treatment: str, mediator: str, response: str, w: Sequence[str], l1: Sequence[str]
) -> CheckResult:
    """``Y ⊥⊥ σ_X | X, W, L1`` with the mediator following the natural regime (its parents become ``W``)."""
    diagram = influence_diagram(surgery(dag, {mediator: _natural(w)}), {treatment: IdleRegime()})
    return separation_check(
        diagram, [response], [sigma(treatment)], [treatment, *w, *l1], Condition.RESPONSE_TREATMENT_STABILITY
    )


def check_response_mediator_stability(
    dag: Dag,
    treatment: str,
    mediator: str,
    response: str,
    w: Sequence[str],
    l1: Sequence[str],
    l2: Sequence[str],
) -> CheckResult:
    """``Y ⊥⊥ σ_Z | X, Z, L1, L2`` with the treatment idle and the mediator depending on its parents and ``W``."""
    diagram = influence_diagram(dag, {mediator: _natural(w)})
    return separation_check(
        diagram,
        [response],
        [sigma(mediator)],
        [treatment, mediator, *l1, *l2],
        Condition.RESPONSE_MEDIATOR_STABILITY,
    )


def check_zx_backdoor(dag: Dag, treatment: str, mediator: str, w: Sequence[str], s: Sequence[str]) -> CheckResult:
    """
    ``S`` identifies the effect of the treatment on the mediator within strata of ``W``:
    ``W`` and ``S`` are non-descendants of treatment and mediator, and ``Z ⊥⊥ σ_X | X, W, S``.

    :raises InvalidRoleError: If ``W`` or ``S`` contain treatment or mediator.
    """
    _check_disjoint("W", w, [treatment, mediator])
    _check_disjoint("S", s, [treatment, mediator])
    result = check_roles_non_descendant(dag, treatment, mediator, [*w, *s])
    if not result:
        return result
    diagram = influence_diagram(dag, {treatment: IdleRegime()})
    return separation_check(
        diagram, [mediator], [sigma(treatment)], [treatment, *w, *s], Condition.MEDIATOR_BACK_DOOR
    )


def check_nde_roles(roles: Roles, treatment: str, mediator: str, response: str) -> Tuple[Tuple[str, ...], ...]:
    """
    Validate complete roles of an observational natural-effect query and return ``(W, S, L1, L2)``.

    :raises InvalidRoleError: If a role is unset, contains treatment, mediator or response,
        or ``W`` is not covered by ``L1`` and ``L2``.
    """
    sets = (roles.w, roles.s, roles.l1, roles.l2)
    if any(role is None for role in sets):
        raise InvalidRoleError("Roles W, S, L1 and L2 must all be set.")
    for name, members in zip(("W", "S", "L1", "L2"), sets):
        _check_disjoint(name, members, [treatment, mediator, response])
    w, s, l1, l2 = sets
    uncovered = sorted(set(w) - set(l1) - set(l2))
    if uncovered:
        raise InvalidRoleError(f"W must be a subset of L1 and L2; {uncovered} are not covered.")
    return w, s, l1, l2


def check_nde_observational(
    dag: Dag, treatment: str, mediator: str, response: str, roles: Roles
) -> Tuple[CheckResult, ...]:
    """
    All conditions under which the natural direct effect is identified from observational data:
    well-posedness of the natural regime, then the five role conditions in order.

    :return: The results in order, up to and including the first failure;
        use :py:func:`first_failure` to pick the witness.
    :raises InvalidRoleError: As :py:func:`check_nde_roles`.
    """
    w, s, l1, l2 = check_nde_roles(roles, treatment, mediator, response)
    checks = (
        lambda: check_nde_defined(dag, treatment, mediator, response, w),
        lambda: check_roles_non_descendant(dag, treatment, mediator, [*w, *s, *l1]),
        lambda: check_l2_non_descendant(dag, treatment, mediator, l2),
        lambda: check_response_treatment_stability(dag, treatment, mediator, response, w, l1),
        lambda: check_response_mediator_stability(dag, treatment, mediator, response, w, l1, l2),
        lambda: check_zx_backdoor(dag, treatment, mediator, w, s),
    )
    results: List[CheckResult] = []
    for check in checks:
        results.append(check())
        if not results[-1]:
            break
    return tuple(results)


def check_observable_roles(dag: Dag, roles: Roles) -> CheckResult:
    """
    Every member of the given role sets is an observable variable.
    Unset roles pass; names unknown to ``dag`` are left to the structural checks.
    """
    latent = {}
    for field, members in roles.model_dump().items():
        hidden = [name for name in members or () if name in dag and dag.is_latent(name)]
        if hidden:
            latent[field.upper()] = hidden
    if not latent:
        return CheckResult(passed=True, condition=Condition.OBSERVABLE_ROLES)
    nodes = tuple(sorted({name for hidden in latent.values() for name in hidden}))
    witness = Witness(
        condition=Condition.OBSERVABLE_ROLES,
        nodes=nodes,
        reason=f"latent role member(s): {latent}",
    )
    return CheckResult(passed=False, condition=Condition.OBSERVABLE_ROLES, witness=witness)
