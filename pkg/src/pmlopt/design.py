"""Single entry point for mechanism design.

:func:`design` dispatches to a closed form, the lift LP or the brute-force
oracle and wraps the result in a :class:`~pmlopt.core.DesignReport`.
"""

from __future__ import annotations

from .closed_form import binary_optimal, high_privacy_optimal, uniform_optimal
from .core import DesignReport, Method, Prior
from .errors import MethodPrecondition, NegativeEpsilon
from .leakage import epsilon_m, region_table
from .lp import lp_optimal
from .polytope import MAX_N, oracle_optimum
from .utility import ColumnUtility, UtilityKind, mechanism_utility

AUTO = "auto"


def choose_method(prior: Prior, eps: float) -> Method:
    """Method picked by ``auto``: binary, then high-privacy, then uniform, else LP."""
    if prior.n == 2:
        return Method.BINARY
    if region_table(prior).region_of(eps) == 1:
        return Method.HIGH_PRIVACY
    if prior.is_uniform():
        return Method.UNIFORM
    return Method.LP


def check_preconditions(prior: Prior, eps: float, method: Method) -> None:
    """Raise :class:`MethodPrecondition` if ``method`` cannot be used."""
    if method is Method.BINARY and prior.n != 2:
        raise MethodPrecondition(f"binary method needs N = 2, got N = {prior.n}")
    if method is Method.HIGH_PRIVACY:
        eps_1 = region_table(prior).upper(1)
        if region_table(prior).region_of(eps) != 1:
            raise MethodPrecondition(f"high_privacy method needs eps < eps_1 = {eps_1:.12g}, got {eps:.12g}")
    if method is Method.UNIFORM and not prior.is_uniform(1e-9):
        raise MethodPrecondition("uniform method needs a uniform prior")
    if method is Method.ORACLE and prior.n > MAX_N:
        raise MethodPrecondition(f"oracle method is limited to N <= {MAX_N}, got N = {prior.n}")


def design(prior: Prior, eps: float, method: str | Method = AUTO,
           utility: str | UtilityKind = UtilityKind.MUTUAL_INFORMATION) -> DesignReport:
    """Design an ``eps``-PML mechanism for ``prior``.

    Parameters
    ----------
    prior : Prior
    eps : float
        Leakage bound in nats; values at or above ``eps_max`` give the identity.
    method : {"auto", "binary", "high_privacy", "uniform", "lp", "oracle"}
    utility : {"mi", "tv"} or UtilityKind
        Utility to maximize (LP and oracle) and to report.

    Raises
    ------
    MethodPrecondition
        If an explicitly requested method does not apply.
    NegativeEpsilon
        If ``eps < 0``.
    """
    if not eps >= 0:
        raise NegativeEpsilon(f"eps must be non-negative, got {eps}")
    kind = UtilityKind.parse(utility) if isinstance(utility, str) else utility
    u = ColumnUtility(kind, prior)
    m = choose_method(prior, eps) if method == AUTO else Method(method)
    check_preconditions(prior, eps, m)
    if m is Method.LP:
        return lp_optimal(prior, eps, u)
    if m is Method.ORACLE:
        return oracle_optimum(prior, eps, u)
    if m is Method.BINARY:
        mech = binary_optimal(prior, eps)
    elif m is Method.HIGH_PRIVACY:
        mech = high_privacy_optimal(prior, eps)
    else:
        mech = uniform_optimal(prior.n, eps)
    return DesignReport(
        mechanism=mech,
        epsilon_requested=eps,
        epsilon_achieved=epsilon_m(mech, prior),
        utility=mechanism_utility(u, mech),
        method=m,
        prior=prior,
        diagnostics={"region": region_table(prior).region_of(eps)},
    )
