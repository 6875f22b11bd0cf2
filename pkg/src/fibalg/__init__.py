"""Finite categories, parametrized monads and the fibrations of algebras they induce.

Submodules: fincat (categories, functors, limits), monadkit (monads and their
parametrized versions), grothfib (total categories and fibration checks),
limcolim (limits, coproducts, free algebras), recognize (comparison with EM
totals), algkit (groups, actions, semidirect products), dsl (.fib text format)
and cli.
"""

__version__ = "0.1.0"
