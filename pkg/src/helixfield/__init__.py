"""Classical gauge-field toolkit for the triple-helix innovation model.

Modules: ``symmetry`` (SO(3)/SU(2)), ``coords`` (actor/function frames),
``waves`` (free innovation waves), ``field_dh`` (Abelian model),
``field_th`` (non-Abelian model), ``fractal`` (vertex trees) and ``cli``.
"""

__version__ = "0.1.0"
