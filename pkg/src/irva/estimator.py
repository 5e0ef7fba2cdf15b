"""scikit-learn style wrapper: a polyhedron as a fixed binary classifier.

Nothing is learned from data.  ``fit`` compiles the formula into a
minimized automaton and records the input width; ``predict`` answers
membership exactly for each row.  The point is to let a polyhedron sit in
a pipeline next to learned models, e.g. as a feasibility mask.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .algebra import DEFAULT_DEPTH_CAP, build
from .automaton import decide_member_affine
from .formula import parse


def _exact(x) -> Fraction:
    # Fraction(float) is exact, so binary floats are taken at face value.
    return x if isinstance(x, Fraction) else Fraction(x)


class PolyhedronMembership(ClassifierMixin, BaseEstimator):
    """Classify points by membership in the set defined by ``formula``.

    Parameters
    ----------
    formula : str
        Formula text, e.g. ``"dim 2; x1 >= 1 & x2 < 2"``.
    minimize : bool
        Minimize the automaton (canonical form).  Membership answers do not
        depend on it.
    depth_cap : int
        Bit budget per branch of the product construction.
    """

    def __init__(self, formula="dim 1; true", minimize=True, depth_cap=DEFAULT_DEPTH_CAP):
        self.formula = formula
        self.minimize = minimize
        self.depth_cap = depth_cap

    def fit(self, X=None, y=None):
        f = parse(self.formula)
        self.automaton_ = build(f, depth_cap=self.depth_cap, minimize_result=self.minimize)
        self.n_features_in_ = f.dim
        self.classes_ = np.array([False, True])
        return self

    def _rows(self, X):
        check_is_fitted(self, "automaton_")
        rows = [list(r) for r in (X.tolist() if isinstance(X, np.ndarray) else X)]
        for r in rows:
            if len(r) != self.n_features_in_:
                raise ValueError(f"expected {self.n_features_in_} features, got {len(r)}")
        return rows

    def predict(self, X):
        """Boolean array: True where the row lies in the set."""
        rows = self._rows(X)
        A = self.automaton_
        return np.array([decide_member_affine(A, [_exact(x) for x in r]) for r in rows], dtype=bool)

    def decision_function(self, X):
        """+1 inside, -1 outside."""
        return np.where(self.predict(X), 1, -1)
