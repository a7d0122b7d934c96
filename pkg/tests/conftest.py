import numpy as np
import pytest

from morrow.core import Model, SolverOptions, TrialSubspace


@pytest.fixture
def tight_opts():
    # equivalence checks need the nonlinear solves converged to roundoff
    return SolverOptions(newton_abs_tol=1e-13, newton_rel_tol=1e-13,
                         max_iters=100)


def linear_model(a, x_init=None, forcing=None):
    a = np.asarray(a, float)
    n = a.shape[0]
    if x_init is None:
        x_init = np.ones(n)

    def velocity(x, t):
        fx = a @ x
        if forcing is not None:
            fx = fx + forcing(t)
        return fx

    return Model(dim=n, velocity=velocity, jacobian=lambda x, t: a,
                 initial_state=np.asarray(x_init, float))


def random_subspace(n, p, seed=0, reference=None):
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((n, p)))
    if reference is None:
        reference = np.zeros(n)
    return TrialSubspace(basis=q, reference=np.asarray(reference, float))
