import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from sextic_cm import linalg
from sextic_cm.errors import Indeterminate, NotPrincipal, TailBoundFailure
from sextic_cm.periods import (
    _act,
    compose,
    frobenius_basis,
    is_symplectic,
    siegel_reduce,
    standard_J,
)
from sextic_cm import theta as th
from sextic_cm.theta import (
    DECOMPOSABLE,
    HYPERELLIPTIC,
    PLANE_QUARTIC,
    ThetaCharacteristic,
    characteristics,
    even_characteristics,
    theta_constant,
    theta_constants,
    vanishing_even_count,
    verdict_of_count,
)

J = standard_J(3)


def unimodular6():
    ops = st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5), st.integers(-2, 2)), min_size=1, max_size=10)

    def build(ops):
        U = linalg.identity(6)
        for i, j, c in ops:
            if i != j:
                U[i] = [a + c * b for a, b in zip(U[i], U[j])]
        return U

    return ops.map(build)


@settings(max_examples=40, deadline=None)
@given(unimodular6())
def test_frobenius_basis_of_transformed_form(U):
    E = linalg.matmul(linalg.matmul(linalg.transpose(U), J), U)
    T = frobenius_basis(E)
    assert linalg.matmul(linalg.matmul(linalg.transpose(T), E), T) == J
    assert abs(linalg.det_bareiss(T)) == 1


def test_frobenius_rejects_non_principal_form():
    E = [[2 * x for x in r] for r in J]
    with pytest.raises(NotPrincipal):
        frobenius_basis(E)


def _mat(rows):
    return mpmath.matrix(rows)


def test_genus1_characteristics():
    assert len(characteristics()) == 64
    assert len(even_characteristics()) == 36
    assert ThetaCharacteristic((1, 1, 0), (1, 1, 0)).even
    assert not ThetaCharacteristic((1, 0, 0), (1, 0, 0)).even


def test_theta_at_iI3():
    with mpmath.workdps(80):
        tau = _mat([[1j, 0, 0], [0, 1j, 0], [0, 0, 1j]])
        v, err = theta_constant(ThetaCharacteristic((0, 0, 0), (0, 0, 0)), tau, 60)
        oracle = mpmath.jtheta(3, 0, mpmath.exp(-mpmath.pi)) ** 3
        assert abs(v - oracle) < mpmath.mpf(10) ** -55
        assert mpmath.nstr(v.real, 6) == "1.28236"
    verdict = vanishing_even_count(tau, 60, mpmath.mpf("1e-30"))
    assert verdict.count == 9 and verdict.verdict == DECOMPOSABLE


def test_diagonal_tau_factorises():
    """theta[eps, delta] at diag(t1, t2, t3) is a product of genus-1 values."""
    ts = [mpmath.mpc(0.1, 1.1), mpmath.mpc(-0.3, 0.9), mpmath.mpc(0.45, 1.4)]
    with mpmath.workdps(60):
        tau = _mat([[ts[i] if i == j else 0 for j in range(3)] for i in range(3)])
        vals = theta_constants(tau, 40)

        def g1(e, d, t):
            q = mpmath.expjpi(t)
            return {(0, 0): mpmath.jtheta(3, 0, q), (0, 1): mpmath.jtheta(4, 0, q),
                    (1, 0): mpmath.jtheta(2, 0, q), (1, 1): 0}[(e, d)]

        for c, (v, _) in vals.items():
            ref = 1
            for e, d, t in zip(c.epsilon, c.delta, ts):
                ref *= g1(e, d, t)
            assert abs(v - ref) < mpmath.mpf(10) ** -38


def test_odd_constants_are_zero():
    tau = _mat([[1j, 0.2, 0], [0.2, 1.3j, 0.1], [0, 0.1, 1.1j]])
    for c in characteristics():
        if not c.even:
            v, err = theta_constant(c, tau, 30)
            assert v == 0 and err == 0


def test_minus_conjugate_preserves_magnitudes():
    with mpmath.workdps(50):
        tau = _mat([[mpmath.mpc(0.2, 1.2), 0.3, mpmath.mpc(-0.1, 0.2)],
                    [0.3, mpmath.mpc(-0.4, 1.5), 0.25],
                    [mpmath.mpc(-0.1, 0.2), 0.25, mpmath.mpc(0.1, 1.3)]])
        tau2 = _mat([[-tau[i, j].conjugate() for j in range(3)] for i in range(3)])
        a, b = theta_constants(tau, 30), theta_constants(tau2, 30)
        for c in a:
            assert abs(abs(a[c][0]) - abs(b[c][0])) < mpmath.mpf(10) ** -28


def test_verdict_mapping():
    assert verdict_of_count(1) == HYPERELLIPTIC
    assert verdict_of_count(0) == PLANE_QUARTIC
    assert verdict_of_count(2) == DECOMPOSABLE


def test_indeterminate_window(monkeypatch):
    tau = _mat([[1j, 0, 0], [0, 1j, 0], [0, 0, 1j]])
    fake = {c: (mpmath.mpf(1), mpmath.mpf(0)) for c in even_characteristics()}
    fake[even_characteristics()[3]] = (mpmath.mpf("1e-45"), mpmath.mpf(0))
    monkeypatch.setattr(th, "theta_constants", lambda tau, precision, chars=None: fake)
    with pytest.raises(Indeterminate):
        vanishing_even_count(tau, 100, mpmath.mpf("1e-50"))


def test_tail_bound_needs_positive_definite():
    tau = _mat([[1j, 0, 0], [0, -1j, 0], [0, 0, 1j]])
    with pytest.raises(TailBoundFailure):
        theta_constants(tau, 30)


def _random_sp6(rng, steps=3):
    """Product of translations, GL3 changes and a coordinate inversion."""
    I3, Z3 = linalg.identity(3), [[0] * 3 for _ in range(3)]

    def block(A, B, C, D):
        return [A[i] + B[i] for i in range(3)] + [C[i] + D[i] for i in range(3)]

    M = linalg.identity(6)
    for _ in range(steps):
        kind = rng.randrange(3)
        if kind == 0:
            B = [[0] * 3 for _ in range(3)]
            i, j = rng.randrange(3), rng.randrange(3)
            B[i][j] = B[j][i] = rng.choice((-1, 1))
            N = block(I3, B, Z3, I3)
        elif kind == 1:
            U = linalg.identity(3)
            i, j = rng.sample(range(3), 2)
            U[i][j] = rng.choice((-1, 1))
            Uinv = [[int(x) for x in r] for r in linalg.inverse_fraction(U)]
            N = block(linalg.transpose(U), Z3, Z3, Uinv)
        else:
            k = rng.randrange(3)
            A = [[int(i == j and i != k) for j in range(3)] for i in range(3)]
            B = [[-int(i == j == k) for j in range(3)] for i in range(3)]
            C = [[int(i == j == k) for j in range(3)] for i in range(3)]
            N = block(A, B, C, A)
        M = linalg.matmul(N, M)
    return M


def test_random_sp6_is_symplectic():
    import random

    rng = random.Random(5)
    for _ in range(20):
        assert is_symplectic(_random_sp6(rng, 5))


def test_siegel_reduction_certificate():
    import random

    rng = random.Random(2)
    with mpmath.workdps(60):
        tau0 = _mat([[mpmath.mpc(0.1, 1.2), 0.3, 0.1], [0.3, mpmath.mpc(0.2, 1.1), 0.2], [0.1, 0.2, mpmath.mpc(-0.1, 1.4)]])
        for _ in range(5):
            M = _random_sp6(rng, 4)
            tau = _act(_mat(M), tau0)
            red = siegel_reduce(tau, 40)
            C = compose(red.certificate)
            assert is_symplectic(C)
            back = _act(_mat(C), tau)
            assert mpmath.mnorm(back - red.tau, 1) < mpmath.mpf(10) ** -30
            t = red.tau
            assert abs(t[0, 0]) >= 1 - mpmath.mpf(10) ** -20
            assert all(abs(t[i, j].real) <= 0.5 + 1e-20 for i in range(3) for j in range(3))
            Y = _mat([[t[i, j].imag for j in range(3)] for i in range(3)])
            mpmath.cholesky(Y)
            assert Y[0, 0] <= Y[1, 1] + 1e-20 <= Y[2, 2] + 2e-20
