import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anholonomy.circuit import OutOfRange, anholonomic_family
from anholonomy.holonomy import (
    GaugeConnection,
    GaugeError,
    connection_analytic,
    connection_fd,
    connection_parts,
    gamma_mp_from_holonomy,
    holonomy_analytic,
    holonomy_numeric,
)
from anholonomy.qmatrix import Y, expm_skew, hermiticity_error, unitarity_error
from anholonomy.spectrum import Label, eigenbasis, permutation_record, sigma_phase
from anholonomy.tracker import ZeroEntry, sweep

TWO_PI = 2 * np.pi


def _inf_norm(a):
    return float(np.abs(a).max())


def test_one_qubit_connection():
    assert np.array_equal(connection_analytic(1).matrix, Y / 4)


@pytest.mark.parametrize("n", range(1, 9))
def test_connection_hermitian_zero_diagonal(n):
    conn = connection_analytic(n).check()
    assert hermiticity_error(conn.matrix) < 1e-9
    assert np.abs(conn.diagonal).max() < 1e-8


def test_gauge_check_fails_loudly():
    with pytest.raises(GaugeError):
        GaugeConnection(1, np.diag([0.1, -0.1]).astype(complex)).check()
    with pytest.raises(GaugeError):
        GaugeConnection(1, np.array([[0, 1], [0, 0]], dtype=complex)).check()


def test_connection_range():
    with pytest.raises(OutOfRange):
        connection_analytic(11)
    with pytest.raises(ValueError):
        connection_parts(1)


@pytest.mark.parametrize("lam", [0.0, 0.9, 2.2, 5.5])
def test_fd_one_qubit(lam):
    assert _inf_norm(connection_fd(1, lam).matrix - Y / 4) < 1e-8


def test_fd_two_qubits_at_random_points(rng):
    a = connection_analytic(2).matrix
    for lam in rng.uniform(0, TWO_PI, size=8):
        assert _inf_norm(connection_fd(2, lam).matrix - a) < 1e-6


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_fd_antihermitian_residual(n):
    assert connection_fd(n, 1.7, h=1e-4).antihermitian_residual < 1e-6


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_fd_lambda_independent(n):
    a, b = connection_fd(n, 0.3).matrix, connection_fd(n, 4.1).matrix
    assert _inf_norm(a - b) < 1e-6


def test_fd_richardson_is_tighter():
    a = connection_analytic(3).matrix
    plain = _inf_norm(connection_fd(3, 1.1, h=1e-3).matrix - a)
    rich = _inf_norm(connection_fd(3, 1.1, h=1e-3, richardson=True).matrix - a)
    assert rich < plain


def test_fd_step_bounds():
    for h in (1e-8, 0.1):
        with pytest.raises(ValueError):
            connection_fd(1, 0.0, h=h)


@pytest.mark.parametrize("n", range(2, 9))
def test_connection_parts_commute(n):
    ah, al = connection_parts(n)
    assert _inf_norm(ah @ al - al @ ah) < 1e-9
    assert _inf_norm(ah + al - connection_analytic(n).matrix) < 1e-15


def test_one_qubit_holonomy():
    assert _inf_norm(holonomy_analytic(1) - (-1j * Y)) < 1e-9


@pytest.mark.parametrize("n", range(1, 9))
def test_holonomy_structure(n):
    m = holonomy_analytic(n)
    rec = permutation_record(n)
    s = rec.matrix()
    assert unitarity_error(m) < 1e-9
    assert _inf_norm(np.abs(m) - s) < 1e-9
    # entries are S[s(m), m] times the sign sigma(m)
    sig = np.array([sigma_phase(n, k) for k in range(2**n)])
    assert _inf_norm(m - s * sig[None, :]) < 1e-9


@pytest.mark.parametrize("n", range(1, 9))
def test_halfway_property(n):
    power = np.linalg.matrix_power(holonomy_analytic(n), 2**n)
    assert np.abs(np.diag(power) + 1).max() < 1e-6
    assert _inf_norm(power + np.eye(2**n)) < 1e-6


def test_holonomy_matches_fd_connection_exponential():
    # independent route: exponentiate the finite-difference connection
    a_fd = connection_fd(2, 0.7, richardson=True).matrix
    assert _inf_norm(expm_skew(a_fd, TWO_PI) - holonomy_analytic(2)) < 1e-6


def test_numeric_holonomy_one_qubit():
    m = holonomy_numeric(sweep(anholonomic_family(1), 4096, 1))
    assert _inf_norm(m - (-1j * Y)) < 1e-4


def test_numeric_holonomy_four_qubits():
    m = holonomy_numeric(sweep(anholonomic_family(4), 4096, 1))
    assert _inf_norm(m - holonomy_analytic(4)) < 1e-3


@pytest.mark.xfail(
    strict=True,
    reason="the Pancharatnam transport of this family is exact at every grid size, "
    "both errors sit at roundoff so their ratio carries no convergence order",
)
def test_numeric_holonomy_first_order_convergence():
    exact = holonomy_analytic(1)
    coarse = _inf_norm(holonomy_numeric(sweep(anholonomic_family(1), 64, 1)) - exact)
    fine = _inf_norm(holonomy_numeric(sweep(anholonomic_family(1), 128, 1)) - exact)
    assert coarse / fine >= 1.8


@pytest.mark.parametrize("steps", [64, 128, 512])
def test_discrete_transport_is_exact(steps):
    # the measured fact behind the xfail above
    err = _inf_norm(holonomy_numeric(sweep(anholonomic_family(2), steps, 1)) - holonomy_analytic(2))
    assert err < 1e-12


def test_numeric_holonomy_other_base_point():
    lam0 = 2.5
    flow = sweep(anholonomic_family(2), 256, 1, lambda0=lam0)
    assert _inf_norm(holonomy_numeric(flow, eigenbasis(2, lam0)) - holonomy_analytic(2)) < 1e-6


def test_gamma_one_qubit_by_hand():
    m = -1j * Y  # [[0, -1], [1, 0]]
    assert m[1, 0] * m[0, 1] == -1
    assert gamma_mp_from_holonomy(Label(1, 0), m, permutation_record(1)) == pytest.approx(-1)


@pytest.mark.parametrize("n", range(1, 7))
def test_gamma_from_analytic_holonomy(n):
    m = holonomy_analytic(n)
    rec = permutation_record(n)
    values = [gamma_mp_from_holonomy(Label(n, k), m, rec) for k in range(2**n)]
    assert np.abs(np.array(values) + 1).max() < 1e-6


@settings(max_examples=10, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, 2**n - 1))))
def test_gamma_start_independent(nm):
    n, m0 = nm
    rec = permutation_record(n)
    m = holonomy_analytic(n)
    assert gamma_mp_from_holonomy(m0, m, rec) == pytest.approx(gamma_mp_from_holonomy(0, m, rec))


def test_gamma_zero_entry():
    with pytest.raises(ZeroEntry):
        gamma_mp_from_holonomy(0, np.eye(2, dtype=complex), permutation_record(1))


def test_gamma_from_numeric_holonomy():
    m = holonomy_numeric(sweep(anholonomic_family(3), 512, 1))
    assert abs(gamma_mp_from_holonomy(0, m, permutation_record(3)) + 1) < 1e-6
