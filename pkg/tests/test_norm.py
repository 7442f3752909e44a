import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alpha12.families import NonPositiveProfile, from_L, from_phi, mroot, riemannian
from alpha12.norm import (
    DatumDecomposition,
    IndefiniteTensor,
    cartan_tensor,
    eval_norm,
    fundamental_tensor,
    hessian_fd_oracle,
    is_riemannian,
    log_det_gradient_fd,
    log_det_hessian,
    normalize_datum,
    principal_curvatures,
    random_block_rotation,
    validate_generating,
)

from conftest import DIMS, SHIPPED_FAMILIES, unit_directions

D42 = DatumDecomposition(4, 2)


# ----------------------------------------------------------------- validity
def test_constant_profile_is_valid_with_unit_margin():
    rep = validate_generating(from_phi("1"))
    assert rep.valid and rep.min_margin == pytest.approx(1.0, abs=1e-12)


def test_sqrt_profile_margin():
    rep = validate_generating(from_phi("sqrt(1 + s^2)"))
    assert rep.valid
    assert rep.min_margin == pytest.approx(2 / 2**1.5, abs=1e-9)
    assert rep.argmin == (1.0, 1.0)


def test_concave_profile_is_invalid():
    rep = validate_generating(from_phi("1 - 0.9*s^2"))
    assert not rep.valid
    assert rep.min_margin == pytest.approx(-0.8, abs=1e-12)
    # minimum sits at s = 0 on the b = 1 edge
    assert rep.argmin == (0.0, 1.0) and rep.argmin_form == "phi"


@pytest.mark.parametrize("m", [2, 3])
def test_mroot_family_is_valid(m):
    assert validate_generating(mroot(m)).valid


@pytest.mark.parametrize("name", sorted(SHIPPED_FAMILIES))
def test_convexity_identity_between_forms(name):
    assert validate_generating(SHIPPED_FAMILIES[name]()).identity_residual < 1e-10


def test_validate_rejects_tiny_grid_and_non_positive_profile():
    with pytest.raises(ValueError):
        validate_generating(mroot(2), grid_size=2)
    with pytest.raises(NonPositiveProfile):
        validate_generating(from_phi("1 - 2*s^2"))


def test_validity_matches_positive_definiteness():
    good, bad = mroot(2), from_phi("1 - 0.9*s^2")
    ys = unit_directions(D42, 1000, seed=3)
    for y in ys:
        assert np.linalg.eigvalsh(fundamental_tensor(good, D42, y).g).min() > 0
    failures = 0
    for y in ys:
        try:
            fundamental_tensor(bad, D42, y)
        except IndefiniteTensor:
            failures += 1
    assert failures > 0


# ---------------------------------------------------------- normalisation
def test_normalize_already_normalized_is_identity():
    fam = from_phi("1")
    out, datum = normalize_datum(fam, D42)
    assert out is fam and datum.normalized


def test_normalize_rejects_invalid_family():
    with pytest.raises(ValueError):
        normalize_datum(from_phi("1 - 0.9*s^2"), D42)


def test_normalize_mroot_two(rng):
    fam = mroot(2)
    assert float(fam.phi(0.0)) == pytest.approx(np.sqrt(2))
    assert float(fam.phi(1.0)) == pytest.approx(np.sqrt(2))
    new, datum = normalize_datum(fam, D42)
    assert datum.normalized
    assert float(new.phi(0.0)) == pytest.approx(1.0, abs=1e-12)
    assert float(new.phi(1.0)) == pytest.approx(1.0, abs=1e-12)
    u, v = 0.3, 0.7
    expected = (u + v) / 2 + np.sqrt(u * u + v * v) / 2
    assert float(new.L(u, v)) == pytest.approx(expected, abs=1e-12)
    for _ in range(50):
        y = rng.standard_normal(6)
        assert eval_norm(new, datum, y) == pytest.approx(eval_norm(fam, D42, y), abs=1e-12)
    # F equals alpha1 on V1 and alpha2 on V2 after normalising
    e1 = datum.frame[:, 0] * 3.0
    assert eval_norm(new, datum, e1) == pytest.approx(3.0, abs=1e-12)


def test_normalize_rejects_non_positive_profile():
    with pytest.raises(NonPositiveProfile):
        normalize_datum(from_phi("s - 0.5"), D42)


# --------------------------------------------------------------- evaluation
def test_eval_norm_examples():
    lin = from_L("u + v")
    y = np.array([3.0, 0, 0, 0, 4.0, 0])
    assert eval_norm(lin, D42, y) == pytest.approx(5.0)
    fam = mroot(2)
    assert eval_norm(fam, D42, np.array([1.0, 0, 0, 0, 0, 0])) == pytest.approx(np.sqrt(2))
    assert eval_norm(fam, D42, np.array([1.0, 0, 0, 0, 1.0, 0])) == pytest.approx(np.sqrt(2 + np.sqrt(2)))
    with pytest.raises(ValueError):
        eval_norm(fam, D42, np.zeros(6))


@given(st.floats(0.01, 100), st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_norm_is_positively_homogeneous(lam, seed):
    y = np.random.default_rng(seed).standard_normal(6)
    fam = mroot(3)
    assert eval_norm(fam, D42, lam * y) == pytest.approx(lam * eval_norm(fam, D42, y), rel=1e-12)


def test_datum_validation():
    with pytest.raises(ValueError):
        DatumDecomposition(2, 3)
    with pytest.raises(ValueError):
        DatumDecomposition(3, 1)
    assert DatumDecomposition(2, 2).n == 4


# ------------------------------------------------------ principal curvatures
def test_principal_curvatures_of_round_sphere():
    for s in np.linspace(0, 1, 11):
        assert principal_curvatures(from_phi("1"), D42, s) == pytest.approx((1.0, 1.0, 1.0))


def test_principal_curvature_sqrt_profile_at_zero():
    k_s, _, _ = principal_curvatures(from_phi("sqrt(1 + s^2)"), D42, 0.0)
    assert k_s == pytest.approx(2.0)


def test_principal_curvatures_positive_for_mroot():
    for s in np.linspace(0, 1, 101):
        assert min(principal_curvatures(mroot(2), D42, s)) > 0
    with pytest.raises(ValueError):
        principal_curvatures(mroot(2), D42, 1.5)


# ------------------------------------------------------------------ tensors
def test_linear_tensor_is_constant_diagonal(rng):
    lin = from_L("u + 2*v")
    for _ in range(10):
        tb = fundamental_tensor(lin, D42, rng.standard_normal(6))
        assert np.allclose(tb.g, np.diag([1, 1, 1, 1, 2, 2]), atol=1e-12)
        ct = cartan_tensor(lin, D42, rng.standard_normal(6))
        assert np.abs(ct.C).max() < 1e-14 and np.abs(ct.I).max() < 1e-14


def test_mroot_tensor_in_adapted_position():
    y = np.array([1.0, 0, 0, 0, 0, 1.0])
    tb = fundamental_tensor(mroot(2), D42, y)
    assert tb.g[0, 0] == pytest.approx(1 + np.sqrt(2), abs=1e-12)
    assert tb.g[0, 5] == pytest.approx(-1 / np.sqrt(2), abs=1e-12)
    ct = cartan_tensor(mroot(2), D42, y)
    for i in (1, 2, 3):
        assert ct.C[i, i, 0] == pytest.approx(2**-1.5, abs=1e-12)


@pytest.mark.parametrize("dims", DIMS)
@pytest.mark.parametrize("name", sorted(SHIPPED_FAMILIES))
def test_tensor_identities(dims, name):
    fam = SHIPPED_FAMILIES[name]()
    datum = DatumDecomposition(*dims)
    for y in unit_directions(datum, 20, seed=7):
        tb = fundamental_tensor(fam, datum, y)
        assert np.abs(tb.g @ tb.g_inv - np.eye(datum.n)).max() < 1e-10
        assert y @ tb.g @ y == pytest.approx(eval_norm(fam, datum, y) ** 2, abs=1e-10)
        C = cartan_tensor(fam, datum, y).C
        for perm in [(1, 0, 2), (0, 2, 1), (2, 1, 0)]:
            assert np.abs(C - C.transpose(perm)).max() < 1e-12
        assert np.abs(C @ y).max() < 1e-10


def test_tensor_degrees(rng):
    fam = mroot(2)
    y = rng.standard_normal(6)
    for lam in (0.5, 3.0):
        assert np.abs(fundamental_tensor(fam, D42, lam * y).g - fundamental_tensor(fam, D42, y).g).max() < 1e-10
        C1 = cartan_tensor(fam, D42, lam * y).C
        assert np.abs(C1 - cartan_tensor(fam, D42, y).C / lam).max() < 1e-10


def test_rotation_choice_does_not_matter(rng):
    """Conjugating by block rotations commutes with the closed forms."""
    fam = mroot(3)
    y = rng.standard_normal(6)
    tb = fundamental_tensor(fam, D42, y)
    for _ in range(5):
        R = random_block_rotation(D42, rng)
        tr = fundamental_tensor(fam, D42, R @ y)
        assert np.abs(tr.g - R @ tb.g @ R.T).max() < 1e-10


def test_cartan_tensor_matches_difference_of_g(rng):
    fam = mroot(2)
    y = rng.standard_normal(6)
    C = cartan_tensor(fam, D42, y).C
    h = 1e-6
    for k in range(6):
        e = np.zeros(6)
        e[k] = h
        dg = (fundamental_tensor(fam, D42, y + e).g - fundamental_tensor(fam, D42, y - e).g) / (2 * h)
        assert np.abs(0.5 * dg - C[:, :, k]).max() < 1e-7


def test_boundary_direction_has_no_mean_torsion():
    ct = cartan_tensor(mroot(2), D42, np.array([1.0, 0.5, 0, 0, 0, 0]))
    assert ct.boundary and ct.I is None and ct.C is not None


# ------------------------------------------------------------------ oracles
def test_hessian_oracle_on_linear_family():
    lin = from_L("u + 2*v")
    for y in unit_directions(D42, 20, seed=1):
        fd = hessian_fd_oracle(lin, D42, y, step=1e-5)
        assert not fd.one_sided
        assert np.abs(fd.hessian - np.diag([1, 1, 1, 1, 2, 2])).max() < 1e-8


def test_hessian_oracle_matches_closed_form():
    fam = mroot(2)
    worst = 0.0
    for y in unit_directions(D42, 100, seed=2):
        g = fundamental_tensor(fam, D42, y).g
        worst = max(worst, np.abs(hessian_fd_oracle(fam, D42, y).hessian - g).max() / np.abs(g).max())
    assert worst < 1e-6


def test_hessian_oracle_boundary_and_step_checks():
    y = np.array([1.0, 0, 0, 0, 0, 0])
    assert hessian_fd_oracle(mroot(2), D42, y).one_sided
    with pytest.raises(ValueError):
        hessian_fd_oracle(mroot(2), D42, y, step=0.1)


def test_log_det_values_and_invariance(rng):
    lin = from_L("u + 2*v")
    assert log_det_hessian(lin, D42, rng.standard_normal(6)) == pytest.approx(np.log(2), abs=1e-12)
    fam = mroot(2)
    y = rng.standard_normal(6)
    base = log_det_hessian(fam, D42, y)
    for _ in range(100):
        R = random_block_rotation(D42, rng)
        assert abs(log_det_hessian(fam, D42, R @ y) - base) < 1e-12


def test_log_det_gradient_matches_mean_torsion():
    fam = mroot(2)
    worst = 0.0
    for y in unit_directions(D42, 100, seed=4):
        worst = max(worst, np.abs(log_det_gradient_fd(fam, D42, y) - cartan_tensor(fam, D42, y).I).max())
    assert worst < 1e-6


def test_is_riemannian():
    assert is_riemannian(from_L("u + 2*v"), D42)
    assert not is_riemannian(mroot(2), D42)
    assert is_riemannian(from_phi("sqrt(1 + 3*s^2)"), D42)
    assert is_riemannian(riemannian(2, 5), D42)


def test_frame_coordinates_are_respected(rng):
    """A non-trivial frame only changes coordinates, not values."""
    Q, _ = np.linalg.qr(rng.standard_normal((6, 6)))
    datum = DatumDecomposition(4, 2, Q)
    fam = mroot(2)
    z = rng.standard_normal(6)
    assert eval_norm(fam, datum, Q @ z) == pytest.approx(eval_norm(fam, D42, z))
    assert log_det_hessian(fam, datum, Q @ z) == pytest.approx(log_det_hessian(fam, D42, z))
