"""Adjointable operators, multipliers, Berezin transform and symbol recovery."""

import numpy as np
import pytest

from rkmod import (
    AdjointableOp,
    AlgebraElement,
    ModuleSpace,
    MultiplierSymbol,
    NotAMultiplierError,
    NotInvertibleError,
    berezin,
    evaluate,
    inner_product,
    kernel_from_features,
    multiplication_operator,
    multiplier_adjoint_check,
    op_distance,
    operator_norm,
    recover_symbol,
    vector_norm,
)
from rkmod.kernels import FeatureFamily

from .gen import (
    SIGNATURES,
    labels,
    random_element,
    random_strict_space,
    random_vector,
    scalar_kernel,
)


@pytest.fixture
def pair_space():
    return ModuleSpace(scalar_kernel([[2, 1], [1, 2]]))


def scalar_symbol(space, entries):
    return MultiplierSymbol(
        space,
        {s: AlgebraElement.from_scalar([1], v) for s, v in zip(space.points, entries)},
    )


def test_identity_and_zero_apply(pair_space):
    xi = random_vector(np.random.default_rng(0), pair_space)
    assert vector_norm(AdjointableOp.identity(pair_space)(xi) - xi) == 0.0
    assert vector_norm(AdjointableOp.zero(pair_space)(xi)) == 0.0


def test_multiplication_action_values(pair_space):
    f = scalar_symbol(pair_space, [2.0, 3.0])
    op = multiplication_operator(f)
    image = op.section_image("s1")
    assert abs(evaluate(image, "s1").blocks[0][0, 0] - 4.0) < 1e-12
    assert abs(evaluate(image, "s2").blocks[0][0, 0] - 3.0) < 1e-12


def test_apply_extends_linearly(pair_space):
    rng = np.random.default_rng(2)
    f = scalar_symbol(pair_space, [2.0, 3.0])
    op = multiplication_operator(f)
    xi = random_vector(rng, pair_space)
    expected = pair_space.zero()
    for s in pair_space.points:
        expected = expected + op.section_image(s) * xi.coefficient(s)
    assert vector_norm(op(xi) - expected) <= 1e-12


def test_from_action_round_trip(pair_space):
    f = scalar_symbol(pair_space, [2.0, 3.0])
    op = multiplication_operator(f)
    rebuilt = AdjointableOp.from_action(pair_space, op.action())
    assert op_distance(op, rebuilt) <= 1e-12


def test_null_inconsistent_action_rejected():
    one = AlgebraElement.unit([1])
    family = FeatureFamily(labels(2), [1], [{s: one for s in labels(2)}])
    space = ModuleSpace(kernel_from_features(family))
    # k_s1 = k_s2 in this module, so the images below are inconsistent
    action = {"s1": space.section("s1"), "s2": space.zero()}
    with pytest.raises(ValueError):
        AdjointableOp.from_action(space, action)


def test_adjoint_of_identity(pair_space):
    ident = AdjointableOp.identity(pair_space)
    assert op_distance(ident.adjoint(), ident) <= 1e-12


@pytest.mark.parametrize("sig", SIGNATURES)
def test_adjoint_involution_and_pairing(sig):
    rng = np.random.default_rng(5)
    for _ in range(10):
        space = random_strict_space(rng, sig, npoints=3)
        n = len(space.points)
        mats = [
            rng.standard_normal((n * nk, n * nk))
            + 1j * rng.standard_normal((n * nk, n * nk))
            for nk in space.signature
        ]
        op = AdjointableOp(space, mats)
        adj = op.adjoint()
        assert op_distance(adj.adjoint(), op) <= 1e-9
        for _ in range(5):
            xi, eta = random_vector(rng, space), random_vector(rng, space)
            lhs = inner_product(op(xi), eta)
            rhs = inner_product(xi, adj(eta))
            scale = 1.0 + vector_norm(xi) * vector_norm(eta)
            assert operator_norm(lhs - rhs) <= 1e-9 * scale


def test_unit_symbol_is_identity(pair_space):
    f = scalar_symbol(pair_space, [1.0, 1.0])
    op = multiplication_operator(f)
    assert op_distance(op, AdjointableOp.identity(pair_space)) <= 1e-12


def test_every_symbol_multiplies_on_invertible_gram(pair_space):
    rng = np.random.default_rng(7)
    for _ in range(20):
        f = scalar_symbol(pair_space, rng.standard_normal(2) + 1j * rng.standard_normal(2))
        multiplication_operator(f)  # must not raise


def test_non_multiplier_on_rank_one_kernel():
    one = AlgebraElement.unit([1])
    family = FeatureFamily(labels(2), [1], [{s: one for s in labels(2)}])
    space = ModuleSpace(kernel_from_features(family))
    f = scalar_symbol(space, [1.0, 2.0])
    with pytest.raises(NotAMultiplierError):
        multiplication_operator(f)


def test_multiplier_adjoint_worked_examples(pair_space):
    assert multiplier_adjoint_check(scalar_symbol(pair_space, [1.0, 1.0]))
    assert multiplier_adjoint_check(scalar_symbol(pair_space, [2.0, 3.0]))


@pytest.mark.parametrize("sig", SIGNATURES)
def test_multiplier_adjoint_fuzz(sig):
    rng = np.random.default_rng(11)
    for _ in range(20):
        space = random_strict_space(rng, sig, npoints=3)
        symbol = MultiplierSymbol(
            space, {s: random_element(rng, sig) for s in space.points}
        )
        assert multiplier_adjoint_check(symbol)


def test_multiplication_is_algebra_homomorphism(pair_space):
    rng = np.random.default_rng(13)
    lam = complex(rng.standard_normal(), rng.standard_normal())
    f = scalar_symbol(pair_space, rng.standard_normal(2))
    g = scalar_symbol(pair_space, rng.standard_normal(2))
    op_f, op_g = multiplication_operator(f), multiplication_operator(g)

    fg = MultiplierSymbol(
        pair_space, {s: f.value(s) * g.value(s) for s in pair_space.points}
    )
    assert op_distance(op_f @ op_g, multiplication_operator(fg)) <= 1e-9

    lin = MultiplierSymbol(
        pair_space, {s: lam * f.value(s) + g.value(s) for s in pair_space.points}
    )
    assert op_distance(lam * op_f + op_g, multiplication_operator(lin)) <= 1e-9


def test_berezin_examples(pair_space):
    ident = AdjointableOp.identity(pair_space)
    for s in pair_space.points:
        assert operator_norm(berezin(ident, s) - AlgebraElement.unit([1])) <= 1e-12

    f = scalar_symbol(pair_space, [2.0, 3.0])
    op = multiplication_operator(f)
    assert abs(berezin(op, "s1").blocks[0][0, 0] - 2.0) < 1e-12

    zero = AdjointableOp.zero(pair_space)
    assert operator_norm(berezin(zero, "s1")) == 0.0


def test_berezin_outside_domain():
    space = ModuleSpace(scalar_kernel([[1.0, 0.0], [0.0, 0.0]]))
    ident = AdjointableOp.identity(space)
    with pytest.raises(NotInvertibleError):
        berezin(ident, "s2")


def test_recover_symbol_of_multiplication(pair_space):
    g = scalar_symbol(pair_space, [0.5, -1.5])
    recovered = recover_symbol(multiplication_operator(g))
    assert recovered.is_multiplication
    for s in pair_space.points:
        assert operator_norm(recovered.symbol.value(s) - g.value(s)) <= 1e-9


def test_recover_symbol_of_identity(pair_space):
    recovered = recover_symbol(AdjointableOp.identity(pair_space))
    assert recovered.is_multiplication
    for s in pair_space.points:
        assert operator_norm(recovered.symbol.value(s) - AlgebraElement.unit([1])) <= 1e-12


def test_recover_symbol_flags_non_multiplication(pair_space):
    nudge = AdjointableOp(pair_space, [np.array([[0.0, 1.0], [0.0, 0.0]])])
    recovered = recover_symbol(nudge)
    assert not recovered.is_multiplication
    assert recovered.worst_deviation > 1e-3


def test_recover_symbol_zero_outside_domain():
    space = ModuleSpace(scalar_kernel([[1.0, 0.0], [0.0, 0.0]]))
    recovered = recover_symbol(AdjointableOp.identity(space))
    assert recovered.admissible_points == ("s1",)
    assert operator_norm(recovered.symbol.value("s2")) == 0.0


def test_operator_composition_and_sum(pair_space):
    rng = np.random.default_rng(17)
    a = AdjointableOp(pair_space, [rng.standard_normal((2, 2))])
    b = AdjointableOp(pair_space, [rng.standard_normal((2, 2))])
    xi = random_vector(rng, pair_space)
    assert vector_norm((a @ b)(xi) - a(b(xi))) <= 1e-12
    assert vector_norm((a + b)(xi) - (a(xi) + b(xi))) <= 1e-12
    assert vector_norm((a - b)(xi) - (a(xi) - b(xi))) <= 1e-12
