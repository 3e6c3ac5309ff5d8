"""Module span: inner products, evaluation, projections, interpolation, realization."""

import numpy as np
import pytest

from rkmod import (
    AlgebraElement,
    ModuleSpace,
    NotInRangeError,
    SpaceMismatchError,
    evaluate,
    exterior_norm,
    hilbert_realization,
    inner_product,
    is_set_of_uniqueness,
    kernel_deflate,
    kernel_from_features,
    kernel_tensor,
    membership,
    minimal_norm_interpolant,
    operator_norm,
    projection,
    tensor_embed,
    vector_norm,
)
from rkmod.kernels import FeatureFamily

from .gen import (
    SIGNATURES,
    labels,
    random_element,
    random_strict_kernel,
    random_strict_space,
    random_vector,
    scalar_kernel,
)


@pytest.fixture
def pair_space():
    return ModuleSpace(scalar_kernel([[2, 1], [1, 2]]))


def all_ones_space(n=2):
    one = AlgebraElement.unit([1])
    family = FeatureFamily(labels(n), [1], [{s: one for s in labels(n)}])
    return ModuleSpace(kernel_from_features(family))


def test_space_rejects_indefinite_kernel():
    with pytest.raises(ValueError):
        ModuleSpace(scalar_kernel([[1, 2], [2, 1]]))


def test_sections_reproduce_kernel(pair_space):
    for s in pair_space.points:
        for t in pair_space.points:
            got = inner_product(pair_space.section(s), pair_space.section(t))
            assert operator_norm(got - pair_space.kernel.value(s, t)) <= 1e-12


def test_inner_product_sums_gram_entries(pair_space):
    one = AlgebraElement.unit([1])
    xi = pair_space.vector({"s1": one, "s2": one})
    assert abs(inner_product(xi, xi).blocks[0][0, 0] - 6.0) < 1e-12


def test_inner_product_with_zero(pair_space):
    xi = random_vector(np.random.default_rng(0), pair_space)
    assert operator_norm(inner_product(xi, pair_space.zero())) == 0.0


def test_inner_product_space_mismatch(pair_space):
    other = ModuleSpace(scalar_kernel([[1.0]], ["s1"]))
    with pytest.raises(SpaceMismatchError):
        inner_product(pair_space.section("s1"), other.section("s1"))


def test_vector_norm_examples(pair_space):
    assert vector_norm(pair_space.section("s1")) == pytest.approx(np.sqrt(2.0))
    assert vector_norm(pair_space.zero()) == 0.0
    xi = pair_space.section("s1") * 0.5
    assert vector_norm(xi) == pytest.approx(np.sqrt(0.5))


def test_evaluate_examples(pair_space):
    for s in pair_space.points:
        for t in pair_space.points:
            got = evaluate(pair_space.section(s), t)
            assert operator_norm(got - pair_space.kernel.value(t, s)) <= 1e-12
    xi = pair_space.section("s1") * 0.5
    assert abs(evaluate(xi, "s1").blocks[0][0, 0] - 1.0) < 1e-12
    assert abs(evaluate(xi, "s2").blocks[0][0, 0] - 0.5) < 1e-12
    assert operator_norm(evaluate(pair_space.zero(), "s1")) == 0.0
    with pytest.raises(KeyError):
        evaluate(xi, "nope")


def test_membership_of_section_is_exact(pair_space):
    values = {t: pair_space.kernel.value(t, "s2") for t in pair_space.points}
    result = membership(pair_space, values, list(pair_space.points))
    assert result.is_member
    assert result.residual <= 1e-12
    assert operator_norm(result.coefficients["s2"] - AlgebraElement.unit([1])) <= 1e-9
    assert operator_norm(result.coefficients["s1"]) <= 1e-9


def test_membership_consistent_overdetermined(pair_space):
    values = {
        "s1": AlgebraElement.from_scalar([1], 1.0),
        "s2": AlgebraElement.from_scalar([1], 0.5),
    }
    result = membership(pair_space, values, ["s1"])
    assert result.is_member
    assert operator_norm(result.coefficients["s1"] - AlgebraElement.from_scalar([1], 0.5)) <= 1e-12


def test_membership_inconsistent_has_residual(pair_space):
    values = {
        "s1": AlgebraElement.from_scalar([1], 1.0),
        "s2": AlgebraElement.from_scalar([1], 0.0),
    }
    result = membership(pair_space, values, ["s1"])
    assert not result.is_member
    assert result.residual == pytest.approx(0.4472135954999579, abs=1e-12)


def test_projection_examples(pair_space):
    xi = random_vector(np.random.default_rng(1), pair_space)
    full = projection(xi, list(pair_space.points))
    assert vector_norm(full - xi) <= 1e-9

    assert vector_norm(projection(xi, [])) == 0.0

    proj = projection(pair_space.section("s2"), ["s1"])
    expected = pair_space.section("s1") * 0.5
    assert vector_norm(proj - expected) <= 1e-12


@pytest.mark.parametrize("sig", SIGNATURES)
def test_projection_idempotent_selfadjoint_and_interpolating(sig):
    rng = np.random.default_rng(23)
    for _ in range(10):
        space = random_strict_space(rng, sig, npoints=4)
        subset = ["s1", "s3"]
        xi, eta = random_vector(rng, space), random_vector(rng, space)
        p_xi = projection(xi, subset)
        assert vector_norm(projection(p_xi, subset) - p_xi) <= 1e-9
        lhs = inner_product(p_xi, eta)
        rhs = inner_product(xi, projection(eta, subset))
        assert operator_norm(lhs - rhs) <= 1e-9
        for s in subset:
            assert operator_norm(evaluate(p_xi, s) - evaluate(xi, s)) <= 1e-9


def test_interpolant_worked_example(pair_space):
    result = minimal_norm_interpolant(
        pair_space, ["s1"], [AlgebraElement.unit([1])]
    )
    assert result.norm == pytest.approx(np.sqrt(0.5))
    assert abs(evaluate(result.vector, "s2").blocks[0][0, 0] - 0.5) < 1e-12
    assert abs(result.vector.coefficient("s1").blocks[0][0, 0] - 0.5) < 1e-12


def test_interpolant_zero_targets(pair_space):
    result = minimal_norm_interpolant(
        pair_space, ["s1", "s2"], [AlgebraElement.zero([1])] * 2
    )
    assert result.norm == 0.0
    assert vector_norm(result.vector) <= 1e-12


def test_interpolant_zero_kernel_not_in_range():
    space = ModuleSpace(scalar_kernel(np.zeros((2, 2))))
    with pytest.raises(NotInRangeError):
        minimal_norm_interpolant(space, ["s1"], [AlgebraElement.unit([1])])


def test_interpolant_requires_distinct_points(pair_space):
    one = AlgebraElement.unit([1])
    with pytest.raises(ValueError):
        minimal_norm_interpolant(pair_space, ["s1", "s1"], [one, one])


@pytest.mark.parametrize("sig", SIGNATURES)
def test_interpolant_minimality_and_norm_formula(sig):
    rng = np.random.default_rng(29)
    for _ in range(5):
        space = random_strict_space(rng, sig, npoints=4)
        subset = ["s2", "s4"]
        targets = [random_element(rng, sig) for _ in subset]
        result = minimal_norm_interpolant(space, subset, targets)
        for s, a in zip(subset, targets):
            assert operator_norm(evaluate(result.vector, s) - a) <= 1e-8
        assert result.norm == pytest.approx(vector_norm(result.vector), abs=1e-8)
        for _ in range(20):
            g = random_vector(rng, space)
            h = g - projection(g, subset)
            assert vector_norm(result.vector + h) >= result.norm - 1e-9


def test_uniqueness_examples(pair_space):
    assert is_set_of_uniqueness(pair_space, list(pair_space.points))
    assert not is_set_of_uniqueness(pair_space, ["s1"])
    assert is_set_of_uniqueness(all_ones_space(), ["s1"])


def test_realization_dimensions():
    assert hilbert_realization(ModuleSpace(scalar_kernel([[2, 1], [1, 2]]))).dimension == 2
    assert hilbert_realization(all_ones_space(3)).dimension == 1
    assert hilbert_realization(ModuleSpace(scalar_kernel(np.zeros((2, 2))))).dimension == 0


@pytest.mark.parametrize("sig", SIGNATURES)
def test_realization_basis_is_orthonormal(sig):
    rng = np.random.default_rng(31)
    space = random_strict_space(rng, sig, npoints=3)
    real = space.realization
    basis = real.basis_vectors()
    assert len(basis) == real.dimension
    for i, x in enumerate(basis):
        for j, y in enumerate(basis):
            trace = sum(np.trace(b) for b in inner_product(x, y).blocks)
            assert abs(trace - (1.0 if i == j else 0.0)) <= 1e-10


@pytest.mark.parametrize("sig", SIGNATURES)
def test_realization_coords_preserve_trace_product(sig):
    rng = np.random.default_rng(37)
    space = random_strict_space(rng, sig, npoints=3)
    real = space.realization
    xi, eta = random_vector(rng, space), random_vector(rng, space)
    trace = sum(np.trace(b) for b in inner_product(xi, eta).blocks)
    dot = np.vdot(real.coords(xi), real.coords(eta))
    assert abs(trace - dot) <= 1e-9 * (1.0 + abs(trace))


def test_evaluation_continuity_bound():
    rng = np.random.default_rng(41)
    for sig in SIGNATURES:
        space = random_strict_space(rng, sig, npoints=4)
        for _ in range(10):
            xi = random_vector(rng, space)
            for s in space.points:
                bound = (
                    np.sqrt(operator_norm(space.kernel.value(s, s))) * vector_norm(xi)
                )
                assert operator_norm(evaluate(xi, s)) <= bound + 1e-9


def test_deflation_matches_projection_complement():
    rng = np.random.default_rng(43)
    for sig in SIGNATURES:
        kernel = random_strict_kernel(rng, sig, labels(4))
        space = ModuleSpace(kernel)
        s0 = "s2"
        deflated = ModuleSpace(kernel_deflate(kernel, s0))
        for s in space.points:
            for t in space.points:
                ps = space.section(s) - projection(space.section(s), [s0])
                pt = space.section(t) - projection(space.section(t), [s0])
                via_projection = inner_product(ps, pt)
                via_deflation = inner_product(deflated.section(s), deflated.section(t))
                assert operator_norm(via_projection - via_deflation) <= 1e-8


def test_tensor_embed_sections(pair_space):
    other = ModuleSpace(scalar_kernel([[4.0]], ["t1"]))
    image = tensor_embed([(pair_space.section("s1"), other.section("t1"))])
    target = image.space.section("s1⋈t1")
    assert vector_norm(image - target) <= 1e-12


def test_tensor_embed_scalar_norm():
    e1 = ModuleSpace(scalar_kernel([[1.0]], ["x1"]))
    e2 = ModuleSpace(scalar_kernel([[4.0]], ["t1"]))
    u = [(e1.section("x1"), e2.section("t1"))]
    assert vector_norm(tensor_embed(u)) == pytest.approx(2.0)
    assert exterior_norm(u) == pytest.approx(2.0)


def test_tensor_embed_zero():
    e1 = ModuleSpace(scalar_kernel([[1.0]], ["x1"]))
    e2 = ModuleSpace(scalar_kernel([[4.0]], ["t1"]))
    u = [(e1.zero(), e2.section("t1"))]
    assert vector_norm(tensor_embed(u)) == 0.0
    assert exterior_norm(u) == 0.0


@pytest.mark.parametrize(
    "sig1,sig2", [((1,), (1,)), ((2,), (1,)), ((1,), (1, 2)), ((2,), (1, 2))]
)
def test_tensor_embedding_is_isometric(sig1, sig2):
    rng = np.random.default_rng(47)
    e1 = ModuleSpace(random_strict_kernel(rng, sig1, labels(2, "x")))
    e2 = ModuleSpace(random_strict_kernel(rng, sig2, labels(3, "t")))
    product = ModuleSpace(kernel_tensor(e1.kernel, e2.kernel))
    for _ in range(10):
        pairs = [
            (random_vector(rng, e1, 0.7), random_vector(rng, e2, 0.7))
            for _ in range(int(rng.integers(1, 4)))
        ]
        norm_u = exterior_norm(pairs)
        image = tensor_embed(pairs, product)
        assert abs(vector_norm(image) - norm_u) <= 1e-8 * (1.0 + norm_u)


def test_vector_equality_is_seminorm_equality():
    space = all_ones_space(2)
    # k_s1 and k_s2 coincide as module elements on the all-ones kernel
    assert space.section("s1").isclose(space.section("s2"))
    diff = space.section("s1") - space.section("s2")
    assert vector_norm(diff) <= 1e-12


def test_right_module_action(pair_space):
    rng = np.random.default_rng(53)
    a = random_element(rng, (1,))
    xi = random_vector(rng, pair_space)
    eta = random_vector(rng, pair_space)
    lhs = inner_product(eta, xi * a)
    rhs = inner_product(eta, xi) * a
    assert operator_norm(lhs - rhs) <= 1e-9
