import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import lsq_linear

from ordcif import _kernels_py
from ordcif.core import StepFunction, CifSet
from ordcif.errors import AlreadyRestrictedError, EmptyVectorError
from ordcif.estimators import estimate_cifs
from ordcif.isotonic import (
    isotonic_project,
    kernel_backend,
    maxmin_reference,
    maxmin_reference_matrix,
    restrict_cifs,
)
from ordcif.simulate import SimConfig, simulate_sample

BACKENDS = [pytest.param(None, id=f"selected-{kernel_backend()}"),
            pytest.param(_kernels_py, id="python")]


def _project(vec, backend):
    if backend is None:
        return isotonic_project(vec)
    return backend.pava_vector(np.asarray(vec, dtype=np.float64))


finite_vectors = st.lists(
    st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
    min_size=1,
    max_size=8,
)


class TestProjection:
    def test_already_isotonic_is_identity(self):
        assert np.array_equal(isotonic_project([1.0, 2.0, 3.0]), [1.0, 2.0, 3.0])

    def test_two_violators_pool_to_mean(self):
        assert np.array_equal(isotonic_project([0.5, 0.3]), [0.4, 0.4])

    def test_hand_pava_three_entries(self):
        assert np.allclose(isotonic_project([0.5, 0.1, 0.3]), [0.3, 0.3, 0.3], atol=1e-15)

    def test_empty_vector_rejected(self):
        with pytest.raises(EmptyVectorError):
            isotonic_project([])
        with pytest.raises(EmptyVectorError):
            maxmin_reference([])

    def test_ties_not_pooled(self):
        out = isotonic_project([0.2, 0.2, 0.5])
        assert np.array_equal(out, [0.2, 0.2, 0.5])

    @pytest.mark.parametrize("backend", BACKENDS)
    @given(vec=finite_vectors)
    @settings(max_examples=200, deadline=None)
    def test_nondecreasing_and_sum_preserving(self, backend, vec):
        out = _project(vec, backend)
        assert np.all(np.diff(out) >= 0)
        scale = max(1.0, np.max(np.abs(vec)))
        assert abs(out.sum() - np.sum(vec)) <= 1e-12 * scale * len(vec)

    @pytest.mark.parametrize("backend", BACKENDS)
    @given(vec=finite_vectors)
    @settings(max_examples=200, deadline=None)
    def test_idempotent_exactly(self, backend, vec):
        once = _project(vec, backend)
        twice = _project(once, backend)
        assert np.array_equal(once, twice)

    @given(vec=finite_vectors)
    @settings(max_examples=200, deadline=None)
    def test_matches_maxmin_oracle(self, vec):
        got = isotonic_project(vec)
        want = maxmin_reference(vec)
        scale = max(1.0, np.max(np.abs(vec)))
        assert np.max(np.abs(got - want)) <= 1e-12 * scale

    @given(
        data=st.data(),
        k=st.integers(min_value=1, max_value=8),
    )
    @settings(max_examples=150, deadline=None)
    def test_error_contraction(self, data, k):
        # Against any isotonic target, projecting never increases the
        # worst-coordinate error.
        x = data.draw(
            st.lists(
                st.floats(min_value=-100, max_value=100, allow_nan=False),
                min_size=k,
                max_size=k,
            )
        )
        theta = np.sort(
            data.draw(
                st.lists(
                    st.floats(min_value=-100, max_value=100, allow_nan=False),
                    min_size=k,
                    max_size=k,
                )
            )
        )
        out = isotonic_project(x)
        assert np.max(np.abs(out - theta)) <= np.max(np.abs(np.asarray(x) - theta)) + 1e-12

    def test_backends_bit_identical(self):
        rng = np.random.default_rng(42)
        for k in range(1, 9):
            mat = np.ascontiguousarray(rng.normal(size=(k, 500)))
            from ordcif.isotonic import _kernels as selected

            a = selected.pava_matrix(mat)
            b = _kernels_py.pava_matrix(mat)
            assert np.array_equal(a, b)
            for col in range(0, 500, 97):
                assert np.array_equal(
                    selected.pava_vector(np.ascontiguousarray(mat[:, col])),
                    _kernels_py.pava_vector(mat[:, col]),
                )


class TestMaxMinReference:
    def test_hand_evaluation(self):
        got = maxmin_reference([0.5, 0.1, 0.3])
        assert np.allclose(got, [0.3, 0.3, 0.3], atol=1e-15)

    def test_constant_vector_unchanged(self):
        assert np.array_equal(maxmin_reference([2.0, 2.0, 2.0]), [2.0, 2.0, 2.0])

    def test_reversed_vector_pools_to_grand_mean(self):
        vec = [5.0, 4.0, 3.0, 2.0, 1.0]
        assert np.allclose(maxmin_reference(vec), np.full(5, 3.0), atol=1e-12)

    def test_matrix_form_matches_per_vector(self):
        rng = np.random.default_rng(3)
        for k in range(1, 9):
            mat = rng.normal(size=(k, 200))
            batch = maxmin_reference_matrix(mat)
            for col in range(0, 200, 41):
                single = maxmin_reference(mat[:, col])
                assert np.max(np.abs(batch[:, col] - single)) <= 1e-13


class TestBruteForceOracle:
    def test_matches_bound_constrained_least_squares(self):
        # Reparametrize y1=a, y2=a+b, y3=a+b+c with b,c >= 0; the projection
        # is then a bound-constrained least-squares problem.
        rng = np.random.default_rng(7)
        design = np.array([[1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [1.0, 1.0, 1.0]])
        for _ in range(200):
            x = rng.uniform(-1, 1, size=3)
            sol = lsq_linear(
                design,
                x,
                bounds=([-np.inf, 0.0, 0.0], [np.inf, np.inf, np.inf]),
                tol=1e-14,
            )
            want = design @ sol.x
            got = isotonic_project(x)
            assert np.max(np.abs(got - want)) <= 1e-8


class TestRestrictCifs:
    def test_identity_on_ordered_input(self):
        a = StepFunction([1.0], [0.2])
        b = StepFunction([1.0], [0.4])
        cs = CifSet.from_cifs([a, b], restricted=False)
        out = restrict_cifs(cs)
        assert out.restricted
        grid = out.grid()
        assert np.array_equal(out.cifs[0](grid), a(grid))
        assert np.array_equal(out.cifs[1](grid), b(grid))

    def test_k2_pool_to_mean(self):
        a = StepFunction([1.0], [0.5])
        b = StepFunction([2.0], [0.25])
        cs = CifSet.from_cifs([a, b], restricted=False)
        out = restrict_cifs(cs)
        # At t in [1, 2): inputs (0.5, 0) pool to 0.25 each.
        assert out.cifs[0](1.0) == pytest.approx(0.25)
        assert out.cifs[1](1.0) == pytest.approx(0.25)
        # At t >= 2: inputs (0.5, 0.25) pool to 0.375 each.
        assert out.cifs[0](2.0) == pytest.approx(0.375)
        assert out.cifs[1](2.0) == pytest.approx(0.375)

    def test_scaled_hand_example(self):
        n = 10.0
        a = StepFunction([1.0], [0.5 / n])
        b = StepFunction([1.0], [0.1 / n])
        c = StepFunction([1.0], [0.3 / n])
        cs = CifSet.from_cifs([a, b, c], restricted=False)
        out = restrict_cifs(cs)
        for f in out.cifs:
            assert f(1.0) == pytest.approx(0.3 / n)

    def test_rejects_restricted_input(self):
        a = StepFunction([1.0], [0.2])
        cs = CifSet.from_cifs([a, a], restricted=True)
        with pytest.raises(AlreadyRestrictedError):
            restrict_cifs(cs)

    def test_components_nondecreasing_and_sum_preserved(self):
        cfg = SimConfig(
            k=4, cause_hazards=(0.5, 0.5, 1.0, 2.0), n=300, replicates=1,
            seed=99, censor_rate=0.4,
        )
        for rep in range(20):
            sample = simulate_sample(cfg, rep)
            unrestricted = estimate_cifs(sample)
            restricted = restrict_cifs(unrestricted)
            grid = restricted.grid()
            values = restricted.values_matrix(grid)
            assert np.all(np.diff(values, axis=0) >= 0)  # ordered in cause
            assert np.all(np.diff(values, axis=1) >= 0)  # nondecreasing in t
            total_gap = np.abs(values.sum(axis=0) - unrestricted.total(grid))
            assert np.max(total_gap) <= 1e-12
