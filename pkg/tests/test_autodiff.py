"""Backward-pass semantics: tape life cycle, gradient values, finite differences."""

import numpy as np
import pytest

from slotworld import tensor as tc


def f64(arr, grad=True):
    return tc.Tensor(np.asarray(arr, dtype=np.float64), requires_grad=grad)


class TestBackwardBasics:
    def test_sum_gives_ones(self, rng):
        x = tc.Tensor(rng.random((3, 4), dtype=np.float32), requires_grad=True)
        tc.backward(x.sum())
        np.testing.assert_array_equal(x.grad, np.ones((3, 4), dtype=np.float32))

    def test_sum_of_squares(self):
        x = tc.Tensor(np.array([1.0, -2.0], dtype=np.float32), requires_grad=True)
        tc.backward((x * x).sum())
        np.testing.assert_allclose(x.grad, [2.0, -4.0], rtol=1e-6)

    def test_grads_accumulate_across_shared_uses(self):
        x = tc.Tensor(np.array([3.0], dtype=np.float32), requires_grad=True)
        y = x * 2.0 + x * 5.0
        tc.backward(y.sum())
        np.testing.assert_allclose(x.grad, [7.0])

    def test_non_scalar_loss_rejected(self, rng):
        x = tc.Tensor(rng.random(3, dtype=np.float32), requires_grad=True)
        with pytest.raises(tc.ContractError):
            tc.backward(x * 2.0)

    def test_unconnected_loss_rejected(self):
        with pytest.raises(tc.TapeError):
            tc.backward(tc.Tensor(np.array(1.0, dtype=np.float32)))

    def test_second_backward_on_same_tape_raises(self):
        x = tc.Tensor(np.ones(2, dtype=np.float32), requires_grad=True)
        loss = (x * x).sum()
        tc.backward(loss)
        with pytest.raises(tc.TapeError):
            tc.backward(loss)

    def test_no_grad_suppresses_recording(self):
        x = tc.Tensor(np.ones(2, dtype=np.float32), requires_grad=True)
        with tc.no_grad():
            y = (x * x).sum()
        assert not y.requires_grad
        with pytest.raises(tc.TapeError):
            tc.backward(y)

    def test_fresh_tape_after_backward(self):
        x = tc.Tensor(np.ones(2, dtype=np.float32), requires_grad=True)
        tc.backward((x * 2.0).sum())
        tc.backward((x * 3.0).sum())  # new tape; grads accumulate
        np.testing.assert_allclose(x.grad, [5.0, 5.0])


class TestGradCheck:
    def test_linear_gradients(self, rng):
        with tc.precision("float64"):
            x = f64(rng.standard_normal((2, 3)))
            w = f64(rng.standard_normal((4, 3)))
            b = f64(rng.standard_normal(4))
            report = tc.grad_check(
                lambda x_, w_, b_: (tc.linear(x_, w_, b_) * 0.5).sum(), [x, w, b]
            )
        assert report.max_rel_err < 1e-5, report.per_input

    def test_conv2d_input_gradients_vs_finite_differences(self, rng):
        with tc.precision("float64"):
            x = f64(rng.standard_normal((3, 8, 8)))
            k = f64(rng.standard_normal((2, 3, 3, 3)) * 0.5)
            report = tc.grad_check(
                lambda x_, k_: tc.conv2d(x_, k_, stride=2, padding=1).sum(), [x, k]
            )
        assert report.max_rel_err < 1e-5, report.per_input

    def test_conv_transpose_gradients(self, rng):
        with tc.precision("float64"):
            x = f64(rng.standard_normal((2, 3, 3)))
            k = f64(rng.standard_normal((2, 4, 3, 3)) * 0.5)
            b = f64(rng.standard_normal(4))
            report = tc.grad_check(
                lambda x_, k_, b_: (
                    tc.conv_transpose2d(x_, k_, b_, stride=2) * 0.3
                ).sum(),
                [x, k, b],
            )
        assert report.max_rel_err < 1e-5, report.per_input

    def test_elementwise_gradients(self, rng):
        with tc.precision("float64"):
            x = f64(rng.standard_normal(12) * 2.0)
            for fn in (tc.relu, tc.sigmoid, lambda t: tc.leaky_relu(t, 0.1)):
                report = tc.grad_check(lambda x_: (fn(x_) * fn(x_)).sum(), [x])
                assert report.max_rel_err < 1e-5, report.per_input

    def test_layer_norm_gradients(self, rng):
        with tc.precision("float64"):
            x = f64(rng.standard_normal((4, 6)))
            gain = f64(rng.standard_normal(6))
            offset = f64(rng.standard_normal(6))
            report = tc.grad_check(
                lambda x_, g_, o_: (tc.layer_norm(x_, g_, o_) * 0.25).sum()
                + (tc.layer_norm(x_, g_, o_) * tc.layer_norm(x_, g_, o_)).sum(),
                [x, gain, offset],
                tolerance=1e-4,
            )
        assert report.max_rel_err < 1e-4, report.per_input

    def test_composite_cnn_mlp_gradients(self, rng):
        # conv -> sigmoid -> flatten -> linear -> layer_norm -> relu -> linear -> sum of squares
        with tc.precision("float64"):
            x = f64(rng.random((3, 10, 10)))
            k = f64(rng.standard_normal((2, 3, 5, 5)) * 0.3)
            kb = f64(rng.standard_normal(2) * 0.1)
            w1 = f64(rng.standard_normal((6, 8)) * 0.5)
            b1 = f64(rng.standard_normal(6) * 0.1)
            gain = f64(np.ones(6))
            offset = f64(np.zeros(6))
            w2 = f64(rng.standard_normal((2, 6)) * 0.5)

            def model(x_, k_, kb_, w1_, b1_, g_, o_, w2_):
                h = tc.sigmoid(tc.conv2d(x_, k_, kb_, stride=5))
                h = h.reshape(1, 8)
                h = tc.relu(tc.layer_norm(tc.linear(h, w1_, b1_), g_, o_))
                out = tc.linear(h, w2_)
                return (out * out).sum()

            report = tc.grad_check(
                model, [x, k, kb, w1, b1, gain, offset, w2], tolerance=1e-4
            )
        assert report.max_rel_err < 1e-4, report.per_input

    def test_float32_inputs_rejected(self, rng):
        x = tc.Tensor(rng.random(3, dtype=np.float32), requires_grad=True)
        with pytest.raises(tc.ContractError):
            tc.grad_check(lambda x_: (x_ * x_).sum(), [x])


class TestDeterminism:
    def test_identical_seeds_identical_forward(self):
        def run():
            r = np.random.default_rng(7)
            x = tc.Tensor(r.standard_normal((4, 6)).astype(np.float32))
            w = tc.Tensor(r.standard_normal((3, 6)).astype(np.float32))
            return tc.linear(tc.relu(x), w).numpy()

        a, b = run(), run()
        assert a.tobytes() == b.tobytes()
