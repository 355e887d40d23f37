"""Instance model, preprocessing, generator, and file I/O."""

import warnings

import numpy as np
import pytest

from lcim.demo import demo_instance
from lcim.instance import (
    Instance,
    ParseError,
    generate_small_world,
    load,
    loads,
    make_instance,
    preprocess,
    save,
)

from conftest import random_instance


def tiny():
    return make_instance(
        2, {(1, 2): 3, (2, 1): 4}, {1: 5, 2: 2}, b=1
    )


class TestInstanceModel:
    def test_accessors(self):
        inst = tiny()
        assert inst.n == 2
        assert inst.m == 2
        assert inst.weight(1, 2) == 3
        assert inst.weight(2, 1) == 4
        assert inst.threshold(1) == 5
        assert inst.neighbors(1) == (2,)
        assert inst.edges() == [(1, 2)]
        assert inst.has_arc(1, 2) and not inst.has_arc(1, 1)

    def test_node_view(self):
        inst = demo_instance()
        view = inst.node_view(2)
        assert view.h == 10
        assert view.neighbors == (1, 3, 5)
        assert view.weights == (3, 4, 5)
        assert view.weight_of(3) == 4
        assert view.degree == 3
        with pytest.raises(KeyError):
            view.weight_of(4)

    def test_with_b(self):
        inst = tiny().with_b(2)
        assert inst.b == 2

    def test_asymmetric_arcs_rejected(self):
        with pytest.raises(ValueError, match="asymmetric arc set"):
            make_instance(2, {(1, 2): 3}, {1: 5, 2: 2}, b=1)

    def test_self_loop_rejected(self):
        with pytest.raises(ValueError, match="self-loop"):
            Instance(n=1, arcs=(((1, 1), 2),), h=(3,), b=1)

    def test_bad_b_rejected(self):
        with pytest.raises(ValueError, match="outside"):
            tiny().with_b(3)
        with pytest.raises(ValueError, match="outside"):
            tiny().with_b(0)

    def test_nonpositive_weight_rejected(self):
        with pytest.raises(ValueError, match="nonpositive or fractional weight"):
            make_instance(2, {(1, 2): 0, (2, 1): 1}, {1: 5, 2: 2}, b=1)

    def test_nonpositive_threshold_rejected(self):
        with pytest.raises(ValueError, match="threshold"):
            make_instance(2, {(1, 2): 3, (2, 1): 1}, {1: 0, 2: 2}, b=1)


class TestPreprocess:
    def test_clamps_to_threshold(self):
        inst = make_instance(
            2, {(1, 2): 9, (2, 1): 1}, {1: 7, 2: 5}, b=2
        )
        pre = preprocess(inst)
        assert pre.weight(1, 2) == 5
        assert pre.weight(2, 1) == 1
        assert pre.is_preprocessed()

    def test_idempotent(self):
        inst = preprocess(tiny())
        assert preprocess(inst) == inst

    def test_pair_clamped_independently(self):
        inst = make_instance(
            2, {(1, 2): 10, (2, 1): 2}, {1: 6, 2: 3}, b=1
        )
        pre = preprocess(inst)
        assert pre.weight(1, 2) == 3
        assert pre.weight(2, 1) == 2

    def test_optimum_preserved(self):
        # clamping never changes the exact optimum
        from lcim.oracle import brute_force_optimum

        rng = np.random.default_rng(11)
        for _ in range(20):
            inst = random_instance(rng)
            raw = make_instance(
                inst.n,
                {arc: w + int(rng.integers(0, 8)) for arc, w in inst.arcs},
                {i: inst.threshold(i) for i in range(1, inst.n + 1)},
                inst.b,
            )
            assert brute_force_optimum(preprocess(raw))[0] == brute_force_optimum(raw)[0]


class TestGenerator:
    def test_arc_counts(self):
        inst = generate_small_world(50, 4, 0.1, 1.0, seed=7)
        assert inst.n == 50 and inst.m == 200
        inst = generate_small_world(100, 8, 0.3, 0.5, seed=7)
        assert inst.n == 100 and inst.m == 800

    def test_deterministic(self):
        a = generate_small_world(30, 4, 0.2, 0.5, seed=3)
        b = generate_small_world(30, 4, 0.2, 0.5, seed=3)
        assert a == b
        c = generate_small_world(30, 4, 0.2, 0.5, seed=4)
        assert a != c

    def test_preprocessed_and_b(self):
        inst = generate_small_world(40, 4, 0.1, 0.25, seed=1)
        assert inst.is_preprocessed()
        assert inst.b == 10  # ceil(0.25 * 40)

    def test_weights_in_range(self):
        inst = generate_small_world(30, 4, 0.5, 1.0, seed=9)
        for _, w in inst.arcs:
            assert 1 <= w <= 10
        # the alternative spread reading still yields a valid instance
        alt = generate_small_world(30, 4, 0.5, 1.0, seed=9, threshold_spread="stddev")
        assert alt.is_preprocessed()

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            generate_small_world(10, 3, 0.1, 0.5, seed=0)  # odd degree
        with pytest.raises(ValueError):
            generate_small_world(10, 4, 1.5, 0.5, seed=0)
        with pytest.raises(ValueError):
            generate_small_world(10, 4, 0.1, 0.0, seed=0)
        with pytest.raises(ValueError):
            generate_small_world(3, 2, 0.1, 0.5, seed=0)


class TestIO:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(5)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # random thresholds may lack slack
            for _ in range(10):
                inst = random_instance(rng)
                path = tmp_path / "inst.lcim"
                save(inst, path)
                assert load(path) == inst

    def test_demo_fixture(self):
        inst = demo_instance()
        assert inst.n == 5 and inst.m == 10 and inst.b == 3
        assert inst.h == (18, 10, 7, 5, 5)
        assert inst.weight(2, 3) == 6

    def test_comments_and_blank_lines(self):
        text = "# a comment\n\nlcim 1\n2 2 1\n1 5\n2 2\n# more\n1 2 3\n2 1 4\n"
        assert loads(text) == tiny()

    def test_bad_magic(self):
        with pytest.raises(ParseError, match="bad magic") as exc:
            loads("lcim 2\n1 0 1\n1 5\n")
        assert exc.value.lineno == 1

    def test_truncated_file(self):
        with pytest.raises(ParseError, match="unexpected end of file"):
            loads("lcim 1\n2 2 1\n1 5\n")

    def test_trailing_content(self):
        text = "lcim 1\n2 2 1\n1 5\n2 2\n1 2 3\n2 1 4\n9 9 9\n"
        with pytest.raises(ParseError, match="trailing content"):
            loads(text)

    def test_asymmetric_file(self):
        text = "lcim 1\n2 1 1\n1 5\n2 2\n1 2 3\n"
        with pytest.raises(ParseError, match="asymmetric"):
            loads(text)

    def test_non_integer_field(self):
        text = "lcim 1\n2 2 1\n1 5.5\n2 2\n1 2 3\n2 1 4\n"
        with pytest.raises(ParseError, match="integers") as exc:
            loads(text)
        assert exc.value.lineno == 3

    def test_slack_warning(self):
        # a degree-2 node whose weights do not exceed its threshold warns
        text = (
            "lcim 1\n3 4 1\n1 9\n2 1\n3 1\n"
            "1 2 1\n2 1 4\n1 3 1\n3 1 5\n"
        )
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            loads(text)
        assert any("node 1" in str(w.message) for w in caught)
