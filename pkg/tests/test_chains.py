"""
eps-chains, basic moves and homotopies.
"""
import pytest

from core.chains import (
    Chain, Homotopy, Insert, Remove, apply_move, concatenate, homotopy_chains,
    image_homotopy, inverse_move, reverse, validate_chain, verify_homotopy,
)
from core.errors import (
    IllegalMoveError, IndexOutOfRangeError, JunctionMismatchError,
    NonpositiveScaleError, ScaleMismatchError, SchemaError,
)
from core.fixtures import cycle


class TestChain:
    """Chain construction and validation."""

    def test_basic_properties(self):
        chain = Chain(1.2, [0, 1, 2])
        assert chain.points == (0, 1, 2)
        assert chain.start == 0 and chain.end == 2
        assert not chain.is_loop
        assert len(chain) == 3

    def test_empty_chain_rejected(self):
        with pytest.raises(SchemaError):
            Chain(1.0, ())

    def test_nonpositive_scale_rejected(self):
        with pytest.raises(NonpositiveScaleError):
            Chain(0.0, (0,))

    def test_validate_ok(self, square, boundary_loop):
        assert validate_chain(square, boundary_loop(1.2)).ok

    def test_validate_reports_first_gap(self, square):
        check = validate_chain(square, Chain(1.2, (0, 1, 3, 2)))
        assert not check.ok
        assert check.position == 1
        assert check.pair == (1, 3)

    def test_validate_is_strict(self, square):
        assert not validate_chain(square, Chain(1.0, (0, 1))).ok

    def test_repeated_points_are_fine(self, square):
        assert validate_chain(square, Chain(0.1, (2, 2, 2))).ok

    def test_validate_checks_indices(self, square):
        with pytest.raises(IndexOutOfRangeError):
            validate_chain(square, Chain(1.2, (0, 7)))


class TestMoves:
    """Insert and Remove legality."""

    def test_remove_interior(self, square):
        out = apply_move(square, Chain(1.5, (0, 1, 2)), Remove(1))
        assert out.points == (0, 2)

    def test_remove_needs_bridge(self, square):
        with pytest.raises(IllegalMoveError) as exc:
            apply_move(square, Chain(1.2, (0, 1, 2)), Remove(1))
        assert exc.value.reason == 'distance'

    def test_remove_endpoint(self, square):
        with pytest.raises(IllegalMoveError) as exc:
            apply_move(square, Chain(1.2, (0, 1, 2)), Remove(0))
        assert exc.value.reason == 'endpoint'
        # A duplicated endpoint may go
        assert apply_move(square, Chain(1.2, (0, 0, 1)), Remove(0)).points == (0, 1)
        assert apply_move(square, Chain(1.2, (0, 1, 1)), Remove(2)).points == (0, 1)

    def test_remove_position(self, square):
        with pytest.raises(IllegalMoveError) as exc:
            apply_move(square, Chain(1.2, (0, 1)), Remove(5))
        assert exc.value.reason == 'position'
        with pytest.raises(IllegalMoveError):
            apply_move(square, Chain(1.2, (0,)), Remove(0))

    def test_collapse_to_constant(self, square):
        assert apply_move(square, Chain(1.2, (0, 0)), Remove(1)).points == (0,)

    def test_insert_interior(self, square):
        assert apply_move(square, Chain(1.2, (0, 1)), Insert(1, 0)).points == (0, 0, 1)
        with pytest.raises(IllegalMoveError) as exc:
            apply_move(square, Chain(1.2, (0, 1)), Insert(1, 3))
        assert exc.value.reason == 'distance'

    def test_insert_endpoint_copies_only(self, square):
        assert apply_move(square, Chain(1.2, (0, 1)), Insert(0, 0)).points == (0, 0, 1)
        assert apply_move(square, Chain(1.2, (0, 1)), Insert(2, 1)).points == (0, 1, 1)
        with pytest.raises(IllegalMoveError) as exc:
            apply_move(square, Chain(1.2, (0, 1)), Insert(0, 1))
        assert exc.value.reason == 'endpoint'

    def test_insert_position_and_index(self, square):
        with pytest.raises(IllegalMoveError) as exc:
            apply_move(square, Chain(1.2, (0, 1)), Insert(7, 0))
        assert exc.value.reason == 'position'
        with pytest.raises(IndexOutOfRangeError):
            apply_move(square, Chain(1.2, (0, 1)), Insert(1, 9))

    def test_inverse_move_undoes(self, square):
        chain = Chain(1.5, (0, 1, 2, 3))
        for move in (Remove(2), Insert(1, 3), Insert(4, 3)):
            after = apply_move(square, chain, move)
            back = apply_move(square, after, inverse_move(chain, move))
            assert back == chain


class TestConcatenation:
    """Concatenation and reversal."""

    def test_concatenate(self):
        out = concatenate(Chain(1.2, (0, 1)), Chain(1.2, (1, 2)))
        assert out.points == (0, 1, 2)

    def test_junction_mismatch(self):
        with pytest.raises(JunctionMismatchError):
            concatenate(Chain(1.2, (0, 1)), Chain(1.2, (2, 3)))

    def test_scale_mismatch(self):
        with pytest.raises(ScaleMismatchError):
            concatenate(Chain(1.2, (0, 1)), Chain(1.5, (1, 2)))

    def test_reverse(self, boundary_loop):
        assert reverse(boundary_loop(1.2)).points == (0, 3, 2, 1, 0)


class TestHomotopy:
    """Replaying move lists."""

    def test_verify_ok(self, square, boundary_loop):
        homotopy = Homotopy(boundary_loop(1.5), (Remove(1), Remove(1), Remove(1), Remove(1)))
        check = verify_homotopy(square, homotopy)
        assert check.ok
        assert check.final.points == (0,)

    def test_verify_reports_step(self, square, boundary_loop):
        homotopy = Homotopy(boundary_loop(1.2), (Remove(1),))
        check = verify_homotopy(square, homotopy)
        assert not check.ok
        assert check.step == 0
        assert check.reason == 'distance'

    def test_verify_bad_start(self, square):
        check = verify_homotopy(square, Homotopy(Chain(1.2, (0, 2))))
        assert not check.ok
        assert check.step is None
        assert check.reason == 'start'

    def test_intermediate_chains(self, square, boundary_loop):
        homotopy = Homotopy(boundary_loop(1.5), (Remove(2), Insert(2, 2)))
        chains = homotopy_chains(square, homotopy)
        assert [c.points for c in chains] == [(0, 1, 2, 3, 0), (0, 1, 3, 0), (0, 1, 2, 3, 0)]

    def test_image_homotopy(self):
        """Pushing a homotopy down the 2-fold wrap of an 8-cycle."""
        fine, coarse = cycle(8), cycle(4)
        homotopy = Homotopy(Chain(2.5, (3, 4, 5)), (Remove(1), Insert(1, 4)))
        assert verify_homotopy(fine, homotopy).ok

        image = image_homotopy(coarse, lambda j: j % 4, homotopy)
        assert image.start.points == (3, 0, 1)
        assert image.moves == (Remove(1), Insert(1, 0))
        assert verify_homotopy(coarse, image).ok
