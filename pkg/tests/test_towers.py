"""
Towers: validation, bonds, threads, refining maps and homotopy lifting.
"""
import numpy as np
import pytest

from core.chains import Chain, Homotopy, Insert, Remove, verify_homotopy
from core.errors import (
    InconsistentThreadError, NotAHomotopyError, ScaleOrderViolationError, SchemaError,
    SpecInvalidError,
)
from core.fixtures import cat0_sphere_tower, cycle, solenoid_tower
from core.metric_space import build_space, geodesic_mesh
from core.nullity import NULL, is_null
from core.scan_runner import ScanRunner
from core.towers import (
    CERTIFIED, FAILS, FALSE, HOLDS, NOT_APPLICABLE, TRUE, EntourageSpec, ThreadHomotopy,
    ThreadPoint, Tower, canonical_thread, check_refining, check_thread, compose_bond,
    entourage_contains, extend_along_chain, gref_certificate, invlim_scan,
    lift_homotopy_with_endpoints, preimage_diameter, thread_points, validate_tower,
    verify_thread_homotopy,
)


@pytest.fixture
def identity_tower(hexagon):
    """The hexagon twice with the identity bond."""
    return Tower((1.0, 2.0), (hexagon, hexagon), (np.arange(6),))


class TestTowerShape:
    """Construction and validation."""

    def test_schema_errors(self):
        c4, c8 = cycle(4), cycle(8)
        with pytest.raises(SchemaError):
            Tower((1.0,), (c4, c8), (np.arange(8) % 4,))
        with pytest.raises(SchemaError):
            Tower((1.0, 2.0), (c4, c8), ())
        with pytest.raises(SchemaError):
            Tower((1.0, 2.0), (c4, c8), (np.arange(4),))
        with pytest.raises(SchemaError):
            Tower((1.0, 2.0), (c4, c8), (np.arange(8),))

    def test_valid(self, solenoid8):
        assert validate_tower(solenoid8).ok
        assert solenoid8.depth == 1
        assert solenoid8.indices == (1.0, 2.0)

    def test_not_surjective(self):
        tower = Tower((1.0, 2.0), (cycle(4), cycle(8)), (np.zeros(8, dtype=int),))
        check = validate_tower(tower)
        assert not check.ok
        assert check.reason == 'surjective'
        assert check.points == (1,)

    def test_not_lipschitz(self):
        tower = Tower((1.0, 2.0), (cycle(4), cycle(8, 0.1)), (np.arange(8) % 4,))
        check = validate_tower(tower)
        assert check.reason == 'lipschitz'
        assert check.stages == (0, 1)

    def test_indices_must_increase(self):
        tower = Tower((2.0, 1.0), (cycle(4), cycle(8)), (np.arange(8) % 4,))
        assert validate_tower(tower).reason == 'indices'

    def test_bonds_are_read_only(self, solenoid8):
        with pytest.raises(ValueError):
            solenoid8.bonds[0][0] = 3


class TestBonds:
    """Composed bonds and preimage diameters."""

    def test_compose(self):
        tower = solenoid_tower(3, 4)
        assert list(compose_bond(tower, 0, 2)) == [j % 4 for j in range(16)]
        assert list(compose_bond(tower, 1, 1)) == list(range(8))
        with pytest.raises(ScaleOrderViolationError):
            compose_bond(tower, 2, 0)

    def test_solenoid_preimage_diameter(self, solenoid8):
        # Fibers are antipodal pairs on a circle of length 2
        assert preimage_diameter(solenoid8, 0, 1) == pytest.approx(1.0)

    def test_identity_has_no_spread(self, identity_tower):
        assert preimage_diameter(identity_tower, 0, 1) == 0.0


class TestThreads:
    """Thread points through the stages."""

    def test_canonical_thread(self):
        tower = solenoid_tower(3, 4)
        assert canonical_thread(tower, 0, 3, 2).points == (3, 3, 3)
        assert canonical_thread(tower, 2, 13, 2).points == (1, 5, 13)
        assert canonical_thread(tower, 1, 6, 1).at(0) == 2

    def test_thread_points(self):
        tower = solenoid_tower(3, 4)
        threads = thread_points(tower, 2)
        assert len(threads) == 16
        for th in threads:
            check_thread(tower, th)

    def test_inconsistent_thread(self, solenoid8):
        with pytest.raises(InconsistentThreadError):
            check_thread(solenoid8, ThreadPoint((0, 1)))
        with pytest.raises(InconsistentThreadError):
            canonical_thread(solenoid8, 1, 0, 0)


class TestEntourages:
    """E_{r,eps} on threads."""

    def test_deeper_and_finer_is_contained(self, solenoid8):
        assert entourage_contains(solenoid8, EntourageSpec(1, 0.2), EntourageSpec(0, 0.2))

    def test_coarse_stage_misses_the_wrap(self, solenoid8):
        assert not entourage_contains(solenoid8, EntourageSpec(0, 0.2), EntourageSpec(1, 0.2))

    def test_relates(self, solenoid8):
        spec = EntourageSpec(0, 0.2)
        x, y = canonical_thread(solenoid8, 1, 0, 1), canonical_thread(solenoid8, 1, 8, 1)
        assert spec.relates(solenoid8, x, y)
        assert not EntourageSpec(1, 0.2).relates(solenoid8, x, y)


class TestRefining:
    """(eps, delta)-refining checks."""

    @pytest.mark.slow
    def test_solenoid_bond_is_not_refining(self):
        """The preimage of a point is an antipodal pair whose joining path wraps the coarse circle."""
        tower = solenoid_tower(2, 64)
        result = check_refining(tower, 0, 1, 0.3, 0.1, 0.05)
        assert result.status == FALSE
        a, b, x, y = result.counterexample
        assert compose_bond(tower, 0, 1)[x] == a
        assert compose_bond(tower, 0, 1)[y] == b
        assert tower.stages[1].d(x, y) > 0.6 * 2.0 / 2

    def test_small_solenoid(self, solenoid8):
        result = check_refining(solenoid8, 0, 1, 0.3, 0.15, 0.15)
        assert result.status == FALSE
        assert result.counterexample == (0, 0, 0, 8)
        assert result.nonnull == 1

    def test_identity_is_refining(self, identity_tower):
        result = check_refining(identity_tower, 0, 1, 2.5, 1.5, 1.5)
        assert result.status == TRUE
        assert result.witnesses[(0, 1)].points == (0, 1)
        assert result.witness(1, 0).points == (1, 0)
        assert result.witness(3, 3).points == (3,)
        assert result.witness(0, 3) is None

    def test_scale_order(self, identity_tower):
        with pytest.raises(ScaleOrderViolationError):
            check_refining(identity_tower, 0, 1, 1.5, 1.5, 1.0)
        with pytest.raises(ScaleOrderViolationError):
            check_refining(identity_tower, 1, 0, 2.5, 1.5, 1.0)

    def test_extend_along_chain(self, identity_tower):
        result = check_refining(identity_tower, 0, 1, 2.5, 1.5, 1.5)
        beta = Chain(1.5, (0, 1, 2, 3))
        alpha = extend_along_chain(identity_tower, result, beta, 0)
        assert alpha.points == (0, 1, 2, 3)
        assert alpha.scale == 1.5

    def test_extension_class_lifts_to_threads(self):
        """Extending along random delta-chains through a folding bond gives eps-null
        loops whose lifts to threads verify."""
        tower = Tower((1.0, 2.0), (cycle(6), cycle(12)), (np.arange(12) // 2,))
        refining = check_refining(tower, 0, 1, 2.5, 1.5, 1.5)
        assert refining.status == TRUE
        coarse = tower.stages[0]
        rng = np.random.default_rng(3)
        for _ in range(30):
            beta = [int(rng.integers(6))]
            for _ in range(3):
                beta.append(int(rng.choice(np.flatnonzero(coarse.dist[beta[-1]] < 1.5))))
            start = int(rng.choice(np.flatnonzero(compose_bond(tower, 0, 1) == beta[0])))
            alpha = extend_along_chain(tower, refining, Chain(1.5, tuple(beta)), start)
            assert alpha.start == start
            assert compose_bond(tower, 0, 1)[alpha.end] == beta[-1]

            image = [int(compose_bond(tower, 0, 1)[p]) for p in alpha.points]
            loop = Chain(2.5, tuple(image) + tuple(beta[-2::-1]))
            verdict = is_null(coarse, 2.5, loop)
            assert verdict.status == NULL, (beta, alpha.points)
            assert verify_homotopy(coarse, verdict.witness).ok

            thread = ThreadPoint((beta[0], start))
            lifted = lift_homotopy_with_endpoints(tower, 0, verdict.witness, 1, thread, thread)
            check = verify_thread_homotopy(tower, lifted)
            assert check.ok
            assert check.final.points == (beta[0],)

    def test_extend_needs_true(self, solenoid8):
        result = check_refining(solenoid8, 0, 1, 0.3, 0.15, 0.15)
        with pytest.raises(NotAHomotopyError):
            extend_along_chain(solenoid8, result, Chain(0.15, (0, 1)), 0)

    def test_extend_checks_start(self, identity_tower):
        result = check_refining(identity_tower, 0, 1, 2.5, 1.5, 1.5)
        with pytest.raises(InconsistentThreadError):
            extend_along_chain(identity_tower, result, Chain(1.5, (0, 1)), 2)
        with pytest.raises(ScaleOrderViolationError):
            extend_along_chain(identity_tower, result, Chain(2.0, (0, 1)), 0)


class TestGref:
    """Certificates from geodesic stages and small fibers."""

    def test_wide_fibers_not_applicable(self, solenoid8):
        cert = gref_certificate(solenoid8, 0, 1, 0.3)
        assert cert.status == NOT_APPLICABLE
        assert cert.reason == 'preimage_diameter'
        assert cert.preimage_diameter == pytest.approx(1.0)

    def test_non_geodesic_stage(self):
        coarse = build_space(cycle(4).dist)
        fine = build_space(cycle(8).dist)
        tower = Tower((1.0, 2.0), (coarse, fine), (np.arange(8) % 4,))
        assert gref_certificate(tower, 0, 1, 5.0).reason == 'geodesic'

    def test_identity_certified(self, identity_tower):
        cert = gref_certificate(identity_tower, 0, 1, 1.5)
        assert cert.certified
        assert 0 < cert.delta <= 1.5

    @pytest.mark.parametrize('radii,gap', [([1.0, 1.25, 1.5, 1.75], 0.25), ([1.0, 1.5, 2.0], 0.5)])
    def test_tree_product_spheres(self, radii, gap):
        tower = cat0_sphere_tower(radii)
        assert validate_tower(tower).ok
        for i in range(tower.depth):
            pd = preimage_diameter(tower, i, i + 1)
            assert pd <= 2 * gap + 1e-6
            for eps in (2 * gap + 0.05, 2 * gap + 0.3, 2.0):
                cert = gref_certificate(tower, i, i + 1, eps)
                assert cert.status == CERTIFIED, (i, eps, cert.reason)
                assert 0 < cert.kappa_floor < tower.stages[i + 1].dist.max()

    def test_sphere_stages_are_path_metrics(self):
        """Far pairs are joined through nearer sample points, not directly."""
        tower = cat0_sphere_tower([1.0, 1.25, 1.5])
        for stage in tower.stages:
            assert geodesic_mesh(stage) < stage.dist.max()

    def test_sphere_mesh_must_connect(self):
        with pytest.raises(SpecInvalidError):
            cat0_sphere_tower([1.0, 1.25], mesh=0.01)

    def test_applies_needs_kappa_above_floor(self, identity_tower):
        cert = gref_certificate(identity_tower, 0, 1, 2.5)
        assert cert.kappa_floor == pytest.approx(1.0)
        assert cert.applies(1.5, 1.5)
        assert not cert.applies(1.5, 1.0)
        assert not cert.applies(1.0, 1.5)
        assert check_refining(identity_tower, 0, 1, 2.5, 1.5, 1.0).status == FALSE


class TestInvlimScan:
    """Refining pattern over stage pairs and scales."""

    def test_solenoid_fails(self, solenoid8):
        report = invlim_scan(solenoid8, [0.3])
        assert report.summary == {0.3: FAILS}
        assert report.cells[0].method == 'search'
        assert report.to_rows()[0] == ['r', 't', 'eps', 'status', 'method']

    def test_identity_uses_gref(self, identity_tower):
        report = invlim_scan(identity_tower, [2.5])
        assert report.summary == {2.5: HOLDS}
        assert report.cells[0].method == 'gref'

    def test_kappa_below_floor_searches(self, identity_tower):
        """A certificate with kappa_floor 1.0 says nothing at fineness 0.9."""
        report = invlim_scan(identity_tower, [2.5], kappa=0.9)
        assert report.cells[0].method == 'search'
        assert report.summary == {2.5: FAILS}

    def test_jobs_do_not_change_cells(self):
        tower = cat0_sphere_tower([1.0, 1.25])
        serial = invlim_scan(tower, [0.6, 0.8], budget=20_000)
        threaded = invlim_scan(tower, [0.6, 0.8], budget=20_000, runner=ScanRunner(3))
        assert serial.cells == threaded.cells
        assert len(serial.cells) == 2 * tower.depth


class TestHomotopyLifting:
    """Stage homotopies lifted to threads with fixed endpoint threads."""

    def test_interior_removal(self, solenoid8):
        start = canonical_thread(solenoid8, 0, 0, 1)
        end = ThreadPoint((2, 10))
        homotopy = Homotopy(Chain(0.3, (0, 1, 2)), (Remove(1),))
        lifted = lift_homotopy_with_endpoints(solenoid8, 0, homotopy, 1, start, end)
        assert lifted.start[0] == start and lifted.start[-1] == end
        check = verify_thread_homotopy(solenoid8, lifted)
        assert check.ok
        assert check.final.points == (0, 2)

    def test_endpoint_splice(self, solenoid8):
        start = ThreadPoint((0, 8))
        end = canonical_thread(solenoid8, 0, 1, 1)
        homotopy = Homotopy(Chain(0.3, (0, 0, 1)), (Remove(0),))
        lifted = lift_homotopy_with_endpoints(solenoid8, 0, homotopy, 1, start, end)
        assert lifted.moves == (Insert(1, start), Remove(2), Remove(0))
        assert verify_thread_homotopy(solenoid8, lifted).ok

    def test_collapse_between_distinct_threads(self, solenoid8):
        homotopy = Homotopy(Chain(0.3, (0, 0)), (Remove(1),))
        with pytest.raises(InconsistentThreadError):
            lift_homotopy_with_endpoints(solenoid8, 0, homotopy, 1,
                                         ThreadPoint((0, 0)), ThreadPoint((0, 8)))

    def test_collapse_with_equal_threads(self, solenoid8):
        th = ThreadPoint((0, 8))
        homotopy = Homotopy(Chain(0.3, (0, 1, 0)), (Remove(1), Remove(1)))
        lifted = lift_homotopy_with_endpoints(solenoid8, 0, homotopy, 1, th, th)
        check = verify_thread_homotopy(solenoid8, lifted)
        assert check.ok and check.final.points == (0,)

    def test_rejects_bad_homotopy(self, solenoid8):
        homotopy = Homotopy(Chain(0.3, (0, 1, 2, 3)), (Remove(1), Remove(1)))
        with pytest.raises(NotAHomotopyError):
            lift_homotopy_with_endpoints(solenoid8, 0, homotopy, 1,
                                         ThreadPoint((0, 0)), ThreadPoint((3, 3)))

    def test_endpoint_threads_must_lie_over_endpoints(self, solenoid8):
        homotopy = Homotopy(Chain(0.3, (0, 1)))
        with pytest.raises(InconsistentThreadError):
            lift_homotopy_with_endpoints(solenoid8, 0, homotopy, 1,
                                         ThreadPoint((0, 0)), ThreadPoint((2, 2)))

    def test_verify_rejects_endpoint_insert(self, solenoid8):
        a, b = ThreadPoint((0, 0)), ThreadPoint((1, 1))
        bad = ThreadHomotopy(0, 0.3, (a, b), (Insert(0, ThreadPoint((0, 8))),))
        check = verify_thread_homotopy(solenoid8, bad)
        assert not check.ok
        assert check.reason == 'endpoint'
