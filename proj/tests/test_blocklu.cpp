#include <cmath>

#include "commfactor/blocklu.hpp"
#include "commfactor/random.hpp"
#include "doctest.h"

using namespace commfactor;

namespace {

// u (1 + delta H / |H|): polar part u, distance to the unitaries exactly delta
CMatrix near_unitary(Sampler& rng, int n, double delta) {
    const CMatrix h = rng.hermitian(n);
    return rng.unitary(n) * (CMatrix::identity(n) + h * cplx(delta / norm2(h)));
}

bool block_lower_unitriangular(const StdFactors& f, const CMatrix& m, bool lower) {
    const CMatrix y = f.blocks.frame.adjoint() * m * f.blocks.frame;
    const auto r = f.blocks.ranks();
    const auto o = f.blocks.offsets();
    for (size_t i = 0; i < r.size(); ++i)
        for (size_t j = 0; j < r.size(); ++j) {
            const CMatrix b = block(y, o[i], o[j], r[i], r[j]);
            if (i == j && norm_max(b - CMatrix::identity(r[i])) > 1e-10) return false;
            if ((lower ? i < j : i > j) && norm_max(b) > 1e-10) return false;
        }
    return true;
}

bool block_diagonal(const StdFactors& f) {
    const CMatrix y = f.blocks.frame.adjoint() * f.d * f.blocks.frame;
    const auto r = f.blocks.ranks();
    const auto o = f.blocks.offsets();
    for (size_t i = 0; i < r.size(); ++i)
        for (size_t j = 0; j < r.size(); ++j)
            if (i != j && norm_max(block(y, o[i], o[j], r[i], r[j])) > 1e-10) return false;
    return true;
}

Projection coordinate_projection(int n, int r) { return make_projection(CMatrix::identity(n), r); }

}  // namespace

TEST_CASE("schur_std examples") {
    SUBCASE("block diagonal input") {
        const CMatrix x{{2, 0, 0}, {0, 3, 1}, {0, 1, 4}};
        const auto f = schur_std(x, coordinate_projection(3, 1));
        CHECK(norm_max(f.s - CMatrix::identity(3)) == 0.0);
        CHECK(norm_max(f.t - CMatrix::identity(3)) == 0.0);
        CHECK(norm_max(f.d - x) <= 1e-15);
    }
    SUBCASE("hand Schur complement of [[2,1],[1,1]]") {
        const CMatrix x{{2, 1}, {1, 1}};
        const auto f = schur_std(x, coordinate_projection(2, 1));
        CHECK(norm_max(f.s - CMatrix{{1, 0}, {0.5, 1}}) <= 1e-15);
        CHECK(norm_max(f.t - CMatrix{{1, 0.5}, {0, 1}}) <= 1e-15);
        CHECK(norm_max(f.d - CMatrix{{2, 0}, {0, 0.5}}) <= 1e-15);
        // s d t multiplied out by hand: [[1,0],[1/2,1]] [[2,0],[0,1/2]] = [[2,0],[1,1/2]], then times t
        CHECK(norm_max(f.s * f.d * f.t - x) <= 1e-15);
        CHECK(f.levels[0].cross == doctest::Approx(0.5));
        CHECK(f.levels[0].threshold == doctest::Approx(1.0));
    }
    SUBCASE("positive input has positive d blocks") {
        Sampler rng(2);
        int checked = 0;
        for (int trial = 0; trial < 40 && checked < 10; ++trial) {
            const CMatrix x = rng.positive(6, 1.0, 1.5);
            try {
                const auto f = schur_std(x, coordinate_projection(6, 2));
                CHECK(f.levels[0].positive_blocks);
                CHECK(f.recon_err <= 1e-10);
                ++checked;
            } catch (const Error& e) {
                CHECK(e.kind() == ErrorKind::SchurConditionViolated);
            }
        }
        CHECK(checked > 0);
    }
    SUBCASE("violated condition is reported") {
        const CMatrix x{{1, 3}, {3, 1}};
        try {
            schur_std(x, coordinate_projection(2, 1));
            FAIL("expected an exception");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::SchurConditionViolated);
        }
    }
    SUBCASE("singular corner") {
        const CMatrix x{{0, 1}, {1, 0}};
        CHECK_THROWS_AS(schur_std(x, coordinate_projection(2, 1)), Error);
    }
}

TEST_CASE("schur_std certificates") {
    Sampler rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = rng.integer(3, 8);
        const CMatrix x = near_unitary(rng, n, 0.05);
        const auto choice = select_projection(x, rng.integer(1, n - 1));
        const auto f = schur_std(x, choice.p);
        CHECK(f.recon_err <= 1e-10);
        CHECK(block_lower_unitriangular(f, f.s, true));
        CHECK(block_lower_unitriangular(f, f.t, false));
        CHECK(block_diagonal(f));
        CHECK(std::abs(det(f.s) - 1.0) <= 1e-9);
        CHECK(std::abs(det(f.t) - 1.0) <= 1e-9);
        const auto& c = f.levels[0];
        CHECK(std::abs(c.dist_pdp - c.dist_pxp) <= 1e-8);
        CHECK(c.dist_qdq <= c.dist_qxq + c.cross + 1e-12);
    }
}

TEST_CASE("select_projection") {
    SUBCASE("identity") {
        const auto c = select_projection(CMatrix::identity(4), 2);
        CHECK(c.p.rank == 2);
        CHECK(c.split.cross == 0.0);
    }
    SUBCASE("diagonal unitary") {
        const CMatrix u = CMatrix::diag({std::polar(1.0, 0.3), std::polar(1.0, -1.0), std::polar(1.0, 2.0)});
        const auto c = select_projection(u, 1);
        CHECK(c.split.cross <= 1e-15);
        CHECK(c.split.dist_pxp <= 1e-12);
        CHECK(c.split.dist_qxq <= 1e-12);
        // a coordinate projection up to phases
        const CMatrix& p = c.p.matrix;
        int ones = 0;
        for (int k = 0; k < 3; ++k) ones += std::abs(p(k, k) - 1.0) < 1e-12;
        CHECK(ones == 1);
    }
    SUBCASE("near-unitary n = 8, r = 3 meets the three bounds") {
        Sampler rng(7);
        const CMatrix x = near_unitary(rng, 8, 0.05);
        const auto c = select_projection(x, 3);
        CHECK(c.p.rank == 3);
        CHECK(c.dist == doctest::Approx(0.05).epsilon(1e-9));
        // independent evaluation of the bound from the measured distance
        const double de = c.dist + 1e-3;
        CHECK(c.split.cross <= de * de / std::sqrt(1 - 2.1 * de));
        CHECK(c.split.dist_pxp <= de);
        CHECK(c.split.dist_qxq <= de);
        CHECK(c.split.cross < c.split.threshold);
    }
    SUBCASE("far from the unitaries and not positive") {
        const CMatrix x{{3, 1}, {0, 1}};
        CHECK_THROWS_AS(select_projection(x, 1), Error);
    }
    SUBCASE("rank out of range") { CHECK_THROWS_AS(select_projection(CMatrix::identity(3), 3), Error); }
}

TEST_CASE("two_class_ranks") {
    CHECK(two_class_ranks(8, 4) == std::vector<int>{2, 2, 2, 2});
    CHECK(two_class_ranks(12, 6) == std::vector<int>{2, 2, 2, 2, 2, 2});
    CHECK(two_class_ranks(10, 4) == std::vector<int>{3, 3, 2, 2});
    CHECK(two_class_ranks(5, 1) == std::vector<int>{5});
    for (int n = 2; n <= 20; ++n)
        for (int k = 1; k <= n; ++k) {
            const auto r = two_class_ranks(n, k);
            CHECK(static_cast<int>(r.size()) == k);
            int sum = 0;
            for (int v : r) {
                CHECK(v >= 1);
                sum += v;
            }
            CHECK(sum == n);
        }
    CHECK_THROWS_AS(two_class_ranks(3, 4), Error);
}

TEST_CASE("recursive_std") {
    SUBCASE("identity") {
        const auto f = recursive_std(CMatrix::identity(4), 4);
        CHECK(dist_to_identity(f.s) <= 1e-14);
        CHECK(dist_to_identity(f.t) <= 1e-14);
        CHECK(dist_to_identity(f.d) <= 1e-14);
    }
    SUBCASE("special unitary n = 8, k = 4") {
        Sampler rng(12);
        const CMatrix u = rng.special_unitary(8);
        const auto f = recursive_std(u, 4);
        CHECK(f.recon_err <= 1e-8);
        CHECK(f.blocks.ranks() == std::vector<int>{2, 2, 2, 2});
        CHECK(block_lower_unitriangular(f, f.s, true));
        CHECK(block_lower_unitriangular(f, f.t, false));
        CHECK(block_diagonal(f));
        CHECK(f.levels.size() == 3);
    }
    SUBCASE("positive n = 12, k = 6") {
        Sampler rng(13);
        const CMatrix h = scale_to_unit_det(rng.positive(12));
        const auto f = recursive_std(h, 6);
        CHECK(f.recon_err <= 1e-8);
        for (const auto& c : f.levels) CHECK(c.positive_blocks);
        const auto r = f.blocks.ranks();
        const auto o = f.blocks.offsets();
        const CMatrix y = f.blocks.frame.adjoint() * f.d * f.blocks.frame;
        for (size_t j = 0; j < r.size(); ++j) CHECK(block(y, o[j], o[j], r[j], r[j]).is_positive_invertible());
    }
    SUBCASE("near-unitary inputs with off-diagonal structure") {
        Sampler rng(14);
        for (int trial = 0; trial < 10; ++trial) {
            const CMatrix x = near_unitary(rng, 9, 0.03);
            const auto f = recursive_std(x, 3);
            CHECK(f.recon_err <= 1e-8);
            CHECK(block_lower_unitriangular(f, f.s, true));
            CHECK(block_lower_unitriangular(f, f.t, false));
            CHECK(block_diagonal(f));
        }
    }
    SUBCASE("general invertible is refused") {
        const CMatrix x{{3, 1, 0}, {0, 1, 0}, {0, 0, 1.0 / 3}};
        CHECK_THROWS_AS(recursive_std(x, 2), Error);
    }
}

TEST_CASE("unitriangular_commutator") {
    SUBCASE("identity") {
        const auto bd = make_block_decomposition(CMatrix::identity(3), {1, 2});
        const auto p = unitriangular_commutator(CMatrix::identity(3), bd);
        CHECK(dist_to_identity(p.y) == 0.0);
        CHECK(dist_to_identity(p.value()) <= 1e-15);
    }
    SUBCASE("2x2 hand solve") {
        const CMatrix t{{1, 1}, {0, 1}};
        const auto bd = make_block_decomposition(CMatrix::identity(2), {1, 1});
        const auto p = unitriangular_commutator(t, bd);
        CHECK(norm_max(p.x - CMatrix{{2, 0}, {0, 1}}) == 0.0);
        // (2 - 1) v_12 = t_12
        CHECK(norm_max(p.y - CMatrix{{1, 1}, {0, 1}}) <= 1e-15);
        // g v g^-1 = [[1,2],[0,1]] = t v
        CHECK(norm_max(p.x * p.y * inverse(p.x) - t * p.y) <= 1e-15);
        CHECK(norm_max(p.value() - t) <= 1e-15);
    }
    SUBCASE("seeded 9x9 with 3 blocks, both orientations") {
        Sampler rng(21);
        const CMatrix frame = rng.unitary(9);
        const auto bd = make_block_decomposition(frame, {3, 3, 3});
        for (bool upper : {true, false}) {
            CMatrix y = CMatrix::identity(9);
            for (int i = 0; i < 9; ++i)
                for (int j = 0; j < 9; ++j)
                    if (upper ? j / 3 > i / 3 : j / 3 < i / 3) y(i, j) = rng.complex_normal();
            const CMatrix t = frame * y * frame.adjoint();
            const auto p = unitriangular_commutator(t, bd);
            CHECK(norm2(p.value() - t) <= 1e-9);
            CHECK(p.condition == doctest::Approx(4.0));
        }
    }
    SUBCASE("not unitriangular") {
        const auto bd = make_block_decomposition(CMatrix::identity(2), {1, 1});
        CHECK_THROWS_AS(unitriangular_commutator(CMatrix{{2, 1}, {0, 1}}, bd), Error);
        CHECK_THROWS_AS(unitriangular_commutator(CMatrix{{1, 1}, {1, 1}}, bd), Error);
    }
}

TEST_CASE("recursive_std factors feed unitriangular_commutator") {
    Sampler rng(31);
    const CMatrix x = near_unitary(rng, 10, 0.04);
    const auto f = recursive_std(x, 4);
    const auto ps = unitriangular_commutator(f.s, f.blocks);
    const auto pt = unitriangular_commutator(f.t, f.blocks);
    CHECK(norm2(ps.value() - f.s) <= 1e-9);
    CHECK(norm2(pt.value() - f.t) <= 1e-9);
}
