#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qae/mesh.hpp"
#include "qae/state_prep.hpp"
#include "oracles.hpp"

using qae::cplx;
using qae::CMat;
using qae::PureState;

TEST_CASE("half-wave plate matches its closed form") {
    for (double th : {0.0, 13.0, 45.0, 90.0, 151.5}) {
        const CMat j = qae::jones_matrix(qae::WavePlate::half(th));
        const double t = qae::deg_to_rad(th);
        CHECK(std::abs(j(0, 0) - cplx(std::cos(2 * t))) < 1e-15);
        CHECK(std::abs(j(0, 1) - cplx(std::sin(2 * t))) < 1e-15);
        CHECK(std::abs(j(1, 0) - cplx(std::sin(2 * t))) < 1e-15);
        CHECK(std::abs(j(1, 1) - cplx(-std::cos(2 * t))) < 1e-15);
    }
}

TEST_CASE("quarter-wave plate matches its closed form") {
    for (double th : {0.0, 27.0, 45.0, 120.0}) {
        const CMat j = qae::jones_matrix(qae::WavePlate::quarter(th));
        const double c = std::cos(qae::deg_to_rad(th));
        const double s = std::sin(qae::deg_to_rad(th));
        CHECK(std::abs(j(0, 0) - cplx(c * c, s * s)) < 1e-15);
        CHECK(std::abs(j(0, 1) - cplx(1.0, -1.0) * (s * c)) < 1e-15);
        CHECK(std::abs(j(1, 0) - cplx(1.0, -1.0) * (s * c)) < 1e-15);
        CHECK(std::abs(j(1, 1) - cplx(s * s, c * c)) < 1e-15);
    }
}

TEST_CASE("general retarder agrees with the rotation-sandwich construction") {
    qae::Rng rng(17);
    for (int rep = 0; rep < 50; ++rep) {
        const double th = rng.uniform(0.0, 180.0);
        const double delta = rng.uniform(0.0, 2.0 * qae::pi);
        const CMat j = qae::jones_matrix(qae::WavePlate::retarder(th, delta));
        CHECK(oracle::max_entry_diff(j, oracle::jones_reference(th, delta)) < 1e-15);
    }
}

TEST_CASE("half and quarter plates are the fixed-retardance specials") {
    for (double th : {8.0, 77.0, 132.0}) {
        CHECK(oracle::max_entry_diff(
                  qae::jones_matrix(qae::WavePlate::half(th)),
                  oracle::jones_reference(th, qae::pi)) < 1e-15);
        CHECK(oracle::max_entry_diff(
                  qae::jones_matrix(qae::WavePlate::quarter(th)),
                  oracle::jones_reference(th, qae::pi / 2.0)) < 1e-15);
    }
}

TEST_CASE("plate matrices are unitary with unit-modulus determinant phase") {
    qae::Rng rng(29);
    for (int rep = 0; rep < 20; ++rep) {
        const double th = rng.uniform(0.0, 180.0);
        const double delta = rng.uniform(0.0, 2.0 * qae::pi);
        const CMat j = qae::jones_matrix(qae::WavePlate::retarder(th, delta));
        CHECK(qae::unitarity_defect(j) < 1e-15);
        const cplx det = j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0);
        // det R(θ) = 1, so det J = e^{iδ}
        CHECK(std::abs(det - std::exp(cplx(0.0, delta))) < 1e-15);
    }
}

TEST_CASE("plate action is 180-degree periodic") {
    for (double th : {10.0, 66.0}) {
        CHECK(oracle::max_entry_diff(
                  qae::jones_matrix(qae::WavePlate::half(th)),
                  qae::jones_matrix(qae::WavePlate::half(th + 180.0))) < 1e-14);
        CHECK(oracle::max_entry_diff(
                  qae::jones_matrix(qae::WavePlate::quarter(th)),
                  qae::jones_matrix(qae::WavePlate::quarter(th + 180.0))) < 1e-14);
    }
}

TEST_CASE("mesh layout for three modes keeping two has two gates") {
    const qae::MeshLayout m = qae::build_mesh(3, 2);
    REQUIRE(m.gates.size() == 2);
    CHECK(m.gates[0].mode_lo == 0);
    CHECK(m.gates[1].mode_lo == 1);
    CHECK(m.param_count() == 4);
    CHECK(m.gates[0].hwp_index == 0);
    CHECK(m.gates[0].qwp_index == 1);
    CHECK(m.gates[1].hwp_index == 2);
    CHECK(m.gates[1].qwp_index == 3);
}

TEST_CASE("mesh gate count follows the triangular-difference law") {
    for (std::size_t d = 2; d <= 8; ++d)
        for (std::size_t n = 1; n < d; ++n) {
            const qae::MeshLayout m = qae::build_mesh(d, n);
            CHECK(m.gates.size() == (d * (d - 1)) / 2 - (n * (n - 1)) / 2);
            CHECK(m.param_count() == 2 * m.gates.size());
        }
}

TEST_CASE("mesh construction rejects bad mode counts") {
    CHECK_THROWS_AS(qae::build_mesh(3, 0), std::invalid_argument);
    CHECK_THROWS_AS(qae::build_mesh(3, 3), std::invalid_argument);
    CHECK_THROWS_AS(qae::build_mesh(2, 5), std::invalid_argument);
}

TEST_CASE("mesh unitary matches the dense embedded product") {
    qae::Rng rng(55);
    for (auto [d, n] : {std::pair<std::size_t, std::size_t>{3, 2},
                        {4, 2},
                        {5, 3},
                        {6, 1}}) {
        const qae::MeshLayout layout = qae::build_mesh(d, n);
        std::vector<double> angles(layout.param_count());
        for (double& a : angles) a = rng.uniform(0.0, 360.0);
        const qae::ParameterVector x = qae::wrapped(angles);
        CHECK(oracle::max_entry_diff(qae::mesh_unitary(layout, x),
                                     oracle::dense_mesh(layout, x)) < 1e-13);
        CHECK(qae::unitarity_defect(qae::mesh_unitary(layout, x)) < 1e-14);
    }
}

TEST_CASE("the kept-corner mesh entry is a structural zero") {
    // for (d, n) = (3, 2) no gate row reaches from mode 0 straight to mode
    // 2, so the (1,3) entry is never written: zero to the last bit
    const qae::MeshLayout layout = qae::build_mesh(3, 2);
    qae::Rng rng(91);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> angles(4);
        for (double& a : angles) a = rng.uniform(0.0, 360.0);
        const CMat u = qae::mesh_unitary(layout, qae::wrapped(angles));
        CHECK(u(0, 2) == cplx(0.0, 0.0));
    }
}

TEST_CASE("mesh unitary validates the parameter count") {
    const qae::MeshLayout layout = qae::build_mesh(3, 2);
    CHECK_THROWS_AS(qae::mesh_unitary(layout, qae::wrapped({1.0, 2.0, 3.0})),
                    std::invalid_argument);
}

TEST_CASE("angle wrapping lands in the principal interval") {
    CHECK(qae::wrap_angle(365.0) == Catch::Approx(5.0));
    CHECK(qae::wrap_angle(-10.0) == Catch::Approx(350.0));
    CHECK(qae::wrap_angle(360.0) == 0.0);
    CHECK(qae::wrap_angle(0.0) == 0.0);
    CHECK(qae::wrap_angle(719.5) == Catch::Approx(359.5));
}

TEST_CASE("the default scrambler retardance is the dispersion ratio") {
    CHECK(qae::default_scrambler_retardance() ==
          Catch::Approx(2.0 * qae::pi * 404.0 / 810.0).epsilon(1e-15));
}

TEST_CASE("family isometries have orthonormal columns") {
    qae::PreparationFamily phys;
    phys.scrambler_angle_deg = 37.0;
    qae::PreparationFamily haar;
    haar.kind = qae::FamilyKind::haar;
    haar.haar_seed = 6;
    haar.scrambler_angle_deg = 122.0;
    for (const auto& fam : {phys, haar}) {
        const CMat v = qae::family_isometry(fam);
        REQUIRE(v.rows() == 3);
        REQUIRE(v.cols() == 2);
        CHECK(oracle::max_entry_diff(qae::adjoint(v) * v, CMat::identity(2)) <
              1e-13);
    }
}

TEST_CASE("prepared states are normalized") {
    qae::PreparationFamily fam;
    fam.scrambler_angle_deg = 61.0;
    qae::Rng rng(3);
    for (int rep = 0; rep < 20; ++rep) {
        const PureState s =
            qae::prepare_state(fam, {rng.uniform(0.0, 180.0),
                                     rng.uniform(0.0, 180.0)});
        REQUIRE(s.dim() == 3);
        CHECK(qae::norm(s) == Catch::Approx(1.0).margin(1e-14));
    }
}

TEST_CASE("zeroed plates prepare the first basis state") {
    // HWP(0) and QWP(0) leave (1,0) alone, and the scrambler only ever
    // mixes the second and third modes, so the first column survives intact
    qae::PreparationFamily fam;
    fam.scrambler_angle_deg = 83.0;
    const PureState s = qae::prepare_state(fam, {0.0, 0.0});
    CHECK(std::abs(s.amps[0] - cplx(1.0)) < 1e-15);
    CHECK(std::abs(s.amps[1]) < 1e-15);
    CHECK(std::abs(s.amps[2]) < 1e-15);
}

TEST_CASE("sampled preparation settings stay in the half-turn range") {
    const auto settings = qae::sample_prep_settings(50, 7);
    REQUIRE(settings.size() == 50);
    for (const auto& p : settings) {
        CHECK(p.h_deg >= 0.0);
        CHECK(p.h_deg < 180.0);
        CHECK(p.q_deg >= 0.0);
        CHECK(p.q_deg < 180.0);
    }
    CHECK_THROWS_AS(qae::sample_prep_settings(0, 7), std::invalid_argument);
    const auto again = qae::sample_prep_settings(50, 7);
    for (std::size_t i = 0; i < 50; ++i) {
        CHECK(settings[i].h_deg == again[i].h_deg);
        CHECK(settings[i].q_deg == again[i].q_deg);
    }
}

TEST_CASE("drift steps the scrambler and a full turn comes back") {
    qae::PreparationFamily fam;
    fam.scrambler_angle_deg = 150.0;
    qae::PreparationFamily walked = fam;
    for (int i = 0; i < 90; ++i) walked = qae::drift_family(walked, 4.0);
    CHECK(walked.scrambler_angle_deg == Catch::Approx(150.0).margin(1e-9));
    CHECK(oracle::max_entry_diff(qae::family_isometry(walked),
                                 qae::family_isometry(fam)) < 1e-12);

    const qae::PreparationFamily once = qae::drift_family(fam, 4.0);
    CHECK(once.scrambler_angle_deg == Catch::Approx(154.0));
    const qae::PreparationFamily wrapped = qae::drift_family(fam, 215.0);
    CHECK(wrapped.scrambler_angle_deg == Catch::Approx(5.0));
}
