#include <catch_amalgamated.hpp>

#include "qcorr/states.hpp"
#include "qcorr/channel.hpp"
#include "test_support.hpp"

using namespace qcorr;
using linalg::CMatrix4;

TEST_CASE("build_xstate: Bell state at the origin", "[states]") {
  const auto rho = build_xstate(0.0, 0.0);
  const double h = 1.0 / std::sqrt(2.0);
  const auto expected = testing::pure_density({0.0, h, h, 0.0});
  CHECK(linalg::max_abs_diff(rho.matrix(), expected.matrix()) <= 1e-15);
}

TEST_CASE("build_xstate: classical mixture at r = 1/2", "[states]") {
  CHECK(build_xstate(0.5, 0.0).matrix() == CMatrix4::diagonal({0.5, 0.0, 0.0, 0.5}));
}

TEST_CASE("build_xstate: names the violated eigenvalue", "[states]") {
  CHECK_THROWS_WITH(build_xstate(0.2, 0.3), Catch::Matchers::ContainsSubstring("lambda3 = r - s < 0"));
  CHECK_THROWS_WITH(build_xstate(0.2, -0.3), Catch::Matchers::ContainsSubstring("lambda4 = r + s < 0"));
  CHECK_THROWS_WITH(build_xstate(0.6, 0.0), Catch::Matchers::ContainsSubstring("lambda2 = 1 - 2r < 0"));
  CHECK_THROWS_AS(build_xstate(-0.1, 0.0), InvalidParamsError);
}

TEST_CASE("build_xstate: boundary of the triangle is physical", "[states]") {
  for (auto [r, s] : {std::pair{0.0, 0.0}, {0.5, 0.5}, {0.5, -0.5}, {0.25, 0.25}, {0.3, -0.3}, {0.5, 0.1}}) {
    CHECK_NOTHROW(validate_density(build_xstate(r, s).matrix()));
  }
}

TEST_CASE("validate_density: examples", "[states]") {
  CHECK_NOTHROW(validate_density(CMatrix4::identity() / Complex(4.0)));
  CHECK_NOTHROW(validate_density(build_xstate(0.15, 0.07).matrix()));

  try {
    validate_density(CMatrix4::diagonal({0.6, 0.6, -0.1, -0.1}));
    FAIL("expected rejection");
  } catch (const ValidationError& e) {
    REQUIRE(e.violations().size() == 1);
    CHECK_THAT(e.violations()[0], Catch::Matchers::ContainsSubstring("negative eigenvalue"));
  }
}

TEST_CASE("validate_density: reports each violation separately", "[states]") {
  CMatrix4 m = CMatrix4::diagonal({0.9, 0.9, -0.5, 0.0});
  m(0, 1) = Complex(0.0, 0.3);  // not Hermitian either
  try {
    validate_density(m);
    FAIL("expected rejection");
  } catch (const ValidationError& e) {
    CHECK(e.violations().size() == 3);
  }
}

TEST_CASE("family spectrum matches the eigensolver", "[states][property]") {
  testing::Engine rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const auto p = testing::random_params(rng);
    auto expected = p.spectrum().as_array();
    std::sort(expected.begin(), expected.end());
    const auto eig = linalg::hermitian_eig(build_xstate(p).matrix());
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(eig.eigenvalues[i] - expected[i]) <= 1e-10);
    double sum = 0.0;
    for (double l : expected) sum += l;
    CHECK(std::abs(sum - 1.0) <= 1e-15);
  }
}

TEST_CASE("family states are invariant under qubit exchange", "[states][property]") {
  testing::Engine rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const auto rho = build_xstate(testing::random_params(rng));
    CHECK(swap_qubits(rho) == rho);
  }
}

TEST_CASE("extract_params inverts build_xstate", "[states][property]") {
  CHECK(extract_params(build_xstate(0.32, 0.3)) == XStateParams{0.32, 0.3});

  testing::Engine rng(13);
  for (int trial = 0; trial < 500; ++trial) {
    const auto p = testing::random_params(rng);
    const auto q = extract_params(build_xstate(p));
    CHECK(std::abs(q.r - p.r) <= 1e-12);
    CHECK(std::abs(q.s - p.s) <= 1e-12);
  }
}

TEST_CASE("extract_params rejects states outside the family", "[states]") {
  const auto mixed = validate_density(CMatrix4::identity() / Complex(4.0));
  try {
    extract_params(mixed);
    FAIL("expected rejection");
  } catch (const NotInFamilyError& e) {
    CHECK(e.max_residual() == Catch::Approx(0.25));
    CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("middle block mismatch"));
  }
}

TEST_CASE("extract_params on evolved family states gives (r, s gamma^4)", "[states]") {
  const XStateParams p{0.37, 0.35};
  for (double t : {0.0, 0.1, 0.5786, 2.0, 8.0}) {
    const auto q = extract_params(apply_dephasing(build_xstate(p), t));
    CHECK(q.r == p.r);
    CHECK(std::abs(q.s - p.s * std::exp(-2.0 * t)) <= 1e-15);
    CHECK(q.is_physical());
  }
}
