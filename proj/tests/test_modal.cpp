#include <doctest.h>

#include <algorithm>

#include "dwell/modal.hpp"
#include "oracles.hpp"

using namespace dwell;

namespace {

RealMatrix example1_a() {
  RealMatrix a(3, 3);
  a << -0.2, 1.0, 0.0, -1.0, 1.4, 0.0, 0.0, 0.0, -0.4;
  return a;
}

RealMatrix jordan_block(double lam, int k) {
  RealMatrix j = RealMatrix::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    j(i, i) = lam;
    if (i + 1 < k) j(i, i + 1) = 1.0;
  }
  return j;
}

int count_superdiagonal(const ComplexMatrix& f, double eps) {
  int c = 0;
  for (Eigen::Index i = 0; i + 1 < f.rows(); ++i)
    if (std::abs(f(i, i + 1) - eps) < 1e-12) ++c;
  return c;
}

}  // namespace

TEST_CASE("eigendecompose: diagonal input") {
  RealMatrix a = RealMatrix::Zero(2, 2);
  a.diagonal() << 0.5, -0.3;
  const ModalForm f = eigendecompose(a);
  CHECK(f.kind == ModalKind::NonDefective);
  CHECK(f.spectral_radius == doctest::Approx(0.5));
  CHECK(f.factor_norm == doctest::Approx(0.5));
  // basis is the identity up to column order; factor carries both eigenvalues
  std::vector<double> eig;
  for (int i = 0; i < 2; ++i) eig.push_back(f.factor(i, i).real());
  std::sort(eig.begin(), eig.end());
  CHECK(eig[0] == doctest::Approx(-0.3));
  CHECK(eig[1] == doctest::Approx(0.5));
  const RealMatrix perm = abs_entrywise(f.basis);
  CHECK((perm * perm.transpose() - RealMatrix::Identity(2, 2)).norm() < 1e-12);
  CHECK(reconstruction_error(f, a) < 1e-12);
}

TEST_CASE("eigendecompose: complex pair plus real eigenvalue") {
  const RealMatrix a = example1_a();
  const ModalForm f = eigendecompose(a);
  CHECK(reconstruction_error(f, a) <= 1e-10);
  CHECK(f.spectral_radius == doctest::Approx(0.6 * std::sqrt(2.0)));
  for (int j = 0; j < 3; ++j) CHECK(std::abs(f.basis.col(j).norm() - 1.0) < 1e-12);
  // one real eigenvalue, one conjugate pair
  int complex_count = 0;
  for (int j = 0; j < 3; ++j)
    if (std::abs(f.factor(j, j).imag()) > 1e-12) ++complex_count;
  CHECK(complex_count == 2);
}

TEST_CASE("eigendecompose: defective and unstable inputs are rejected") {
  RealMatrix j(2, 2);
  j << 0.5, 1.0, 0.0, 0.5;
  CHECK_THROWS_AS(eigendecompose(j), DefectiveError);

  RealMatrix big = RealMatrix::Zero(2, 2);
  big.diagonal() << 1.1, 0.5;
  CHECK_THROWS_AS(eigendecompose(big), NotSchurStableError);

  // numerically defective: large block hidden by an orthogonal similarity
  const RealMatrix hidden = oracle::jordan_fixture({{0.5, 4}}, 99);
  CHECK_THROWS_AS(eigendecompose(hidden), DefectiveError);
}

TEST_CASE("eigendecompose: repeated eigenvalue gets orthonormal eigenvectors") {
  RealMatrix d = RealMatrix::Zero(3, 3);
  d.diagonal() << 0.5, 0.5, 0.3;
  const RealMatrix q = oracle::random_orthogonal(3, 5);
  const RealMatrix a = q * d * q.transpose();
  const ModalForm f = eigendecompose(a);
  std::vector<int> rep;
  for (int j = 0; j < 3; ++j)
    if (std::abs(f.factor(j, j).real() - 0.5) < 1e-7) rep.push_back(j);
  REQUIRE(rep.size() == 2);
  CHECK(std::abs(f.basis.col(rep[0]).dot(f.basis.col(rep[1]))) < 1e-10);
  CHECK(reconstruction_error(f, a) <= 1e-10);
}

TEST_CASE("jordan_decompose: diagonalizable input stays diagonal") {
  const RealMatrix a = example1_a();
  const ModalForm f = jordan_decompose(a, 0.1);
  CHECK(f.kind == ModalKind::Jordan);
  CHECK(std::abs(f.factor_norm - f.spectral_radius) < 1e-12);
  for (Eigen::Index i = 0; i + 1 < 3; ++i) CHECK(std::abs(f.factor(i, i + 1)) < 1e-14);
  CHECK(reconstruction_error(f, a) <= 1e-10);
}

TEST_CASE("jordan_decompose: 2x2 block with eps on the superdiagonal") {
  const RealMatrix a = jordan_block(0.5, 2);
  const ModalForm f = jordan_decompose(a, 0.2);
  CHECK(std::abs(f.factor(0, 0).real() - 0.5) < 1e-12);
  CHECK(std::abs(f.factor(1, 1).real() - 0.5) < 1e-12);
  CHECK(std::abs(f.factor(0, 1).real() - 0.2) < 1e-12);
  CHECK(std::abs(f.factor(0, 1).imag()) < 1e-14);
  CHECK(reconstruction_error(f, a) <= 1e-10);
  CHECK(std::abs(f.factor_norm - oracle::power_iteration_norm(f.factor)) < 1e-10);
}

TEST_CASE("jordan_decompose: 3x3 block norm obeys rho + eps") {
  const RealMatrix a = jordan_block(0.4, 3);
  const ModalForm f = jordan_decompose(a, 0.1);
  CHECK(f.factor_norm <= 0.5 + 1e-12);
  CHECK(std::abs(f.factor_norm - oracle::power_iteration_norm(f.factor)) < 1e-10);
  CHECK(reconstruction_error(f, a) <= 1e-10);
}

TEST_CASE("choose_epsilon") {
  RealMatrix half = RealMatrix::Zero(2, 2);
  half.diagonal() << 0.5, -0.25;
  CHECK(choose_epsilon(half) == doctest::Approx(0.25));

  const RealMatrix tight = jordan_block(0.99, 2);
  CHECK(choose_epsilon(tight) == doctest::Approx(0.005));
  const ModalForm f = jordan_decompose(tight, choose_epsilon(tight));
  CHECK(f.factor_norm < 1.0);

  RealMatrix nil(2, 2);
  nil << 0.0, 1.0, 0.0, 0.0;
  CHECK(choose_epsilon(nil) == doctest::Approx(0.5));

  RealMatrix unstable = RealMatrix::Identity(2, 2);
  CHECK_THROWS_AS(choose_epsilon(unstable), NotSchurStableError);
}

TEST_CASE("jordan_decompose: hidden blocks and mixed structures") {
  struct Fixture {
    std::vector<std::pair<double, int>> blocks;
    std::uint64_t seed;
    int eps_entries;
  };
  const std::vector<Fixture> fixtures = {
      {{{0.5, 2}}, 1, 1},
      {{{-0.6, 3}}, 2, 2},
      {{{0.7, 4}}, 3, 3},
      {{{0.5, 2}, {0.5, 2}}, 4, 2},            // two blocks, same eigenvalue
      {{{0.4, 3}, {-0.3, 1}}, 5, 2},
      {{{0.6, 4}, {0.2, 2}, {-0.5, 2}}, 6, 5},  // n = 8
  };
  for (const auto& fx : fixtures) {
    const RealMatrix a = oracle::jordan_fixture(fx.blocks, fx.seed);
    const double eps = choose_epsilon(a);
    const ModalForm f = jordan_decompose(a, eps);
    CHECK(f.factor_norm < 1.0);
    CHECK(reconstruction_error(f, a) <= 1e-8 * std::max(1.0, spectral_norm(a)));
    CHECK(count_superdiagonal(f.factor, eps) == fx.eps_entries);
  }
}

TEST_CASE("jordan_decompose: defective block next to a full repeated eigenspace") {
  // diag(0.3, 0.3) block is repeated but has a full eigenspace; only the
  // 2-chain at 0.5 picks up an eps entry
  RealMatrix j = RealMatrix::Zero(4, 4);
  j(0, 0) = j(1, 1) = 0.3;
  j(2, 2) = j(3, 3) = 0.5;
  j(2, 3) = 1.0;
  const RealMatrix q = oracle::random_orthogonal(4, 23);
  const RealMatrix a = q * j * q.transpose();
  const ModalForm f = jordan_decompose(a, 0.1);
  CHECK(count_superdiagonal(f.factor, 0.1) == 1);
  CHECK(reconstruction_error(f, a) <= 1e-8 * std::max(1.0, spectral_norm(a)));
  CHECK(f.factor_norm < 1.0);
}

TEST_CASE("jordan_decompose: defective complex-conjugate pair") {
  const RealMatrix a = oracle::complex_defective_fixture(0.6, 0.8, 17);
  const double eps = choose_epsilon(a);
  const ModalForm f = jordan_decompose(a, eps);
  CHECK(f.factor_norm < 1.0);
  CHECK(reconstruction_error(f, a) <= 1e-8 * std::max(1.0, spectral_norm(a)));
  CHECK(count_superdiagonal(f.factor, eps) == 2);  // one per conjugate chain
}

TEST_CASE("jordan_decompose: eps guarantee property") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const int size = 2 + static_cast<int>(seed % 3);
    const double lam = -0.9 + 0.23 * static_cast<double>(seed);
    const RealMatrix a =
        oracle::jordan_fixture({{std::clamp(lam, -0.9, 0.9), size}}, 700 + seed);
    const ModalForm f = jordan_decompose(a, choose_epsilon(a));
    CHECK(f.factor_norm < 1.0);
    CHECK(reconstruction_error(f, a) <= 1e-8 * std::max(1.0, spectral_norm(a)));
  }
}

TEST_CASE("jordan_decompose: rejects bad arguments") {
  const RealMatrix a = jordan_block(0.5, 2);
  CHECK_THROWS_AS(jordan_decompose(a, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(jordan_decompose(RealMatrix(RealMatrix::Identity(2, 2)), 0.1),
                  NotSchurStableError);
}

TEST_CASE("transient_gamma is at least one") {
  const ModalForm f1 = eigendecompose(example1_a());
  const ModalForm f2 = eigendecompose(RealMatrix(0.5 * RealMatrix::Identity(3, 3)));
  CHECK(transient_gamma({f1, f2}) >= 1.0 - 1e-12);
}
