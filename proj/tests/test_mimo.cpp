#include "doctest.h"

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "cps/mimo.hpp"
#include "cps/rng.hpp"

using namespace cps;
using cd = std::complex<double>;

TEST_CASE("constellations carry unit energy and Gray labels") {
  const Constellation qpsk = Constellation::qpsk();
  REQUIRE(qpsk.points.size() == 4);
  CHECK(qpsk.bits_per_symbol == 2);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(qpsk.points[0] == cd{s, s});
  CHECK(qpsk.points[1] == cd{-s, s});
  CHECK(qpsk.points[3] == cd{-s, -s});
  CHECK(qpsk.points[2] == cd{s, -s});

  const Constellation qam = Constellation::qam16();
  REQUIRE(qam.points.size() == 16);
  CHECK(qam.bits_per_symbol == 4);
  const double t = 1.0 / std::sqrt(10.0);
  CHECK(qam.points[0b0000] == cd{-3 * t, -3 * t});
  CHECK(qam.points[0b0110] == cd{-t, 3 * t});
  CHECK(qam.points[0b1111] == cd{t, t});
  CHECK(qam.points[0b1010] == cd{3 * t, 3 * t});

  for (const Constellation* c : {&qpsk, &qam}) {
    double energy = 0.0;
    for (cd p : c->points) energy += std::norm(p);
    energy /= static_cast<double>(c->points.size());
    CHECK(energy == doctest::Approx(1.0).epsilon(1e-12));
  }

  // per-axis Gray property: adjacent 16QAM columns differ in exactly one bit
  const int axis_order[4] = {0b00, 0b01, 0b11, 0b10};  // -3,-1,+1,+3
  for (int k = 0; k + 1 < 4; ++k) {
    unsigned diff = static_cast<unsigned>(axis_order[k] ^ axis_order[k + 1]);
    CHECK(std::popcount(diff) == 1);
  }
}

TEST_CASE("slicing") {
  const Constellation qpsk = Constellation::qpsk();
  const Constellation qam = Constellation::qam16();

  for (int label = 0; label < 4; ++label)
    CHECK(slice_one(qpsk.points[label], qpsk) == label);
  for (int label = 0; label < 16; ++label)
    CHECK(slice_one(qam.points[label], qam) == label);

  // the origin is equidistant from all QPSK points: smallest label wins
  CHECK(slice_one(cd{0.0, 0.0}, qpsk) == 0);

  // perturbations below half the minimum distance never flip the decision
  RandomStream rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const int ql = trial % 4;
    const cd dq{rng.uniform(-0.24, 0.24), rng.uniform(-0.24, 0.24)};
    CHECK(slice_one(qpsk.points[ql] + 0.5 * dq, qpsk) == ql);
    const int ml = trial % 16;
    const cd dm{rng.uniform(-0.15, 0.15), rng.uniform(-0.15, 0.15)};
    CHECK(slice_one(qam.points[ml] + dm, qam) == ml);
  }

  Eigen::VectorXcd soft(3);
  soft << qpsk.points[2], qpsk.points[0], qpsk.points[3];
  CHECK(slice(soft, qpsk) == std::vector<int>{2, 0, 3});
}

TEST_CASE("bit errors") {
  const std::vector<int> sent{0b00, 0b11, 0b10, 0b01};
  CHECK(bit_errors(sent, sent) == 0);
  CHECK(bit_errors(sent, std::vector<int>{0b01, 0b11, 0b10, 0b01}) == 1);
  CHECK(bit_errors(sent, std::vector<int>{0b11, 0b00, 0b01, 0b10}) == 8);
  CHECK(bit_errors(std::vector<int>{0b0000}, std::vector<int>{0b1111}) == 4);
  CHECK_THROWS_AS(bit_errors(sent, std::vector<int>{1}), std::invalid_argument);
}

TEST_CASE("channel generator") {
  const Eigen::MatrixXcd h = gen_channel(3, 5, std::uint64_t{91});
  CHECK(h.rows() == 3);
  CHECK(h.cols() == 5);
  CHECK(gen_channel(3, 5, std::uint64_t{91}) == h);

  // row-major fill order straight off the stream
  RandomStream rng(91);
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 5; ++j) {
      const double re = s * rng.normal(), im = s * rng.normal();
      CHECK(h(i, j) == cd{re, im});
    }

  // unit average entry energy
  const Eigen::MatrixXcd big = gen_channel(300, 350, std::uint64_t{14});
  double acc = 0.0;
  for (int i = 0; i < 300; ++i)
    for (int j = 0; j < 350; ++j) acc += std::norm(big(i, j));
  acc /= 300.0 * 350.0;
  CHECK(std::fabs(acc - 1.0) <= 0.02);

  CHECK_THROWS_AS(gen_channel(0, 2, std::uint64_t{1}), std::invalid_argument);
}

TEST_CASE("zero-forcing detection") {
  const Constellation qpsk = Constellation::qpsk();

  // identity channel: detection is pure slicing
  Eigen::VectorXcd y(2);
  y << qpsk.points[3], qpsk.points[1];
  CHECK(zf_detect(y, Eigen::MatrixXcd::Identity(2, 2), qpsk) ==
        std::vector<int>{3, 1});

  // noiseless square channel: exact recovery
  RandomStream rng(55);
  const Eigen::MatrixXcd h = gen_channel(8, 8, rng);
  std::vector<int> sent(8);
  Eigen::VectorXcd x(8);
  for (int i = 0; i < 8; ++i) {
    sent[i] = static_cast<int>(rng.uniform() * 4) % 4;
    x[i] = qpsk.points[sent[i]];
  }
  CHECK(zf_detect(h * x, h, qpsk) == sent);
  CHECK_THROWS_AS(zf_detect(y, h, qpsk), std::invalid_argument);
}

TEST_CASE("mmse detection") {
  const Constellation qpsk = Constellation::qpsk();
  RandomStream rng(66);
  const Eigen::MatrixXcd h = gen_channel(4, 4, rng);
  Eigen::VectorXcd x(4);
  for (int i = 0; i < 4; ++i) x[i] = qpsk.points[static_cast<int>(rng.uniform() * 4) % 4];
  Eigen::VectorXcd y = h * x;
  for (int i = 0; i < 4; ++i) y[i] += cd{0.05 * rng.normal(), 0.05 * rng.normal()};

  const double sigma_v2 = 0.2;
  const MmseResult got = mmse_detect(y, h, sigma_v2, qpsk);

  // explicit-inverse oracle
  const Eigen::MatrixXcd gram =
      h.adjoint() * h + sigma_v2 * Eigen::MatrixXcd::Identity(4, 4);
  const Eigen::VectorXcd ref = gram.inverse() * (h.adjoint() * y);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(got.soft[i] - ref[i]) <= 1e-10);
  CHECK(got.hard == slice(got.soft, qpsk));

  // zero noise variance degenerates to zero forcing
  const MmseResult zero = mmse_detect(y, h, 0.0, qpsk);
  const Eigen::VectorXcd lsq = h.colPivHouseholderQr().solve(y);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(zero.soft[i] - lsq[i]) <= 1e-8);
  CHECK(zero.hard == zf_detect(y, h, qpsk));

  CHECK_THROWS_AS(mmse_detect(y, h, -1.0, qpsk), std::invalid_argument);
}

TEST_CASE("sparse error recovery") {
  const Constellation qpsk = Constellation::qpsk();

  SUBCASE("already-correct decisions are left alone") {
    RandomStream rng(88);
    const Eigen::MatrixXcd h = gen_channel(6, 6, rng);
    std::vector<int> sent(6);
    Eigen::VectorXcd x(6);
    for (int i = 0; i < 6; ++i) {
      sent[i] = static_cast<int>(rng.uniform() * 4) % 4;
      x[i] = qpsk.points[sent[i]];
    }
    const Eigen::VectorXcd y = h * x;  // noiseless
    CHECK(error_recover_cps(y, h, sent, 0.01, qpsk) == sent);
  }

  SUBCASE("a single wrong symbol is repaired at high SNR") {
    const int n = 16;
    const double snr_db = 30.0;
    const double sigma_v2 = n / std::pow(10.0, snr_db / 10.0);
    const double noise_s = std::sqrt(sigma_v2 / 2.0);
    int fixed = 0;
    const int trials = 25;
    for (int t = 0; t < trials; ++t) {
      RandomStream rng(400 + t);
      const Eigen::MatrixXcd h = gen_channel(n, n, rng);
      std::vector<int> sent(n);
      Eigen::VectorXcd x(n);
      for (int i = 0; i < n; ++i) {
        sent[i] = static_cast<int>(rng.uniform() * 4) % 4;
        x[i] = qpsk.points[sent[i]];
      }
      Eigen::VectorXcd y = h * x;
      for (int i = 0; i < n; ++i)
        y[i] += cd{noise_s * rng.normal(), noise_s * rng.normal()};

      std::vector<int> corrupted = sent;
      corrupted[3] = (sent[3] + 1) & 3;  // one symbol off
      if (error_recover_cps(y, h, corrupted, sigma_v2, qpsk) == sent) ++fixed;
    }
    CHECK(fixed >= 23);  // >= 90% repair rate
  }

  SUBCASE("shape mismatches throw") {
    const Eigen::MatrixXcd h = gen_channel(4, 4, std::uint64_t{9});
    const std::vector<int> bad(3, 0);
    CHECK_THROWS_AS(error_recover_cps(Eigen::VectorXcd::Zero(4), h, bad, 0.1, qpsk),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        error_recover_cps(Eigen::VectorXcd::Zero(3), h, std::vector<int>(4, 0), 0.1, qpsk),
        std::invalid_argument);
  }
}

TEST_CASE("ber curve harness") {
  MimoScenario sc;
  sc.n_tx = 4;
  sc.n_rx = 4;
  sc.n_symbols = 40;
  sc.n_trials = 2;
  sc.snr_grid_db = {5.0, 15.0};
  sc.seed = 3;

  const RecoveryResult res = run_ber_curve(sc);
  REQUIRE(res.snr_db == sc.snr_grid_db);
  REQUIRE(res.ber_zf.size() == 2);
  REQUIRE(res.ber_mmse.size() == 2);
  REQUIRE(res.ber_cauchy.size() == 2);
  CHECK(res.symbols_counted == 40 * 2 * 2);
  for (const std::vector<double>* curve : {&res.ber_zf, &res.ber_mmse, &res.ber_cauchy})
    for (double b : *curve) {
      CHECK(b >= 0.0);
      CHECK(b <= 1.0);
    }
  // with a fixed seed this is deterministic: more SNR, fewer MMSE errors
  CHECK(res.ber_mmse[1] <= res.ber_mmse[0]);

  const RecoveryResult again = run_ber_curve(sc);
  CHECK(again.ber_zf == res.ber_zf);
  CHECK(again.ber_mmse == res.ber_mmse);
  CHECK(again.ber_cauchy == res.ber_cauchy);

  sc.threads = 2;
  const RecoveryResult threaded = run_ber_curve(sc);
  CHECK(threaded.ber_zf == res.ber_zf);
  CHECK(threaded.ber_mmse == res.ber_mmse);
  CHECK(threaded.ber_cauchy == res.ber_cauchy);

  MimoScenario bad = sc;
  bad.n_symbols = 41;
  CHECK_THROWS_AS(run_ber_curve(bad), std::invalid_argument);
  bad = sc;
  bad.n_trials = 0;
  CHECK_THROWS_AS(run_ber_curve(bad), std::invalid_argument);
  bad = sc;
  bad.snr_grid_db.clear();
  CHECK_THROWS_AS(run_ber_curve(bad), std::invalid_argument);
}
