#include "covshift/estimators.hpp"
#include "covshift/kernel_model.hpp"
#include "covshift/kliep.hpp"
#include "covshift/parzen.hpp"
#include "covshift/synthetic.hpp"
#include "covshift/ulsif.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

using namespace covshift;

namespace {

Eigen::MatrixXd column(std::initializer_list<double> values) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(values.size()), 1);
  Eigen::Index i = 0;
  for (double v : values) m(i++, 0) = v;
  return m;
}

// log N(x; 0.5, 1) − log N(x; 0, 1)
double shift_log_ratio(double x) { return 0.5 * x - 0.125; }

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("kernel matrix and model evaluation") {
  Eigen::MatrixXd pts(2, 2), ctr(3, 2);
  pts << 0, 0, 1, 2;
  ctr << 0, 0, 1, 0, -1, 1;
  const double sigma = 0.7;
  const Eigen::MatrixXd k = gaussian_kernel_matrix(pts, ctr, sigma);
  for (int i = 0; i < 2; ++i)
    for (int l = 0; l < 3; ++l)
      CHECK(k(i, l) == doctest::Approx(std::exp(-(pts.row(i) - ctr.row(l)).squaredNorm() / (2 * sigma * sigma))));

  const KernelModel model{ctr, sigma, Eigen::Vector3d(0.5, 0.0, 2.0)};
  CHECK(model.num_centers() == 3);
  const Eigen::VectorXd all = model.evaluate(pts);
  CHECK(all[1] == doctest::Approx((k.row(1) * model.alpha)(0)));
  CHECK(model.evaluate(std::vector<double>{1.0, 2.0}) == doctest::Approx(all[1]));
  CHECK_THROWS_AS(gaussian_kernel_matrix(pts, ctr, 0.0), std::invalid_argument);
}

TEST_CASE("centre choice and default grids") {
  const auto c = choose_centers(50, 10, 3);
  CHECK(c.size() == 10);
  CHECK(std::is_sorted(c.begin(), c.end()));
  CHECK(std::adjacent_find(c.begin(), c.end()) == c.end());
  CHECK(c.back() < 50);
  CHECK(choose_centers(50, 10, 3) == c);
  CHECK(choose_centers(5, 5, 0) == std::vector<std::size_t>{0, 1, 2, 3, 4});

  const Eigen::MatrixXd a = column({0.0, 1.0});
  const Eigen::MatrixXd b = column({3.0});
  // pairwise distances of {0, 1, 3}: 1, 2, 3
  CHECK(median_pairwise_distance(a, b) == doctest::Approx(2.0));
  const auto grid = default_sigma_grid(a, b);
  REQUIRE(grid.size() == 6);
  CHECK(grid.front() == doctest::Approx(0.25));
  CHECK(grid.back() == doctest::Approx(8.0));
  CHECK(default_lambda_grid() == std::vector<double>{1e-3, 1e-2, 1e-1, 1.0, 10.0});
  CHECK(default_sigma_grid(column({2.0, 2.0}), column({2.0})).at(3) == 1.0);
}

TEST_CASE("cv report CSV") {
  CvReport cv{{{0.5, 0.1, -0.2}, {1.0, 0.1, -0.3}}, 1};
  std::ostringstream out;
  write_cv_csv(cv, out);
  CHECK(out.str() == "sigma,lambda,score,chosen\n0.5,0.1,-0.2,0\n1,0.1,-0.3,1\n");
  CHECK(cv.best().sigma == 1.0);
}

TEST_CASE("log_kde and Silverman bandwidth match direct formulas") {
  Rng rng = make_rng({21});
  const Eigen::MatrixXd sample = testing::gaussian_matrix(rng, 40, 2);
  const Eigen::MatrixXd points = testing::gaussian_matrix(rng, 5, 2);
  const double h = 0.6;
  const Eigen::VectorXd got = log_kde(sample, h, points);
  for (Eigen::Index p = 0; p < points.rows(); ++p) {
    double density = 0.0;
    for (Eigen::Index i = 0; i < sample.rows(); ++i)
      density += std::exp(-(points.row(p) - sample.row(i)).squaredNorm() / (2 * h * h));
    density /= sample.rows() * 2 * std::numbers::pi * h * h;
    CHECK(got[p] == doctest::Approx(std::log(density)).epsilon(1e-12));
  }

  const Eigen::MatrixXd centered = sample.rowwise() - sample.colwise().mean();
  const double var = (centered.array().square().colwise().sum() / (sample.rows() - 1.0)).mean();
  const double expected = std::pow(4.0 / 4.0, 1.0 / 6.0) * std::pow(40.0, -1.0 / 6.0) * std::sqrt(var);
  CHECK(silverman_bandwidth(sample) == doctest::Approx(expected));
  CHECK(silverman_bandwidth(column({1.0, 1.0, 1.0})) == 1.0);
}

TEST_CASE("parzen ratio on identical samples is uniform") {
  Rng rng = make_rng({22});
  const Eigen::MatrixXd x = testing::gaussian_matrix(rng, 30, 3);
  for (const Bandwidth bw : {Bandwidth::silverman(), Bandwidth::fixed(0.2), Bandwidth::fixed(5.0)}) {
    const WeightVector w = parzen_ratio(x, x, bw);
    CHECK((w.values().array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK(w.normalization() == Normalization::MeanOne);
  }
}

TEST_CASE("parzen ratio concentrates where the target mass is") {
  const WeightVector w = parzen_ratio(column({-1.0, 1.0}), column({1.0, 1.0}), Bandwidth::fixed(0.1));
  CHECK(w[1] > 1e6 * w[0]);
  CHECK_THROWS_AS(parzen_ratio(column({1.0}), column({1.0, 2.0})), std::invalid_argument);
  CHECK_THROWS_AS(parzen_ratio(column({1.0, 2.0}), Eigen::MatrixXd::Ones(2, 2)), std::invalid_argument);
}

TEST_CASE("parzen log-weights track the analytic log-ratio") {
  Rng rng = make_rng({23});
  const Eigen::MatrixXd source = testing::gaussian_matrix(rng, 2000, 1);
  const Eigen::MatrixXd target = testing::gaussian_matrix(rng, 2000, 1, 1.0, 0.5);
  const WeightVector w = parzen_ratio(source, target);
  Eigen::VectorXd logw(2000), truth(2000);
  for (Eigen::Index i = 0; i < 2000; ++i) {
    logw[i] = std::log(w.values()[i]);
    truth[i] = shift_log_ratio(source(i, 0));
  }
  CHECK(pearson_correlation(logw, truth) > 0.7);
}

TEST_CASE("kliep with one centre is forced onto the constraint") {
  Rng rng = make_rng({24});
  const Eigen::MatrixXd x = testing::gaussian_matrix(rng, 50, 2);
  const Eigen::MatrixXd centre = x.colwise().mean();
  const Eigen::MatrixXd kt = gaussian_kernel_matrix(x, centre, 1.0);
  const Eigen::VectorXd b = kt.colwise().mean().transpose();
  const auto sol = kliep_optimize(kt, b, {});
  REQUIRE(sol.ok());
  CHECK(sol->alpha[0] == doctest::Approx(1.0 / b[0]));
  CHECK((kt * sol->alpha).mean() == doctest::Approx(1.0));
}

TEST_CASE("kliep optimizer contract on random problems") {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    Rng rng = make_rng({seed, 25});
    const Eigen::MatrixXd source = testing::gaussian_matrix(rng, 80, 2);
    const Eigen::MatrixXd target = testing::gaussian_matrix(rng, 60, 2, 0.8, 0.7);
    const Eigen::MatrixXd centres = target.topRows(20);
    const double sigma = 0.3 + 0.1 * static_cast<double>(seed);
    const Eigen::MatrixXd kt = gaussian_kernel_matrix(target, centres, sigma);
    const Eigen::VectorXd b = gaussian_kernel_matrix(source, centres, sigma).colwise().mean().transpose();
    const auto sol = kliep_optimize(kt, b, {});
    REQUIRE(sol.ok());
    CHECK(sol->alpha.minCoeff() >= 0.0);
    CHECK(std::abs(b.dot(sol->alpha) - 1.0) <= 1e-6);
    const auto& trace = sol->objective_trace;
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] >= trace[i - 1]);
    CHECK(trace.back() >= trace.front());
  }
}

TEST_CASE("kliep optimizer reports failure instead of aborting") {
  const Eigen::MatrixXd zero_kernel = Eigen::MatrixXd::Zero(4, 2);
  const auto sol = kliep_optimize(zero_kernel, Eigen::Vector2d(0.5, 0.5), {});
  REQUIRE_FALSE(sol.ok());
  CHECK(sol.failure().kind == FailureKind::NonFiniteObjective);
  const auto massless = kliep_optimize(Eigen::MatrixXd::Ones(4, 2), Eigen::Vector2d(0.0, 0.0), {});
  REQUIRE_FALSE(massless.ok());
  CHECK(massless.failure().kind == FailureKind::ConstraintViolated);
  CHECK_THROWS_AS(kliep_optimize(Eigen::MatrixXd::Ones(4, 3), Eigen::Vector2d(1, 1), {}), std::invalid_argument);
}

TEST_CASE("kliep fit on a 1-D mean shift beats uniform weights in KL") {
  Rng rng = make_rng({26});
  const Eigen::MatrixXd source = testing::gaussian_matrix(rng, 1000, 1);
  const Eigen::MatrixXd target = testing::gaussian_matrix(rng, 1000, 1, 1.0, 0.5);
  KliepOptions options;
  options.sigma_grid = {0.25, 0.5, 1.0, 2.0};
  const auto fit = kliep_fit(source, target, options);
  REQUIRE(fit.ok());
  CHECK(std::abs(fit->weights.values().mean() - 1.0) <= 1e-6);
  CHECK(fit->weights.values().minCoeff() >= 0.0);

  // KL(p_τ ‖ ŵ p_ς / Z) − KL(p_τ ‖ p_ς) = log Z − E_τ log ŵ, with Z = ∫ ŵ p_ς
  // in closed form for Gaussian kernels and E_τ by fresh target draws.
  const auto& m = fit->model;
  const double s2 = m.sigma * m.sigma;
  double z = 0.0;
  for (Eigen::Index l = 0; l < m.alpha.size(); ++l) {
    const double c = m.centers(l, 0);
    z += m.alpha[l] * std::sqrt(s2 / (s2 + 1.0)) * std::exp(-c * c / (2.0 * (s2 + 1.0)));
  }
  const Eigen::MatrixXd holdout = testing::gaussian_matrix(rng, 20000, 1, 1.0, 0.5);
  const double mean_log = m.evaluate(holdout).array().log().mean();
  CHECK(std::log(z) - mean_log < 0.0);

  const auto& cv = fit->cv;
  REQUIRE(cv.grid.size() == 4);
  for (const auto& e : cv.grid) CHECK(e.score <= cv.best().score);
  for (std::size_t i = 1; i < cv.grid.size(); ++i) CHECK(cv.grid[i].sigma > cv.grid[i - 1].sigma);
}

TEST_CASE("kliep fit breaks CV ties toward the smallest width") {
  // identical samples: every width fits the data equally well after normalisation
  Rng rng = make_rng({27});
  const Eigen::MatrixXd x = testing::gaussian_matrix(rng, 30, 1);
  KliepOptions options;
  options.sigma_grid = {1e6, 2e6};  // kernels flat: all scores coincide
  const auto fit = kliep_fit(x, x, options);
  REQUIRE(fit.ok());
  CHECK(fit->cv.grid[0].score == doctest::Approx(fit->cv.grid[1].score));
  CHECK(fit->cv.chosen == 0);
}

TEST_CASE("ulsif matches a hand-solved two-centre system") {
  // centres c = {0, 1}, σ = 1, source {0, 0.5, 2}, target {0.8, 1, 1.2}
  const Eigen::MatrixXd source = column({0.0, 0.5, 2.0});
  const Eigen::MatrixXd target = column({0.8, 1.0, 1.2});
  const Eigen::MatrixXd centres = column({0.0, 1.0});
  const double lambda = 0.1;
  auto k = [](double x, double c) { return std::exp(-(x - c) * (x - c) / 2.0); };
  double h11 = 0, h12 = 0, h22 = 0, g1 = 0, g2 = 0;
  for (double x : {0.0, 0.5, 2.0}) {
    h11 += k(x, 0) * k(x, 0) / 3;
    h12 += k(x, 0) * k(x, 1) / 3;
    h22 += k(x, 1) * k(x, 1) / 3;
  }
  for (double x : {0.8, 1.0, 1.2}) {
    g1 += k(x, 0) / 3;
    g2 += k(x, 1) / 3;
  }
  const double a11 = h11 + lambda, a22 = h22 + lambda;
  const double det = a11 * a22 - h12 * h12;
  const double alpha1 = (g1 * a22 - h12 * g2) / det;
  const double alpha2 = (a11 * g2 - h12 * g1) / det;

  const auto system = ulsif_system(gaussian_kernel_matrix(source, centres, 1.0), gaussian_kernel_matrix(target, centres, 1.0));
  CHECK(std::abs(system.H(0, 1) - h12) < 1e-15);
  const auto sol = ulsif_solve(system, lambda);
  REQUIRE(sol.ok());
  CHECK(std::abs(sol->alpha[0] - alpha1) <= 1e-10);
  CHECK(std::abs(sol->alpha[1] - alpha2) <= 1e-10);
  CHECK(sol->relative_residual <= 1e-8);
}

TEST_CASE("ulsif ridge limit starves every weight") {
  Rng rng = make_rng({28});
  const Eigen::MatrixXd x = testing::gaussian_matrix(rng, 40, 2);
  const auto system = ulsif_system(gaussian_kernel_matrix(x, x.topRows(5), 1.0), gaussian_kernel_matrix(x, x.topRows(5), 1.0));
  const auto limit = ulsif_solve(system, std::numeric_limits<double>::infinity());
  REQUIRE(limit.ok());
  CHECK(limit->alpha.isZero(0.0));

  UlsifOptions options;
  options.lambda_grid = {std::numeric_limits<double>::infinity()};
  options.min_positive = 1;
  const auto fit = ulsif_fit(x, x, options);
  REQUIRE(fit.ok());
  CHECK(fit->starved);
  CHECK(fit->positive_count == 0);
  CHECK(fit->weights.sum() == 0.0);
  CHECK_THROWS_AS(ulsif_solve(system, -1.0), std::invalid_argument);
}

TEST_CASE("ulsif solve failures are typed") {
  UlsifSystem zero{Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d::Zero()};
  const auto sol = ulsif_solve(zero, 0.1);
  REQUIRE_FALSE(sol.ok());
  CHECK(sol.failure().kind == FailureKind::LinearSolveFailed);
  UlsifSystem nan_system{Eigen::MatrixXd::Constant(2, 2, NAN), Eigen::Vector2d::Ones()};
  CHECK_FALSE(ulsif_solve(nan_system, 0.1).ok());
}

TEST_CASE("ulsif with no shift gives near-uniform weights") {
  Rng rng = make_rng({29});
  const Eigen::MatrixXd x = testing::gaussian_matrix(rng, 1000, 1);
  UlsifOptions options;
  options.lambda_grid = {0.1, 1.0, 10.0};
  const auto fit = ulsif_fit(x, x, options);
  REQUIRE(fit.ok());
  const Eigen::VectorXd& w = fit->weights.values();
  CHECK(w.minCoeff() > 0.0);
  CHECK(w.maxCoeff() / w.minCoeff() <= 2.0);

  // independent dense solve of the same system
  const auto& m = fit->model;
  const Eigen::MatrixXd ks = gaussian_kernel_matrix(x, m.centers, m.sigma);
  Eigen::MatrixXd a = ks.transpose() * ks / 1000.0;
  a.diagonal().array() += fit->lambda;
  const Eigen::VectorXd h = ks.colwise().mean().transpose();
  const Eigen::VectorXd alpha = a.fullPivLu().solve(h);
  CHECK((alpha - m.alpha).norm() <= 1e-8 * alpha.norm());
  CHECK(fit->relative_residual <= 1e-8);
}

TEST_CASE("ulsif cross-validation picks the minimum score") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    Rng rng = make_rng({seed, 30});
    const Eigen::MatrixXd source = testing::gaussian_matrix(rng, 120, 2);
    const Eigen::MatrixXd target = testing::gaussian_matrix(rng, 90, 2, 0.7, 0.5);
    UlsifOptions options;
    options.seed = seed;
    const auto fit = ulsif_fit(source, target, options);
    REQUIRE(fit.ok());
    CHECK(fit->cv.grid.size() == 30);
    for (const auto& e : fit->cv.grid) CHECK(e.score >= fit->cv.best().score);
    CHECK(fit->weights.values().minCoeff() >= 0.0);
    CHECK(fit->relative_residual <= 1e-8);
    CHECK(fit->model.num_centers() == 90);
    CHECK(fit->positive_count == fit->weights.count_positive());
  }
}

TEST_CASE("estimator registry") {
  for (const auto& name : estimator_names()) {
    const auto kind = parse_estimator(name);
    REQUIRE(kind);
    CHECK(std::string(to_string(*kind)) == name);
  }
  CHECK_FALSE(parse_estimator("bogus"));
  CHECK(std::string(display_name(EstimatorKind::NNeWPlusOne)) == "NNeW+1");
}

TEST_CASE("every estimator returns nonnegative mean-one weights") {
  Rng rng = make_rng({31});
  const Eigen::MatrixXd source = testing::gaussian_matrix(rng, 60, 2);
  const Eigen::MatrixXd target = testing::gaussian_matrix(rng, 80, 2, 1.0, 0.4);
  for (const auto& name : estimator_names()) {
    const auto w = estimate_weights(*parse_estimator(name), source, target, {});
    REQUIRE_MESSAGE(w.ok(), name);
    CHECK(w->size() == 60);
    CHECK(w->values().minCoeff() >= 0.0);
    CHECK(std::abs(w->values().mean() - 1.0) <= 1e-6);
  }
  CHECK_THROWS_AS(estimate_weights(EstimatorKind::NNeW, Eigen::MatrixXd(0, 2), target, {}), std::invalid_argument);
  CHECK_THROWS_AS(estimate_weights(EstimatorKind::NNeW, source, Eigen::MatrixXd::Ones(3, 3), {}),
                  std::invalid_argument);
  const auto starved = estimate_weights(EstimatorKind::NNeW, source, Eigen::MatrixXd(0, 2), {});
  REQUIRE_FALSE(starved.ok());
  CHECK(starved.failure().kind == FailureKind::WeightStarvation);
}

}  // TEST_SUITE
