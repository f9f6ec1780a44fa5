#include "softrec/dictionary.hpp"

#include "softrec/rng.hpp"
#include "softrec/solvers.hpp"
#include "support/generators.hpp"

#include <doctest.h>

using namespace softrec;

namespace {

SampledDictionary orthonormal_pair() {
  Mat atoms = Mat::Identity(2, 2);
  return SampledDictionary::from_atoms(std::move(atoms));
}

}  // namespace

TEST_CASE("dictionary construction validates its invariants") {
  Mat atoms(2, 1);
  atoms << Complex(1.0, 0.0), Complex(1.0, 0.0);  // norm sqrt(2)
  CHECK_THROWS_AS(SampledDictionary::from_atoms(atoms), ValidationError);
  CHECK_THROWS_AS(SampledDictionary(Mat(2, 0), {}, {}), ValidationError);
  Mat good = Mat::Identity(2, 2);
  CHECK_THROWS_AS(SampledDictionary(good, {IndexPoint::label(0)}, {1, 1}), ValidationError);
}

TEST_CASE("index points carry the Euclidean metric") {
  RealVec a(2), b(2);
  a << 0.0, 3.0;
  b << 4.0, 0.0;
  CHECK(IndexPoint(a).distance(IndexPoint(b)) == doctest::Approx(5.0));
  CHECK(IndexPoint::label(3).distance(IndexPoint::label(7)) == doctest::Approx(4.0));
}

TEST_CASE("measure invariants") {
  Vec w(2);
  w << Complex(1, 0), Complex(2, 0);
  CHECK_THROWS_AS(DiscreteMeasure({0, 0}, w), ValidationError);
  const DiscreteMeasure mu({0, 2}, w);
  CHECK(mu.tv_norm() == doctest::Approx(3.0));
  CHECK(mu.weight_at(2) == Complex(2, 0));
  CHECK(mu.weight_at(5) == Complex(0, 0));
}

TEST_CASE("synthesize") {
  const SampledDictionary dict = orthonormal_pair();
  SUBCASE("single atom") {
    const Vec v = synthesize(DiscreteMeasure::dirac(0, Complex(1, 0)), dict);
    CHECK((v - dict.atom(0)).norm() == 0.0);
  }
  SUBCASE("empty measure gives the zero vector") {
    CHECK(synthesize(DiscreteMeasure(), dict).norm() == 0.0);
  }
  SUBCASE("orthonormal combination") {
    Vec w(2);
    w << Complex(2, 0), Complex(-3, 0);
    const Vec v = synthesize(DiscreteMeasure({0, 1}, w), dict);
    CHECK(v[0] == Complex(2, 0));
    CHECK(v[1] == Complex(-3, 0));
  }
  SUBCASE("index out of range") {
    CHECK_THROWS_AS(synthesize(DiscreteMeasure::dirac(7, Complex(1, 0)), dict),
                    ValidationError);
  }
}

TEST_CASE("lift_measure polar-decomposes the weights") {
  SUBCASE("negative real weight") {
    const LiftedMeasure lifted = lift_measure(DiscreteMeasure::dirac(0, Complex(-2, 0)));
    CHECK(lifted.weights[0] == 2.0);
    CHECK(lifted.phases[0] == Complex(-1, 0));
  }
  SUBCASE("complex weight 3+4i") {
    const LiftedMeasure lifted = lift_measure(DiscreteMeasure::dirac(0, Complex(3, 4)));
    CHECK(lifted.weights[0] == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(std::abs(lifted.phases[0] - Complex(0.6, 0.8)) < 1e-15);
  }
  SUBCASE("empty measure") {
    CHECK(lift_measure(DiscreteMeasure()).support.empty());
  }
  SUBCASE("zero weights are dropped") {
    Vec w(2);
    w << Complex(0, 0), Complex(1, 0);
    const LiftedMeasure lifted = lift_measure(DiscreteMeasure({0, 1}, w));
    CHECK(lifted.support == std::vector<int>{1});
  }
}

TEST_CASE("lift/unlift round trip preserves the measure") {
  Rng rng(101);
  const SampledDictionary dict = testing::random_complex_dictionary(rng, 4, 6);
  for (int trial = 0; trial < 50; ++trial) {
    const int count = 1 + static_cast<int>(rng.uniform_index(dict.size()));
    std::vector<int> support;
    for (int idx = 0; idx < count; ++idx) support.push_back(idx);
    Vec w(count);
    for (int idx = 0; idx < count; ++idx) w[idx] = 3.0 * rng.cgaussian();
    const DiscreteMeasure mu(support, w);
    const LiftedMeasure lifted = lift_measure(mu);
    // TV norm is the same sum of moduli, bitwise.
    CHECK(lifted.tv_norm() == mu.tv_norm());
    const DiscreteMeasure back = unlift_measure(lifted);
    const Vec diff = synthesize(back, dict) - synthesize(mu, dict);
    CHECK(diff.norm() <= 8 * std::numeric_limits<double>::epsilon() * (1.0 + mu.tv_norm()));
  }
  // Real weights round-trip exactly: the phase is +-1.
  Vec w(1);
  w << Complex(-3.25, 0.0);
  const DiscreteMeasure mu({0}, w);
  const DiscreteMeasure back = unlift_measure(lift_measure(mu));
  CHECK(back.weights[0] == w[0]);
}

TEST_CASE("dual_atomic_norm") {
  const SampledDictionary dict = orthonormal_pair();
  Vec v(2);
  v << Complex(1, 0), Complex(0, 0);
  SUBCASE("attained at an atom of an orthonormal dictionary") {
    CHECK(dual_atomic_norm(v, dict) == doctest::Approx(1.0));
  }
  SUBCASE("zero against an orthogonal subfamily") {
    Mat atoms = Mat::Identity(3, 2);
    SampledDictionary two(atoms, {IndexPoint::label(0), IndexPoint::label(1)}, {1, 2});
    Vec w = Vec::Zero(3);
    w[2] = Complex(1, 0);
    CHECK(dual_atomic_norm(w, two, 1) == doctest::Approx(0.0));
    CHECK_THROWS_AS(dual_atomic_norm(w, two, 9), ValidationError);
  }
  SUBCASE("max over a redundant pair") {
    Mat atoms(2, 2);
    atoms.col(0) << Complex(1, 0), Complex(0, 0);
    atoms.col(1) << Complex(1.0 / std::sqrt(2.0), 0), Complex(1.0 / std::sqrt(2.0), 0);
    const SampledDictionary redundant = SampledDictionary::from_atoms(atoms);
    CHECK(dual_atomic_norm(v, redundant) == doctest::Approx(1.0));
  }
}

TEST_CASE("dual_atomic_norm is a seminorm on samples") {
  Rng rng(77);
  const SampledDictionary dict = testing::random_complex_dictionary(rng, 4, 8);
  for (int trial = 0; trial < 40; ++trial) {
    const Vec a = rng.cgaussian_vector(4), b = rng.cgaussian_vector(4);
    const Complex alpha = 3.0 * rng.cgaussian();
    const double homogeneity =
        std::abs(dual_atomic_norm(alpha * a, dict) - std::abs(alpha) * dual_atomic_norm(a, dict));
    CHECK(homogeneity <= 1e-12 * (1.0 + std::abs(alpha)));
    CHECK(dual_atomic_norm(a + b, dict) <=
          dual_atomic_norm(a, dict) + dual_atomic_norm(b, dict) + 1e-12);
  }
}

TEST_CASE("gauge_atomic_norm on the canonical redundant example") {
  Mat atoms(2, 3);
  atoms.setZero();
  atoms(0, 0) = 1.0;
  atoms(1, 1) = 1.0;
  atoms(0, 2) = atoms(1, 2) = 1.0 / std::sqrt(2.0);
  const SampledDictionary dict = SampledDictionary::from_atoms(atoms);
  Vec v(2);
  v << Complex(1, 0), Complex(1, 0);
  const GaugeResult gauge = gauge_atomic_norm(v, dict);
  CHECK(gauge.value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  REQUIRE(gauge.decomposition.support == std::vector<int>{2});
  CHECK(std::abs(gauge.decomposition.weights[0] - Complex(std::sqrt(2.0), 0)) < 1e-10);

  // The stated dual vector (1,1)/sqrt(2) certifies optimality: it is feasible
  // for every signed atom and attains the value.
  RealVec stated(2);
  stated << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  for (int a = 0; a < dict.size(); ++a)
    CHECK(std::abs(stated.dot(dict.atom(a).real())) <= 1.0 + 1e-12);
  CHECK(stated.dot(v.real()) == doctest::Approx(gauge.value));
  // The LP's own multipliers certify the same value.
  CHECK(gauge.dual.dot(v.real()) == doctest::Approx(gauge.value).epsilon(1e-9));
}

TEST_CASE("gauge_atomic_norm trivial cases and errors") {
  const SampledDictionary dict = orthonormal_pair();
  SUBCASE("atoms have unit gauge") {
    const GaugeResult gauge = gauge_atomic_norm(dict.atom(0), dict);
    CHECK(gauge.value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(gauge.decomposition.support == std::vector<int>{0});
  }
  SUBCASE("zero vector") {
    const GaugeResult gauge = gauge_atomic_norm(Vec::Zero(2), dict);
    CHECK(gauge.value == 0.0);
    CHECK(gauge.decomposition.support.empty());
  }
  SUBCASE("vector outside the span") {
    Mat atoms = Mat::Identity(3, 1);
    const SampledDictionary thin = SampledDictionary::from_atoms(atoms);
    Vec v = Vec::Zero(3);
    v[2] = Complex(1, 0);
    CHECK_THROWS_AS(gauge_atomic_norm(v, thin), InfeasibleError);
  }
  SUBCASE("oversized dictionary is rejected") {
    Rng rng(5);
    Mat atoms(2, 70);
    for (int a = 0; a < 70; ++a) atoms.col(a) = rng.unit_vector(2);
    const SampledDictionary big = SampledDictionary::from_atoms(atoms);
    CHECK_THROWS_AS(gauge_atomic_norm(Vec::Ones(2), big), ValidationError);
  }
}

TEST_CASE("gauge is bounded by the TV norm of any synthesizing measure") {
  Rng rng(303);
  for (int trial = 0; trial < 25; ++trial) {
    const SampledDictionary dict = testing::random_real_dictionary(rng, 3, 6);
    const int count = dict.size();
    Vec w(count);
    for (int idx = 0; idx < count; ++idx) w[idx] = Complex(2.0 * rng.gaussian(), 0.0);
    std::vector<int> support;
    for (int idx = 0; idx < count; ++idx) support.push_back(idx);
    const DiscreteMeasure mu(support, w);
    const Vec v = synthesize(mu, dict);
    const GaugeResult gauge = gauge_atomic_norm(v, dict);
    CHECK(gauge.value <= mu.tv_norm() + 1e-9);
    CHECK((synthesize(gauge.decomposition, dict) - v).norm() <= 1e-8 * (1.0 + v.norm()));
  }
}

TEST_CASE("gauge scaling homogeneity") {
  Rng rng(404);
  const SampledDictionary dict = testing::random_complex_dictionary(rng, 3, 5);
  const Vec v = dict.atoms() * rng.cgaussian_vector(dict.size());
  const GaugeResult base = gauge_atomic_norm(v, dict);
  for (const double alpha : {0.25, 3.0}) {
    const GaugeResult scaled = gauge_atomic_norm(alpha * v, dict);
    CHECK(std::abs(scaled.value - alpha * base.value) <= 1e-8 * (1.0 + base.value));
  }
}

TEST_CASE("gauge agrees with the equality-constrained l1 solve") {
  Rng rng(505);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const SampledDictionary dict = testing::random_real_dictionary(rng, 3, 6);
    Vec coef(dict.size());
    for (int a = 0; a < dict.size(); ++a) coef[a] = Complex(rng.gaussian(), 0.0);
    const Vec v = dict.atoms() * coef;
    const GaugeResult gauge = gauge_atomic_norm(v, dict);
    EqualityConstrainedProblem problem{dict.atoms(), v, L1Reg{}};
    const SolveResult solve = solve_equality_constrained(problem, 1e-9, 20000);
    REQUIRE(solve.converged);
    worst = std::max(worst, std::abs(gauge.value - solve.objective));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("complex gauge agrees with the complex l1 solve") {
  Rng rng(606);
  double worst = 0.0;
  for (int trial = 0; trial < 8; ++trial) {
    const SampledDictionary dict = testing::random_complex_dictionary(rng, 3, 5);
    const Vec v = dict.atoms() * rng.cgaussian_vector(dict.size());
    const GaugeResult gauge = gauge_atomic_norm(v, dict);
    EqualityConstrainedProblem problem{dict.atoms(), v, L1Reg{}};
    const SolveResult solve = solve_equality_constrained(problem, 1e-9, 40000);
    REQUIRE(solve.converged);
    worst = std::max(worst, std::abs(gauge.value - solve.objective));
  }
  CHECK(worst <= 1e-6);
}
