#include "softrec/certificates.hpp"

#include "softrec/rng.hpp"
#include "support/generators.hpp"

#include <doctest.h>

#include <numbers>

using namespace softrec;

namespace {

SampledDictionary orthonormal_dict(int dim) {
  return SampledDictionary::from_atoms(Mat::Identity(dim, dim));
}

}  // namespace

TEST_CASE("verify_soft_certificate on the ideal orthonormal instance") {
  const SampledDictionary dict = orthonormal_dict(3);
  const DiscreteMeasure mu0 = DiscreteMeasure::dirac(0, Complex(1, 0));
  SUBCASE("the peak atom itself is a perfect certificate") {
    const SoftCertificateReport report =
        verify_soft_certificate(dict.atom(0), 0, 1, mu0, dict);
    CHECK(report.alignment == doctest::Approx(1.0));
    CHECK(report.at_peak == doctest::Approx(1.0));
    CHECK(report.orth_comp_sup == doctest::Approx(0.0));
    CHECK(report.sigma_min == doctest::Approx(1.0));
    CHECK(report.t_max == doctest::Approx(1.0));
    CHECK(report.conclusion_radius == doctest::Approx(1.0));
    CHECK(report.valid);
  }
  SUBCASE("scaling the certificate trades radius for alignment") {
    const SoftCertificateReport report =
        verify_soft_certificate(1.5 * dict.atom(0), 0, 1, mu0, dict);
    CHECK(report.alignment == doctest::Approx(1.5));
    CHECK(report.sigma_min == doctest::Approx(1.5));
    CHECK(report.t_max == doctest::Approx(1.0));
    CHECK(report.conclusion_radius == doctest::Approx(2.0 / 3.0));
    CHECK(report.valid);
  }
  SUBCASE("a certificate orthogonal to the peak fails the alignment") {
    const SoftCertificateReport report =
        verify_soft_certificate(dict.atom(1), 0, 1, mu0, dict);
    CHECK(report.alignment == doctest::Approx(0.0));
    CHECK_FALSE(report.valid);
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(verify_soft_certificate(dict.atom(0), 9, 1, mu0, dict), ValidationError);
    const DiscreteMeasure heavy = DiscreteMeasure::dirac(0, Complex(2, 0));
    CHECK_THROWS_AS(verify_soft_certificate(dict.atom(0), 0, 1, heavy, dict), ValidationError);
  }
}

TEST_CASE("soft report satisfies() reflects the four conditions") {
  const SampledDictionary dict = orthonormal_dict(2);
  const DiscreteMeasure mu0 = DiscreteMeasure::dirac(0, Complex(1, 0));
  const SoftCertificateReport report =
      verify_soft_certificate(1.5 * dict.atom(0), 0, 1, mu0, dict);
  CHECK(report.satisfies(1.5, 1.0));
  CHECK(report.satisfies(2.0, 0.5));
  CHECK_FALSE(report.satisfies(1.4, 1.0));  // at_peak above sigma
}

TEST_CASE("certificate moduli are phase-invariant, the alignment is not") {
  Rng rng(808);
  const SampledDictionary dict = testing::random_complex_dictionary(rng, 4, 7, 2);
  const Vec nu = rng.cgaussian_vector(4);
  const int peak = 0;
  const int family = dict.subfamily_of(peak);
  Vec w(1);
  w << rng.unit_phase();
  const DiscreteMeasure mu0({peak}, w);
  const SoftCertificateReport base = verify_soft_certificate(nu, peak, family, mu0, dict);
  const Complex phase = rng.unit_phase();
  const SoftCertificateReport rotated =
      verify_soft_certificate(phase * nu, peak, family, mu0, dict);
  CHECK(rotated.at_peak == doctest::Approx(base.at_peak).epsilon(1e-12));
  CHECK(rotated.other_family_sup == doctest::Approx(base.other_family_sup).epsilon(1e-12));
  CHECK(rotated.orth_comp_sup == doctest::Approx(base.orth_comp_sup).epsilon(1e-12));
  // The alignment uses the real part and genuinely moves under rotation.
  CHECK(std::abs(rotated.alignment - base.alignment) > 1e-6);
}

TEST_CASE("valid certificates always conclude with radius at most one") {
  Rng rng(909);
  int seen = 0;
  while (seen < 25) {
    const auto instance = testing::try_make_soft_instance(rng);
    if (!instance) continue;
    ++seen;
    CHECK(instance->report.valid);
    CHECK(instance->report.conclusion_radius <= 1.0 + 1e-9);
    CHECK(instance->report.conclusion_radius > 0.0);
  }
}

TEST_CASE("check_soft_conclusion") {
  const SampledDictionary dict = orthonormal_dict(3);
  SUBCASE("the peak itself is a witness") {
    const ConclusionCheck check =
        check_soft_conclusion(DiscreteMeasure::dirac(0, Complex(1, 0)), 0, 1, 1.0, dict);
    CHECK(check.holds);
    CHECK(check.witness == 0);
  }
  SUBCASE("orthogonal support has no witness") {
    const ConclusionCheck check =
        check_soft_conclusion(DiscreteMeasure::dirac(1, Complex(1, 0)), 0, 1, 0.5, dict);
    CHECK_FALSE(check.holds);
  }
  SUBCASE("the maximizing candidate is returned") {
    Mat atoms(2, 3);
    atoms.col(0) << Complex(1, 0), Complex(0, 0);
    atoms.col(1) << Complex(0.4, 0), Complex(std::sqrt(1.0 - 0.16), 0);
    atoms.col(2) << Complex(0.9, 0), Complex(std::sqrt(1.0 - 0.81), 0);
    const SampledDictionary redundant = SampledDictionary::from_atoms(atoms);
    Vec w(2);
    w << Complex(1, 0), Complex(1, 0);
    const ConclusionCheck check =
        check_soft_conclusion(DiscreteMeasure({1, 2}, w), 0, 1, 0.8, redundant);
    CHECK(check.holds);
    CHECK(check.witness == 2);
    CHECK(check.witness_overlap == doctest::Approx(0.9));
  }
  SUBCASE("radius domain") {
    CHECK_THROWS_AS(check_soft_conclusion(DiscreteMeasure(), 0, 1, 0.0, dict),
                    ValidationError);
    CHECK_THROWS_AS(check_soft_conclusion(DiscreteMeasure(), 0, 1, 1.5, dict),
                    ValidationError);
  }
}

TEST_CASE("check_soft_conclusion is monotone in the radius") {
  Rng rng(111);
  for (int trial = 0; trial < 10; ++trial) {
    const SampledDictionary dict = testing::random_complex_dictionary(rng, 3, 6);
    Vec w(2);
    w << rng.cgaussian(), rng.cgaussian();
    const DiscreteMeasure mu({0, dict.size() - 1}, w);
    bool held_before = false;  // scanning radius downward: true can never flip back
    for (double radius = 1.0; radius >= 0.05; radius -= 0.05) {
      const bool holds = check_soft_conclusion(mu, 0, 1, radius, dict).holds;
      if (held_before) CHECK(holds);
      held_before = held_before || holds;
    }
  }
}

TEST_CASE("dual_program_value") {
  const SampledDictionary dict = orthonormal_dict(2);
  const Mat op = Mat::Identity(2, 2);
  Vec b(2);
  b << Complex(1, 0), Complex(0, 0);
  SUBCASE("zero multiplier") {
    const DualProgramEval eval = dual_program_value(RealVec::Zero(4), op, b, dict);
    CHECK(eval.value == 0.0);
    CHECK(eval.feasibility_sup == doctest::Approx(0.0));
    CHECK(eval.feasible);
  }
  SUBCASE("the peak-atom certificate sits exactly on the boundary") {
    RealVec p(4);
    p << 1.0, 0.0, 0.0, 0.0;  // lambda = e_0, nu = phi_0
    const DualProgramEval eval = dual_program_value(p, op, b, dict, 512);
    CHECK(eval.value == doctest::Approx(1.0));
    CHECK(eval.feasibility_sup == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(eval.feasible);
  }
  SUBCASE("scaling homogeneity and infeasibility past the boundary") {
    RealVec p(4);
    p << 1.2, 0.0, 0.0, 0.0;
    const DualProgramEval eval = dual_program_value(p, op, b, dict, 512);
    CHECK(eval.value == doctest::Approx(1.2));
    CHECK(eval.feasibility_sup == doctest::Approx(1.2).epsilon(1e-4));
    CHECK_FALSE(eval.feasible);

    const DualProgramEval half = dual_program_value((0.5 * p).eval(), op, b, dict, 512);
    CHECK(half.value == doctest::Approx(0.6));
    CHECK(half.feasibility_sup == doctest::Approx(0.6).epsilon(1e-4));
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(dual_program_value(RealVec::Zero(3), op, b, dict), ValidationError);
  }
}

TEST_CASE("verify_exact_nuclear_certificate") {
  Rng rng(313);
  const RealMat q = rng.random_orthogonal(4);
  const RealMat u1 = q.col(0), v1 = q.col(1), u2 = q.col(2), v2 = q.col(3);
  SUBCASE("rank-one interpolant is exact") {
    const ExactCertificateReport report =
        verify_exact_nuclear_certificate(v1 * u1.transpose(), u1, v1, 1e-10);
    CHECK(report.valid);
    CHECK(report.interpolation_error <= 1e-12);
    CHECK(report.off_support_sup <= 1e-12);
  }
  SUBCASE("an orthogonal correction passes and is measured") {
    const RealMat nu = v1 * u1.transpose() + 0.5 * v2 * u2.transpose();
    const ExactCertificateReport report = verify_exact_nuclear_certificate(nu, u1, v1, 1e-10);
    CHECK(report.valid);
    CHECK(report.off_support_sup == doctest::Approx(0.5).epsilon(1e-10));
  }
  SUBCASE("a doubled interpolant fails") {
    const ExactCertificateReport report =
        verify_exact_nuclear_certificate(2.0 * v1 * u1.transpose(), u1, v1, 1e-10);
    CHECK_FALSE(report.valid);
    CHECK(report.interpolation_error == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("orthonormality of the factors is required") {
    CHECK_THROWS_AS(verify_exact_nuclear_certificate(v1 * u1.transpose(), 2.0 * u1, v1, 1e-10),
                    ValidationError);
  }
}

TEST_CASE("verify_exact_superres_certificate") {
  RealVec grid(5);
  grid << 0.0, 0.25, 0.5, 0.75, 1.0;
  RealVec support(2);
  support << 0.25, 0.75;
  Vec phases(2);
  phases << Complex(1, 0), Complex(1, 0);
  SUBCASE("the constant one interpolates positive spikes") {
    const Vec g = Vec::Ones(5);
    const ExactCertificateReport report =
        verify_exact_superres_certificate(g, grid, support, phases, 1e-9);
    CHECK(report.valid);
  }
  SUBCASE("an interpolation miss is reported") {
    Vec g = Vec::Ones(5);
    g[1] = Complex(0.5, 0.0);
    const ExactCertificateReport report =
        verify_exact_superres_certificate(g, grid, support, phases, 1e-9);
    CHECK_FALSE(report.valid);
    CHECK(report.interpolation_error == doctest::Approx(0.5));
  }
  SUBCASE("an excursion above modulus one invalidates") {
    Vec g = Vec::Ones(5);
    g[2] = Complex(1.4, 0.0);
    const ExactCertificateReport report =
        verify_exact_superres_certificate(g, grid, support, phases, 1e-9);
    CHECK_FALSE(report.valid);
    CHECK(report.off_support_sup == doctest::Approx(1.4));
  }
  SUBCASE("support points must be grid points") {
    RealVec off(1);
    off << 0.3;
    Vec one(1);
    one << Complex(1, 0);
    CHECK_THROWS_AS(verify_exact_superres_certificate(Vec::Ones(5), grid, off, one, 1e-9),
                    ValidationError);
  }
}

TEST_CASE("l12_condition_membership") {
  RealVec eta(3);
  eta << 1.0, 0.0, 0.0;
  SUBCASE("the direction itself satisfies both") {
    const L12Membership member = l12_condition_membership(eta, eta, 1.0, 1.0, 0.1);
    CHECK(member.new_ok);
    CHECK(member.old_ok);
  }
  SUBCASE("boundary rotation of the old condition") {
    const double alpha = 0.4;
    RealVec v(3);
    v << std::cos(alpha), std::sin(alpha), 0.0;
    v /= std::cos(alpha);
    const L12Membership member = l12_condition_membership(v, eta, 2.0, 0.2, alpha);
    CHECK(member.old_ok);
  }
  SUBCASE("an orthogonal vector of norm two fails the new condition") {
    RealVec v(3);
    v << 0.0, 2.0, 0.0;
    const L12Membership member = l12_condition_membership(v, eta, 1.0, 0.5, 0.3);
    CHECK_FALSE(member.new_ok);
  }
  SUBCASE("alpha domain") {
    CHECK_THROWS_AS(l12_condition_membership(eta, eta, 1.0, 0.5, 0.0), ValidationError);
    CHECK_THROWS_AS(l12_condition_membership(eta, eta, 1.0, 0.5, std::numbers::pi),
                    ValidationError);
  }
}

TEST_CASE("classical_separation_bounds") {
  const ClassicalBounds tenth = classical_separation_bounds(0.1);
  CHECK(tenth.s_donoho == doctest::Approx(5.5).epsilon(1e-12));
  CHECK(tenth.s_elad == doctest::Approx(9.142135623730951).epsilon(1e-12));
  const ClassicalBounds unit = classical_separation_bounds(1.0);
  CHECK(unit.s_donoho == doctest::Approx(1.0));
  CHECK(unit.s_elad == doctest::Approx(0.9142135623730951));
  // Monotone divergence toward zero coherence, returned as finite values.
  CHECK(classical_separation_bounds(1e-9).s_donoho > 1e8);
  CHECK_THROWS_AS(classical_separation_bounds(0.0), ValidationError);
  CHECK_THROWS_AS(classical_separation_bounds(-1.0), ValidationError);
}

TEST_CASE("end-to-end soft recovery on constructed instances") {
  // Central property: a valid certificate at radius rho forces a witness atom
  // within rho - 1e-4 in the support of every converged minimizer.
  Rng rng(424242);
  int tested = 0;
  while (tested < 30) {
    const auto instance = testing::try_make_soft_instance(rng);
    if (!instance) continue;
    SolveResult solve;
    const DiscreteMeasure mu_star =
        testing::solve_instance_support(*instance, 1e-9, 50000, &solve);
    if (!solve.converged || solve.duality_gap > 1e-8 * (1.0 + solve.objective)) continue;
    ++tested;
    const ConclusionCheck check =
        check_soft_conclusion(mu_star, instance->peak_index, instance->peak_family,
                              instance->report.conclusion_radius - 1e-4, instance->dict);
    CHECK(check.holds);
  }
}
