#ifndef DNFLOW_ALGEBRA_HPP
#define DNFLOW_ALGEBRA_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace dnflow {

// Signed power |u|^{alpha-1} u acting on a small vector, with 0 mapped to 0.
// In-place variant writes into out[0..ncomp).
void signed_power(const double* u, int ncomp, double alpha, double* out);
std::vector<double> signed_power(const std::vector<double>& u, double alpha);
double signed_power(double u, double alpha);

double vec_norm(const double* u, int ncomp);
double vec_dot(const double* u, const double* v, int ncomp);

// Bregman gap of w -> |w|^{q+1}/(q+1):
//   b[u,v] = |v|^{q+1}/(q+1) + q |u|^{q+1}/(q+1) - (|u|^{q-1}u).v  >= 0,
// zero iff u = v.
double bregman_gap(const double* u, const double* v, int ncomp, double q);
double bregman_gap(const std::vector<double>& u, const std::vector<double>& v, double q);
double bregman_gap(double u, double v, double q);

// | |v|^{(q-1)/2} v - |u|^{(q-1)/2} u |^2, the per-point step dissipation.
double dissipation_increment(const double* u_prev, const double* u_next, int ncomp, double q);
double dissipation_increment(double u_prev, double u_next, double q);

enum class LemmaId { L3_1a, L3_1b, L3_2, L3_3, L3_4a, L3_4b, L3_5 };

const char* lemma_name(LemmaId id);

// Empirically materialized constant for one of the pointwise power/gap
// inequalities. c_hat carries a 10% safety factor over the sampled
// supremum except where the constant is pinned analytically (L3_5, and
// L3_4b whose constant is 1 by convexity).
struct LemmaConstant {
  LemmaId lemma_id;
  double q_or_alpha = 1.0;
  double c_hat = 0.0;
  double sup_ratio = 0.0;  // raw sampled supremum, before the safety factor
  std::int64_t sample_count = 0;
  std::uint64_t seed = 0;
};

struct LemmaViolation {
  bool failed = false;
  std::vector<double> u, v;
  double lhs = 0.0, rhs = 0.0;
};

// Samples (u,v) pairs over magnitudes 1e-3..1e3 (log-uniform, plus equal,
// antipodal, axis-aligned and near-zero specials, N in {1,2,3}) and returns
// the inequality constant valid on the sample set.
LemmaConstant derive_lemma_constant(LemmaId id, double q_or_alpha, std::int64_t samples,
                                    std::uint64_t seed);

// Re-checks every constant on a fresh sample stream; any violation is
// reported with the witness pair. Not an error: a failure is a result.
std::vector<LemmaViolation> check_lemma_inequalities(const std::vector<LemmaConstant>& constants,
                                                     std::int64_t fresh_samples,
                                                     std::uint64_t seed);

// Constants table, header `lemma_id,q,c_hat,samples,seed`.
std::string lemma_constants_csv(const std::vector<LemmaConstant>& constants);

}  // namespace dnflow

#endif
