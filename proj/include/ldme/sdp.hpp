#ifndef LDME_SDP_HPP
#define LDME_SDP_HPP

// Width-independent solver for the eps-decision version of the packing /
// covering pair
//
//   max sum_i w_i  s.t.  sum_i w_i A_i <= I,  ||sum_i w_i B_i||_k <= k,  w >= 0
//   min Tr M + Tr W  s.t.  <A_i, M> + <B_i, W> >= 1,  ||W|| <= Tr W / k,
//
// with A_i = C_i C_i^T (l x l) and B_i = D_i D_i^T (m x m).

#include "ldme/fantope.hpp"

#include <string>
#include <vector>

namespace ldme {

struct SdpInstance
{
    Index l = 0;
    Index m = 0;
    Index k = 1;
    // General A side: A_i = C_i C_i^T.
    std::vector<Mat> C;
    // Diagonal A side (used when C is empty): A_i = a_scale_i e_{a_coord_i} e_{a_coord_i}^T.
    Vec a_scale;
    std::vector<Index> a_coord;
    // B_i = D_i D_i^T.
    std::vector<Mat> D;

    Index n() const { return static_cast<Index>(D.size()); }
    bool diagonal_a() const { return C.empty() && a_scale.size() > 0; }
    double trace_a(Index i) const;
    double trace_b(Index i) const;
    Mat dense_a(Index i) const;
    Mat dense_b(Index i) const;
    void validate() const;
    // Instance restricted to the given constraint indices.
    SdpInstance subset(const std::vector<Index>& keep) const;
};

// Random factorized instance: n <= max_n constraints, 2 <= l, m <= max_dim,
// k <= min(max_k, m), factors of rank 1-2 with a common random scale.
SdpInstance random_sdp_instance(Rng& r, Index max_n = 30, Index max_dim = 16, Index max_k = 3);

enum class AnswerKind
{
    Dual,
    Primal
};

// Either a dual weight vector or an averaged primal pair.  The primal pair is
// stored densely (M as a diagonal when the A side is diagonal); both sides
// carry the additive identity shift of the preprocessing wrapper.
struct SdpAnswer
{
    AnswerKind kind = AnswerKind::Dual;
    Vec w;

    bool m_diagonal = false;
    Vec M_diag;
    Mat M;
    Mat W;

    long iterations = 0;
    std::string exit_reason;
    // Best certified dual mass and primal trace seen by the certified exits.
    double best_dual_mass = 0.0;
    double best_primal_trace = INFINITY;
    double K = 0.0;
    double alpha = 0.0;
    long R = 0;

    bool is_dual() const { return kind == AnswerKind::Dual; }
    Mat dense_M() const;
};

struct SolverOptions
{
    // Step parameter entering alpha = step / ((1 + 10 eps) K k); negative
    // selects the worst-case value eps^2 / (2048 k log(n + l + m)).
    double step = 0.5;
    // Accuracy handed to the projection and the inner-product estimates;
    // negative selects the step value.  Always capped to keep the
    // projection's own preconditions (eps < 1/k^2, 4 k eps < 1).
    double projection_eps = 5e-4;
    // Iteration cap; the effective cap is min(R, max_iterations).
    long max_iterations = 2000000;
    // Certified exits: stop as soon as the current state already proves one
    // side of the decision (dual mass after exact rescaling, or a primal
    // average whose exactly computed coverage certifies the trace bound).
    bool certified_exits = true;
    // Target accuracy of the certified exits (the caller's eps).
    double target_eps = -1.0;
    // Trace kept free by certified primal exits (used by the wrapper's shift).
    double primal_reserve = 0.0;
    long check_every = 10;
    ProjectionOptions projection;
    // Dense primal accumulation is used up to this dimension.
    Index dense_cap = 2048;
};

struct SolverTrace
{
    std::vector<double> weight_norm;   // ||w^t||_1
    std::vector<double> psi_norm;      // lambda_max(Psi^t), when recorded
    std::vector<double> phi_kyfan;     // ||Phi^t||_k, when recorded
    long record_every = 0;             // 0 disables the spectral records
};

// Constants of the solver loop.
struct SolverConstants
{
    double K = 0.0;
    double step = 0.0;
    double alpha = 0.0;
    double R = 0.0;
    long cap = 0;
    double delta_dagger = 0.0;
    double projection_eps = 0.0;
};

SolverConstants solver_constants(const SdpInstance& inst, double eps, double delta, const SolverOptions& opt);

SdpAnswer solver_loop(const SdpInstance& inst, double eps, double delta, Rng& rng, const SolverOptions& opt = {},
                      SolverTrace* trace = nullptr);

struct DecisionOptions
{
    // The loop runs at eps / divisor.
    double divisor = 2.0;
    // eps >= 1/n^2 is required unless this is set.
    bool allow_small_eps = false;
    SolverOptions solver;
};

// Worst-case constants: divisor 20, step eps^2 / (2048 k log(n + l + m)),
// projection accuracy equal to the step, no certified exits.  Only usable on
// very small instances.
DecisionOptions worst_case_decision_options();

SdpAnswer packing_covering_decision(const SdpInstance& inst, double eps, double delta, Rng& rng,
                                    const DecisionOptions& opt = {});

struct VerifyReport
{
    bool ok = true;
    std::vector<std::string> violations;
    double mass = 0.0;          // dual: sum w
    double psi_max = 0.0;       // dual: lambda_max(sum w A)
    double phi_kyfan = 0.0;     // dual: ||sum w B||_k
    double trace = 0.0;         // primal: Tr M + Tr W
    double min_cover = 0.0;     // primal: min_i <A_i,M> + <B_i,W>
    double cap_slack = 0.0;     // primal: Tr W / k - ||W||
};

// Dense check of the eps-decision contract.
VerifyReport verify_certificate(const SdpInstance& inst, const SdpAnswer& ans, double eps, double tol = 1e-9);

} // namespace ldme

#endif
