#include "ldme/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ldme {

// ---------------------------------------------------------------------------
// Instance
// ---------------------------------------------------------------------------

double SdpInstance::trace_a(Index i) const
{
    return diagonal_a() ? a_scale[i] : C[i].squaredNorm();
}

double SdpInstance::trace_b(Index i) const { return D[i].squaredNorm(); }

Mat SdpInstance::dense_a(Index i) const
{
    if(diagonal_a())
    {
        Mat A = Mat::Zero(l, l);
        A(a_coord[i], a_coord[i]) = a_scale[i];
        return A;
    }
    return C[i] * C[i].transpose();
}

Mat SdpInstance::dense_b(Index i) const { return D[i] * D[i].transpose(); }

void SdpInstance::validate() const
{
    require(n() >= 1, "sdp: instance has no constraints");
    require(l >= 1 && m >= 1, "sdp: both sides need positive dimension");
    require(k >= 1 && k <= m, "sdp: k must lie in [1, m]");
    if(C.empty())
    {
        require(a_scale.size() == n() && static_cast<Index>(a_coord.size()) == n(),
                "sdp: diagonal A side must have one entry per constraint");
        for(Index i = 0; i < n(); i++)
        {
            require(std::isfinite(a_scale[i]) && a_scale[i] >= 0.0, "sdp: diagonal A scales must be finite and nonnegative");
            require(a_coord[i] >= 0 && a_coord[i] < l, "sdp: diagonal A coordinate out of range");
        }
    }
    else
    {
        require(static_cast<Index>(C.size()) == n(), "sdp: C and D must have the same number of factors");
        for(const Mat& c : C)
            require(c.rows() == l && c.allFinite(), "sdp: A factors must be finite with l rows");
    }
    for(const Mat& d : D)
        require(d.rows() == m && d.allFinite(), "sdp: B factors must be finite with m rows");
}

SdpInstance SdpInstance::subset(const std::vector<Index>& keep) const
{
    SdpInstance s;
    s.l = l;
    s.m = m;
    s.k = k;
    const bool diag = diagonal_a();
    if(diag)
        s.a_scale.resize(static_cast<Index>(keep.size()));
    for(std::size_t j = 0; j < keep.size(); j++)
    {
        const Index i = keep[j];
        if(diag)
        {
            s.a_scale[static_cast<Index>(j)] = a_scale[i];
            s.a_coord.push_back(a_coord[i]);
        }
        else
        {
            s.C.push_back(C[i]);
        }
        s.D.push_back(D[i]);
    }
    return s;
}

Mat SdpAnswer::dense_M() const { return m_diagonal ? Mat(M_diag.asDiagonal()) : M; }

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

namespace {

double lambda_max(const Mat& A)
{
    if(A.rows() == 0)
        return 0.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(A, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(A.rows() - 1);
}

double lambda_min(const Mat& A)
{
    if(A.rows() == 0)
        return 0.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(A, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

// Smallest W' = W + c I (or lambda_max(W) I when m = k) satisfying the cap
// ||W'|| <= Tr W' / k.  W' dominates W, so covering values can only grow.
Mat repair_cap(const Mat& W, Index k)
{
    const Index m = W.rows();
    const double top = lambda_max(W);
    const double tr = W.trace();
    if(static_cast<double>(k) * top <= tr)
        return W;
    if(m == k)
        return top * Mat::Identity(m, m);
    const double c = (static_cast<double>(k) * top - tr) / static_cast<double>(m - k);
    Mat R = W;
    R.diagonal().array() += c * (1.0 + 1e-12);
    return R;
}

// <A_i, M> + <B_i, W> for every constraint.
Vec coverage(const SdpInstance& inst, bool m_diag, const Vec& Md, const Mat& M, const Mat& W)
{
    const Index n = inst.n();
    Vec cov(n);
    for(Index i = 0; i < n; i++)
    {
        double a;
        if(inst.diagonal_a())
            a = inst.a_scale[i] * (m_diag ? Md[inst.a_coord[i]] : M(inst.a_coord[i], inst.a_coord[i]));
        else if(m_diag)
            a = (Md.asDiagonal() * inst.C[i]).cwiseProduct(inst.C[i]).sum();
        else
            a = (M * inst.C[i]).cwiseProduct(inst.C[i]).sum();
        const double b = (W * inst.D[i]).cwiseProduct(inst.D[i]).sum();
        cov[i] = a + b;
    }
    return cov;
}

// Solver state: the accumulated Omega = Psi^t - Psi^0, Theta = Phi^t - Phi^0
// and the initial Psi^0, Phi^0, densely (Omega as a diagonal when the A side
// is diagonal).
struct LoopState
{
    bool diag = false;
    Vec w;
    Vec omega_diag, psi0_diag;
    Mat omega, psi0;
    Mat theta, phi0;

    double psi_max() const
    {
        return diag ? (psi0_diag + omega_diag).maxCoeff() : lambda_max(psi0 + omega);
    }
    double phi_kyfan(Index k) const { return kyfan_dense(phi0 + theta, k); }
};

// Adds sum_{i in idx} c_i A_i to (dg or dense) and sum c_i B_i to B.
void accumulate(const SdpInstance& inst, const std::vector<Index>& idx, const Vec& c, Vec& dg, Mat& dense,
                Mat& B)
{
    if(idx.empty())
        return;
    Index ra = 0, rb = 0;
    for(Index i : idx)
    {
        if(!inst.diagonal_a())
            ra += inst.C[i].cols();
        rb += inst.D[i].cols();
    }
    Mat FA(inst.diagonal_a() ? 0 : inst.l, ra), FB(inst.m, rb);
    Index oa = 0, ob = 0;
    for(std::size_t j = 0; j < idx.size(); j++)
    {
        const Index i = idx[j];
        const double s = std::sqrt(c[static_cast<Index>(j)]);
        if(inst.diagonal_a())
        {
            dg[inst.a_coord[i]] += c[static_cast<Index>(j)] * inst.a_scale[i];
        }
        else
        {
            FA.middleCols(oa, inst.C[i].cols()) = s * inst.C[i];
            oa += inst.C[i].cols();
        }
        FB.middleCols(ob, inst.D[i].cols()) = s * inst.D[i];
        ob += inst.D[i].cols();
    }
    if(!inst.diagonal_a() && ra > 0)
        dense.selfadjointView<Eigen::Lower>().rankUpdate(FA);
    if(rb > 0)
        B.selfadjointView<Eigen::Lower>().rankUpdate(FB);
}

void fill_upper(Mat& A)
{
    A.triangularView<Eigen::StrictlyUpper>() = A.transpose();
}

// Exactly rescaled primal candidate; empty optional-like flag on failure.
struct PrimalCandidate
{
    bool ok = false;
    double trace = INFINITY;
    SdpAnswer ans;
};

PrimalCandidate certify_primal(const SdpInstance& inst, bool m_diag, const Vec& Md, const Mat& M, const Mat& W,
                               double trace_limit)
{
    PrimalCandidate pc;
    const Mat Wr = repair_cap(W, inst.k);
    const Vec cov = coverage(inst, m_diag, Md, M, Wr);
    const double mc = cov.minCoeff();
    if(!(mc > 0.0))
        return pc;
    const double s = (1.0 + 1e-12) / mc;
    const double tr = s * ((m_diag ? Md.sum() : M.trace()) + Wr.trace());
    pc.trace = tr;
    pc.ok = tr <= trace_limit;
    pc.ans.kind = AnswerKind::Primal;
    pc.ans.m_diagonal = m_diag;
    if(m_diag)
        pc.ans.M_diag = s * Md;
    else
        pc.ans.M = s * M;
    pc.ans.W = s * Wr;
    return pc;
}

} // namespace

// ---------------------------------------------------------------------------
// Solver loop
// ---------------------------------------------------------------------------

SolverConstants solver_constants(const SdpInstance& inst, double eps, double delta, const SolverOptions& opt)
{
    require(eps > 0.0 && eps < 1.0, "sdp: eps must lie in (0, 1)");
    require(delta > 0.0 && delta < 1.0, "sdp: delta must lie in (0, 1)");
    SolverConstants c;
    const double k = static_cast<double>(inst.k);
    const double lg = std::log(static_cast<double>(inst.n() + inst.l + inst.m));
    c.K = (1.0 + lg) / eps;
    c.step = opt.step > 0.0 ? opt.step : eps * eps / (2048.0 * k * lg);
    c.alpha = c.step / ((1.0 + 10.0 * eps) * c.K * k);
    c.R = 512.0 * lg * c.K * k / (c.step * eps);
    c.cap = static_cast<long>(std::min({std::ceil(c.R), static_cast<double>(opt.max_iterations), 1e18}));
    c.cap = std::max(1L, c.cap);
    c.delta_dagger = delta / (5.0 * static_cast<double>(c.cap));
    double pe = opt.projection_eps > 0.0 ? opt.projection_eps : c.step;
    c.projection_eps = std::min({pe, 0.5 / (k * k), 0.2 / k});
    return c;
}

SdpAnswer solver_loop(const SdpInstance& inst, double eps, double delta, Rng& rng, const SolverOptions& opt,
                      SolverTrace* trace)
{
    inst.validate();
    const SolverConstants cst = solver_constants(inst, eps, delta, opt);
    const Index n = inst.n(), l = inst.l, m = inst.m, k = inst.k;
    const bool diag = inst.diagonal_a();
    require(m <= opt.dense_cap && (diag || l <= opt.dense_cap), "sdp: dimension exceeds the dense accumulation cap");
    const double target = opt.target_eps > 0.0 ? opt.target_eps : eps;
    const double trace_limit = 1.0 + target - opt.primal_reserve;
    const double pe = cst.projection_eps;
    const double se = std::min(pe, 0.2);
    const double sd = std::min(cst.delta_dagger, 0.2);

    LoopState st;
    st.diag = diag;
    st.w.resize(n);
    for(Index i = 0; i < n; i++)
    {
        const double tr = inst.trace_a(i) + inst.trace_b(i);
        require(tr > 0.0, "sdp: constraint with A_i = B_i = 0 (dual unbounded)");
        st.w[i] = 1.0 / (static_cast<double>(n) * tr);
    }
    if(diag)
    {
        st.omega_diag = Vec::Zero(l);
        st.psi0_diag = Vec::Zero(l);
    }
    else
    {
        st.omega = Mat::Zero(l, l);
        st.psi0 = Mat::Zero(l, l);
    }
    st.theta = Mat::Zero(m, m);
    st.phi0 = Mat::Zero(m, m);
    {
        std::vector<Index> all(n);
        for(Index i = 0; i < n; i++)
            all[i] = i;
        accumulate(inst, all, st.w, st.psi0_diag, st.psi0, st.phi0);
        if(!diag)
            fill_upper(st.psi0);
        fill_upper(st.phi0);
    }

    SdpAnswer ans;
    ans.K = cst.K;
    ans.alpha = cst.alpha;
    ans.R = cst.cap;

    PrimalCandidate best;
    double best_mass = 0.0;
    auto dual_answer = [&](const Vec& w, double scale, const char* why, long t) {
        SdpAnswer a = ans;
        a.kind = AnswerKind::Dual;
        a.w = w / scale;
        a.iterations = t;
        a.exit_reason = why;
        a.best_dual_mass = std::max(best_mass, a.w.sum());
        a.best_primal_trace = best.trace;
        return a;
    };
    auto exact_dual_scale = [&]() {
        return (1.0 + 1e-12) * std::max(st.psi_max(), st.phi_kyfan(k) / static_cast<double>(k));
    };

    Vec Msum_d = diag ? Vec::Zero(l) : Vec();
    Mat Msum = diag ? Mat() : Mat::Zero(l, l);
    Mat Wsum = Mat::Zero(m, m);

    ProjectionOptions popt = opt.projection;
    popt.dense_cutoff = std::max(popt.dense_cutoff, opt.dense_cap);
    popt.power.dense_cutoff = std::max(popt.power.dense_cutoff, opt.dense_cap);
    popt.sketch.dense_cutoff = std::max(popt.sketch.dense_cutoff, opt.dense_cap);

    const double kappa_nominal = 2.0 * cst.K * static_cast<double>(k);
    long t = 0;
    while(st.w.sum() <= cst.K && t < cst.cap)
    {
        t++;
        Rng it = rng.child("iter", static_cast<std::uint64_t>(t));

        // Projection of (Omega, Theta), both exponentials scaled by exp(-shift).
        OperatorPtr Fop, Gop;
        double top_F, top_G;
        if(diag)
        {
            Fop = std::make_shared<const DiagonalOperator>(st.omega_diag);
            top_F = st.omega_diag.maxCoeff();
        }
        else
        {
            auto d = std::make_shared<const DenseOperator>(st.omega);
            top_F = d->eig().values(0);
            Fop = d;
        }
        {
            auto d = std::make_shared<const DenseOperator>(st.theta);
            top_G = d->eig().values(0);
            Gop = d;
        }
        popt.log_shift = std::max(top_G, 0.0);
        popt.log_shift_M = std::max(top_F, 0.0);
        const double kappa = std::max({kappa_nominal, top_F, top_G});
        ProjectionHandle h = full_projection(Fop, kappa, Gop, kappa, k, pe, cst.delta_dagger, it, popt);

        // y_i ~ <exp(Omega), A_i>, z_i ~ <exp(Theta), P D_i D_i^T P>.
        Vec y(n);
        if(diag)
        {
            const Vec& f = *h.F_exp->diagonal();
            for(Index i = 0; i < n; i++)
                y[i] = inst.a_scale[i] * f[inst.a_coord[i]];
        }
        else
        {
            auto Bt = half_exp(Fop, kappa, se, 0.5 * popt.log_shift_M, popt.dense_cutoff);
            Rng ry = it.child("inner-A");
            auto yy = sketch_inner_products(*Bt, inst.C, se, sd, ry, popt.sketch);
            for(Index i = 0; i < n; i++)
                y[i] = yy[i];
        }
        std::vector<Mat> PD(n);
        for(Index i = 0; i < n; i++)
            PD[i] = project_out(h.V, inst.D[i]);
        auto Bg = half_exp(Gop, kappa, se, 0.5 * popt.log_shift, popt.dense_cutoff);
        Rng rz = it.child("inner-B");
        auto z = sketch_inner_products(*Bg, PD, se, sd, rz, popt.sketch);

        const double gam = h.mass_M / h.z1;
        const double beta = h.mass_W * h.w_coef;
        const double beta_p = beta * h.h_factor;
        const Vec capv = h.sigma.cwiseMin(h.tau);
        std::vector<Index> S;
        for(Index i = 0; i < n; i++)
        {
            const Vec vd = (h.V.transpose() * inst.D[i]).rowwise().squaredNorm();
            const double est = gam * y[i] + beta_p * z[i] + beta * capv.dot(vd);
            if(est <= 1.0 + eps)
                S.push_back(i);
        }

        // Current projection, densely.
        Vec Mt_d;
        Mat Mt;
        if(diag)
            Mt_d = gam * *h.F_exp->diagonal();
        else
            Mt = projection_dense(h, Side::M);
        const Mat Wt = projection_dense(h, Side::W);
        if(diag)
            Msum_d += Mt_d;
        else
            Msum += Mt;
        Wsum += Wt;

        if(opt.certified_exits && S.empty())
        {
            PrimalCandidate pc = certify_primal(inst, diag, Mt_d, Mt, Wt, trace_limit);
            if(pc.ok)
            {
                pc.ans.K = cst.K;
                pc.ans.alpha = cst.alpha;
                pc.ans.R = cst.cap;
                pc.ans.iterations = t;
                pc.ans.best_dual_mass = best_mass;
                pc.ans.best_primal_trace = pc.trace;
                pc.ans.exit_reason = "primal-certified-iterate";
                return pc.ans;
            }
        }

        // w^t = w^{t-1} + alpha w^{t-1}_S.
        Vec inc(static_cast<Index>(S.size()));
        for(std::size_t j = 0; j < S.size(); j++)
            inc[static_cast<Index>(j)] = cst.alpha * st.w[S[j]];
        accumulate(inst, S, inc, st.omega_diag, st.omega, st.theta);
        if(!diag)
            fill_upper(st.omega);
        fill_upper(st.theta);
        for(std::size_t j = 0; j < S.size(); j++)
            st.w[S[j]] += inc[static_cast<Index>(j)];

        if(trace)
        {
            trace->weight_norm.push_back(st.w.sum());
            if(trace->record_every > 0 && t % trace->record_every == 0)
            {
                trace->psi_norm.push_back(st.psi_max());
                trace->phi_kyfan.push_back(st.phi_kyfan(k));
            }
        }

        if(opt.certified_exits && (t % std::max(1L, opt.check_every) == 0 || t == cst.cap))
        {
            const double scale = exact_dual_scale();
            if(scale > 0.0)
                best_mass = std::max(best_mass, st.w.sum() / scale);
            if(scale > 0.0 && st.w.sum() / scale >= 1.0 - target)
                return dual_answer(st.w, scale, "dual-certified", t);
            const double inv = 1.0 / static_cast<double>(t);
            PrimalCandidate pc = certify_primal(inst, diag, Msum_d * inv, Msum * inv, Wsum * inv, trace_limit);
            if(pc.ok)
            {
                pc.ans.K = cst.K;
                pc.ans.alpha = cst.alpha;
                pc.ans.R = cst.cap;
                pc.ans.iterations = t;
                pc.ans.best_dual_mass = best_mass;
                pc.ans.best_primal_trace = pc.trace;
                pc.ans.exit_reason = "primal-certified-average";
                return pc.ans;
            }
            if(pc.trace < best.trace)
                best = pc;
        }
    }

    if(!opt.certified_exits)
    {
        if(st.w.sum() >= cst.K)
            return dual_answer(st.w, (1.0 + 10.0 * eps) * cst.K, "weight-threshold", t);
        SdpAnswer a = ans;
        a.kind = AnswerKind::Primal;
        a.m_diagonal = diag;
        const double inv = 1.0 / static_cast<double>(std::max(1L, t));
        if(diag)
            a.M_diag = Msum_d * inv;
        else
            a.M = Msum * inv;
        a.W = Wsum * inv;
        a.iterations = t;
        a.exit_reason = "iteration-cap";
        return a;
    }

    // Weight threshold or cap reached without an earlier certificate: the
    // exactly rescaled dual if it carries enough mass, else the best rescaled
    // primal candidate (which fails verification if its trace is too large).
    {
        const double scale = exact_dual_scale();
        if(scale > 0.0 && st.w.sum() / scale >= 1.0 - target)
            return dual_answer(st.w, scale, "dual-certified", t);
        if(best.trace == INFINITY)
            return dual_answer(st.w, scale, st.w.sum() > cst.K ? "weight-threshold" : "iteration-cap", t);
    }
    SdpAnswer a = best.ans;
    a.K = cst.K;
    a.alpha = cst.alpha;
    a.R = cst.cap;
    a.iterations = t;
    a.best_dual_mass = best_mass;
    a.best_primal_trace = best.trace;
    a.exit_reason = st.w.sum() > cst.K ? "weight-threshold" : "iteration-cap";
    return a;
}

// ---------------------------------------------------------------------------
// Preprocessing wrapper
// ---------------------------------------------------------------------------

SdpAnswer packing_covering_decision(const SdpInstance& inst, double eps, double delta, Rng& rng,
                                    const DecisionOptions& opt)
{
    inst.validate();
    require(eps > 0.0 && eps < 1.0, "sdp: eps must lie in (0, 1)");
    require(delta > 0.0 && delta < 1.0, "sdp: delta must lie in (0, 1)");
    require(opt.divisor >= 1.0, "sdp: divisor must be at least 1");
    const Index n = inst.n();
    const double nd = static_cast<double>(n);
    require(opt.allow_small_eps || eps >= 1.0 / (nd * nd), "sdp: eps must be at least 1/n^2");

    const double N = static_cast<double>(n + inst.l + inst.m);
    const double huge = std::pow(N, 5.0);
    const double shift = 1.0 / huge;

    auto shifted_primal = [&](SdpAnswer a) {
        if(a.m_diagonal)
            a.M_diag.array() += shift;
        else
            a.M.diagonal().array() += shift;
        a.W.diagonal().array() += shift;
        return a;
    };

    // A constraint with A_i = B_i = 0 carries unbounded dual weight.
    for(Index i = 0; i < n; i++)
    {
        if(inst.trace_a(i) + inst.trace_b(i) == 0.0)
        {
            SdpAnswer a;
            a.kind = AnswerKind::Dual;
            a.w = Vec::Zero(n);
            a.w[i] = 1.0;
            a.exit_reason = "zero-constraint";
            return a;
        }
    }

    std::vector<Index> keep;
    for(Index i = 0; i < n; i++)
        if(inst.trace_a(i) < huge && inst.trace_b(i) < huge)
            keep.push_back(i);

    if(keep.empty())
    {
        SdpAnswer a;
        a.kind = AnswerKind::Primal;
        a.m_diagonal = inst.diagonal_a();
        if(a.m_diagonal)
            a.M_diag = Vec::Zero(inst.l);
        else
            a.M = Mat::Zero(inst.l, inst.l);
        a.W = Mat::Zero(inst.m, inst.m);
        a.exit_reason = "all-discarded";
        return shifted_primal(a);
    }

    const SdpInstance sub = inst.subset(keep);
    const double eps_s = eps / opt.divisor;
    SolverOptions so = opt.solver;
    so.target_eps = eps;
    so.primal_reserve = shift * static_cast<double>(inst.l + inst.m);
    const SolverConstants cst = solver_constants(sub, eps_s, delta, so);

    auto pad = [&](const Vec& w) {
        Vec full = Vec::Zero(n);
        for(std::size_t j = 0; j < keep.size(); j++)
            full[keep[j]] = w[static_cast<Index>(j)];
        return full;
    };

    // T = 0: the initial weights already exceed K.
    double w0 = 0.0;
    for(Index i = 0; i < sub.n(); i++)
        w0 += 1.0 / (static_cast<double>(sub.n()) * (sub.trace_a(i) + sub.trace_b(i)));
    if(w0 > cst.K)
    {
        Vec w(sub.n());
        for(Index i = 0; i < sub.n(); i++)
            w[i] = 1.0 / (static_cast<double>(sub.n()) * (sub.trace_a(i) + sub.trace_b(i)));
        // w^0 itself is feasible (Psi^0 <= I, ||Phi^0||_k <= Tr Phi^0 <= 1);
        // the certified variant keeps its full mass instead of dividing by
        // (1 + 10 eps) K.
        double scale = (1.0 + 10.0 * eps_s) * cst.K;
        if(so.certified_exits)
        {
            Vec pd;
            Mat P, B = Mat::Zero(sub.m, sub.m);
            if(sub.diagonal_a())
            {
                pd = Vec::Zero(sub.l);
                for(Index i = 0; i < sub.n(); i++)
                    pd[sub.a_coord[i]] += w[i] * sub.a_scale[i];
            }
            else
            {
                P = Mat::Zero(sub.l, sub.l);
                for(Index i = 0; i < sub.n(); i++)
                    P.noalias() += w[i] * sub.C[i] * sub.C[i].transpose();
            }
            for(Index i = 0; i < sub.n(); i++)
                B.noalias() += w[i] * sub.D[i] * sub.D[i].transpose();
            const double top = sub.diagonal_a() ? pd.maxCoeff() : lambda_max(P);
            scale = (1.0 + 1e-12) * std::max(top, kyfan_dense(B, sub.k) / static_cast<double>(sub.k));
        }
        SdpAnswer a;
        a.kind = AnswerKind::Dual;
        a.w = pad(w / scale);
        a.K = cst.K;
        a.alpha = cst.alpha;
        a.R = cst.cap;
        a.exit_reason = "initial-weights";
        return a;
    }

    Rng lr = rng.child("solver-loop");
    SdpAnswer a = solver_loop(sub, eps_s, delta, lr, so);
    if(a.is_dual())
    {
        a.w = pad(a.w);
        return a;
    }
    return shifted_primal(std::move(a));
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

DecisionOptions worst_case_decision_options()
{
    DecisionOptions o;
    o.divisor = 20.0;
    o.solver.step = -1.0;
    o.solver.projection_eps = -1.0;
    o.solver.certified_exits = false;
    o.solver.max_iterations = std::numeric_limits<long>::max();
    return o;
}

VerifyReport verify_certificate(const SdpInstance& inst, const SdpAnswer& ans, double eps, double tol)
{
    VerifyReport r;
    auto fail = [&](const std::string& what, double lhs, double rhs) {
        std::ostringstream os;
        os.precision(12);
        os << what << ": " << lhs << " vs bound " << rhs;
        r.violations.push_back(os.str());
        r.ok = false;
    };
    const Index n = inst.n();
    const double k = static_cast<double>(inst.k);

    if(ans.is_dual())
    {
        if(ans.w.size() != n)
        {
            fail("dual: weight vector length", static_cast<double>(ans.w.size()), static_cast<double>(n));
            return r;
        }
        if(!ans.w.allFinite())
        {
            fail("dual: non-finite weights", 0.0, 0.0);
            return r;
        }
        if(ans.w.minCoeff() < -tol)
            fail("dual: negative weight", ans.w.minCoeff(), 0.0);
        r.mass = ans.w.sum();
        if(r.mass < 1.0 - eps - tol)
            fail("dual: total weight sum_i w_i", r.mass, 1.0 - eps);

        Vec pd;
        Mat P;
        if(inst.diagonal_a())
        {
            pd = Vec::Zero(inst.l);
            for(Index i = 0; i < n; i++)
                pd[inst.a_coord[i]] += ans.w[i] * inst.a_scale[i];
            r.psi_max = pd.maxCoeff();
        }
        else
        {
            P = Mat::Zero(inst.l, inst.l);
            for(Index i = 0; i < n; i++)
                P.noalias() += ans.w[i] * inst.C[i] * inst.C[i].transpose();
            r.psi_max = lambda_max(P);
        }
        Mat B = Mat::Zero(inst.m, inst.m);
        for(Index i = 0; i < n; i++)
            B.noalias() += ans.w[i] * inst.D[i] * inst.D[i].transpose();
        r.phi_kyfan = kyfan_dense(B, inst.k);
        if(r.psi_max > 1.0 + tol)
            fail("dual: lambda_max(sum_i w_i A_i)", r.psi_max, 1.0);
        if(r.phi_kyfan > k * (1.0 + tol))
            fail("dual: Ky-Fan norm ||sum_i w_i B_i||_k", r.phi_kyfan, k);
        return r;
    }

    const Mat W = ans.W;
    if(W.rows() != inst.m || W.cols() != inst.m)
    {
        fail("primal: W dimension", static_cast<double>(W.rows()), static_cast<double>(inst.m));
        return r;
    }
    if(ans.m_diagonal ? ans.M_diag.size() != inst.l : ans.M.rows() != inst.l)
    {
        fail("primal: M dimension", 0.0, static_cast<double>(inst.l));
        return r;
    }
    const double trM = ans.m_diagonal ? ans.M_diag.sum() : ans.M.trace();
    const double trW = W.trace();
    r.trace = trM + trW;
    const double minM = ans.m_diagonal ? ans.M_diag.minCoeff() : lambda_min(ans.M);
    const double normM = ans.m_diagonal ? ans.M_diag.cwiseAbs().maxCoeff() : ans.M.norm();
    if(minM < -tol * std::max(1.0, normM))
        fail("primal: lambda_min(M)", minM, 0.0);
    const double minW = lambda_min(W);
    if(minW < -tol * std::max(1.0, W.norm()))
        fail("primal: lambda_min(W)", minW, 0.0);
    if(r.trace > 1.0 + eps + tol)
        fail("primal: Tr M + Tr W", r.trace, 1.0 + eps);
    const double topW = lambda_max(W);
    r.cap_slack = trW / k - topW;
    if(topW > trW / k + tol * std::max(1.0, trW))
        fail("primal: spectral cap ||W|| <= Tr W / k", topW, trW / k);
    const Vec cov = coverage(inst, ans.m_diagonal, ans.M_diag, ans.M, W);
    r.min_cover = cov.minCoeff();
    for(Index i = 0; i < n; i++)
    {
        if(cov[i] < 1.0 - tol)
        {
            fail("primal: covering constraint " + std::to_string(i), cov[i], 1.0);
            break;
        }
    }
    return r;
}

SdpInstance random_sdp_instance(Rng& r, Index max_n, Index max_dim, Index max_k)
{
    require(max_n >= 1 && max_dim >= 2 && max_k >= 1, "random_sdp_instance: invalid limits");
    SdpInstance s;
    s.l = 2 + r.below(max_dim - 1);
    s.m = 2 + r.below(max_dim - 1);
    s.k = 1 + r.below(std::min<Index>(max_k, s.m));
    const Index n = 1 + r.below(max_n);
    const double sc = std::exp(2.0 * (r.uniform() - 0.5) * 2.0);
    for(Index i = 0; i < n; i++)
    {
        const Index ra = 1 + r.below(2), rb = 1 + r.below(2);
        s.C.push_back(r.normal_mat(s.l, ra) * std::sqrt(sc / static_cast<double>(s.l)));
        s.D.push_back(r.normal_mat(s.m, rb) * std::sqrt(sc * static_cast<double>(s.k) / static_cast<double>(s.m)));
    }
    return s;
}

} // namespace ldme
