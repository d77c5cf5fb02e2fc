#include "memorium/energy.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace memorium {

namespace {

void validate_graffi_kernel(const MaterialModel& M) {
    auto sym_gap = [](const Matrix& A) {
        return (A - A.transpose()).lpNorm<Eigen::Infinity>() / (1.0 + A.lpNorm<Eigen::Infinity>());
    };
    if (sym_gap(M.kernel.G_inf) > 1e-12)
        throw ConfigError("quadratic free energy: G_inf must be symmetric");
    for (const auto& t : M.kernel.terms)
        if (sym_gap(t.C) > 1e-12)
            throw ConfigError("quadratic free energy: Prony terms must be symmetric");

    // Gdot(s) must be negative semidefinite; sampled on a log lag grid.
    double tau_hi = M.max_tau();
    for (int i = 0; i <= 32; ++i) {
        double s = (i == 0) ? 0.0 : 1e-3 * tau_hi * std::pow(5e4, (i - 1) / 31.0);
        Matrix Gd = M.kernel.deriv_at(s);
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (Gd + Gd.transpose()));
        if (es.eigenvalues().maxCoeff() > 1e-10 * (1.0 + Gd.norm()))
            throw ConfigError("quadratic free energy: Gdot(s) is not negative semidefinite");
    }
}

// Exact value of -1/2 int (X(s)-X(0)) . Gdot(s) (X(s)-X(0)) ds for a
// piecewise-linear history against the Prony kernel. Nonnegative for
// monotone symmetric kernels.
double graffi_deviation(const MaterialModel& M, const History& H) {
    double acc = 0.0;
    const Vector& x0 = H.head();
    const int Mn = H.nodes() - 1;
    for (const auto& term : M.kernel.terms) {
        double tau = term.tau;
        Matrix D = term.C / tau; // -Gdot_i(s) = D e^(-s/tau)
        double part = 0.0;
        for (int j = 0; j < Mn; ++j) {
            double Dlt = H.grid[j + 1] - H.grid[j];
            Vector d = H.values[j] - x0;
            Vector r = (H.values[j + 1] - H.values[j]) / Dlt;
            double a = d.dot(D * d);
            double b = 2.0 * d.dot(D * r);
            double cq = r.dot(D * r);
            part += std::exp(-H.grid[j] / tau)
                    * (a * exp_int0(tau, Dlt) + b * exp_int1(tau, Dlt) + cq * exp_int2(tau, Dlt));
        }
        Vector dM = H.values[Mn] - x0;
        part += std::exp(-H.grid[Mn] / tau) * tau * dM.dot(D * dM);
        acc += 0.5 * part;
    }
    return acc;
}

// d(psi)/dX(0) for the explicit quadratic: Ginf X(0) + int Gdot(s) (X(s)-X(0)) ds,
// which collapses to G(0) X(0) + int Gdot X(s) ds, i.e. the response.
// Evaluated here by its own segment integrals, independent of the
// hereditary evaluator's recursion.
Vector graffi_gradient(const MaterialModel& M, const History& H) {
    const Vector& x0 = H.head();
    Vector g = M.kernel.G_inf * x0;
    const int Mn = H.nodes() - 1;
    for (const auto& term : M.kernel.terms) {
        double tau = term.tau;
        Matrix D = term.C / tau;
        Vector acc = Vector::Zero(H.space.dim);
        for (int j = 0; j < Mn; ++j) {
            double Dlt = H.grid[j + 1] - H.grid[j];
            Vector d = H.values[j] - x0;
            Vector r = (H.values[j + 1] - H.values[j]) / Dlt;
            acc += std::exp(-H.grid[j] / tau) * (d * exp_int0(tau, Dlt) + r * exp_int1(tau, Dlt));
        }
        acc += std::exp(-H.grid[Mn] / tau) * tau * (H.values[Mn] - x0);
        g -= D * acc; // Gdot contribution
    }
    return g;
}

// delta psi with physical past rates:
//   + int Hdot_lag(t+s) . Gdot(s) (H(t+s)-H(t)) ds  (lag rates, sign flipped)
// computed exactly per segment of the shifted history.
double graffi_delta_physical(const MaterialModel& M, const History& Ht) {
    const Vector& x0 = Ht.head();
    double acc = 0.0;
    const int Mn = Ht.nodes() - 1;
    for (const auto& term : M.kernel.terms) {
        double tau = term.tau;
        Matrix D = term.C / tau;
        double part = 0.0;
        for (int j = 0; j < Mn; ++j) {
            double Dlt = Ht.grid[j + 1] - Ht.grid[j];
            Vector r = (Ht.values[j + 1] - Ht.values[j]) / Dlt;
            Vector d = Ht.values[j] - x0;
            double a = r.dot(D * d);
            double b = r.dot(D * r);
            part += std::exp(-Ht.grid[j] / tau) * (a * exp_int0(tau, Dlt) + b * exp_int1(tau, Dlt));
        }
        acc -= part; // Gdot = -sum D_i e^(-s/tau_i); rates vanish on the tail
    }
    return acc;
}

double relaxed_value(const FreeEnergyFunctional& psi, const History& src, const History& tgt) {
    RelaxationProblem P;
    P.model = &psi.model;
    P.source = src;
    P.target = tgt;
    P.free_nodes = psi.free_nodes;
    P.max_depth_steps = psi.max_depth_steps;
    P.work_opts = psi.work_opts;
    P.dissipative_mode = false; // callers choose the functional deliberately
    return relaxed_work(P).value;
}

} // namespace

FreeEnergyFunctional make_graffi(const MaterialModel& M) {
    validate_graffi_kernel(M);
    FreeEnergyFunctional f;
    f.kind = EnergyKind::quadratic_graffi;
    f.model = M;
    return f;
}

FreeEnergyFunctional make_max_from_source(const MaterialModel& M, const History& H0) {
    FreeEnergyFunctional f;
    f.kind = EnergyKind::max_from_source;
    f.model = M;
    f.source = H0;
    return f;
}

FreeEnergyFunctional make_min_to_source(const MaterialModel& M, const History& H0) {
    FreeEnergyFunctional f;
    f.kind = EnergyKind::min_to_source;
    f.model = M;
    f.source = H0;
    return f;
}

double evaluate(const FreeEnergyFunctional& psi, const History& H) {
    if (H.space != psi.model.space)
        throw ShapeError("free energy: history layout does not match the model");
    switch (psi.kind) {
        case EnergyKind::quadratic_graffi: {
            const Vector& x0 = H.head();
            return 0.5 * x0.dot(psi.model.kernel.G_inf * x0) + graffi_deviation(psi.model, H);
        }
        case EnergyKind::max_from_source:
            if (!psi.source) throw ConfigError("max_from_source requires a source history");
            return relaxed_value(psi, *psi.source, H);
        case EnergyKind::min_to_source:
            if (!psi.source) throw ConfigError("min_to_source requires a source history");
            return -relaxed_value(psi, H, *psi.source);
    }
    throw ConfigError("unknown free-energy kind");
}

DissipationReport check_dissipation_inequality(const FreeEnergyFunctional& psi, const Process& K,
                                               const History& H, double tol) {
    DissipationReport rep;
    History KH = prolong(K, H);
    rep.increment = evaluate(psi, KH) - evaluate(psi, H);
    rep.work_value = work_over(psi.model, K, H, psi.work_opts).value;
    rep.holds = rep.increment <= rep.work_value + tol;

    if (psi.kind == EnergyKind::quadratic_graffi) {
        // Local rate form sampled along the process: physical psi-rate
        // minus the power of the interactions.
        HereditaryEvaluator ev(psi.model, KH);
        const int samples = 16;
        for (int i = 0; i < samples; ++i) {
            double s = K.duration * (i + 0.5) / samples;
            History Hs = shift(KH, s);
            Vector rate_phys = -KH.lag_slope(s);
            double psidot = graffi_gradient(psi.model, Hs).dot(rate_phys)
                            + graffi_delta_physical(psi.model, Hs);
            rep.rate_rows.emplace_back(s, psidot - ev.respond_flat(s).dot(rate_phys));
        }
    }
    return rep;
}

ChainRuleReport chain_rule(const FreeEnergyFunctional& psi, const History& H, double t,
                           double fd_step) {
    if (psi.kind != EnergyKind::quadratic_graffi)
        throw ConfigError("chain_rule: analytic split is available for the explicit functional");
    if (!(fd_step > 0.0) || t - fd_step < 0.0 || t + fd_step > H.span())
        throw DomainError("chain_rule: finite-difference stencil escapes the grid span");
    // The shifted energy is smooth between node crossings only; a slope
    // kink inside the stencil would poison the central difference.
    for (size_t j = 0; j + 1 < H.grid.size(); ++j) {
        double node = H.grid[j];
        if (node > t - fd_step && node < t + fd_step && std::abs(node - t) > 1e-15) {
            Vector left = (j > 0) ? Vector((H.values[j] - H.values[j - 1])
                                           / (H.grid[j] - H.grid[j - 1]))
                                  : Vector(Vector::Zero(H.space.dim));
            Vector right = (H.values[j + 1] - H.values[j]) / (H.grid[j + 1] - H.grid[j]);
            if ((left - right).norm() > 1e-9 * (1.0 + right.norm()))
                throw DomainError("chain_rule: grid too coarse near t (kink inside the stencil)");
        }
    }

    ChainRuleReport rep;
    rep.t = t;

    History Ht = shift(H, t);
    Vector rate_phys = -H.lag_slope(t);
    rep.d_part = graffi_gradient(psi.model, Ht).dot(rate_phys);
    rep.delta_part = graffi_delta_physical(psi.model, Ht);
    rep.analytic = rep.d_part + rep.delta_part;

    // Physical time runs against the shift direction.
    double fplus = evaluate(psi, shift(H, t - fd_step));
    double fminus = evaluate(psi, shift(H, t + fd_step));
    rep.fd = (fplus - fminus) / (2.0 * fd_step);
    rep.discrepancy = std::abs(rep.fd - rep.analytic);
    return rep;
}

ClausiusDuhemReport clausius_duhem_restrictions(const FreeEnergyFunctional& psi,
                                                const MaterialModel& M, const History& H, double t,
                                                const std::vector<double>& alphas) {
    if (psi.kind != EnergyKind::quadratic_graffi)
        throw ConfigError("clausius_duhem_restrictions: explicit functional required");
    auto same = [](const Matrix& A, const Matrix& B) {
        return A.rows() == B.rows() && A.cols() == B.cols()
               && (A - B).lpNorm<Eigen::Infinity>() <= 1e-14 * (1.0 + A.lpNorm<Eigen::Infinity>());
    };
    bool match = same(psi.model.kernel.G_inf, M.kernel.G_inf)
                 && psi.model.kernel.terms.size() == M.kernel.terms.size();
    if (match)
        for (size_t i = 0; i < M.kernel.terms.size(); ++i)
            match = match && psi.model.kernel.terms[i].tau == M.kernel.terms[i].tau
                    && same(psi.model.kernel.terms[i].C, M.kernel.terms[i].C);
    if (!match)
        throw ConfigError("clausius_duhem_restrictions: psi and the model use different kernels");

    ClausiusDuhemReport rep;
    History Ht = shift(H, t);
    Vector grad = graffi_gradient(M, Ht);
    Vector resp = HereditaryEvaluator(M, H).respond_flat(t);
    Vector diff = resp - grad;
    auto norms = block_norms(M.space, diff);
    std::vector<std::string> labels =
        (M.space.blocks.size() == 3) ? std::vector<std::string>{"sigma", "z", "S"}
                                     : std::vector<std::string>{"block0"};
    while (labels.size() < norms.size()) labels.push_back("block" + std::to_string(labels.size()));
    for (size_t i = 0; i < norms.size(); ++i) rep.block_residuals.emplace_back(labels[i], norms[i]);

    rep.delta_part = graffi_delta_physical(M, Ht);

    // Varied-history route: probe rates +-e_j, extract the coefficient of
    // the probe in the local dissipation rate; it converges to the
    // stress-minus-gradient component as alpha -> 0.
    const int n = M.space.dim;
    Vector base_rate = H.lag_slope(t);
    for (double alpha : alphas) {
        double worst = 0.0;
        for (int j = 0; j < n; ++j) {
            Vector e = Vector::Zero(n);
            e[j] = 1.0;
            double cd[2];
            for (int sgn = 0; sgn < 2; ++sgn) {
                Vector target = base_rate + (sgn == 0 ? 1.0 : -1.0) * e;
                History Ha = varied_history(H, t, alpha, target);
                History Hat = shift(Ha, t);
                Vector rate_phys = -Ha.lag_slope(t);
                double psidot = graffi_gradient(M, Hat).dot(rate_phys)
                                + graffi_delta_physical(M, Hat);
                Vector R = HereditaryEvaluator(M, Ha).respond_flat(t);
                cd[sgn] = psidot - R.dot(rate_phys);
            }
            // cd difference isolates (grad - R) . (-e_j).
            double extracted = -0.5 * (cd[0] - cd[1]);
            worst = std::max(worst, std::abs(extracted));
        }
        rep.varied_rows.emplace_back(alpha, worst);
    }
    return rep;
}

FreeEnergyFunctional make_graffi_surface(const SurfaceModel& SM) {
    return make_graffi(SM.material());
}

double evaluate_surface(const FreeEnergyFunctional& phi, const History& HH) {
    return evaluate(phi, HH);
}

DissipationReport check_dissipation_surface(const FreeEnergyFunctional& phi, const Process& K,
                                            const History& HH, double tol) {
    return check_dissipation_inequality(phi, K, HH, tol);
}

} // namespace memorium
