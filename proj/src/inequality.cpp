#include "phasepath/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "phasepath/errors.hpp"
#include "phasepath/propagation.hpp"
#include "phasepath/wavefunction.hpp"

namespace phasepath {
namespace {

void require_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument(std::string(name) + " must lie in [0, 1]");
}

bool same(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

PropagationTriple PropagationTriple::make(double P_L, double P_B, double P_M, double L, double B, double t_M) {
    require_probability(P_L, "P_L");
    require_probability(P_B, "P_B");
    require_probability(P_M, "P_M");
    if (!(L > 0.0) || !(B > 0.0) || !(t_M >= 0.0)) throw InvalidArgument("invalid interval geometry");
    return PropagationTriple{P_L, P_B, P_M, L, B, t_M, L + B * t_M / mass};
}

PropagationTriple PropagationTriple::make(double P_L, double P_B, double P_M, const NaturalUnits& units) {
    return make(P_L, P_B, P_M, units.L, units.B, units.t_M());
}

double minimal_joint_probability(double P_L, double P_B) {
    require_probability(P_L, "P_L");
    require_probability(P_B, "P_B");
    return std::max(0.0, P_L + P_B - 1.0);
}

double defect_probability(const PropagationTriple& t) { return t.P_L + t.P_B - 1.0 - t.P_M; }

Estimate defect_with_uncertainty(const PropagationTriple& triple, double err_L, double err_B, double err_M) {
    return Estimate{defect_probability(triple), std::sqrt(err_L * err_L + err_B * err_B + err_M * err_M)};
}

WignerConsistency wigner_consistency(const PropagationTriple& triple, const RegionReport& report, double tol) {
    if (!same(triple.L, report.L) || !same(triple.B, report.B) || !same(triple.t_M, report.t_M)) {
        throw InconsistentGeometry("triple and region report use different intervals or t_M");
    }
    WignerConsistency c;
    c.defect = defect_probability(triple);
    c.wigner_defect = -(report.W_out + report.W_diag);
    c.difference = c.defect - c.wigner_defect;
    c.consistent = std::abs(c.difference) <= tol;
    return c;
}

PropagationTriple triple_from_report(const RegionReport& r) {
    auto clamp01 = [](double p) { return std::clamp(p, 0.0, 1.0); };
    return PropagationTriple{clamp01(r.P_L), clamp01(r.P_B), clamp01(r.P_M), r.L, r.B, r.t_M, r.M};
}

RegionReport bound_report(const PropagationTriple& t) {
    const NegativityBounds b = negativity_bounds(t.P_L, t.P_B, t.L, t.B);
    RegionReport r;
    r.L = t.L;
    r.B = t.B;
    r.t_M = t.t_M;
    r.M = t.M;
    r.P_L = t.P_L;
    r.P_B = t.P_B;
    r.P_M = t.P_M;
    r.W_LB = b.W_LB_max;
    r.W_in = t.P_L + t.P_B - r.W_LB;
    r.W_out = b.W_out_max;
    r.W_diag = t.P_M - r.W_LB;
    r.total = 1.0;
    return r;
}

PropagationTriple ideal_triple(const NaturalUnits& units, const GridSpec& grid) {
    const Wavefunction psi = equal_superposition(units, grid);
    const double P_L = interval_probability(psi, 0.0, units.L);
    const double P_B = interval_probability(psi.in(Representation::momentum), 0.0, units.B);
    const double P_M = interval_probability(propagate_free(psi, units.t_M()), 0.0, units.M());
    return PropagationTriple::make(P_L, P_B, P_M, units);
}

PropagationTriple ideal_triple(const NaturalUnits& units) { return ideal_triple(units, aligned_grid(units.L, units.B)); }

SweepResult defect_sweep(std::span<const double> sigmas, int cells_in_L, int cells_in_B) {
    if (sigmas.empty()) throw InvalidArgument("sweep needs at least one sigma");
    SweepResult out;
    for (double s : sigmas) {
        const NaturalUnits u = NaturalUnits::from_sigma(s);
        out.points.push_back({s, defect_probability(ideal_triple(u, aligned_grid(u.L, u.B, cells_in_L, cells_in_B)))});
    }
    const auto best = std::max_element(out.points.begin(), out.points.end(),
                                       [](const SweepPoint& a, const SweepPoint& b) { return a.defect < b.defect; });
    out.sigma_at_max = best->sigma;
    out.max_defect = best->defect;
    // Least-squares parabola over the samples within 20% of the best sigma;
    // box-edge snapping leaves a ripple that a three-point vertex follows.
    const double s0 = best->sigma;
    double m[3][4] = {};
    int used = 0;
    for (const auto& p : out.points) {
        if (std::abs(p.sigma - s0) > 0.2 * s0) continue;
        const double u = (p.sigma - s0) / s0;
        const double basis[3] = {1.0, u, u * u};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) m[i][j] += basis[i] * basis[j];
            m[i][3] += basis[i] * p.defect;
        }
        ++used;
    }
    if (used >= 4) {
        for (int col = 0; col < 3; ++col) {
            for (int row = col + 1; row < 3; ++row) {
                const double f = m[row][col] / m[col][col];
                for (int k = col; k < 4; ++k) m[row][k] -= f * m[col][k];
            }
        }
        double c[3];
        for (int i = 2; i >= 0; --i) {
            c[i] = m[i][3];
            for (int k = i + 1; k < 3; ++k) c[i] -= m[i][k] * c[k];
            c[i] /= m[i][i];
        }
        const double uv = -c[1] / (2.0 * c[2]);
        if (c[2] < 0.0 && std::abs(uv) <= 0.2) {
            out.sigma_at_max = s0 * (1.0 + uv);
            out.max_defect = c[0] + c[1] * uv + c[2] * uv * uv;
        }
    }
    return out;
}

}  // namespace phasepath
