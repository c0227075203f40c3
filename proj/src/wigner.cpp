#include "phasepath/wigner.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "fft.hpp"
#include "phasepath/errors.hpp"

namespace phasepath {
namespace {

using detail::FftDirection;
using detail::fft_inplace;

// Momentum amplitudes scaled by sqrt(dp) and by exp(i k dp x_min), so that a
// row buffer entry alpha_k1 conj(beta_k2) already carries exp(i m dp x_min).
std::vector<complex> row_amplitudes(const Wavefunction& psi) {
    const Wavefunction mom = psi.in(Representation::momentum);
    const GridSpec pg = mom.axis();
    const double x_min = psi.position_grid().x_min;
    std::vector<complex> a(mom.size());
    const double root = std::sqrt(pg.dx);
    for (std::size_t k = 0; k < a.size(); ++k) {
        a[k] = mom[k] * root * std::polar(1.0, static_cast<double>(k) * pg.dx * x_min / hbar);
    }
    return a;
}

// Band-limited shift f(x) -> f(x - delta) of a periodic row sampled at
// 2n points over one period. `buf` is scratch of the row length.
void shift_row(std::span<const double> in, double delta, double period, std::span<double> out,
               std::vector<complex>& buf) {
    const std::size_t len = in.size();
    buf.assign(in.begin(), in.end());
    fft_inplace(buf, FftDirection::forward);
    const std::size_t half = len / 2;
    const double base = -2.0 * pi * delta / period;
    for (std::size_t i = 1; i < len; ++i) {
        if (i == half) {
            buf[i] *= std::cos(base * static_cast<double>(half));
            continue;
        }
        const double n = i < half ? static_cast<double>(i) : static_cast<double>(i) - static_cast<double>(len);
        buf[i] *= std::polar(1.0, base * n);
    }
    fft_inplace(buf, FftDirection::backward);
    const double scale = 1.0 / static_cast<double>(len);
    for (std::size_t c = 0; c < len; ++c) out[c] = buf[c].real() * scale;
}

// Probability that the shear x -> x + p t / m carries across the periodic
// boundary, estimated from the two marginals as if x and p were
// independent. Pointwise |W| is unsuitable: the lattice carries a
// periodic-image ghost near x0 +- S/2 that never represents probability.
double wrapped_probability(const WignerGrid& w, double t) {
    const GridSpec sg = w.state_grid();
    const GridSpec pg = w.state_momentum_axis();
    const auto xm = w.x_marginal();
    const auto pm = w.p_marginal();
    // Cumulative position probability up to each cell's upper edge.
    std::vector<double> cdf(xm.size() + 1, 0.0);
    for (std::size_t j = 0; j < xm.size(); ++j) cdf[j + 1] = cdf[j] + std::max(0.0, xm[j]) * sg.dx;
    const double total = cdf.back();
    auto below = [&](double x) {
        const double f = std::clamp((x - sg.lower_edge()) / sg.dx, 0.0, static_cast<double>(xm.size()));
        const auto j = static_cast<std::size_t>(f);
        const double frac = f - static_cast<double>(j);
        return j < xm.size() ? cdf[j] + frac * (cdf[j + 1] - cdf[j]) : total;
    };
    double out = 0.0;
    for (std::size_t k = 0; k < pm.size(); ++k) {
        const double shift = pg.at(k) * t / mass;
        const double leaving = shift > 0.0 ? total - below(sg.upper_edge() - shift) : below(sg.lower_edge() - shift);
        out += std::max(0.0, pm[k]) * pg.dx * (total > 0.0 ? leaving / total : 0.0);
    }
    return out;
}

void require_shear_in_range(const WignerGrid& w, double t) {
    const double wrapped = wrapped_probability(w, t);
    if (wrapped > kShearWrapLimit) {
        throw ShearOutOfRange("shear by t=" + std::to_string(t) + " carries an estimated " +
                              std::to_string(100.0 * wrapped) + "% of the probability across the grid boundary");
    }
}

double strip_weight(double center, double width, double a, double b) {
    const double lo = std::max(center - 0.5 * width, a);
    const double hi = std::min(center + 0.5 * width, b);
    return hi > lo ? (hi - lo) / width : 0.0;
}

void require_same_axes(const WignerGrid& a, const WignerGrid& b) {
    if (!(a.x_axis() == b.x_axis()) || !(a.p_axis() == b.p_axis())) {
        throw GridMismatch("Wigner grids have different axes");
    }
}

nlohmann::json axis_json(const GridSpec& g, const char* unit) {
    return {{"min", g.x_min}, {"step", g.dx}, {"n", g.n}, {"unit", unit}};
}

GridSpec axis_from_json(const nlohmann::json& j) {
    return GridSpec(j.at("min").get<double>(), j.at("step").get<double>(), j.at("n").get<std::size_t>());
}

}  // namespace

WignerGrid::WignerGrid(GridSpec x_axis, GridSpec p_axis, std::vector<double> values)
    : x_axis_(x_axis), p_axis_(p_axis), values_(std::move(values)) {
    if (values_.size() != x_axis_.n * p_axis_.n) throw InvalidArgument("Wigner value count does not match the axes");
    if (x_axis_.n % 2 != 0 || p_axis_.n % 2 != 0) throw InvalidGrid("Wigner lattice needs even axis lengths");
}

GridSpec WignerGrid::state_grid() const { return GridSpec(x_axis_.x_min, 2.0 * x_axis_.dx, x_axis_.n / 2); }

GridSpec WignerGrid::state_momentum_axis() const { return GridSpec(p_axis_.x_min, 2.0 * p_axis_.dx, p_axis_.n / 2); }

double WignerGrid::integral() const {
    double s = 0.0;
    for (std::size_t r = 0; r < p_axis_.n; ++r) {
        const auto w = row(r);
        for (std::size_t c = 0; c < w.size(); c += 2) s += w[c];
    }
    return s * 2.0 * x_axis_.dx * p_axis_.dx;
}

double WignerGrid::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double WignerGrid::min_value() const { return *std::min_element(values_.begin(), values_.end()); }

std::vector<double> WignerGrid::x_marginal() const {
    std::vector<double> m(x_axis_.n / 2, 0.0);
    for (std::size_t r = 0; r < p_axis_.n; ++r) {
        const auto w = row(r);
        for (std::size_t j = 0; j < m.size(); ++j) m[j] += w[2 * j];
    }
    for (auto& v : m) v *= p_axis_.dx;
    return m;
}

std::vector<double> WignerGrid::p_marginal() const {
    std::vector<double> m(p_axis_.n / 2, 0.0);
    for (std::size_t k = 0; k < m.size(); ++k) {
        const auto w = row(2 * k);
        double s = 0.0;
        for (std::size_t c = 0; c < w.size(); c += 2) s += w[c];
        // Row mass s * 2dx * dp/2 spread over a momentum cell of width dp.
        m[k] = s * x_axis_.dx;
    }
    return m;
}

double WignerGrid::odd_row_mass() const {
    double s = 0.0;
    for (std::size_t r = 1; r < p_axis_.n; r += 2) {
        const auto w = row(r);
        for (std::size_t c = 0; c < w.size(); c += 2) s += w[c];
    }
    return s * 2.0 * x_axis_.dx * p_axis_.dx;
}

WignerGrid wigner_from_terms(std::span<const OperatorTerm> terms) {
    if (terms.empty()) throw InvalidArgument("operator has no terms");
    const GridSpec grid = terms.front().ket->position_grid();
    for (const auto& t : terms) {
        if (!(t.ket->position_grid() == grid) || !(t.bra->position_grid() == grid)) {
            throw GridMismatch("operator terms live on different grids");
        }
    }
    const std::size_t n = grid.n;
    if (n % 2 != 0) throw InvalidGrid("Wigner construction needs an even point count");
    if (n > kMaxWignerStatePoints) {
        throw ResolutionError("state grid of " + std::to_string(n) + " points exceeds the Wigner lattice limit of " +
                              std::to_string(kMaxWignerStatePoints));
    }
    const GridSpec pg = grid.conjugate();
    const std::size_t len = 2 * n;
    const GridSpec x_axis(grid.x_min, 0.5 * grid.dx, len);
    const GridSpec p_axis(pg.x_min, 0.5 * pg.dx, len);

    std::vector<std::vector<complex>> kets;
    std::vector<std::vector<complex>> bras;
    for (const auto& t : terms) {
        kets.push_back(row_amplitudes(*t.ket));
        bras.push_back(t.bra == t.ket ? kets.back() : row_amplitudes(*t.bra));
    }

    // Row r holds p = p_min + r dp/2; W = w_r / (dp/2) with
    // w_r(x) = (1/S) sum_{k1+k2=r} alpha_k1 conj(beta_k2) exp(i (k1-k2) dp x).
    const double period = static_cast<double>(n) * grid.dx;
    const double scale = 1.0 / (period * p_axis.dx);
    std::vector<double> values(len * len, 0.0);
    std::vector<complex> buf(len);
    for (std::size_t r = 0; r + 1 < len; ++r) {
        std::fill(buf.begin(), buf.end(), complex{});
        const std::size_t k_lo = r >= n ? r - n + 1 : 0;
        const std::size_t k_hi = std::min(r, n - 1);
        for (std::size_t t = 0; t < terms.size(); ++t) {
            const complex c = terms[t].coefficient;
            const auto& a = kets[t];
            const auto& b = bras[t];
            for (std::size_t k1 = k_lo; k1 <= k_hi; ++k1) {
                const std::size_t idx = (2 * k1 + len - r) % len;
                buf[idx] += c * a[k1] * std::conj(b[r - k1]);
            }
        }
        fft_inplace(buf, FftDirection::backward);
        double* out = values.data() + r * len;
        for (std::size_t col = 0; col < len; ++col) out[col] = buf[col].real() * scale;
    }
    return WignerGrid(x_axis, p_axis, std::move(values));
}

WignerGrid wigner_from_pure(const Wavefunction& psi) {
    const OperatorTerm term{1.0, &psi, &psi};
    return wigner_from_terms(std::span<const OperatorTerm>(&term, 1));
}

WignerGrid wigner_from_mixture(const QuasiProbabilities& weights, const BoxPair& boxes) {
    weights.validate();
    std::vector<OperatorTerm> terms{{weights.w_L, &boxes.L, &boxes.L}, {weights.w_B, &boxes.B, &boxes.B}};
    if (weights.w_inter != 0.0) {
        if (std::abs(boxes.overlap) < 1e-12) throw DegenerateSuperposition("interference weight needs a non-zero overlap");
        const double c = 0.5 * weights.w_inter / boxes.overlap;
        terms.push_back({c, &boxes.L, &boxes.B});
        terms.push_back({c, &boxes.B, &boxes.L});
    }
    return wigner_from_terms(terms);
}

WignerGrid wigner_from_mixture(const QuasiProbabilities& weights, const NaturalUnits& units, const GridSpec& grid) {
    weights.validate();
    return wigner_from_mixture(weights, BoxPair::make(units, grid));
}

WignerGrid shear_evolve(const WignerGrid& w, double t) {
    if (!std::isfinite(t)) throw InvalidArgument("shear time must be finite");
    if (t == 0.0) return w;
    const GridSpec& xa = w.x_axis();
    const GridSpec& pa = w.p_axis();
    require_shear_in_range(w, t);
    const double period = xa.span();
    std::vector<double> values(w.values().size());
    std::vector<complex> buf;
    for (std::size_t r = 0; r < pa.n; ++r) {
        const double delta = pa.at(r) * t / mass;
        shift_row(w.row(r), delta, period, std::span<double>(values.data() + r * xa.n, xa.n), buf);
    }
    return WignerGrid(xa, pa, std::move(values));
}

RegionReport region_integrals(const WignerGrid& w, double L, double B, double t_M) {
    if (!(L > 0.0) || !(B > 0.0)) throw InvalidArgument("interval widths must be positive");
    if (!(t_M >= 0.0)) throw InvalidArgument("t_M must be non-negative");
    RegionReport rep;
    rep.L = L;
    rep.B = B;
    rep.t_M = t_M;
    rep.M = L + B * t_M / mass;

    const GridSpec sg = w.state_grid();
    const GridSpec& pa = w.p_axis();
    const double dp = 2.0 * pa.dx;
    const auto cov_L = sg.coverage_weights(-0.5 * L, 0.5 * L);
    const auto cov_M = sg.coverage_weights(-0.5 * rep.M, 0.5 * rep.M);
    if (!w.state_momentum_axis().contains_interval(-0.5 * B, 0.5 * B)) {
        throw IntervalOutsideGrid("momentum interval of width " + std::to_string(B) + " exceeds the lattice");
    }

    require_shear_in_range(w, t_M);
    const GridSpec& xa = w.x_axis();
    std::vector<double> sheared(xa.n);
    std::vector<complex> buf;
    double p_l = 0.0, p_b = 0.0, p_m = 0.0, w_lb = 0.0, total = 0.0;
    for (std::size_t r = 0; r < pa.n; ++r) {
        const auto row = w.row(r);
        const double g = strip_weight(pa.at(r), dp, -0.5 * B, 0.5 * B);
        double in_l = 0.0;
        double all = 0.0;
        for (std::size_t j = 0; j < sg.n; ++j) {
            all += row[2 * j];
            in_l += row[2 * j] * cov_L[j];
        }
        total += all;
        p_l += in_l;
        p_b += g * all;
        w_lb += g * in_l;

        shift_row(row, pa.at(r) * t_M / mass, xa.span(), sheared, buf);
        for (std::size_t j = 0; j < sg.n; ++j) p_m += sheared[2 * j] * cov_M[j];
    }
    const double cell = sg.dx * pa.dx;
    rep.P_L = p_l * cell;
    rep.P_B = p_b * cell;
    rep.P_M = p_m * cell;
    rep.W_LB = w_lb * cell;
    rep.total = total * cell;
    rep.W_in = rep.P_L + rep.P_B - rep.W_LB;
    rep.W_out = 1.0 - rep.W_in;
    rep.W_diag = rep.P_M - rep.W_LB;
    return rep;
}

NegativityBounds negativity_bounds(double P_L, double P_B, double L, double B) {
    if (P_L < 0.0 || P_L > 1.0 || P_B < 0.0 || P_B > 1.0) throw InvalidArgument("probabilities must lie in [0, 1]");
    if (!(L > 0.0) || !(B > 0.0)) throw InvalidArgument("interval widths must be positive");
    const double w_lb = L * B / (pi * hbar);
    return NegativityBounds{w_lb, 1.0 - P_L - P_B + w_lb};
}

double l1_distance(const WignerGrid& a, const WignerGrid& b) {
    require_same_axes(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) s += std::abs(a.values()[i] - b.values()[i]);
    return s * a.x_axis().dx * a.p_axis().dx;
}

void write_wigner_csv(const WignerGrid& w, const std::filesystem::path& path, std::size_t stride) {
    if (stride == 0) throw InvalidArgument("CSV stride must be positive");
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    std::fputs("x_nat,p_nat,W_nat\n", f);
    for (std::size_t r = 0; r < w.p_axis().n; r += stride) {
        for (std::size_t c = 0; c < w.x_axis().n; c += stride) {
            std::fprintf(f, "%.10g,%.10g,%.10g\n", w.x_axis().at(c), w.p_axis().at(r), w.at(r, c));
        }
    }
    if (std::fclose(f) != 0) throw IoError("failed writing " + path.string());
}

void write_wigner_binary(const WignerGrid& w, const std::filesystem::path& path) {
    static_assert(std::endian::native == std::endian::little, "binary export assumes a little-endian host");
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot open " + path.string() + " for writing");
        out.write(reinterpret_cast<const char*>(w.values().data()),
                  static_cast<std::streamsize>(w.values().size() * sizeof(double)));
        if (!out) throw IoError("failed writing " + path.string());
    }
    const nlohmann::json header = {
        {"format", "phasepath-wigner"},
        {"dtype", "float64"},
        {"byte_order", "little"},
        {"layout", "row-major; rows index momentum, columns index position"},
        {"x_axis", axis_json(w.x_axis(), "slit width")},
        {"p_axis", axis_json(w.p_axis(), "hbar per slit width")},
        {"values_unit", "1/(length*momentum), natural units"},
    };
    std::ofstream meta(path.string() + ".json");
    if (!meta) throw IoError("cannot open " + path.string() + ".json for writing");
    meta << header.dump(2) << '\n';
}

WignerGrid read_wigner_binary(const std::filesystem::path& path) {
    std::ifstream meta(path.string() + ".json");
    if (!meta) throw IoError("missing header " + path.string() + ".json");
    nlohmann::json header;
    try {
        meta >> header;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed Wigner header: " + std::string(e.what()));
    }
    if (header.value("format", "") != "phasepath-wigner" || header.value("dtype", "") != "float64") {
        throw IoError("unsupported Wigner file " + path.string());
    }
    const GridSpec xa = axis_from_json(header.at("x_axis"));
    const GridSpec pa = axis_from_json(header.at("p_axis"));
    std::vector<double> values(xa.n * pa.n);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(values.size() * sizeof(double))) {
        throw IoError("truncated Wigner data in " + path.string());
    }
    return WignerGrid(xa, pa, std::move(values));
}

}  // namespace phasepath
