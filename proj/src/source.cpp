#include "kawarada/source.hpp"

#include "kawarada/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

namespace kawarada {

double SourceModel::phi_max() const { return *std::max_element(phi.begin(), phi.end()); }
double SourceModel::sigma_min() const { return *std::min_element(sigma.begin(), sigma.end()); }

void SourceModel::validate() const {
    if (!(theta > 0.0)) throw Error(ErrorCode::InvalidArgument, "theta must be > 0");
    if (phi.size() != sigma.size() || phi.empty()) {
        throw Error(ErrorCode::InvalidArgument, "phi and sigma must be non-empty and equal length");
    }
    for (std::size_t i = 0; i < phi.size(); ++i) {
        if (!(phi[i] > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, fmt::format("phi[{}] must be > 0", i));
        }
        if (!(sigma[i] > 0.0)) {
            throw Error(ErrorCode::DegenerateInterior, fmt::format("sigma[{}] must be > 0", i));
        }
    }
}

SourceModel make_source(std::span<const double> sigma, double theta) {
    return make_source(std::vector<double>(sigma.size(), 1.0),
                       std::vector<double>(sigma.begin(), sigma.end()), theta);
}

SourceModel make_source(std::vector<double> phi, std::vector<double> sigma, double theta) {
    SourceModel m{theta, std::move(phi), std::move(sigma)};
    m.validate();
    return m;
}

double f_eval(double u, double theta) {
    if (!(u < 1.0)) throw QuenchOverflow(0, u);
    return theta == 1.0 ? 1.0 / (1.0 - u) : std::pow(1.0 - u, -theta);
}

double f_derivative(double u, double theta) {
    if (!(u < 1.0)) throw QuenchOverflow(0, u);
    return theta * std::pow(1.0 - u, -theta - 1.0);
}

double g_eval(std::span<const double> v, const SourceModel& model, std::span<double> out) {
    const double theta = model.theta;
    double norm = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] < 1.0)) throw QuenchOverflow(i, v[i]);
        const double f = theta == 1.0 ? 1.0 / (1.0 - v[i]) : std::pow(1.0 - v[i], -theta);
        out[i] = model.phi[i] * f / model.sigma[i];
        norm = std::max(norm, out[i]);
    }
    return norm;
}

std::vector<double> g_eval(std::span<const double> v, const SourceModel& model) {
    std::vector<double> out(v.size());
    g_eval(v, model, out);
    return out;
}

std::vector<double> g_jacobian_diag(std::span<const double> v, const SourceModel& model) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] < 1.0)) throw QuenchOverflow(i, v[i]);
        out[i] = model.phi[i] * f_derivative(v[i], model.theta) / model.sigma[i];
    }
    return out;
}

double sigma_degenerate(double x, double p) {
    if (!(std::abs(x) < 1.0)) {
        throw Error(ErrorCode::BoundaryDegeneracy,
                    fmt::format("degeneracy evaluated at boundary point x = {}", x));
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "degeneracy exponent p must lie in [0, 1]");
    }
    return std::pow(x + 1.0, p) * std::pow(1.0 - x, 1.0 - p);
}

std::vector<double> sigma_on_grid(const Grid1D& g, double p) {
    std::vector<double> s;
    s.reserve(g.n_interior());
    for (double x : g.interior()) s.push_back(sigma_degenerate(x, p));
    return s;
}

std::vector<double> sample_noise(std::size_t n, const NoiseSpec& spec) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "noise length must be >= 1");
    if (!(spec.lo > 0.0)) throw Error(ErrorCode::InvalidArgument, "noise lower bound must be > 0");
    if (!(spec.hi >= spec.lo)) throw Error(ErrorCode::InvalidArgument, "noise bounds reversed");
    SplitMix64 rng(spec.seed);
    std::vector<double> eps(n);
    for (auto& e : eps) e = std::min(spec.hi, spec.lo + (spec.hi - spec.lo) * rng.next_unit());
    return eps;
}

std::vector<double> phi_squared(std::span<const double> eps) {
    std::vector<double> phi(eps.size());
    std::transform(eps.begin(), eps.end(), phi.begin(), [](double e) { return e * e; });
    return phi;
}

void write_noise_csv(std::ostream& os, std::span<const double> eps) {
    os << "index,epsilon\n";
    for (std::size_t i = 0; i < eps.size(); ++i) os << fmt::format("{},{}\n", i, eps[i]);
}

std::vector<double> read_noise_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "index,epsilon") {
        throw Error(ErrorCode::InvalidArgument, "noise CSV must start with header 'index,epsilon'");
    }
    std::vector<double> eps;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || std::stoul(line.substr(0, comma)) != eps.size()) {
            throw Error(ErrorCode::InvalidArgument, "malformed noise CSV row: " + line);
        }
        eps.push_back(std::stod(line.substr(comma + 1)));
    }
    return eps;
}

}  // namespace kawarada
