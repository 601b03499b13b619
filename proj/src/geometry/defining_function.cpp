#include "circmax/geometry/defining_function.h"

#include "circmax/common/error.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

namespace circmax::geometry {

namespace {

double falling(int n, int k) {
    double v = 1.0;
    for (int i = 0; i < k; ++i) v *= n - i;
    return v;
}

/// Powers v^0 .. v^degree.
void power_table(double v, int degree, double* out) {
    out[0] = 1.0;
    for (int k = 1; k <= degree; ++k) out[k] = out[k - 1] * v;
}

/// d^k/dv^k of v^n, evaluated from a power table.
double power_derivative(const double* pw, int n, int k) {
    if (k > n) return 0.0;
    return falling(n, k) * pw[n - k];
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

constexpr int kMaxDegree = 8;

}  // namespace

std::vector<Exponents> grlex_monomials(int degree) {
    std::vector<Exponents> out;
    for (int total = 0; total <= degree; ++total) {
        for (int a = total; a >= 0; --a)
            for (int b = total - a; b >= 0; --b)
                for (int c = total - a - b; c >= 0; --c) out.push_back({a, b, c, total - a - b - c});
    }
    return out;
}

DefiningFunction DefiningFunction::euclidean() { return DefiningFunction(); }

DefiningFunction DefiningFunction::perturbed(int degree, std::vector<double> coefficients,
                                             double smallness) {
    if (degree < 0 || degree > kMaxDegree)
        throw DomainError("perturbation degree must lie in [0, " + std::to_string(kMaxDegree) + "]");
    DefiningFunction phi;
    phi.kind_ = Kind::perturbed;
    phi.degree_ = degree;
    phi.monomials_ = grlex_monomials(degree);
    if (coefficients.size() != phi.monomials_.size())
        throw DomainError("expected " + std::to_string(phi.monomials_.size()) +
                          " coefficients, got " + std::to_string(coefficients.size()));
    for (double c : coefficients)
        if (!std::isfinite(c)) throw DomainError("non-finite perturbation coefficient");
    phi.coefficients_ = std::move(coefficients);

    // Bound every third-order partial over the box |coordinate| <= M.
    const double m = kReferenceHalfWidth;
    double bound = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j)
            for (int k = j; k < 4; ++k) {
                Exponents beta{0, 0, 0, 0};
                ++beta[i];
                ++beta[j];
                ++beta[k];
                double sum = 0.0;
                for (std::size_t q = 0; q < phi.monomials_.size(); ++q) {
                    const auto& alpha = phi.monomials_[q];
                    double term = std::abs(phi.coefficients_[q]);
                    for (int v = 0; v < 4 && term != 0.0; ++v) {
                        if (alpha[v] < beta[v]) {
                            term = 0.0;
                            break;
                        }
                        term *= falling(alpha[v], beta[v]) * std::pow(m, alpha[v] - beta[v]);
                    }
                    sum += term;
                }
                bound = std::max(bound, sum);
            }
    phi.c3_bound_ = bound;
    if (!(bound < smallness))
        throw DomainError("third-order bound " + std::to_string(bound) +
                          " is not below the smallness threshold " + std::to_string(smallness));
    return phi;
}

double DefiningFunction::operator()(const Vec2& x, const Vec2& y) const {
    if (!reference_box_.contains(x) || !reference_box_.contains(y))
        throw DomainError("Phi evaluated outside the reference box");
    return eval_unchecked(x, y);
}

double DefiningFunction::perturbation(const Vec2& x, const Vec2& y) const {
    if (is_euclidean()) return 0.0;
    double p[4][kMaxDegree + 1];
    power_table(x.x(), degree_, p[0]);
    power_table(x.y(), degree_, p[1]);
    power_table(y.x(), degree_, p[2]);
    power_table(y.y(), degree_, p[3]);
    double s = 0.0;
    for (std::size_t q = 0; q < monomials_.size(); ++q) {
        const auto& a = monomials_[q];
        s += coefficients_[q] * p[0][a[0]] * p[1][a[1]] * p[2][a[2]] * p[3][a[3]];
    }
    return s;
}

Vec2 DefiningFunction::perturbation_grad_y(const Vec2& x, const Vec2& y) const {
    if (is_euclidean()) return Vec2::Zero();
    double p[4][kMaxDegree + 1];
    power_table(x.x(), degree_, p[0]);
    power_table(x.y(), degree_, p[1]);
    power_table(y.x(), degree_, p[2]);
    power_table(y.y(), degree_, p[3]);
    Vec2 g = Vec2::Zero();
    for (std::size_t q = 0; q < monomials_.size(); ++q) {
        const auto& a = monomials_[q];
        const double cx = coefficients_[q] * p[0][a[0]] * p[1][a[1]];
        g.x() += cx * power_derivative(p[2], a[2], 1) * p[3][a[3]];
        g.y() += cx * p[2][a[2]] * power_derivative(p[3], a[3], 1);
    }
    return g;
}

Vec2 DefiningFunction::grad_y(const Vec2& x, const Vec2& y) const {
    const Vec2 d = y - x;
    const double n = d.norm();
    if (n < kSingularDistance) throw SingularityError("grad_y undefined at x = y");
    Vec2 g = d / n;
    if (!is_euclidean()) g += perturbation_grad_y(x, y);
    return g;
}

Mat2 DefiningFunction::hess_y(const Vec2& x, const Vec2& y) const {
    const Vec2 d = y - x;
    const double n = d.norm();
    if (n < kSingularDistance) throw SingularityError("hess_y undefined at x = y");
    const Vec2 u = d / n;
    Mat2 h = (Mat2::Identity() - u * u.transpose()) / n;
    if (is_euclidean()) return h;
    double p[4][kMaxDegree + 1];
    power_table(x.x(), degree_, p[0]);
    power_table(x.y(), degree_, p[1]);
    power_table(y.x(), degree_, p[2]);
    power_table(y.y(), degree_, p[3]);
    for (std::size_t q = 0; q < monomials_.size(); ++q) {
        const auto& a = monomials_[q];
        const double cx = coefficients_[q] * p[0][a[0]] * p[1][a[1]];
        const double h11 = power_derivative(p[2], a[2], 2) * p[3][a[3]];
        const double h12 = power_derivative(p[2], a[2], 1) * power_derivative(p[3], a[3], 1);
        const double h22 = p[2][a[2]] * power_derivative(p[3], a[3], 2);
        h(0, 0) += cx * h11;
        h(0, 1) += cx * h12;
        h(1, 0) += cx * h12;
        h(1, 1) += cx * h22;
    }
    return h;
}

std::string serialize(const DefiningFunction& phi) {
    std::ostringstream os;
    os << "kind = " << (phi.is_euclidean() ? "euclidean" : "perturbed") << '\n';
    os << "degree = " << phi.degree() << '\n';
    os << "coefficients =";
    char buf[32];
    for (double c : phi.coefficients()) {
        std::snprintf(buf, sizeof buf, " %.17g", c);
        os << buf;
    }
    os << '\n';
    return os.str();
}

DefiningFunction parse_defining_function(std::string_view text) {
    std::string kind;
    int degree = -1;
    std::vector<double> coefficients;
    bool have_coefficients = false;
    std::istringstream is{std::string(text)};
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (trim(line).empty()) continue;
        if (eq == std::string::npos) throw DomainError("malformed defining-function line: " + line);
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key == "kind") {
            kind = value;
        } else if (key == "degree") {
            degree = std::stoi(value);
        } else if (key == "coefficients") {
            have_coefficients = true;
            std::istringstream vs(value);
            double c;
            while (vs >> c) coefficients.push_back(c);
            if (!vs.eof()) throw DomainError("unparsable coefficient list");
        } else {
            throw DomainError("unknown defining-function key: " + key);
        }
    }
    if (kind == "euclidean") return DefiningFunction::euclidean();
    if (kind != "perturbed") throw DomainError("unknown defining-function kind: " + kind);
    if (degree < 0 || !have_coefficients) throw DomainError("perturbed record needs degree and coefficients");
    return DefiningFunction::perturbed(degree, std::move(coefficients));
}

namespace {

/// e . grad_y of (e . grad_y Phi(x, .) / |grad_y Phi(x, .)|) at y.
double normal_turning(const DefiningFunction& phi, const Vec2& x, const Vec2& y, const Vec2& e) {
    const Vec2 g = phi.grad_y(x, y);
    const Mat2 h = phi.hess_y(x, y);
    const double n = g.norm();
    const Vec2 dg = (h * e) / n - (e.dot(g)) * (h * g) / (n * n * n);
    return e.dot(dg);
}

}  // namespace

CinematicResult cinematic_check(const DefiningFunction& phi, const Vec2& a, const Vec2& b,
                                double fd_step) {
    const Vec2 g = phi.grad_y(a, b);
    CinematicResult out;
    out.gradient_norm = g.norm();
    if (out.gradient_norm < kSingularDistance) throw SingularityError("vanishing y-gradient");
    const Vec2 e = perp(g / out.gradient_norm);
    auto f1 = [&](const Vec2& x) { return e.dot(phi.grad_y(x, b)); };
    auto f2 = [&](const Vec2& x) { return normal_turning(phi, x, b, e); };
    Mat2 m;
    for (int k = 0; k < 2; ++k) {
        Vec2 step = Vec2::Zero();
        step[k] = fd_step;
        m(0, k) = (f1(a + step) - f1(a - step)) / (2.0 * fd_step);
        m(1, k) = (f2(a + step) - f2(a - step)) / (2.0 * fd_step);
    }
    out.determinant = m.determinant();
    return out;
}

}  // namespace circmax::geometry
