#pragma once

// Sparse bivariate polynomials and polynomial vector fields on the plane.
// Coefficients are doubles; zero coefficients are never stored, so two
// polynomials are equal iff their coefficient maps are equal.

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <utility>

#include "driftcert/core/format.hpp"
#include "driftcert/fields/model.hpp"

namespace driftcert {

class Polynomial {
public:
    using Monomial = std::pair<int, int>;  // (degree in x, degree in y)

    Polynomial() = default;

    static Polynomial constant(double c) { return term(c, 0, 0); }
    static Polynomial term(double c, int dx, int dy) {
        Polynomial p;
        p.add_term(c, dx, dy);
        return p;
    }
    static Polynomial x() { return term(1.0, 1, 0); }
    static Polynomial y() { return term(1.0, 0, 1); }

    void add_term(double c, int dx, int dy) {
        if (c == 0.0) return;
        auto [it, inserted] = coeffs_.try_emplace({dx, dy}, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0.0) coeffs_.erase(it);
        }
    }

    double coeff(int dx, int dy) const {
        auto it = coeffs_.find({dx, dy});
        return it == coeffs_.end() ? 0.0 : it->second;
    }

    const std::map<Monomial, double>& terms() const { return coeffs_; }
    bool is_zero() const { return coeffs_.empty(); }

    int degree() const {
        int d = -1;
        for (const auto& [m, c] : coeffs_) d = std::max(d, m.first + m.second);
        return d;
    }

    double operator()(double x, double y) const {
        double s = 0.0;
        for (const auto& [m, c] : coeffs_) s += c * std::pow(x, m.first) * std::pow(y, m.second);
        return s;
    }

    Polynomial diff_x() const {
        Polynomial out;
        for (const auto& [m, c] : coeffs_)
            if (m.first > 0) out.add_term(c * m.first, m.first - 1, m.second);
        return out;
    }
    Polynomial diff_y() const {
        Polynomial out;
        for (const auto& [m, c] : coeffs_)
            if (m.second > 0) out.add_term(c * m.second, m.first, m.second - 1);
        return out;
    }

    Polynomial& operator+=(const Polynomial& o) {
        for (const auto& [m, c] : o.coeffs_) add_term(c, m.first, m.second);
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        for (const auto& [m, c] : o.coeffs_) add_term(-c, m.first, m.second);
        return *this;
    }
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator-(const Polynomial& a) { return Polynomial{} - a; }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        Polynomial out;
        for (const auto& [ma, ca] : a.coeffs_)
            for (const auto& [mb, cb] : b.coeffs_) out.add_term(ca * cb, ma.first + mb.first, ma.second + mb.second);
        return out;
    }
    friend Polynomial operator*(double s, const Polynomial& a) {
        Polynomial out;
        for (const auto& [m, c] : a.coeffs_) out.add_term(s * c, m.first, m.second);
        return out;
    }

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

    std::string str() const {
        if (coeffs_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
            const auto& [m, c] = *it;
            double mag = c;
            if (!first) {
                os << (c < 0 ? " - " : " + ");
                mag = std::abs(c);
            }
            const bool unit = (mag == 1.0 || mag == -1.0) && (m.first + m.second > 0);
            if (unit) {
                if (mag < 0) os << "-";
            } else {
                os << fmt9(mag);
            }
            auto power = [&os, unit](const char* v, int d, bool& lead) {
                if (d == 0) return;
                if (!lead) os << "*";
                os << v;
                if (d > 1) os << "^" << d;
                lead = false;
            };
            bool lead = unit;
            power("x", m.first, lead);
            power("y", m.second, lead);
            first = false;
        }
        return os.str();
    }

private:
    std::map<Monomial, double> coeffs_;
};

struct PolyVecField {
    Polynomial px;
    Polynomial py;

    Vec2 operator()(const State& z) const { return {px(z.x, z.y), py(z.x, z.y)}; }
    bool is_zero() const { return px.is_zero() && py.is_zero(); }

    // Directional derivative V f = px f_x + py f_y.
    Polynomial apply(const Polynomial& f) const { return px * f.diff_x() + py * f.diff_y(); }

    friend PolyVecField operator+(const PolyVecField& a, const PolyVecField& b) { return {a.px + b.px, a.py + b.py}; }
    friend PolyVecField operator-(const PolyVecField& a, const PolyVecField& b) { return {a.px - b.px, a.py - b.py}; }
    friend PolyVecField operator*(double s, const PolyVecField& a) { return {s * a.px, s * a.py}; }
    friend bool operator==(const PolyVecField&, const PolyVecField&) = default;

    std::string str() const { return "(" + px.str() + ", " + py.str() + ")"; }
};

// [V, W] = DW . V - DV . W.
inline PolyVecField lie_bracket(const PolyVecField& V, const PolyVecField& W) {
    return {V.apply(W.px) - W.apply(V.px), V.apply(W.py) - W.apply(V.py)};
}

// X0: the drift b; X1 = sqrt(kappa1) d/dx; X2 = sqrt(kappa2) d/dy, so that
// L = X0 + X1^2 + X2^2.
inline PolyVecField drift_field(const ModelParams& p) {
    PolyVecField f;
    f.px.add_term(p.a1, 1, 0);
    f.px.add_term(-p.alpha1, 2, 0);
    f.px.add_term(1.0, 0, 2);
    f.py.add_term(p.a2, 0, 1);
    f.py.add_term(-p.alpha2, 1, 1);
    return f;
}
inline PolyVecField noise_field_x(const ModelParams& p) { return {Polynomial::constant(std::sqrt(p.kappa1)), {}}; }
inline PolyVecField noise_field_y(const ModelParams& p) { return {{}, Polynomial::constant(std::sqrt(p.kappa2))}; }

// Control-system fields W1 = (kappa1, 0), W2 = (0, kappa2).
inline PolyVecField control_field_x(const ModelParams& p) { return {Polynomial::constant(p.kappa1), {}}; }
inline PolyVecField control_field_y(const ModelParams& p) { return {{}, Polynomial::constant(p.kappa2)}; }

// L applied symbolically to a polynomial.
inline Polynomial generator_poly(const ModelParams& p, const Polynomial& f) {
    return drift_field(p).apply(f) + p.kappa1 * f.diff_x().diff_x() + p.kappa2 * f.diff_y().diff_y();
}

// Jet of a polynomial at a point.
inline Jet2 poly_jet(const Polynomial& f, const State& z) {
    const Polynomial fx = f.diff_x();
    const Polynomial fy = f.diff_y();
    return {f(z.x, z.y),      fx(z.x, z.y),      fy(z.x, z.y),
            fx.diff_x()(z.x, z.y), fx.diff_y()(z.x, z.y), fy.diff_y()(z.x, z.y)};
}

}  // namespace driftcert
