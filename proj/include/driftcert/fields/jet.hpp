#pragma once

// Second-order jets of scalar functions on the plane: value, gradient and
// the (symmetric) Hessian. Enough calculus to assemble jets of products and
// compositions by the product and chain rules.

namespace driftcert {

struct Jet2 {
    double v = 0.0;
    double dx = 0.0;
    double dy = 0.0;
    double dxx = 0.0;
    double dxy = 0.0;
    double dyy = 0.0;

    static Jet2 constant(double c) { return {c, 0, 0, 0, 0, 0}; }

    Jet2& operator+=(const Jet2& o) {
        v += o.v;
        dx += o.dx;
        dy += o.dy;
        dxx += o.dxx;
        dxy += o.dxy;
        dyy += o.dyy;
        return *this;
    }
    Jet2& operator-=(const Jet2& o) {
        v -= o.v;
        dx -= o.dx;
        dy -= o.dy;
        dxx -= o.dxx;
        dxy -= o.dxy;
        dyy -= o.dyy;
        return *this;
    }
    Jet2& operator*=(double s) {
        v *= s;
        dx *= s;
        dy *= s;
        dxx *= s;
        dxy *= s;
        dyy *= s;
        return *this;
    }

    friend Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
    friend Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
    friend Jet2 operator*(double s, Jet2 a) { return a *= s; }
    friend Jet2 operator*(Jet2 a, double s) { return a *= s; }
    friend bool operator==(const Jet2&, const Jet2&) = default;
};

// Product rule.
inline Jet2 product(const Jet2& a, const Jet2& b) {
    return {a.v * b.v,
            a.dx * b.v + a.v * b.dx,
            a.dy * b.v + a.v * b.dy,
            a.dxx * b.v + 2.0 * a.dx * b.dx + a.v * b.dxx,
            a.dxy * b.v + a.dx * b.dy + a.dy * b.dx + a.v * b.dxy,
            a.dyy * b.v + 2.0 * a.dy * b.dy + a.v * b.dyy};
}

// Value and first two derivatives of a function of one variable.
struct Jet1 {
    double v = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

// Chain rule: jet of outer(inner(x, y)) given outer's derivatives at inner.v.
inline Jet2 compose(const Jet1& outer, const Jet2& inner) {
    return {outer.v,
            outer.d1 * inner.dx,
            outer.d1 * inner.dy,
            outer.d2 * inner.dx * inner.dx + outer.d1 * inner.dxx,
            outer.d2 * inner.dx * inner.dy + outer.d1 * inner.dxy,
            outer.d2 * inner.dy * inner.dy + outer.d1 * inner.dyy};
}

// Convex blend (1 - w) * a + w * b with a jet-valued weight.
inline Jet2 blend(const Jet2& w, const Jet2& a, const Jet2& b) {
    const Jet2 one_minus_w = Jet2::constant(1.0) - w;
    return product(w, b) + product(one_minus_w, a);
}

}  // namespace driftcert
