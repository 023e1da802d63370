#include "mfg/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <tuple>

namespace mfg {

namespace {

struct TrigTable {
    std::vector<std::vector<double>> cosT, sinT;  // [j][i]
};

const TrigTable& trigTable(const TorusGrid& g, std::size_t degree) {
    thread_local std::map<std::tuple<std::size_t, double, std::size_t>, TrigTable> cache;
    auto key = std::make_tuple(g.cells(), g.length(), degree);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    TrigTable t;
    const double w = 2.0 * std::numbers::pi / g.length();
    t.cosT.resize(degree + 1);
    t.sinT.resize(degree + 1);
    for (std::size_t j = 0; j <= degree; ++j) {
        t.cosT[j].resize(g.cells());
        t.sinT[j].resize(g.cells());
        for (std::size_t i = 0; i < g.cells(); ++i) {
            t.cosT[j][i] = std::cos(w * static_cast<double>(j) * g.node(i));
            t.sinT[j][i] = std::sin(w * static_cast<double>(j) * g.node(i));
        }
    }
    return cache.emplace(key, std::move(t)).first->second;
}

double coef(const std::vector<double>& c, std::size_t j) { return j < c.size() ? c[j] : 0.0; }

}  // namespace

std::size_t TrigKernel::degree() const noexcept {
    const std::size_t d = std::max(cosCoef.size(), sinCoef.size());
    return d == 0 ? 0 : d - 1;
}

double TrigKernel::operator()(double z, double length) const {
    const double w = 2.0 * std::numbers::pi / length;
    double s = 0.0;
    for (std::size_t j = 0; j <= degree(); ++j) {
        s += coef(cosCoef, j) * std::cos(w * j * z) + coef(sinCoef, j) * std::sin(w * j * z);
    }
    return s;
}

TrigKernel TrigKernel::derivative(double length) const {
    const double w = 2.0 * std::numbers::pi / length;
    TrigKernel d;
    d.cosCoef.assign(degree() + 1, 0.0);
    d.sinCoef.assign(degree() + 1, 0.0);
    for (std::size_t j = 0; j <= degree(); ++j) {
        d.cosCoef[j] = coef(sinCoef, j) * w * j;
        d.sinCoef[j] = -coef(cosCoef, j) * w * j;
    }
    return d;
}

bool TrigKernel::isZero() const noexcept {
    for (double c : cosCoef) if (c != 0.0) return false;
    for (double c : sinCoef) if (c != 0.0) return false;
    return true;
}

FourierMoments fourierMoments(std::span<const double> values, const TorusGrid& g,
                              std::size_t degree) {
    const auto& t = trigTable(g, degree);
    FourierMoments m;
    m.length = g.length();
    m.C.assign(degree + 1, 0.0);
    m.S.assign(degree + 1, 0.0);
    const double h = g.spacing();
    for (std::size_t j = 0; j <= degree; ++j) {
        double c = 0.0, s = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            c += t.cosT[j][i] * values[i];
            s += t.sinT[j][i] * values[i];
        }
        m.C[j] = h * c;
        m.S[j] = h * s;
    }
    return m;
}

double convolveAt(const TrigKernel& k, const FourierMoments& mom, double x) {
    const double w = 2.0 * std::numbers::pi / mom.length;
    const double c1 = std::cos(w * x), s1 = std::sin(w * x);
    double cx = 1.0, sx = 0.0, s = 0.0;
    for (std::size_t j = 0; j <= k.degree() && j < mom.C.size(); ++j) {
        s += coef(k.cosCoef, j) * (cx * mom.C[j] + sx * mom.S[j]);
        s += coef(k.sinCoef, j) * (sx * mom.C[j] - cx * mom.S[j]);
        const double cn = cx * c1 - sx * s1;
        sx = sx * c1 + cx * s1;
        cx = cn;
    }
    return s;
}

GridFunction convolveOn(const TrigKernel& k, const FourierMoments& mom, const TorusGrid& target) {
    GridFunction out(target);
    const auto& t = trigTable(target, k.degree());
    for (std::size_t j = 0; j <= k.degree() && j < mom.C.size(); ++j) {
        const double a = coef(k.cosCoef, j), b = coef(k.sinCoef, j);
        if (a == 0.0 && b == 0.0) continue;
        const double cc = a * mom.C[j] - b * mom.S[j];
        const double ss = a * mom.S[j] + b * mom.C[j];
        for (std::size_t i = 0; i < target.cells(); ++i) {
            out[i] += cc * t.cosT[j][i] + ss * t.sinT[j][i];
        }
    }
    return out;
}

GridFunction convolve(const TrigKernel& k, std::span<const double> values, const TorusGrid& g) {
    return convolveOn(k, fourierMoments(values, g, k.degree()), g);
}

GridSignedMeasure projectDirection(const GridSignedMeasure& rho, const GridDensity& m) {
    const double mass = rho.totalMass();
    if (mass == 0.0) return rho;
    std::vector<double> v(rho.vector());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= mass * m[i];
    return {rho.grid(), std::move(v)};
}

CatalogHamiltonian CatalogHamiltonian::scaled(double factor) const {
    CatalogHamiltonian h(*this);
    h.scale *= factor;
    return h;
}

MeasureFields CatalogHamiltonian::fields(std::span<const double> values, const TorusGrid& g) const {
    const auto mom = fourierMoments(values, g, std::max({chi.degree(), phi.degree(), psi.degree()}));
    return {convolveOn(chi, mom, g), convolveOn(phi, mom, g), convolveOn(psi, mom, g)};
}

MeasureFields CatalogHamiltonian::directionFields(const GridSignedMeasure& rho,
                                                  const GridDensity& m) const {
    const auto r = projectDirection(rho, m);
    return fields(r.values(), r.grid());
}

FrozenHamiltonian::FrozenHamiltonian(const CatalogHamiltonian& h, double x0, const GridDensity& m)
    : FrozenHamiltonian(h, x0, m.grid(), h.fields(m)) {}

FrozenHamiltonian::FrozenHamiltonian(const CatalogHamiltonian& h, double x0, const TorusGrid& g,
                                     MeasureFields f)
    : h_(h), x0_(x0), w_(2.0 * std::numbers::pi / g.length()), f_(std::move(f)),
      sinShift_(g.cells()), cosShift_(g.cells()), cosX_(g.cells()),
      cosX0_(std::cos(w_ * x0)), sinX0_(std::sin(w_ * x0)) {
    const auto& t = trigTable(g, 1);
    for (std::size_t i = 0; i < g.cells(); ++i) {
        const double c = t.cosT[1][i], s = t.sinT[1][i];
        sinShift_[i] = s * cosX0_ - c * sinX0_;
        cosShift_[i] = c * cosX0_ + s * sinX0_;
        cosX_[i] = c;
    }
}

double FrozenHamiltonian::H(std::size_t i, double p) const {
    const auto& h = h_;
    const double X = f_.chi[i], P = f_.phi[i], S = f_.psi[i];
    return h.scale * (0.5 * (h.q0 + h.q1 * X) * p * p + (h.beta * P + h.B * sinShift_[i]) * p +
                      h.c0 * (1.0 + h.e * cosX0_) * S + 0.5 * h.c2 * S * S +
                      h.A * cosShift_[i] + h.V * cosX_[i]);
}

double FrozenHamiltonian::Hp(std::size_t i, double p) const {
    const auto& h = h_;
    return h.scale * ((h.q0 + h.q1 * f_.chi[i]) * p + h.beta * f_.phi[i] + h.B * sinShift_[i]);
}

double FrozenHamiltonian::Hpp(std::size_t i, double) const {
    return h_.scale * (h_.q0 + h_.q1 * f_.chi[i]);
}

double FrozenHamiltonian::Hppp(std::size_t, double) const { return 0.0; }

double FrozenHamiltonian::dH(std::size_t i, double p, const MeasureFields& d) const {
    const auto& h = h_;
    return h.scale * (0.5 * h.q1 * d.chi[i] * p * p + h.beta * d.phi[i] * p +
                      h.c0 * (1.0 + h.e * cosX0_) * d.psi[i] + h.c2 * f_.psi[i] * d.psi[i]);
}

double FrozenHamiltonian::dHp(std::size_t i, double p, const MeasureFields& d) const {
    return h_.scale * (h_.q1 * d.chi[i] * p + h_.beta * d.phi[i]);
}

double FrozenHamiltonian::dHpp(std::size_t i, double, const MeasureFields& d) const {
    return h_.scale * h_.q1 * d.chi[i];
}

double FrozenHamiltonian::d2H(std::size_t i, double, const MeasureFields& d,
                              const MeasureFields& d2) const {
    return h_.scale * h_.c2 * d.psi[i] * d2.psi[i];
}

double FrozenHamiltonian::d2Hp(std::size_t, double, const MeasureFields&, const MeasureFields&) const {
    return 0.0;
}

double FrozenHamiltonian::Hx0(std::size_t i, double p) const {
    const auto& h = h_;
    return h.scale * w_ *
           (-h.B * cosShift_[i] * p - h.c0 * h.e * sinX0_ * f_.psi[i] + h.A * sinShift_[i]);
}

double FrozenHamiltonian::Hx0p(std::size_t i, double) const {
    return h_.scale * w_ * (-h_.B * cosShift_[i]);
}

double FrozenHamiltonian::Hx0pp(std::size_t, double) const { return 0.0; }

double FrozenHamiltonian::Hx0x0(std::size_t i, double p) const {
    const auto& h = h_;
    return h.scale * w_ * w_ *
           (-h.B * sinShift_[i] * p - h.c0 * h.e * cosX0_ * f_.psi[i] - h.A * cosShift_[i]);
}

double FrozenHamiltonian::Hx0x0p(std::size_t i, double) const {
    return h_.scale * w_ * w_ * (-h_.B * sinShift_[i]);
}

double FrozenHamiltonian::dHx0(std::size_t i, double, const MeasureFields& d) const {
    return h_.scale * w_ * (-h_.c0 * h_.e * sinX0_ * d.psi[i]);
}

double FrozenHamiltonian::dHx0p(std::size_t, double, const MeasureFields&) const { return 0.0; }

namespace {

struct TerminalFields {
    GridFunction kappa, lambda;
};

TerminalFields terminalFields(const CatalogTerminal& t, std::span<const double> v, const TorusGrid& g) {
    const auto mom = fourierMoments(v, g, std::max(t.kappa.degree(), t.lambda.degree()));
    return {convolveOn(t.kappa, mom, g), convolveOn(t.lambda, mom, g)};
}

}  // namespace

GridFunction CatalogTerminal::value(double x0, const GridDensity& m) const {
    const auto& g = m.grid();
    const auto f = terminalFields(*this, m.values(), g);
    const double w = 2.0 * std::numbers::pi / g.length();
    const auto& t = trigTable(g, 1);
    const double c0 = std::cos(w * x0), s0 = std::sin(w * x0);
    const double ck = cg * (1.0 + eg * c0);
    GridFunction out(g);
    for (std::size_t i = 0; i < g.cells(); ++i) {
        const double c = t.cosT[1][i], s = t.sinT[1][i];
        out[i] = Ag * s + Bg * (c * c0 + s * s0) + ck * f.kappa[i] + 0.5 * qg * f.lambda[i] * f.lambda[i];
    }
    return out;
}

GridFunction CatalogTerminal::flat(double x0, const GridDensity& m, const GridSignedMeasure& rho) const {
    const auto& g = m.grid();
    const auto f = terminalFields(*this, m.values(), g);
    const auto r = projectDirection(rho, m);
    const auto d = terminalFields(*this, r.values(), g);
    const double w = 2.0 * std::numbers::pi / g.length();
    const double ck = cg * (1.0 + eg * std::cos(w * x0));
    GridFunction out(g);
    for (std::size_t i = 0; i < g.cells(); ++i) {
        out[i] = ck * d.kappa[i] + qg * f.lambda[i] * d.lambda[i];
    }
    return out;
}

GridFunction CatalogTerminal::flat2(double, const GridDensity& m, const GridSignedMeasure& rho,
                                    const GridSignedMeasure& rho2) const {
    const auto& g = m.grid();
    const auto r1 = projectDirection(rho, m);
    const auto r2 = projectDirection(rho2, m);
    const auto d1 = convolve(lambda, r1.values(), g);
    const auto d2 = convolve(lambda, r2.values(), g);
    GridFunction out(g);
    for (std::size_t i = 0; i < g.cells(); ++i) out[i] = qg * d1[i] * d2[i];
    return out;
}

GridFunction CatalogTerminal::dx0(double x0, const GridDensity& m) const {
    const auto& g = m.grid();
    const auto k = convolve(kappa, m.values(), g);
    const double w = 2.0 * std::numbers::pi / g.length();
    GridFunction out(g);
    for (std::size_t i = 0; i < g.cells(); ++i) {
        out[i] = w * (Bg * std::sin(w * (g.node(i) - x0)) - cg * eg * std::sin(w * x0) * k[i]);
    }
    return out;
}

GridFunction CatalogTerminal::dx0x0(double x0, const GridDensity& m) const {
    const auto& g = m.grid();
    const auto k = convolve(kappa, m.values(), g);
    const double w = 2.0 * std::numbers::pi / g.length();
    GridFunction out(g);
    for (std::size_t i = 0; i < g.cells(); ++i) {
        out[i] = w * w * (-Bg * std::cos(w * (g.node(i) - x0)) - cg * eg * std::cos(w * x0) * k[i]);
    }
    return out;
}

GridFunction CatalogTerminal::dx0Flat(double x0, const GridDensity& m, const GridSignedMeasure& rho) const {
    const auto& g = m.grid();
    const auto r = projectDirection(rho, m);
    const auto d = convolve(kappa, r.values(), g);
    const double w = 2.0 * std::numbers::pi / g.length();
    const double ck = -w * cg * eg * std::sin(w * x0);
    GridFunction out(g);
    for (std::size_t i = 0; i < g.cells(); ++i) out[i] = ck * d[i];
    return out;
}

CatalogMajorHamiltonian CatalogMajorHamiltonian::scaled(double f) const {
    CatalogMajorHamiltonian h(*this);
    h.scale *= f;
    return h;
}

FrozenMajorHamiltonian::FrozenMajorHamiltonian(const CatalogMajorHamiltonian& h,
                                               const TorusGrid& x0grid, const GridDensity& m)
    : h_(h), g0_(x0grid) {
    const std::size_t deg = std::max(h.eta.degree(), h.zeta.degree());
    const auto mom = fourierMoments(m.values(), m.grid(), deg);
    eta_ = convolveOn(h.eta, mom, x0grid);
    zeta_ = convolveOn(h.zeta, mom, x0grid);
    cosX0_ = trigTable(x0grid, 1).cosT[1];
}

double FrozenMajorHamiltonian::H(std::size_t j, double p) const {
    return h_.scale * (0.5 * p * p + h_.beta0 * eta_[j] * p + h_.c00 * zeta_[j] +
                       h_.V0 * cosX0_[j]);
}

double FrozenMajorHamiltonian::Hp(std::size_t j, double p) const {
    return h_.scale * (p + h_.beta0 * eta_[j]);
}

double FrozenMajorHamiltonian::Hpp(std::size_t, double) const { return h_.scale; }
double FrozenMajorHamiltonian::Hppp(std::size_t, double) const { return 0.0; }

FrozenMajorHamiltonian::Direction FrozenMajorHamiltonian::direction(const GridSignedMeasure& rho,
                                                                     const GridDensity& m) const {
    const auto r = projectDirection(rho, m);
    const std::size_t deg = std::max(h_.eta.degree(), h_.zeta.degree());
    const auto mom = fourierMoments(r.values(), r.grid(), deg);
    return {convolveOn(h_.eta, mom, g0_), convolveOn(h_.zeta, mom, g0_)};
}

double FrozenMajorHamiltonian::dH(std::size_t j, double p, const Direction& d) const {
    return h_.scale * (h_.beta0 * d.eta[j] * p + h_.c00 * d.zeta[j]);
}

double FrozenMajorHamiltonian::dHp(std::size_t j, double, const Direction& d) const {
    return h_.scale * h_.beta0 * d.eta[j];
}

double FrozenMajorHamiltonian::dHpp(std::size_t, double, const Direction&) const { return 0.0; }

double FrozenMajorHamiltonian::d2H(std::size_t, double, const Direction&, const Direction&) const {
    return 0.0;
}

double FrozenMajorHamiltonian::d2Hp(std::size_t, double, const Direction&, const Direction&) const {
    return 0.0;
}

double CatalogMajorTerminal::value(double x0, const GridDensity& m) const {
    const auto mom = fourierMoments(m.values(), m.grid(), theta.degree());
    const double w = 2.0 * std::numbers::pi / m.grid().length();
    const double th = convolveAt(theta, mom, x0);
    return A0 * std::cos(w * x0) + c0g * th + 0.5 * q0g * th * th;
}

double CatalogMajorTerminal::flat(double x0, const GridDensity& m, const GridSignedMeasure& rho) const {
    const auto mom = fourierMoments(m.values(), m.grid(), theta.degree());
    const auto r = projectDirection(rho, m);
    const auto dmom = fourierMoments(r.values(), r.grid(), theta.degree());
    const double th = convolveAt(theta, mom, x0);
    return (c0g + q0g * th) * convolveAt(theta, dmom, x0);
}

double CatalogMajorTerminal::flat2(double x0, const GridDensity& m, const GridSignedMeasure& rho,
                                   const GridSignedMeasure& rho2) const {
    const auto r1 = projectDirection(rho, m);
    const auto r2 = projectDirection(rho2, m);
    const auto m1 = fourierMoments(r1.values(), r1.grid(), theta.degree());
    const auto m2 = fourierMoments(r2.values(), r2.grid(), theta.degree());
    return q0g * convolveAt(theta, m1, x0) * convolveAt(theta, m2, x0);
}

double CatalogMajorTerminal::dx0(double x0, const GridDensity& m) const {
    const auto mom = fourierMoments(m.values(), m.grid(), theta.degree());
    const auto dtheta = theta.derivative(m.grid().length());
    const double w = 2.0 * std::numbers::pi / m.grid().length();
    const double th = convolveAt(theta, mom, x0);
    return -w * A0 * std::sin(w * x0) + (c0g + q0g * th) * convolveAt(dtheta, mom, x0);
}

double CatalogMajorTerminal::dx0Flat(double x0, const GridDensity& m, const GridSignedMeasure& rho) const {
    const auto mom = fourierMoments(m.values(), m.grid(), theta.degree());
    const auto r = projectDirection(rho, m);
    const auto dmom = fourierMoments(r.values(), r.grid(), theta.degree());
    const auto dtheta = theta.derivative(m.grid().length());
    const double th = convolveAt(theta, mom, x0);
    const double dth = convolveAt(dtheta, mom, x0);
    return (c0g + q0g * th) * convolveAt(dtheta, dmom, x0) + q0g * dth * convolveAt(theta, dmom, x0);
}

GridFunction CatalogMajorTerminal::valueOn(const TorusGrid& x0grid, const GridDensity& m) const {
    const auto mom = fourierMoments(m.values(), m.grid(), theta.degree());
    GridFunction out(x0grid);
    for (std::size_t j = 0; j < x0grid.cells(); ++j) {
        const double x0 = x0grid.node(j);
        const double th = convolveAt(theta, mom, x0);
        out[j] = A0 * std::cos(2.0 * std::numbers::pi * x0 / x0grid.length()) + c0g * th +
                 0.5 * q0g * th * th;
    }
    return out;
}

}  // namespace mfg
