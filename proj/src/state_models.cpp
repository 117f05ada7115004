#include "qent/state_models.hpp"

#include <cmath>

namespace qent {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_unit_interval(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw validation_error(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

const char* model_name(ModelKind kind) {
    return kind == ModelKind::Decoherence ? "decoherence" : "werner";
}

ModelKind model_from_name(const std::string& name) {
    if (name == "decoherence") return ModelKind::Decoherence;
    if (name == "werner") return ModelKind::Werner;
    throw validation_error("unknown model '" + name + "' (expected decoherence or werner)");
}

ModelPoint::ModelPoint(double p_, double q_) : p(p_), q(q_) {
    if (!std::isfinite(p) || !std::isfinite(q)) throw validation_error("ModelPoint: non-finite parameter");
    check_unit_interval(p, "ModelPoint.p");
    check_unit_interval(q, "ModelPoint.q");
}

PhasePoint::PhasePoint(double phi_, double Phi_) : phi(phi_), Phi(Phi_) {
    if (!std::isfinite(phi) || !std::isfinite(Phi)) throw validation_error("PhasePoint: non-finite angle");
    if (phi < 0.0 || phi > kPi / 2.0 + 1e-12) throw validation_error("PhasePoint.phi must lie in [0, pi/2]");
    if (Phi < 0.0 || Phi >= 2.0 * kPi) throw validation_error("PhasePoint.Phi must lie in [0, 2 pi)");
}

Ket pure_state(const PhasePoint& pt) {
    const cplx phase = std::polar(1.0, pt.Phi);
    return Ket({std::cos(pt.phi), 0.0, 0.0, std::sin(pt.phi) * phase});
}

Ket pure_state_q(double q) {
    check_unit_interval(q, "q");
    return Ket({std::sqrt(q), 0.0, 0.0, std::sqrt(1.0 - q)});
}

DensityMatrix decoherence_state(const ModelPoint& pt) {
    Mat4 m;
    m(0, 0) = pt.q;
    m(3, 3) = 1.0 - pt.q;
    const double c = pt.p * std::sqrt(pt.q * (1.0 - pt.q));
    m(0, 3) = c;
    m(3, 0) = c;
    return DensityMatrix(m);
}

DensityMatrix werner_state(const ModelPoint& pt) {
    const Mat4 pure = pure_state_q(pt.q).outer();
    const Mat4 m = pure * pt.p + Mat4::identity() * ((1.0 - pt.p) / 4.0);
    return DensityMatrix(m);
}

DensityMatrix model_state(ModelKind kind, const ModelPoint& pt) {
    return kind == ModelKind::Decoherence ? decoherence_state(pt) : werner_state(pt);
}

Spectrum decoherence_eigensystem(const ModelPoint& pt) {
    const double p = pt.p, q = pt.q;
    // s^2 = 1 - 4(1-p^2)q + 4(1-p^2)q^2 = (1-2q)^2 + 4 p^2 q(1-q)
    const double s = std::sqrt(std::max(0.0, 1.0 - 4.0 * (1.0 - p * p) * q + 4.0 * (1.0 - p * p) * q * q));
    // The printed lambda_pm sum to 2; the unit-trace spectrum is half of it.
    const double lp = 0.5 * (1.0 + s);
    const double lm = 0.5 * (1.0 - s);

    const double g = 2.0 * p * std::sqrt(q * (1.0 - q));
    const double fp = 1.0 - 2.0 * q + s;
    const double fm = 1.0 - 2.0 * q - s;

    // Support eigenvectors live in span{|HH>, |VV>}. The normalizers are
    // sqrt(f^2 + g^2) (the printed +- sign under the root reads as an
    // erratum: the minus branch would go imaginary for q > 1/2), and the
    // (g, f_plus) direction pairs with lambda_plus. Each branch has two
    // equivalent forms; take the larger-norm one so the degenerate corners
    // q in {0, 1} stay well defined.
    auto support_vec = [](double x, double y) {
        const double n = std::sqrt(x * x + y * y);
        return std::array<cplx, 4>{x / n, 0.0, 0.0, y / n};
    };
    std::array<cplx, 4> vp{}, vm{};
    if (s < 1e-14 && g < 1e-14) {
        // fully degenerate support block (p = 0, q = 1/2): any orthonormal pair
        vp = {1.0, 0.0, 0.0, 0.0};
        vm = {0.0, 0.0, 0.0, 1.0};
    } else {
        // lambda_plus direction: (g, f_plus), equivalently (-f_minus, g)
        vp = (g * g + fp * fp >= fm * fm + g * g) ? support_vec(g, fp) : support_vec(-fm, g);
        // lambda_minus direction: (-f_plus, g), equivalently (g, f_minus)
        vm = (fp * fp + g * g >= g * g + fm * fm) ? support_vec(-fp, g) : support_vec(g, fm);
    }

    return canonical_spectrum({lp, lm, 0.0, 0.0},
                              {vp, vm,
                               std::array<cplx, 4>{0.0, 1.0, 0.0, 0.0},
                               std::array<cplx, 4>{0.0, 0.0, 1.0, 0.0}});
}

double model_negativity(ModelKind kind, const ModelPoint& pt) {
    const double root = std::sqrt(pt.q * (1.0 - pt.q));
    if (kind == ModelKind::Decoherence) return 2.0 * pt.p * root;
    return std::max(0.0, 0.5 * (pt.p * (1.0 + 4.0 * root) - 1.0));
}

double epsilon_to_q(ModelKind kind, double p, double epsilon) {
    check_unit_interval(p, "p");
    if (!std::isfinite(epsilon) || epsilon < 0.0)
        throw std::domain_error("epsilon must be nonnegative");
    if (kind == ModelKind::Decoherence) {
        if (epsilon > p + 1e-12)
            throw std::domain_error("epsilon exceeds the reachable maximum p for the decoherence family");
        if (p == 0.0) return 0.0;  // epsilon == 0 here
        const double r = std::sqrt(std::max(0.0, p * p - epsilon * epsilon));
        return (p - r) / (2.0 * p);
    }
    if (epsilon == 0.0) return 0.0;
    if (p <= 0.0) throw std::domain_error("positive epsilon is unreachable at p = 0 for the Werner family");
    // epsilon = [p(1 + 2 s2) - 1]/2 with s2 = 2 sqrt(q(1-q))
    const double s2 = (2.0 * epsilon + 1.0 - p) / (2.0 * p);
    if (s2 > 1.0 + 1e-12)
        throw std::domain_error("epsilon exceeds the reachable maximum (3p-1)/2 for the Werner family");
    const double s2c = std::min(1.0, s2);
    return 0.5 * (1.0 - std::sqrt(1.0 - s2c * s2c));
}

}  // namespace qent
