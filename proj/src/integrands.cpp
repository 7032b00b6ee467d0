#include "scv/integrands.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include "scv/errors.hpp"
#include "scv/parallel.hpp"
#include "scv/rng.hpp"

namespace scv {

struct Integrand::Impl {
    IntegrandKind kind{};
    int n = 2;
    double p = 0.0;
    double scale = 1.0;  // det_plus_power prefactor
    double q = 1.0;      // power_compose exponent
    TransformKind transform{};
    std::shared_ptr<const Impl> inner;
    std::function<double(const std::vector<double>&)> profile_fn;
    std::function<double(const SquareMatrix&)> custom_fn;
    std::optional<double> given_homogeneity;
    bool custom_norm_det_form = false;
    std::string name;
};

namespace {

std::string format_real(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
}

double pow_int(double base, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

double burkholder_value(const SquareMatrix& A, double p) {
    const int n = A.n;
    const double s = operator_norm(A);
    if (s == 0.0) return 0.0;
    const double dt = det(A);
    return (std::abs(1.0 - n / p) * pow_int(s, n) + dt) * std::pow(s, p - n);
}

double fp_aniso_value(const SquareMatrix& A, double p) {
    const double core = std::max(A(0, 0), 0.0) * std::max(A(1, 1), 0.0) +
                        0.5 * (A(0, 1) * A(0, 1) + A(1, 0) * A(1, 0));
    return std::pow(core, 0.5 * p);
}

}  // namespace

double Integrand::evaluate(const SquareMatrix& A) const {
    const Impl& im = *impl_;
    if (A.n != im.n) {
        throw PreconditionError("evaluate: matrix dimension does not match integrand '" +
                                im.name + "'");
    }
    switch (im.kind) {
        case IntegrandKind::burkholder:
            return burkholder_value(A, im.p);
        case IntegrandKind::burkholder_plus:
            return std::max(burkholder_value(A, im.p), 0.0);
        case IntegrandKind::det_plus:
            return std::max(det(A), 0.0);
        case IntegrandKind::det_plus_power:
            return im.scale * std::pow(std::max(det(A), 0.0), im.p / im.n);
        case IntegrandKind::fp_aniso:
            return fp_aniso_value(A, im.p);
        case IntegrandKind::conf_norm_plus:
            return conformal_coordinates(A).plus_norm;
        case IntegrandKind::conf_norm_minus:
            return conformal_coordinates(A).minus_norm;
        case IntegrandKind::b_sharp:
            return b_sharp_value(A);
        case IntegrandKind::isotropic_profile:
            return im.profile_fn(signed_singular_values(A).lambda);
        case IntegrandKind::custom:
            return im.custom_fn(A);
        case IntegrandKind::transformed: {
            const Integrand inner(im.inner);
            switch (im.transform) {
                case TransformKind::hat: {
                    const double dt = det(A);
                    if (!(dt > 0.0)) {
                        throw EvalDomainError(
                            "hat transform requires a positive determinant");
                    }
                    return inner.evaluate(inverse(A)) * dt;
                }
                case TransformKind::tilde:
                    return inner.evaluate(SquareMatrix::reflected_identity(A.n) * A);
                case TransformKind::positive_part:
                    return std::max(inner.evaluate(A), 0.0);
                case TransformKind::power_compose:
                    return std::pow(std::max(inner.evaluate(A), 0.0), im.q);
            }
            break;
        }
    }
    throw PreconditionError("evaluate: unhandled integrand kind");
}

IntegrandKind Integrand::kind() const { return impl_->kind; }

int Integrand::dim() const { return impl_->n; }

double Integrand::p() const { return impl_->p; }

std::optional<double> Integrand::homogeneity() const {
    const Impl& im = *impl_;
    switch (im.kind) {
        case IntegrandKind::burkholder:
        case IntegrandKind::burkholder_plus:
        case IntegrandKind::det_plus_power:
        case IntegrandKind::fp_aniso:
            return im.p;
        case IntegrandKind::det_plus:
            return static_cast<double>(im.n);
        case IntegrandKind::conf_norm_plus:
        case IntegrandKind::conf_norm_minus:
            return im.n / 2.0;
        case IntegrandKind::b_sharp:
            return std::nullopt;
        case IntegrandKind::isotropic_profile:
        case IntegrandKind::custom:
            return im.given_homogeneity;
        case IntegrandKind::transformed: {
            const auto inner_h = Integrand(im.inner).homogeneity();
            if (!inner_h) return std::nullopt;
            switch (im.transform) {
                case TransformKind::hat:
                    return im.n - *inner_h;
                case TransformKind::tilde:
                case TransformKind::positive_part:
                    return inner_h;
                case TransformKind::power_compose:
                    return *inner_h * im.q;
            }
            break;
        }
    }
    return std::nullopt;
}

bool Integrand::requires_positive_det() const {
    const Impl& im = *impl_;
    if (im.kind == IntegrandKind::b_sharp) return true;
    if (im.kind == IntegrandKind::transformed) {
        if (im.transform == TransformKind::hat) return true;
        return Integrand(im.inner).requires_positive_det();
    }
    return false;
}

bool Integrand::has_norm_det_form() const {
    const Impl& im = *impl_;
    switch (im.kind) {
        case IntegrandKind::burkholder:
        case IntegrandKind::burkholder_plus:
        case IntegrandKind::det_plus:
        case IntegrandKind::det_plus_power:
        case IntegrandKind::conf_norm_plus:
        case IntegrandKind::conf_norm_minus:
        case IntegrandKind::b_sharp:
            return true;
        case IntegrandKind::fp_aniso:
        case IntegrandKind::isotropic_profile:
            return false;
        case IntegrandKind::custom:
            return im.custom_norm_det_form;
        case IntegrandKind::transformed:
            return Integrand(im.inner).has_norm_det_form();
    }
    return false;
}

const std::string& Integrand::name() const { return impl_->name; }

namespace {

void require(bool cond, const std::string& message) {
    if (!cond) throw ParseError(message);
}

}  // namespace

Integrand Integrand::burkholder(double p, int n) {
    require(n >= 2, "burkholder: dimension must be at least 2");
    require(p >= n / 2.0, "burkholder: exponent must satisfy p >= n/2");
    Impl im;
    im.kind = IntegrandKind::burkholder;
    im.n = n;
    im.p = p;
    im.name = "burkholder:p=" + format_real(p) + ",n=" + format_real(n);
    return Integrand(std::make_shared<const Impl>(std::move(im)));
}

Integrand Integrand::burkholder_plus(double p, int n) {
    require(n >= 2, "burkholder_plus: dimension must be at least 2");
    require(p >= n / 2.0, "burkholder_plus: exponent must satisfy p >= n/2");
    Impl im;
    im.kind = IntegrandKind::burkholder_plus;
    im.n = n;
    im.p = p;
    im.name = "burkholder_plus:p=" + format_real(p) + ",n=" + format_real(n);
    return Integrand(std::make_shared<const Impl>(std::move(im)));
}

Integrand Integrand::det_plus(int n) {
    require(n >= 2, "det_plus: dimension must be at least 2");
    Impl im;
    im.kind = IntegrandKind::det_plus;
    im.n = n;
    im.p = n;
    im.name = "det_plus:n=" + format_real(n);
    return Integrand(std::make_shared<const Impl>(std::move(im)));
}

Integrand Integrand::det_plus_power(double p, int n, double scale) {
    require(n >= 2, "det_plus_power: dimension must be at least 2");
    require(p >= n, "det_plus_power: exponent must satisfy p >= n");
    require(scale >= 0.0, "det_plus_power: scale must be non-negative");
    Impl im;
    im.kind = IntegrandKind::det_plus_power;
    im.n = n;
    im.p = p;
    im.scale = scale;
    im.name = "det_plus_power:p=" + format_real(p) + ",n=" + format_real(n) +
              ",scale=" + format_real(scale);
    return Integrand(std::make_shared<const Impl>(std::move(im)));
}

Integrand Integrand::fp_aniso(double p) {
    require(p >= 2.0, "fp_aniso: exponent must satisfy p >= 2");
    Impl im;
    im.kind = IntegrandKind::fp_aniso;
    im.n = 2;
    im.p = p;
    im.name = "fp_aniso:p=" + format_real(p);
    return Integrand(std::make_shared<const Impl>(std::move(im)));
}

Integrand Integrand::conf_norm(Sign sign, int n) {
    require(n >= 2, "conf_norm: dimension must be at least 2");
    Impl im;
    im.kind = sign == Sign::plus ? IntegrandKind::conf_norm_plus
                                 : IntegrandKind::conf_norm_minus;
    im.n = n;
    im.p = n / 2.0;
    im.name = std::string(sign == Sign::plus ? "conf_norm_plus" : "conf_norm_minus") +
              ":n=" + format_real(n);
    return Integrand(std::make_shared<const Impl>(std::move(im)));
}

Integrand Integrand::b_sharp() {
    Impl im;
    im.kind = IntegrandKind::b_sharp;
    im.n = 2;
    im.p = 2.0;
    im.name = "b_sharp";
    return Integrand(std::make_shared<const Impl>(std::move(im)));
}

Integrand Integrand::isotropic_profile(
    std::string name, int n, std::function<double(const std::vector<double>&)> f,
    std::optional<double> homogeneity) {
    require(static_cast<bool>(f), "isotropic_profile: callable required");
    Impl im;
    im.kind = IntegrandKind::isotropic_profile;
    im.n = n;
    im.p = homogeneity.value_or(0.0);
    im.profile_fn = std::move(f);
    im.given_homogeneity = homogeneity;
    im.name = std::move(name);
    return Integrand(std::make_shared<const Impl>(std::move(im)));
}

Integrand Integrand::custom(std::string name, int n,
                            std::function<double(const SquareMatrix&)> f,
                            std::optional<double> homogeneity, bool norm_det_form) {
    require(static_cast<bool>(f), "custom: callable required");
    Impl im;
    im.kind = IntegrandKind::custom;
    im.n = n;
    im.p = homogeneity.value_or(0.0);
    im.custom_fn = std::move(f);
    im.given_homogeneity = homogeneity;
    im.custom_norm_det_form = norm_det_form;
    im.name = std::move(name);
    return Integrand(std::make_shared<const Impl>(std::move(im)));
}

Integrand Integrand::hat(Integrand inner) {
    Impl im;
    im.kind = IntegrandKind::transformed;
    im.transform = TransformKind::hat;
    im.n = inner.dim();
    im.p = inner.p();
    im.name = "hat(" + inner.name() + ")";
    im.inner = inner.impl_;
    return Integrand(std::make_shared<const Impl>(std::move(im)));
}

Integrand Integrand::tilde(Integrand inner) {
    Impl im;
    im.kind = IntegrandKind::transformed;
    im.transform = TransformKind::tilde;
    im.n = inner.dim();
    im.p = inner.p();
    im.name = "tilde(" + inner.name() + ")";
    im.inner = inner.impl_;
    return Integrand(std::make_shared<const Impl>(std::move(im)));
}

Integrand Integrand::positive_part(Integrand inner) {
    Impl im;
    im.kind = IntegrandKind::transformed;
    im.transform = TransformKind::positive_part;
    im.n = inner.dim();
    im.p = inner.p();
    im.name = "plus(" + inner.name() + ")";
    im.inner = inner.impl_;
    return Integrand(std::make_shared<const Impl>(std::move(im)));
}

Integrand Integrand::power_compose(Integrand inner, double q) {
    require(q > 0.0, "pow: exponent q must be positive");
    Impl im;
    im.kind = IntegrandKind::transformed;
    im.transform = TransformKind::power_compose;
    im.n = inner.dim();
    im.p = inner.p();
    im.q = q;
    im.name = "pow(" + inner.name() + ",q=" + format_real(q) + ")";
    im.inner = inner.impl_;
    return Integrand(std::make_shared<const Impl>(std::move(im)));
}

// ---------------------------------------------------------------------------
// descriptor parser

namespace {

struct Params {
    std::map<std::string, double> kv;

    double get(const std::string& key, double fallback) const {
        auto it = kv.find(key);
        return it == kv.end() ? fallback : it->second;
    }
    bool has(const std::string& key) const { return kv.count(key) != 0; }
    double need(const std::string& key, const std::string& kind) const {
        auto it = kv.find(key);
        if (it == kv.end()) {
            throw ParseError("descriptor: kind '" + kind + "' requires parameter '" +
                             key + "'");
        }
        return it->second;
    }
};

std::string strip(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

Params parse_params(const std::string& text, const std::string& kind) {
    Params params;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = strip(item);
        if (item.empty()) throw ParseError("descriptor: empty parameter in '" + kind + "'");
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw ParseError("descriptor: parameter '" + item + "' is not key=value");
        }
        const std::string key = strip(item.substr(0, eq));
        const std::string value = strip(item.substr(eq + 1));
        try {
            std::size_t used = 0;
            const double v = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
            params.kv[key] = v;
        } catch (const std::exception&) {
            throw ParseError("descriptor: cannot parse value '" + value + "' for '" +
                             key + "'");
        }
    }
    const std::array<const char*, 4> known{"p", "n", "scale", "q"};
    for (const auto& [key, value] : params.kv) {
        (void)value;
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ParseError("descriptor: unknown parameter '" + key + "'");
    }
    return params;
}

Integrand parse_expr(const std::string& raw);

Integrand parse_kind(const std::string& raw) {
    const auto colon = raw.find(':');
    const std::string kind = strip(colon == std::string::npos ? raw : raw.substr(0, colon));
    const Params params =
        colon == std::string::npos ? Params{} : parse_params(raw.substr(colon + 1), kind);
    const int n = static_cast<int>(params.get("n", 2));

    if (kind == "burkholder") return Integrand::burkholder(params.need("p", kind), n);
    if (kind == "burkholder_plus")
        return Integrand::burkholder_plus(params.need("p", kind), n);
    if (kind == "det_plus") return Integrand::det_plus(n);
    if (kind == "det_plus_power")
        return Integrand::det_plus_power(params.need("p", kind), n, params.get("scale", 1.0));
    if (kind == "fp_aniso") {
        if (params.has("n") && n != 2)
            throw ParseError("fp_aniso: defined only for n=2");
        return Integrand::fp_aniso(params.need("p", kind));
    }
    if (kind == "conf_norm_plus") return Integrand::conf_norm(Sign::plus, n);
    if (kind == "conf_norm_minus") return Integrand::conf_norm(Sign::minus, n);
    if (kind == "b_sharp") {
        if (params.has("n") && n != 2) throw ParseError("b_sharp: defined only for n=2");
        return Integrand::b_sharp();
    }
    throw ParseError("descriptor: unknown integrand kind '" + kind + "'");
}

Integrand parse_expr(const std::string& raw) {
    const std::string text = strip(raw);
    if (text.empty()) throw ParseError("descriptor: empty expression");

    const auto open = text.find('(');
    if (open == std::string::npos) return parse_kind(text);

    if (text.back() != ')') throw ParseError("descriptor: unbalanced parentheses");
    const std::string op = strip(text.substr(0, open));
    const std::string body = text.substr(open + 1, text.size() - open - 2);

    if (op == "hat") return Integrand::hat(parse_expr(body));
    if (op == "tilde") return Integrand::tilde(parse_expr(body));
    if (op == "plus") return Integrand::positive_part(parse_expr(body));
    if (op == "pow") {
        // pow(<inner>, q=<real>): split at the last top-level comma.
        int depth = 0;
        std::size_t split = std::string::npos;
        for (std::size_t i = 0; i < body.size(); ++i) {
            if (body[i] == '(') ++depth;
            if (body[i] == ')') --depth;
            if (body[i] == ',' && depth == 0) split = i;
        }
        if (split == std::string::npos)
            throw ParseError("pow: expected 'pow(<integrand>, q=<real>)'");
        const Params qp = parse_params(strip(body.substr(split + 1)), "pow");
        return Integrand::power_compose(parse_expr(body.substr(0, split)),
                                        qp.need("q", "pow"));
    }
    throw ParseError("descriptor: unknown transform '" + op + "'");
}

}  // namespace

Integrand parse_integrand(const std::string& descriptor) {
    return parse_expr(descriptor);
}

// ---------------------------------------------------------------------------
// planar certificate closed forms

namespace {

void require_planar_exponent(double p) {
    if (!(p > 2.0)) {
        throw ParseError("planar certificate: exponent must satisfy p > 2");
    }
}

}  // namespace

double burkholder_alt(const SquareMatrix& A, double p) {
    require_planar_exponent(p);
    if (A.n != 2) throw PreconditionError("burkholder_alt: defined only for n=2");
    const double s = operator_norm(A);
    if (s == 0.0) return 0.0;
    const ConformalCoordinates c = conformal_coordinates(A);
    return (2.0 / p) * ((p - 1.0) * c.plus_norm - c.minus_norm) * std::pow(s, p - 1.0);
}

double h_value(double t, double d, double p) {
    require_planar_exponent(p);
    if (t < 0.0 || t * t + d < 0.0) {
        throw EvalDomainError("h: point outside the region {t >= 0, t^2 + d >= 0}");
    }
    const double w = t + std::sqrt(std::max(t * t + d, 0.0));
    if (w == 0.0) return 0.0;
    return ((1.0 - 2.0 / p) * w * w + d) * std::pow(w, p - 2.0);
}

std::array<double, 2> h_gradient(double t, double d, double p) {
    require_planar_exponent(p);
    const double r2 = t * t + d;
    if (t < 0.0 || r2 < 0.0) {
        throw EvalDomainError("h_gradient: point outside the domain of h");
    }
    if (r2 == 0.0) {
        throw EvalDomainError("h_gradient: gradient unbounded where t^2 + d = 0");
    }
    const double r = std::sqrt(r2);
    const double w = t + r;
    const double q = 1.0 - 2.0 / p;
    // h = phi(w, d) with phi = (q w^2 + d) w^{p-2}; chain rule through
    // w_t = w/r and w_d = 1/(2r).
    const double phi_w =
        2.0 * q * std::pow(w, p - 1.0) + (q * w * w + d) * (p - 2.0) * std::pow(w, p - 3.0);
    const double ht = phi_w * (w / r);
    const double hd = phi_w / (2.0 * r) + std::pow(w, p - 2.0);
    return {ht, hd};
}

SquareMatrix h_hessian(double t, double d, double p) {
    require_planar_exponent(p);
    const double r2 = t * t + d;
    if (t < 0.0 || r2 < 0.0) {
        throw EvalDomainError("h_hessian: point outside the domain of h");
    }
    if (r2 == 0.0) {
        throw EvalDomainError("h_hessian: Hessian unbounded where t^2 + d = 0");
    }
    const double r = std::sqrt(r2);
    const double w = t + r;
    const double k = (p - 1.0) * (p - 2.0) / r;
    SquareMatrix H(2);
    H(0, 0) = 2.0 * k * std::pow(w, p - 1.0);
    H(0, 1) = H(1, 0) = k * std::pow(w, p - 2.0);
    H(1, 1) = 0.5 * k * std::pow(w, p - 3.0);
    return H;
}

double h_convexity_region_coefficient(double p) {
    require_planar_exponent(p);
    return p * (p - 2.0) / ((p - 1.0) * (p - 1.0));
}

double h_plus_value(double t, double d, double p) {
    require_planar_exponent(p);
    if (t < 0.0) throw EvalDomainError("h_plus: requires t >= 0");
    const double c = h_convexity_region_coefficient(p);
    if (c * t * t + d < 0.0) return 0.0;
    return h_value(t, d, p);
}

// ---------------------------------------------------------------------------
// the p -> 2 limit integrand

double b_sharp_value(const SquareMatrix& A) {
    if (A.n != 2) throw PreconditionError("b_sharp: defined only for n=2");
    const double dt = det(A);
    if (!(dt > 0.0)) {
        throw EvalDomainError("b_sharp requires a positive determinant");
    }
    const double s = operator_norm(A);
    return 0.5 * (s * s + dt * std::log(s * s));
}

double b_sharp_limit_quotient(const SquareMatrix& A, double p) {
    if (!(p > 2.0)) {
        throw ParseError("b_sharp limit quotient: requires p > 2");
    }
    const Integrand Fp = Integrand::burkholder_plus(p, 2);
    return (Fp(A) - det(A)) / (p - 2.0);
}

double b_sharp_hat_closed_form(const SquareMatrix& A) {
    if (A.n != 2) throw PreconditionError("b_sharp_hat: defined only for n=2");
    const double dt = det(A);
    if (!(dt > 0.0)) {
        throw EvalDomainError("b_sharp_hat requires a positive determinant");
    }
    const double s = operator_norm(A);
    const double ratio = s * s / dt;
    return 0.5 * (ratio + std::log(ratio) - std::log(dt));
}

// ---------------------------------------------------------------------------
// symmetry probe

CheckReport symmetry_probe(const Integrand& F, long long samples, std::uint64_t seed,
                           double tol, int threads) {
    const int n = F.dim();
    const std::optional<double> hom = F.homogeneity();
    const bool positive_det = F.requires_positive_det();

    auto sample_matrix = [&](Rng& rng) {
        for (int attempt = 0; attempt < 32; ++attempt) {
            SquareMatrix A = random_box_matrix(rng, n, 2.0);
            if (!positive_det) return A;
            if (det(A) < 0.0) {
                for (int j = 0; j < n; ++j) A(0, j) = -A(0, j);
            }
            if (det(A) > 1e-6) return A;
        }
        return SquareMatrix::identity(n);
    };

    auto residual_at = [&](long long i) {
        Rng rng = stream_for(seed, static_cast<std::uint64_t>(i));
        const SquareMatrix A = sample_matrix(rng);
        const SquareMatrix Q = random_rotation(rng, n);
        const SquareMatrix R = random_rotation(rng, n);
        const double base = F(A);
        const double scale = std::max(1.0, std::abs(base));
        double worst = std::abs(F(Q * A * R) - base) / scale;
        if (hom) {
            const double t = rng.uniform(0.4, 2.5);
            const double predicted = std::pow(t, *hom) * base;
            const double hscale = std::max(1.0, std::abs(predicted));
            worst = std::max(worst, std::abs(F(t * A) - predicted) / hscale);
        }
        return worst;
    };

    const ScanStats stats = parallel_max_scan(samples, threads, residual_at);
    CheckReport report;
    report.name = "symmetry_probe(" + F.name() + ")";
    report.samples = samples;
    report.seed = seed;
    report.worst_residual = stats.worst_index >= 0 ? stats.worst : 0.0;
    report.residual_histogram = stats.histogram;
    report.passed = report.worst_residual <= tol;
    if (!report.passed && stats.worst_index >= 0) {
        Rng rng = stream_for(seed, static_cast<std::uint64_t>(stats.worst_index));
        const SquareMatrix A = sample_matrix(rng);
        const SquareMatrix Q = random_rotation(rng, n);
        const SquareMatrix R = random_rotation(rng, n);
        report.witness = {{"matrix", matrix_to_json(A)},
                          {"left_rotation", matrix_to_json(Q)},
                          {"right_rotation", matrix_to_json(R)},
                          {"sample_index", stats.worst_index}};
    }
    return report;
}

}  // namespace scv
