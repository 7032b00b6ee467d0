#include "scv/radial.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <thread>

#include "scv/errors.hpp"
#include "scv/optim.hpp"
#include "scv/rng.hpp"

namespace scv {

namespace {

constexpr double open_start = 1e-12;

struct PieceSpec {
    double end = 1.0;
    enum class Kind { chord, lin, pow } kind = Kind::chord;
    double param = 0.0;  // lin: slope, pow: exponent
};

std::string format_real(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
}

std::string strip(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_real(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ParseError("profile: cannot parse " + what + " from '" + text + "'");
    }
}

std::string kind_token(const ProfilePiece& piece, bool first) {
    if (piece.is_power) return "pow:" + format_real(piece.exponent);
    if (first) return "lin";
    return "lin:" + format_real(piece.coeff);
}

std::vector<ProfilePiece> resolve(const std::vector<PieceSpec>& specs) {
    if (specs.empty()) throw ParseError("profile: needs at least one piece");
    if (std::abs(specs.back().end - 1.0) > 1e-14) {
        throw ParseError("profile: the last piece must end at r = 1");
    }
    double prev = 0.0;
    for (const PieceSpec& s : specs) {
        if (!(s.end > prev)) throw ParseError("profile: piece ends must increase");
        prev = s.end;
    }

    // Right to left: each piece is pinned by its value at the right knot,
    // starting from rho(1) = 1, so continuity is exact by construction.
    std::vector<ProfilePiece> pieces(specs.size());
    double v_hi = 1.0;
    for (std::size_t idx = specs.size(); idx-- > 0;) {
        const PieceSpec& s = specs[idx];
        ProfilePiece& piece = pieces[idx];
        piece.lo = idx == 0 ? 0.0 : specs[idx - 1].end;
        piece.hi = idx == 0 ? specs[idx].end : s.end;
        const bool first = idx == 0;
        double v_lo = 0.0;
        switch (s.kind) {
            case PieceSpec::Kind::pow:
                if (first && !(s.param > 0.0)) {
                    throw ParseError(
                        "profile: the first power piece needs a positive exponent "
                        "for rho(0) = 0");
                }
                piece.is_power = true;
                piece.exponent = s.param;
                piece.coeff = v_hi / std::pow(piece.hi, s.param);
                if (!(piece.coeff > 0.0)) {
                    throw ParseError("profile: rho must stay positive on (0, 1]");
                }
                v_lo = first ? 0.0 : piece.coeff * std::pow(piece.lo, s.param);
                break;
            case PieceSpec::Kind::chord:
                if (!first) {
                    throw ParseError(
                        "profile: a bare lin piece is only valid as the first piece");
                }
                piece.coeff = v_hi / piece.hi;
                piece.offset = 0.0;
                if (!(piece.coeff > 0.0)) {
                    throw ParseError("profile: rho must stay positive on (0, 1]");
                }
                v_lo = 0.0;
                break;
            case PieceSpec::Kind::lin:
                if (first) {
                    throw ParseError(
                        "profile: the first piece must pass through the origin; "
                        "use lin or pow");
                }
                piece.coeff = s.param;
                piece.offset = v_hi - s.param * piece.hi;
                v_lo = piece.offset + s.param * piece.lo;
                if (!(v_lo > 0.0)) {
                    throw ParseError("profile: rho must stay positive on (0, 1]");
                }
                break;
        }
        v_hi = v_lo;
    }
    return pieces;
}

std::string canonical_descriptor(const std::vector<ProfilePiece>& pieces) {
    std::string out = "pw:[";
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (i) out += ",";
        out += "(" + format_real(pieces[i].hi) + "," + kind_token(pieces[i], i == 0) + ")";
    }
    return out + "]";
}

}  // namespace

RadialProfile RadialProfile::identity() {
    RadialProfile rho;
    rho.pieces_ = resolve({PieceSpec{1.0, PieceSpec::Kind::chord, 0.0}});
    rho.descriptor_ = "identity";
    return rho;
}

RadialProfile RadialProfile::two_piece_power(double alpha) {
    RadialProfile rho;
    rho.pieces_ = resolve({PieceSpec{0.5, PieceSpec::Kind::chord, 0.0},
                           PieceSpec{1.0, PieceSpec::Kind::pow, alpha}});
    rho.descriptor_ = "power:alpha=" + format_real(alpha) + "@thm41";
    return rho;
}

RadialProfile RadialProfile::all_power(const std::vector<double>& ends,
                                       const std::vector<double>& exponents) {
    if (ends.size() != exponents.size()) {
        throw PreconditionError("all_power: one exponent per piece end");
    }
    std::vector<PieceSpec> specs;
    for (std::size_t i = 0; i < ends.size(); ++i) {
        specs.push_back(PieceSpec{ends[i], PieceSpec::Kind::pow, exponents[i]});
    }
    RadialProfile rho;
    rho.pieces_ = resolve(specs);
    rho.descriptor_ = canonical_descriptor(rho.pieces_);
    return rho;
}

RadialProfile RadialProfile::parse(const std::string& descriptor) {
    const std::string text = strip(descriptor);
    if (text == "identity") return identity();

    if (text.rfind("power:", 0) == 0) {
        const std::string rest = text.substr(6);
        const auto at = rest.find('@');
        if (at == std::string::npos || rest.substr(at + 1) != "thm41") {
            throw ParseError("profile: expected 'power:alpha=<real>@thm41'");
        }
        const std::string kv = strip(rest.substr(0, at));
        if (kv.rfind("alpha=", 0) != 0) {
            throw ParseError("profile: expected 'power:alpha=<real>@thm41'");
        }
        return two_piece_power(parse_real(strip(kv.substr(6)), "alpha"));
    }

    if (text.rfind("pw:", 0) == 0) {
        const std::string body = strip(text.substr(3));
        if (body.size() < 2 || body.front() != '[' || body.back() != ']') {
            throw ParseError("profile: expected 'pw:[(end,kind),...]'");
        }
        RadialProfile rho;
        std::vector<PieceSpec> specs;
        const std::string inner = body.substr(1, body.size() - 2);
        std::size_t pos = 0;
        while (pos < inner.size()) {
            const auto open = inner.find('(', pos);
            if (open == std::string::npos) break;
            const auto close = inner.find(')', open);
            if (close == std::string::npos) {
                throw ParseError("profile: unbalanced parentheses in piece list");
            }
            const std::string item = inner.substr(open + 1, close - open - 1);
            const auto comma = item.find(',');
            if (comma == std::string::npos) {
                throw ParseError("profile: each piece is '(end,kind)'");
            }
            PieceSpec spec;
            spec.end = parse_real(strip(item.substr(0, comma)), "piece end");
            const std::string kind = strip(item.substr(comma + 1));
            if (kind == "lin") {
                spec.kind = PieceSpec::Kind::chord;
            } else if (kind.rfind("lin:", 0) == 0) {
                spec.kind = PieceSpec::Kind::lin;
                spec.param = parse_real(strip(kind.substr(4)), "slope");
            } else if (kind.rfind("pow:", 0) == 0) {
                spec.kind = PieceSpec::Kind::pow;
                spec.param = parse_real(strip(kind.substr(4)), "exponent");
            } else {
                throw ParseError("profile: unknown piece kind '" + kind + "'");
            }
            specs.push_back(spec);
            pos = close + 1;
        }
        if (specs.empty()) throw ParseError("profile: empty piece list");
        rho.pieces_ = resolve(specs);
        rho.descriptor_ = text;
        return rho;
    }

    throw ParseError("profile: unknown descriptor '" + text + "'");
}

const ProfilePiece& RadialProfile::piece_at(double r) const {
    if (!(r >= 0.0 && r <= 1.0)) {
        throw PreconditionError("profile evaluated outside [0, 1]");
    }
    for (const ProfilePiece& piece : pieces_) {
        if (r <= piece.hi) return piece;
    }
    return pieces_.back();
}

double RadialProfile::value(double r) const {
    const ProfilePiece& piece = piece_at(r);
    if (piece.is_power) return piece.coeff * std::pow(r, piece.exponent);
    return piece.offset + piece.coeff * r;
}

double RadialProfile::derivative(double r) const {
    const ProfilePiece& piece = piece_at(r);
    if (piece.is_power) return piece.coeff * piece.exponent * std::pow(r, piece.exponent - 1.0);
    return piece.coeff;
}

std::vector<double> RadialProfile::knots() const {
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) out.push_back(pieces_[i].hi);
    return out;
}

SignedSpectrum gradient_spectrum(const RadialProfile& rho, double r, int n,
                                 bool conjugate) {
    if (!(r > 0.0 && r <= 1.0)) {
        throw PreconditionError("gradient_spectrum: r must lie in (0, 1]");
    }
    if (n < 2) throw PreconditionError("gradient_spectrum: n must be at least 2");
    const double tangential = rho.value(r) / r;
    const double radial = rho.derivative(r);
    const double det_sign =
        (radial < 0.0 ? -1.0 : 1.0) * (conjugate ? -1.0 : 1.0);

    SignedSpectrum sp;
    sp.lambda.assign(static_cast<std::size_t>(n), tangential);
    sp.lambda.back() = std::abs(radial);
    std::sort(sp.lambda.rbegin(), sp.lambda.rend());
    sp.lambda.back() *= det_sign;
    sp.sigma.resize(sp.lambda.size());
    double prod = 1.0;
    for (std::size_t i = 0; i < sp.lambda.size(); ++i) {
        prod *= sp.lambda[i];
        sp.sigma[i] = prod;
    }
    return sp;
}

SquareMatrix gradient_matrix(const RadialProfile& rho, double r, int n, bool conjugate) {
    if (!(r > 0.0 && r <= 1.0)) {
        throw PreconditionError("gradient_matrix: r must lie in (0, 1]");
    }
    std::vector<double> diag(static_cast<std::size_t>(n), rho.value(r) / r);
    diag.back() = rho.derivative(r) * (conjugate ? -1.0 : 1.0);
    return SquareMatrix::diagonal(diag);
}

double radial_energy(const Integrand& F, const RadialProfile& rho, bool conjugate,
                     const QuadratureSpec& quad) {
    const int n = F.dim();

    double total = 0.0;
    for (const ProfilePiece& piece : rho.pieces()) {
        // Evaluate through the piece's own closed form: the profile's
        // derivative is one-sided at knots, and sampling the neighbouring
        // branch at a segment endpoint would hand the subdivision a phantom
        // jump it can never resolve.
        auto segment_value = [&](double r) {
            const double v = piece.is_power ? piece.coeff * std::pow(r, piece.exponent)
                                            : piece.offset + piece.coeff * r;
            const double dv = piece.is_power
                                  ? piece.coeff * piece.exponent *
                                        std::pow(r, piece.exponent - 1.0)
                                  : piece.coeff;
            std::vector<double> diag(static_cast<std::size_t>(n), v / r);
            diag.back() = dv * (conjugate ? -1.0 : 1.0);
            return static_cast<double>(n) * F(SquareMatrix::diagonal(diag)) *
                   std::pow(r, n - 1);
        };
        QuadratureSpec sub = quad;
        sub.abs_tol = quad.abs_tol * std::max(piece.hi - piece.lo, 1e-3);
        double lo = piece.lo;
        if (piece.lo == 0.0) {
            const std::optional<double> p = F.homogeneity();
            if (piece.is_power && p) {
                // On c r^a the spectrum scales like r^{a-1}, so homogeneity
                // reduces the whole head piece to K r^{n-1+p(a-1)}. Integrate
                // it in closed form: for small exponents the r = 0 weak
                // singularity would push the subdivision past any depth guard.
                const double e = n - 1.0 + *p * (piece.exponent - 1.0);
                if (e <= -1.0) {
                    throw QuadratureError(
                        "radial energy diverges at r = 0 for profile " +
                        rho.descriptor());
                }
                std::vector<double> diag(static_cast<std::size_t>(n), piece.coeff);
                diag.back() = piece.coeff * piece.exponent * (conjugate ? -1.0 : 1.0);
                const double K =
                    static_cast<double>(n) * F(SquareMatrix::diagonal(diag));
                total += K * std::pow(piece.hi, e + 1.0) / (e + 1.0);
                continue;
            }
            lo = open_start;
        }
        total += integrate(segment_value, lo, piece.hi, sub);
    }
    return total;
}

CheckReport nonexpanding_check(const RadialProfile& rho, int grid) {
    if (grid < 10) throw PreconditionError("nonexpanding_check: grid must be >= 10");
    CheckReport report;
    report.name = "nonexpanding(" + rho.descriptor() + ")";
    report.samples = grid;

    double worst = -1.0;
    double worst_r = 0.0;
    // Power pieces resolve analytically: |rho'| / (rho / r) = |alpha|.
    for (const ProfilePiece& piece : rho.pieces()) {
        if (!piece.is_power) continue;
        const double excess = std::abs(piece.exponent) - 1.0;
        if (excess > worst) {
            worst = excess;
            worst_r = 0.5 * (piece.lo + piece.hi);
        }
    }
    for (int i = 1; i <= grid; ++i) {
        const double r = static_cast<double>(i) / grid;
        const double ratio = std::abs(rho.derivative(r)) / (rho.value(r) / r) - 1.0;
        if (ratio > worst) {
            worst = ratio;
            worst_r = r;
        }
    }
    report.worst_residual = worst;
    report.passed = worst <= 1e-12;
    if (!report.passed) {
        report.witness = {{"r", worst_r},
                          {"ratio_excess", worst},
                          {"profile", rho.descriptor()}};
    }
    return report;
}

CheckReport quasiaffinity_check(double p, int n, const std::vector<RadialProfile>& profiles,
                                bool conjugate, const QuadratureSpec& quad) {
    if (!conjugate && !(p >= n / 2.0 && p <= n)) {
        throw PreconditionError(
            "quasiaffinity_check: the identity branch needs n/2 <= p <= n");
    }
    if (conjugate && !(p >= n)) {
        throw PreconditionError(
            "quasiaffinity_check: the reflected branch needs p >= n");
    }
    const Integrand F = Integrand::burkholder(p, n);
    const double target = (conjugate ? -1.0 : 1.0) * n / p;
    const double tol = 10.0 * quad.abs_tol;

    CheckReport report;
    report.name = "quasiaffinity:p=" + format_real(p) + ",n=" + format_real(n) +
                  (conjugate ? ",reflected" : "");
    report.samples = static_cast<long long>(profiles.size());
    report.passed = true;
    nlohmann::json rows = nlohmann::json::array();
    for (const RadialProfile& rho : profiles) {
        nlohmann::json row{{"profile", rho.descriptor()}};
        if (!nonexpanding_check(rho, 64).passed) {
            row["skipped"] = true;
            rows.push_back(std::move(row));
            continue;
        }
        const double energy = radial_energy(F, rho, conjugate, quad);
        const double residual = std::abs(energy - target);
        row["energy"] = energy;
        row["target"] = target;
        row["residual"] = residual;
        row["pass"] = residual <= tol;
        report.worst_residual = std::max(report.worst_residual, residual);
        report.passed = report.passed && residual <= tol;
        rows.push_back(std::move(row));
    }
    report.witness = {{"rows", std::move(rows)}};
    return report;
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Raw simplex coordinates to a valid all-power profile: the first
/// pieces - 1 coordinates place interior knots, the rest set exponents.
/// The innermost exponent is clipped to keep p (1 - alpha) < n - 0.1, so
/// every candidate has finite energy.
RadialProfile family_profile(const std::vector<double>& raw, int pieces, double p,
                             int n) {
    std::vector<double> ends;
    for (int i = 0; i < pieces - 1; ++i) {
        ends.push_back(0.02 + 0.96 * sigmoid(raw[static_cast<std::size_t>(i)]));
    }
    std::sort(ends.begin(), ends.end());
    for (std::size_t i = 1; i < ends.size(); ++i) {
        ends[i] = std::max(ends[i], ends[i - 1] + 1e-6);
    }
    ends.push_back(1.0);

    const double inner_lo = std::max(0.05, 1.0 - (n - 0.1) / p);
    std::vector<double> exponents;
    for (int i = 0; i < pieces; ++i) {
        const double u = sigmoid(raw[static_cast<std::size_t>(pieces - 1 + i)]);
        exponents.push_back(i == 0 ? inner_lo + (3.0 - inner_lo) * u : -3.0 + 6.0 * u);
    }
    return RadialProfile::all_power(ends, exponents);
}

}  // namespace

CheckReport radial_quasiconvexity_search(const Integrand& F, const RadialSearchConfig& cfg) {
    if (cfg.pieces < 1 || cfg.pieces > 4) {
        throw PreconditionError("radial search: pieces must lie in [1, 4]");
    }
    const int n = F.dim();
    const double p_clip = F.homogeneity().value_or(static_cast<double>(n));
    const SquareMatrix center_matrix = cfg.at_reflected
                                           ? SquareMatrix::reflected_identity(n)
                                           : SquareMatrix::identity(n);
    const double center = F(center_matrix);
    const std::size_t dims = static_cast<std::size_t>(2 * cfg.pieces - 1);

    auto objective = [&](const std::vector<double>& raw) {
        try {
            const RadialProfile rho = family_profile(raw, cfg.pieces, p_clip, n);
            return radial_energy(F, rho, cfg.at_reflected, cfg.quad) - center;
        } catch (const std::exception&) {
            return 1e100;  // infeasible candidate
        }
    };

    struct StartResult {
        double gap = 1e100;
        std::vector<double> raw;
    };
    std::vector<StartResult> results(static_cast<std::size_t>(cfg.multistarts));
    auto run_start = [&](int s) {
        Rng rng = stream_for(cfg.seed, static_cast<std::uint64_t>(s));
        std::vector<double> start(dims);
        for (double& x : start) x = rng.uniform(-2.0, 2.0);
        const NelderMeadResult r =
            nelder_mead(objective, std::move(start), 0.7, cfg.iterations, 1e-12);
        results[static_cast<std::size_t>(s)] = {r.value, r.x};
    };

    const int nthreads = std::max(1, std::min(cfg.threads, cfg.multistarts));
    if (nthreads == 1) {
        for (int s = 0; s < cfg.multistarts; ++s) run_start(s);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) {
            pool.emplace_back([&, t] {
                for (int s = t; s < cfg.multistarts; s += nthreads) run_start(s);
            });
        }
        for (std::thread& th : pool) th.join();
    }

    int best = 0;
    for (int s = 1; s < cfg.multistarts; ++s) {
        if (results[static_cast<std::size_t>(s)].gap <
            results[static_cast<std::size_t>(best)].gap) {
            best = s;
        }
    }
    const StartResult& winner = results[static_cast<std::size_t>(best)];

    CheckReport report;
    report.name = "radial_quasiconvexity_search(" + F.name() + ")" +
                  (cfg.at_reflected ? "@reflected" : "@identity");
    report.samples = cfg.multistarts;
    report.seed = cfg.seed;
    report.worst_residual = winner.gap;
    report.passed = winner.gap >= -cfg.tol;
    nlohmann::json witness{{"gap", winner.gap},
                           {"center_value", center},
                           {"start_index", best}};
    if (winner.gap < 1e99) {
        const RadialProfile rho = family_profile(winner.raw, cfg.pieces, p_clip, n);
        witness["profile"] = rho.descriptor();
        witness["energy"] = winner.gap + center;
    }
    report.witness = std::move(witness);
    return report;
}

CheckReport extremality_scan(const Integrand& F, double p, int n, int grid, double tol) {
    if (grid < 2) throw PreconditionError("extremality_scan: grid must be >= 2");
    if (!F.has_norm_det_form()) {
        throw PreconditionError(
            "extremality_scan: integrand lacks the two-variable structure");
    }
    const std::optional<double> hom = F.homogeneity();
    if (!hom || std::abs(*hom - p) > 1e-12) {
        throw PreconditionError("extremality_scan: homogeneity degree must equal p");
    }
    const Integrand reference = Integrand::burkholder(p, n);
    const bool identity_branch = p <= n;
    const SquareMatrix anchor = identity_branch ? SquareMatrix::identity(n)
                                                : SquareMatrix::reflected_identity(n);
    const double ref_anchor = reference(anchor);
    if (std::abs(F(anchor) - ref_anchor) > 1e-9 * std::max(1.0, std::abs(ref_anchor))) {
        throw PreconditionError("extremality_scan: normalization mismatch at the " +
                                std::string(identity_branch ? "identity" : "reflected identity"));
    }

    CheckReport report;
    report.name = "extremality(" + F.name() + ":p=" + format_real(p) + ")";
    report.samples = grid;
    report.passed = true;
    double worst = 0.0;
    double worst_t = 0.0;
    for (int i = 0; i < grid; ++i) {
        const double t = static_cast<double>(i) / (grid - 1);
        std::vector<double> diag(static_cast<std::size_t>(n), 1.0);
        diag.back() = 2.0 * t - 1.0;
        const SquareMatrix A = SquareMatrix::diagonal(diag);
        const double margin = reference(A) - F(A);
        const double scaled = margin / std::max(1.0, std::abs(F(A)));
        if (scaled > worst) {
            worst = scaled;
            worst_t = t;
        }
    }
    report.worst_residual = worst;
    report.passed = worst <= tol;
    if (!report.passed) {
        report.witness = {{"t", worst_t}, {"scaled_excess", worst}};
    }
    return report;
}

}  // namespace scv
