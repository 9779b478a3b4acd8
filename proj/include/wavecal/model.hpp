// Latent-model grammar: composite process descriptions such as
// "3*GM()+WN()+QN()+RW()", their parsed representation, and the
// GM <-> AR1 reparametrization.
#pragma once

#include <wavecal/error.hpp>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace wavecal {

enum class ProcessKind { GM, AR1, WN, QN, RW, DR, AR, MA, ARMA };

inline const char* kind_name(ProcessKind k) {
    switch (k) {
    case ProcessKind::GM: return "GM";
    case ProcessKind::AR1: return "AR1";
    case ProcessKind::WN: return "WN";
    case ProcessKind::QN: return "QN";
    case ProcessKind::RW: return "RW";
    case ProcessKind::DR: return "DR";
    case ProcessKind::AR: return "AR";
    case ProcessKind::MA: return "MA";
    case ProcessKind::ARMA: return "ARMA";
    }
    return "?";
}

/// One scalar parameter of a process block, held in natural space.
struct Param {
    std::string name;
    double value = std::numeric_limits<double>::quiet_NaN();
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool lo_open = false; ///< bound is exclusive
    bool hi_open = false;
    bool has_start = false; ///< user supplied a starting value
    bool pinned = false;    ///< held fixed during optimization

    bool in_bounds(double v) const {
        if (!std::isfinite(v)) return false;
        if (lo_open ? (v <= lo) : (v < lo)) return false;
        if (hi_open ? (v >= hi) : (v > hi)) return false;
        return true;
    }
};

/// One elementary process in a composite model. GM blocks are converted to
/// their AR1 parametrization at parse time; `from_gm` records how the block
/// was declared so reports can convert back.
struct ProcessBlock {
    ProcessKind kind = ProcessKind::WN;
    int p = 0, q = 0; ///< orders for AR/MA/ARMA
    std::vector<Param> params;
    bool from_gm = false;

    bool operator==(const ProcessBlock& o) const {
        if (kind != o.kind || p != o.p || q != o.q || from_gm != o.from_gm ||
            params.size() != o.params.size())
            return false;
        for (std::size_t i = 0; i < params.size(); ++i) {
            const Param &a = params[i], &b = o.params[i];
            if (a.name != b.name || a.has_start != b.has_start || a.pinned != b.pinned)
                return false;
            if (a.has_start && a.value != b.value) return false;
        }
        return true;
    }
};

// =============================================================================
// GM <-> AR1 reparametrization
// =============================================================================

/// Discretize a Gauss-Markov process: phi = exp(-beta*dt),
/// sigma2 = sigma2_gm * (1 - exp(-2*beta*dt)) with dt = 1/freq.
inline std::pair<double, double> gm_to_ar1(double beta, double sigma2_gm, double freq) {
    if (!std::isfinite(beta) || !std::isfinite(sigma2_gm) || !std::isfinite(freq))
        throw UsageError("gm_to_ar1: non-finite input");
    if (beta <= 0 || sigma2_gm <= 0 || freq <= 0)
        throw UsageError("gm_to_ar1: beta, sigma2_gm and freq must be positive");
    const double dt = 1.0 / freq;
    const double phi = std::exp(-beta * dt);
    const double sigma2 = sigma2_gm * (1.0 - std::exp(-2.0 * beta * dt));
    return {phi, sigma2};
}

/// Inverse map: beta = -freq*log(phi), sigma2_gm = sigma2 / (1 - phi^2).
inline std::pair<double, double> ar1_to_gm(double phi, double sigma2, double freq) {
    if (!(phi > 0.0 && phi < 1.0))
        throw UsageError("ar1_to_gm: phi must lie in (0,1)");
    if (!(sigma2 > 0) || !(freq > 0))
        throw UsageError("ar1_to_gm: sigma2 and freq must be positive");
    const double beta = -freq * std::log(phi);
    const double sigma2_gm = sigma2 / (1.0 - phi * phi);
    return {beta, sigma2_gm};
}

// =============================================================================
// Parameter templates per process kind
// =============================================================================

namespace detail {

inline Param positive_param(const std::string& name) {
    Param p;
    p.name = name;
    p.lo = 0.0;
    p.lo_open = true;
    return p;
}

inline Param interval_param(const std::string& name, double lo, double hi) {
    Param p;
    p.name = name;
    p.lo = lo;
    p.hi = hi;
    p.lo_open = p.hi_open = true;
    return p;
}

inline Param free_param(const std::string& name) {
    Param p;
    p.name = name;
    return p;
}

inline std::vector<Param> default_params(ProcessKind k, int p, int q) {
    std::vector<Param> out;
    switch (k) {
    case ProcessKind::GM: // stored in AR1 space; GM-derived phi lies in (0,1)
        out.push_back(interval_param("phi", 0.0, 1.0));
        out.push_back(positive_param("sigma2"));
        break;
    case ProcessKind::AR1:
        out.push_back(interval_param("phi", -1.0, 1.0));
        out.push_back(positive_param("sigma2"));
        break;
    case ProcessKind::WN: out.push_back(positive_param("sigma2")); break;
    case ProcessKind::QN: out.push_back(positive_param("q2")); break;
    case ProcessKind::RW: out.push_back(positive_param("gamma2")); break;
    case ProcessKind::DR: out.push_back(free_param("omega")); break;
    case ProcessKind::AR:
    case ProcessKind::MA:
    case ProcessKind::ARMA:
        for (int i = 1; i <= p; ++i) out.push_back(free_param("phi" + std::to_string(i)));
        for (int i = 1; i <= q; ++i) out.push_back(free_param("theta" + std::to_string(i)));
        out.push_back(positive_param("sigma2"));
        break;
    }
    return out;
}

} // namespace detail

// =============================================================================
// LatentModel
// =============================================================================

/// A composite latent model: an ordered list of independent process blocks
/// plus the sampling frequency. Immutable in spirit: treat as a value type.
struct LatentModel {
    std::vector<ProcessBlock> blocks;
    double freq = 1.0;

    std::size_t n_params() const {
        std::size_t n = 0;
        for (const auto& b : blocks) n += b.params.size();
        return n;
    }

    std::size_t n_free() const {
        std::size_t n = 0;
        for (const auto& b : blocks)
            for (const auto& p : b.params)
                if (!p.pinned) ++n;
        return n;
    }

    bool fully_specified() const {
        for (const auto& b : blocks)
            for (const auto& p : b.params)
                if (!p.has_start) return false;
        return true;
    }

    std::vector<double> theta() const {
        std::vector<double> t;
        t.reserve(n_params());
        for (const auto& b : blocks)
            for (const auto& p : b.params) t.push_back(p.value);
        return t;
    }

    void set_theta(const std::vector<double>& t) {
        std::size_t i = 0;
        for (auto& b : blocks)
            for (auto& p : b.params) {
                p.value = t.at(i++);
                p.has_start = true;
            }
    }

    /// Flat view of every parameter, in theta order.
    std::vector<Param*> param_ptrs() {
        std::vector<Param*> out;
        for (auto& b : blocks)
            for (auto& p : b.params) out.push_back(&p);
        return out;
    }
    std::vector<const Param*> param_ptrs() const {
        std::vector<const Param*> out;
        for (const auto& b : blocks)
            for (const auto& p : b.params) out.push_back(&p);
        return out;
    }

    /// Values matching param_labels: GM-declared blocks are converted from
    /// the internal AR1 space back to (beta, sigma2_gm).
    std::vector<double> theta_labeled() const {
        std::vector<double> t;
        t.reserve(n_params());
        for (const auto& b : blocks) {
            if (b.from_gm) {
                auto [beta, s2gm] = ar1_to_gm(b.params[0].value, b.params[1].value, freq);
                t.push_back(beta);
                t.push_back(s2gm);
                continue;
            }
            for (const auto& p : b.params) t.push_back(p.value);
        }
        return t;
    }

    /// Display name of parameter i, qualified by block when ambiguous,
    /// reporting GM-declared blocks in GM parametrization.
    std::vector<std::string> param_labels() const {
        std::vector<std::string> out;
        int gm_idx = 0, ar_idx = 0;
        int n_gm = 0, n_ar = 0;
        for (const auto& b : blocks) {
            if (b.from_gm) ++n_gm;
            else if (b.kind == ProcessKind::AR1) ++n_ar;
        }
        for (const auto& b : blocks) {
            std::string suffix;
            if (b.from_gm) {
                ++gm_idx;
                if (n_gm > 1) suffix = std::to_string(gm_idx);
                out.push_back("beta" + suffix);
                out.push_back("sigma2_gm" + suffix);
                continue;
            }
            if (b.kind == ProcessKind::AR1) {
                ++ar_idx;
                if (n_ar > 1) suffix = std::to_string(ar_idx);
            }
            for (const auto& p : b.params) {
                std::string label = p.name + suffix;
                if (b.kind == ProcessKind::AR || b.kind == ProcessKind::MA ||
                    b.kind == ProcessKind::ARMA)
                    label = std::string(kind_name(b.kind)) + "." + p.name;
                out.push_back(label);
            }
        }
        return out;
    }

    bool operator==(const LatentModel& o) const {
        return freq == o.freq && blocks == o.blocks;
    }
};

// =============================================================================
// Parser
// =============================================================================

namespace detail {

struct Cursor {
    const std::string& s;
    std::size_t i = 0;

    void skip_ws() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool done() {
        skip_ws();
        return i >= s.size();
    }
    char peek() {
        skip_ws();
        return i < s.size() ? s[i] : '\0';
    }
    bool accept(char c) {
        skip_ws();
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c))
            throw ParseError(std::string("expected '") + c + "'", i);
    }
    std::string ident() {
        skip_ws();
        std::size_t start = i;
        while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_'))
            ++i;
        if (i == start) throw ParseError("expected identifier", i);
        return s.substr(start, i - start);
    }
    double number() {
        skip_ws();
        const char* begin = s.c_str() + i;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) throw ParseError("expected number", i);
        i += static_cast<std::size_t>(end - begin);
        return v;
    }
};

inline bool is_singleton(ProcessKind k) {
    return k == ProcessKind::WN || k == ProcessKind::QN || k == ProcessKind::RW ||
           k == ProcessKind::DR || k == ProcessKind::AR || k == ProcessKind::MA ||
           k == ProcessKind::ARMA;
}

inline ProcessKind kind_from_name(const std::string& name, std::size_t pos) {
    if (name == "GM") return ProcessKind::GM;
    if (name == "AR1") return ProcessKind::AR1;
    if (name == "WN") return ProcessKind::WN;
    if (name == "QN") return ProcessKind::QN;
    if (name == "RW") return ProcessKind::RW;
    if (name == "DR") return ProcessKind::DR;
    if (name == "AR") return ProcessKind::AR;
    if (name == "MA") return ProcessKind::MA;
    if (name == "ARMA") return ProcessKind::ARMA;
    throw ParseError("unknown process name '" + name + "'", pos);
}

/// Accepted parameter spellings per kind, mapped onto canonical slots.
/// GM blocks take (beta, sigma2_gm) and are converted to AR1 space.
inline void assign_named(ProcessBlock& block, ProcessKind declared, const std::string& name,
                         double value, bool pinned, double freq, std::size_t pos) {
    auto set = [&](std::size_t slot, double v) {
        Param& p = block.params.at(slot);
        if (p.has_start)
            throw ParseError("duplicate parameter '" + name + "'", pos);
        if (!p.in_bounds(v))
            throw ParseError("value " + std::to_string(v) + " out of bounds for '" + name + "'",
                             pos);
        p.value = v;
        p.has_start = true;
        p.pinned = pinned;
    };
    switch (declared) {
    case ProcessKind::GM: {
        // converted jointly once both are present; stash in natural GM slots
        if (name == "beta") {
            if (!(value > 0)) throw ParseError("beta must be positive", pos);
            block.params[0].value = value; // temporary: holds beta until finalize
            block.params[0].has_start = true;
            block.params[0].pinned = pinned;
        } else if (name == "sigma2_gm") {
            if (!(value > 0)) throw ParseError("sigma2_gm must be positive", pos);
            block.params[1].value = value;
            block.params[1].has_start = true;
            block.params[1].pinned = pinned;
        } else {
            throw ParseError("unknown GM parameter '" + name + "'", pos);
        }
        break;
    }
    case ProcessKind::AR1:
        if (name == "phi") set(0, value);
        else if (name == "sigma2") set(1, value);
        else throw ParseError("unknown AR1 parameter '" + name + "'", pos);
        break;
    case ProcessKind::WN:
        if (name == "sigma2" || name == "nu2") set(0, value);
        else throw ParseError("unknown WN parameter '" + name + "'", pos);
        break;
    case ProcessKind::QN:
        if (name == "q2") set(0, value);
        else throw ParseError("unknown QN parameter '" + name + "'", pos);
        break;
    case ProcessKind::RW:
        if (name == "gamma2") set(0, value);
        else throw ParseError("unknown RW parameter '" + name + "'", pos);
        break;
    case ProcessKind::DR:
        if (name == "omega") set(0, value);
        else throw ParseError("unknown DR parameter '" + name + "'", pos);
        break;
    default:
        throw ParseError("inline values are not supported for AR/MA/ARMA", pos);
    }
    (void)freq;
}

/// Convert GM-declared starting values (beta, sigma2_gm) to AR1 space.
inline void finalize_gm(ProcessBlock& block, double freq, std::size_t pos) {
    const bool has_beta = block.params[0].has_start;
    const bool has_s2 = block.params[1].has_start;
    if (has_beta != has_s2)
        throw ParseError("GM requires both beta and sigma2_gm when supplying values", pos);
    if (has_beta) {
        auto [phi, s2] = gm_to_ar1(block.params[0].value, block.params[1].value, freq);
        block.params[0].value = phi;
        block.params[1].value = s2;
    }
}

inline ProcessBlock parse_term(Cursor& c, double freq) {
    std::size_t name_pos = c.i;
    const std::string name = c.ident();
    const ProcessKind declared = kind_from_name(name, name_pos);
    ProcessBlock block;
    block.kind = declared == ProcessKind::GM ? ProcessKind::AR1 : declared;
    block.from_gm = declared == ProcessKind::GM;
    c.expect('(');
    if (declared == ProcessKind::AR || declared == ProcessKind::MA ||
        declared == ProcessKind::ARMA) {
        std::size_t pos = c.i;
        const int first = static_cast<int>(c.number());
        int second = 0;
        if (declared == ProcessKind::ARMA) {
            c.expect(',');
            second = static_cast<int>(c.number());
        }
        if (declared == ProcessKind::AR) block.p = first;
        else if (declared == ProcessKind::MA) block.q = first;
        else {
            block.p = first;
            block.q = second;
        }
        if (block.p < 0 || block.q < 0 || block.p + block.q < 1)
            throw ParseError("AR/MA/ARMA orders must be nonnegative with p+q >= 1", pos);
        block.params = default_params(declared, block.p, block.q);
        c.expect(')');
        return block;
    }
    block.params = default_params(declared, 0, 0);
    if (!c.accept(')')) {
        while (true) {
            std::size_t pos = c.i;
            const std::string pname = c.ident();
            c.expect('=');
            const double v = c.number();
            const bool pinned = c.accept('!');
            assign_named(block, declared, pname, v, pinned, freq, pos);
            if (c.accept(')')) break;
            c.expect(',');
        }
    }
    if (declared == ProcessKind::GM) finalize_gm(block, freq, name_pos);
    return block;
}

} // namespace detail

/// Parse a model-composition string ("3*GM()+WN()+QN()+RW()", ...).
/// A `k*` multiplier expands to k identical blocks and is legal only for
/// GM/AR1; every other process may appear at most once.
inline LatentModel parse_model(const std::string& text, double freq = 1.0) {
    if (text.empty()) throw UsageError("empty model string");
    if (!(freq > 0)) throw UsageError("sampling frequency must be positive");
    detail::Cursor c{text};
    LatentModel model;
    model.freq = freq;
    int singleton_count[9] = {0};
    while (true) {
        c.skip_ws();
        std::size_t term_pos = c.i;
        int mult = 1;
        if (std::isdigit(static_cast<unsigned char>(c.peek()))) {
            mult = static_cast<int>(c.number());
            c.expect('*');
            if (mult < 1) throw ParseError("multiplier must be >= 1", term_pos);
        }
        ProcessBlock block = detail::parse_term(c, freq);
        const ProcessKind declared = block.from_gm ? ProcessKind::GM : block.kind;
        if (mult > 1 && declared != ProcessKind::GM && declared != ProcessKind::AR1)
            throw ParseError(std::string("multiplier not allowed for ") + kind_name(declared) +
                                 " (only GM/AR1 may repeat)",
                             term_pos);
        if (detail::is_singleton(declared)) {
            int& count = singleton_count[static_cast<int>(declared)];
            if (++count > 1)
                throw ParseError(std::string(kind_name(declared)) +
                                     " can only be included once",
                                 term_pos);
        }
        for (int k = 0; k < mult; ++k) model.blocks.push_back(block);
        if (c.done()) break;
        c.expect('+');
        if (c.done()) throw ParseError("trailing '+'", c.i);
    }
    if (model.blocks.empty()) throw UsageError("model has no process blocks");
    return model;
}

// =============================================================================
// Canonical renderer
// =============================================================================

namespace detail {

inline std::string fmt_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string render_block(const ProcessBlock& b, double freq) {
    std::string out;
    if (b.from_gm) {
        out = "GM(";
        if (b.params[0].has_start) {
            auto [beta, s2gm] = ar1_to_gm(b.params[0].value, b.params[1].value, freq);
            out += "beta=" + fmt_value(beta) + (b.params[0].pinned ? "!" : "");
            out += ",sigma2_gm=" + fmt_value(s2gm) + (b.params[1].pinned ? "!" : "");
        }
        return out + ")";
    }
    if (b.kind == ProcessKind::AR) return "AR(" + std::to_string(b.p) + ")";
    if (b.kind == ProcessKind::MA) return "MA(" + std::to_string(b.q) + ")";
    if (b.kind == ProcessKind::ARMA)
        return "ARMA(" + std::to_string(b.p) + "," + std::to_string(b.q) + ")";
    out = std::string(kind_name(b.kind)) + "(";
    bool first = true;
    for (const auto& p : b.params) {
        if (!p.has_start) continue;
        if (!first) out += ",";
        out += p.name + "=" + fmt_value(p.value) + (p.pinned ? "!" : "");
        first = false;
    }
    return out + ")";
}

} // namespace detail

/// Emit the canonical grammar string; parse(render(m)) == m. Runs of
/// byte-identical GM/AR1 terms collapse to the k* shorthand.
inline std::string render_model(const LatentModel& model) {
    std::vector<std::string> terms;
    std::vector<bool> repeatable;
    for (const auto& b : model.blocks) {
        terms.push_back(detail::render_block(b, model.freq));
        repeatable.push_back(b.from_gm || b.kind == ProcessKind::AR1);
    }
    std::string out;
    for (std::size_t i = 0; i < terms.size();) {
        std::size_t run = 1;
        while (repeatable[i] && i + run < terms.size() && terms[i + run] == terms[i]) ++run;
        if (!out.empty()) out += "+";
        if (run > 1) out += std::to_string(run) + "*";
        out += terms[i];
        i += run;
    }
    return out;
}

} // namespace wavecal
