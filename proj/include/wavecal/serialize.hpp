// CSV and JSON serialization of analysis results. JSON documents carry a
// "schema" field naming the versioned schema they conform to.
#pragma once

#include <wavecal/estimator.hpp>
#include <wavecal/selection.hpp>
#include <wavecal/wvar.hpp>

#include <cstdio>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

namespace wavecal {

inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ===== variance series =====

inline void write_csv(std::ostream& os, const WvSeries& s) {
    os << "scale,estimate,ci_lo,ci_hi,n\r\n";
    for (int j = 0; j < s.levels(); ++j)
        os << fmt_g17(s.tau[j]) << ',' << fmt_g17(s.est[j]) << ',' << fmt_g17(s.lo[j]) << ','
           << fmt_g17(s.hi[j]) << ',' << s.m[j] << "\r\n";
}

inline void write_csv(std::ostream& os, const AvSeries& s) {
    os << "scale,estimate,ci_lo,ci_hi,n\r\n";
    for (std::size_t j = 0; j < s.m.size(); ++j)
        os << s.m[j] << ',' << fmt_g17(s.est[j]) << ',' << fmt_g17(s.lo[j]) << ','
           << fmt_g17(s.hi[j]) << ',' << s.n[j] << "\r\n";
}

inline void write_csv(std::ostream& os, const HvSeries& s) {
    os << "scale,estimate,ci_lo,ci_hi,n\r\n";
    for (std::size_t j = 0; j < s.m.size(); ++j)
        os << s.m[j] << ',' << fmt_g17(s.est[j]) << ',' << fmt_g17(s.lo[j]) << ','
           << fmt_g17(s.hi[j]) << ',' << s.n[j] << "\r\n";
}

inline nlohmann::json to_json(const WvSeries& s) {
    nlohmann::json j;
    j["schema"] = "wavecal.wv/1";
    j["transform"] = s.transform == Transform::MODWT ? "modwt" : "dwt";
    j["robust"] = s.robust;
    if (s.robust) j["efficiency"] = s.efficiency;
    j["alpha"] = s.alpha;
    j["scales"] = s.tau;
    j["estimates"] = s.est;
    j["ci_lo"] = s.lo;
    j["ci_hi"] = s.hi;
    j["n_coefficients"] = s.m;
    j["edf"] = s.edf;
    return j;
}

inline nlohmann::json to_json(const AvSeries& s) {
    nlohmann::json j;
    j["schema"] = "wavecal.av/1";
    j["variant"] = s.variant == AvVariant::Modified ? "modified" : "traditional";
    j["overlapped"] = s.overlapped;
    j["scales"] = s.m;
    j["estimates"] = s.est;
    j["ci_lo"] = s.lo;
    j["ci_hi"] = s.hi;
    j["n_clusters"] = s.n;
    return j;
}

inline nlohmann::json to_json(const HvSeries& s) {
    nlohmann::json j;
    j["schema"] = "wavecal.hv/1";
    j["scales"] = s.m;
    j["estimates"] = s.est;
    j["ci_lo"] = s.lo;
    j["ci_hi"] = s.hi;
    j["n_clusters"] = s.n;
    return j;
}

// ===== fit results =====

inline nlohmann::json to_json(const FitResult& f) {
    nlohmann::json j;
    j["schema"] = "wavecal.fit/1";
    j["model"] = render_model(f.model);
    j["objective"] = f.objective;
    j["converged"] = f.converged;
    j["seed"] = f.seed;
    j["wall_seconds"] = f.wall_seconds;
    nlohmann::json params = nlohmann::json::array();
    std::vector<std::string> labels = f.model.param_labels();
    std::vector<double> theta = f.model.theta_labeled();
    for (std::size_t k = 0; k < theta.size(); ++k) {
        nlohmann::json p;
        p["name"] = labels[k];
        p["value"] = theta[k];
        if (k < f.se.size()) {
            p["se"] = f.se[k];
            p["ci_lo"] = f.ci_lo[k];
            p["ci_hi"] = f.ci_hi[k];
            p["ci_truncated"] = static_cast<bool>(f.ci_truncated[k]);
        }
        params.push_back(std::move(p));
    }
    j["parameters"] = std::move(params);
    j["wv"] = to_json(f.wv);
    j["implied_wv"] = f.implied;
    if (f.has_gof) {
        j["gof"] = {{"statistic", f.gof.stat}, {"dof", f.gof.dof}, {"p_value", f.gof.p_value}};
    }
    return j;
}

inline void write_csv(std::ostream& os, const FitResult& f) {
    os << "parameter,value,se,ci_lo,ci_hi,ci_truncated\r\n";
    std::vector<std::string> labels = f.model.param_labels();
    std::vector<double> theta = f.model.theta_labeled();
    for (std::size_t k = 0; k < theta.size(); ++k) {
        os << labels[k] << ',' << fmt_g17(theta[k]);
        if (k < f.se.size())
            os << ',' << fmt_g17(f.se[k]) << ',' << fmt_g17(f.ci_lo[k]) << ','
               << fmt_g17(f.ci_hi[k]) << ',' << (f.ci_truncated[k] ? 1 : 0);
        else
            os << ",,,,";
        os << "\r\n";
    }
}

// ===== ranking tables =====

inline nlohmann::json to_json(const RankingTable& t) {
    nlohmann::json j;
    j["schema"] = "wavecal.rank/1";
    j["method"] = t.method == WicMethod::Fast ? "fast" : "bootstrap";
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : t.rows) {
        nlohmann::json row;
        row["model"] = r.model_string;
        row["failed"] = r.failed;
        if (r.failed) {
            row["error"] = r.error;
        } else {
            row["wic"] = r.wic;
            row["apparent_loss"] = r.A;
            row["optimism"] = r.B;
            row["n_free"] = r.n_free;
            if (r.gof_p >= 0.0) row["gof_p"] = r.gof_p;
        }
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    return j;
}

inline void write_csv(std::ostream& os, const RankingTable& t) {
    os << "rank,model,wic,apparent_loss,optimism,n_free,gof_p,failed\r\n";
    int rank = 0;
    for (const auto& r : t.rows) {
        ++rank;
        os << rank << ",\"" << r.model_string << "\",";
        if (r.failed) {
            os << ",,," << r.n_free << ",,1\r\n";
        } else {
            os << fmt_g17(r.wic) << ',' << fmt_g17(r.A) << ',' << fmt_g17(r.B) << ',' << r.n_free
               << ',' << (r.gof_p >= 0.0 ? fmt_g17(r.gof_p) : std::string()) << ",0\r\n";
        }
    }
}

inline void print_table(std::ostream& os, const RankingTable& t) {
    os << "rank  wic           A             B             p(gof)   model\n";
    int rank = 0;
    char buf[160];
    for (const auto& r : t.rows) {
        ++rank;
        if (r.failed) {
            std::snprintf(buf, sizeof buf, "%-5d %-42s %-8s %s\n", rank, "(fit failed)", "",
                          r.model_string.c_str());
            os << buf;
            continue;
        }
        std::snprintf(buf, sizeof buf, "%-5d %-13.6g %-13.6g %-13.6g %-8.4g %s\n", rank, r.wic, r.A,
                      r.B, r.gof_p, r.model_string.c_str());
        os << buf;
    }
}

} // namespace wavecal
