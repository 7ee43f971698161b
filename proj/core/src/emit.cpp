#include <cstdio>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "mimo/errors.hpp"
#include "mimo/harness.hpp"

namespace mimo {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        if (!std::cout) throw IoError("failed writing to stdout");
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IoError("error while writing '" + path + "'");
}

nlohmann::json config_json(const NetworkConfig& config) {
    return {
        {"L", config.L},
        {"K", config.K},
        {"M", config.M},
        {"tau_c", config.tau_c},
        {"r", config.r},
        {"rho_db", config.rho_db},
        {"rho_tr_factor", config.rho_tr_factor},
        {"cell_side_km", config.cell_side_km},
        {"shadow_var_db2", config.shadow_param_db2},
        {"min_dist_m", config.min_dist_m},
        {"seed", config.seed},
    };
}

nlohmann::json drop_json(const DropAggregates& agg, bool has_mc) {
    nlohmann::json out = {
        {"sum_se_detequiv", agg.sum_se_de},
        {"term1_detequiv", agg.term1_de},
        {"term2_detequiv", agg.term2_de},
    };
    if (has_mc) {
        out["sum_se_mc"] = agg.sum_se_mc;
        out["sum_se_mc_first_only"] = agg.sum_se_mc_first_only;
        out["term1_mc"] = agg.term1_mc;
        out["term2_mc"] = agg.term2_mc;
    }
    return out;
}

} // namespace

std::string experiment_csv(const ExperimentResult& result) {
    std::string out;
    if (result.has_mc) {
        out = "drop,cell,ue,blocks,mean_sinr_mc,stderr_sinr_mc,se_mc,se_mc_first_only,"
              "first_term_mc,loss_term_mc,gamma_bar,first_term_bar,loss_term_bar,se_detequiv\n";
        for (const UeResult& row : result.ue) {
            out += std::to_string(row.drop) + ',' + std::to_string(row.cell) + ',' +
                   std::to_string(row.ue) + ',' + std::to_string(result.n_blocks) + ',' +
                   fmt(row.mean_sinr_mc) + ',' + fmt(row.stderr_sinr_mc) + ',' + fmt(row.se_mc) +
                   ',' + fmt(row.se_mc_first_only) + ',' + fmt(row.first_mc) + ',' +
                   fmt(row.loss_mc) + ',' + fmt(row.gamma_bar) + ',' + fmt(row.first_bar) + ',' +
                   fmt(row.loss_bar) + ',' + fmt(row.se_de) + '\n';
        }
    } else {
        out = "drop,cell,ue,gamma_bar,first_term_bar,loss_term_bar,se_detequiv\n";
        for (const UeResult& row : result.ue) {
            out += std::to_string(row.drop) + ',' + std::to_string(row.cell) + ',' +
                   std::to_string(row.ue) + ',' + fmt(row.gamma_bar) + ',' + fmt(row.first_bar) +
                   ',' + fmt(row.loss_bar) + ',' + fmt(row.se_de) + '\n';
        }
    }
    return out;
}

std::string experiment_json(const ExperimentResult& result) {
    nlohmann::json ue = nlohmann::json::array();
    for (const UeResult& row : result.ue) {
        nlohmann::json entry = {
            {"drop", row.drop},
            {"cell", row.cell},
            {"ue", row.ue},
            {"gamma_bar", row.gamma_bar},
            {"first_term_bar", row.first_bar},
            {"loss_term_bar", row.loss_bar},
            {"se_detequiv", row.se_de},
        };
        if (result.has_mc) {
            entry["mean_sinr_mc"] = row.mean_sinr_mc;
            entry["stderr_sinr_mc"] = row.stderr_sinr_mc;
            entry["se_mc"] = row.se_mc;
            entry["se_mc_first_only"] = row.se_mc_first_only;
            entry["first_term_mc"] = row.first_mc;
            entry["loss_term_mc"] = row.loss_mc;
        }
        ue.push_back(std::move(entry));
    }
    nlohmann::json drops = nlohmann::json::array();
    for (const DropAggregates& agg : result.drops) drops.push_back(drop_json(agg, result.has_mc));

    nlohmann::json doc = {
        {"config", config_json(result.config)},
        {"n_blocks", result.n_blocks},
        {"n_drops", result.n_drops},
        {"ue", std::move(ue)},
        {"per_drop", std::move(drops)},
        {"aggregates", drop_json(result.mean, result.has_mc)},
    };
    if (result.has_mc) doc["max_rel_stderr"] = result.max_rel_stderr;
    return doc.dump(2) + "\n";
}

std::string fig1_csv(const std::vector<SweepPoint>& points) {
    std::string out = "ratio,K,M,sumSE_mc,sumSE_detequiv,sumSE_mc_firstterm_only\n";
    for (const Fig1Row& row : fig1_rows(points)) {
        out += fmt(row.ratio) + ',' + std::to_string(row.K) + ',' + std::to_string(row.M) + ',' +
               fmt(row.sum_se_mc) + ',' + fmt(row.sum_se_de) + ',' + fmt(row.sum_se_mc_first_only) +
               '\n';
    }
    return out;
}

std::string fig2_csv(const std::vector<SweepPoint>& points) {
    std::string out = "ratio,K,term1_db_mc,term2_db_mc,term1_db_detequiv,term2_db_detequiv\n";
    for (const Fig2Row& row : fig2_rows(points)) {
        out += fmt(row.ratio) + ',' + std::to_string(row.K) + ',' + fmt(row.term1_db_mc) + ',' +
               fmt(row.term2_db_mc) + ',' + fmt(row.term1_db_de) + ',' + fmt(row.term2_db_de) +
               '\n';
    }
    return out;
}

std::string sweep_json(const std::vector<SweepPoint>& points) {
    nlohmann::json rows = nlohmann::json::array();
    for (const SweepPoint& p : points) {
        nlohmann::json per_drop = nlohmann::json::array();
        for (const DropAggregates& agg : p.result.drops) {
            per_drop.push_back(drop_json(agg, p.result.has_mc));
        }
        rows.push_back({
            {"ratio", p.ratio},
            {"K", p.K},
            {"M", p.M},
            {"n_blocks", p.result.n_blocks},
            {"n_drops", p.result.n_drops},
            {"aggregates", drop_json(p.result.mean, p.result.has_mc)},
            {"per_drop", std::move(per_drop)},
        });
    }
    return nlohmann::json{{"rows", std::move(rows)}}.dump(2) + "\n";
}

void emit(const ExperimentResult& result, const std::string& path, OutputFormat format) {
    write_text(format == OutputFormat::csv ? experiment_csv(result) : experiment_json(result),
               path);
}

void emit_fig1(const std::vector<SweepPoint>& points, const std::string& path,
               OutputFormat format) {
    write_text(format == OutputFormat::csv ? fig1_csv(points) : sweep_json(points), path);
}

void emit_fig2(const std::vector<SweepPoint>& points, const std::string& path,
               OutputFormat format) {
    write_text(format == OutputFormat::csv ? fig2_csv(points) : sweep_json(points), path);
}

} // namespace mimo
