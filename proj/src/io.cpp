#include "fragsim/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace fragsim {

namespace {

std::ofstream open_out(const std::string& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file);
    out << std::setprecision(17);
    return out;
}

Json eta_points(const std::vector<EtaPoint>& pts) {
    Json a = Json::array();
    for (const auto& p : pts) a.push_back({p.m, p.value});
    return a;
}

}  // namespace

void write_text(const std::string& file, const std::string& text) {
    auto out = open_out(file);
    out << text;
}

std::string read_text(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot read " + file);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_path(const SampledPath& path, const std::string& csv_file) {
    auto out = open_out(csv_file);
    out << "x,value\n";
    for (std::size_t k = 0; k <= path.n(); ++k) out << path.x(k) << ',' << path[k] << '\n';
    Json meta{{"beta", path.meta().beta}, {"kind", to_string(path.meta().kind)}, {"t0", path.t0()},
              {"dt", path.dt()},          {"n", path.n()},                      {"seed", path.meta().seed}};
    write_text(csv_file + ".json", meta.dump(2) + "\n");
}

SampledPath read_path(const std::string& csv_file) {
    const Json meta = Json::parse(read_text(csv_file + ".json"));
    std::ifstream in(csv_file);
    if (!in) throw std::runtime_error("cannot read " + csv_file);
    std::string line;
    std::getline(in, line);
    if (line != "x,value") throw std::runtime_error(csv_file + ": expected header x,value");
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error(csv_file + ": malformed row");
        values.push_back(std::stod(line.substr(comma + 1)));
    }
    const std::size_t n = meta.at("n").get<std::size_t>();
    if (values.size() != n + 1) throw std::runtime_error(csv_file + ": row count does not match sidecar n");
    PathMeta pm;
    pm.beta = meta.at("beta").get<double>();
    pm.kind = path_kind_from_string(meta.at("kind").get<std::string>());
    pm.seed = meta.at("seed").get<std::uint64_t>();
    return SampledPath(meta.at("t0").get<double>(), meta.at("dt").get<double>(), std::move(values), pm);
}

Json to_json(const OpenSet& set) {
    Json a = Json::array();
    for (const auto& iv : set.intervals) a.push_back({iv.a, iv.b});
    return a;
}

Json to_json(const RankedMasses& masses) { return Json(masses.masses); }

Json snapshot_json(double level, const OpenSet& set) {
    return Json{{"level", level}, {"intervals", to_json(set)}, {"ranked", to_json(ranked_lengths(set))}};
}

void write_h_infinity(const HInfinitySample& sample, const std::string& csv_file) {
    write_path(sample.path, csv_file);
    Json atoms = Json::array();
    for (const auto& a : sample.atoms) atoms.push_back({{"v", a.v}, {"r", a.r}, {"t", a.t}});
    Json j{{"eta_minus", eta_points(sample.eta_minus)},
           {"eta_plus", eta_points(sample.eta_plus)},
           {"truncation", {{"m_cap", sample.truncation.m_cap}, {"r_min", sample.truncation.r_min}}},
           {"degenerate", sample.degenerate},
           {"atoms", atoms}};
    write_text(csv_file + ".eta.json", j.dump(2) + "\n");
}

void write_phi_table(const PhiTable& table, const std::string& csv_file) {
    auto out = open_out(csv_file);
    out << "lambda,phi\n";
    for (std::size_t i = 0; i < table.lambdas.size(); ++i) out << table.lambdas[i] << ',' << table.values[i] << '\n';
    Json meta{{"alpha", table.alpha}, {"residual", table.residual}, {"iterations", table.iterations}};
    write_text(csv_file + ".json", meta.dump(2) + "\n");
}

}  // namespace fragsim
