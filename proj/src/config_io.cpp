#include "neqt/config_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace neqt {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg)
{
    throw ConfigError((path.empty() ? std::string("/") : path) + ": " + msg);
}

double number(const json& v, const std::string& path)
{
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

cplx complex_entry(const json& v, const std::string& path)
{
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2) return {number(v[0], path + "/0"), number(v[1], path + "/1")};
    fail(path, "expected a number or a [re, im] pair");
}

const json& member(const json& obj, const char* key, const std::string& path)
{
    if (!obj.contains(key)) fail(path + "/" + key, "missing");
    return obj.at(key);
}

CMatrix complex_matrix(const json& v, const std::string& path)
{
    if (!v.is_array() || v.empty()) fail(path, "expected a nonempty array of rows");
    const auto rows = static_cast<Eigen::Index>(v.size());
    Eigen::Index cols = -1;
    CMatrix m;
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto rp = path + "/" + std::to_string(i);
        const json& row = v[i];
        if (!row.is_array()) fail(rp, "expected an array");
        if (cols < 0) {
            cols = static_cast<Eigen::Index>(row.size());
            m.resize(rows, cols);
        } else if (static_cast<Eigen::Index>(row.size()) != cols) {
            fail(rp, "row length differs from row 0");
        }
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = complex_entry(row[j], rp + "/" + std::to_string(j));
    }
    return m;
}

RMatrix real_matrix(const json& v, const std::string& path)
{
    if (!v.is_array()) fail(path, "expected an array of rows");
    const auto rows = static_cast<Eigen::Index>(v.size());
    RMatrix m(rows, rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto rp = path + "/" + std::to_string(i);
        if (!v[i].is_array() || static_cast<Eigen::Index>(v[i].size()) != rows) fail(rp, "expected a square matrix row");
        for (Eigen::Index j = 0; j < rows; ++j) m(i, j) = number(v[i][j], rp + "/" + std::to_string(j));
    }
    return m;
}

CVector complex_vector(const json& v, const std::string& path)
{
    if (!v.is_array()) fail(path, "expected an array");
    CVector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = complex_entry(v[i], path + "/" + std::to_string(i));
    return out;
}

json complex_to_json(const cplx& z)
{
    if (z.imag() == 0.0) return z.real();
    return json::array({z.real(), z.imag()});
}

} // namespace

SystemConfig config_from_json(const json& doc)
{
    if (!doc.is_object()) fail("", "expected a JSON object");
    SystemConfig cfg;

    const json& sample = member(doc, "sample", "");
    if (!sample.is_object()) fail("/sample", "expected an object");
    cfg.sample.hamiltonian = complex_matrix(member(sample, "h_S", "/sample"), "/sample/h_S");
    const auto n = cfg.sample.hamiltonian.rows();
    if (sample.contains("w")) {
        cfg.sample.pair_potential = real_matrix(sample.at("w"), "/sample/w");
        if (cfg.sample.pair_potential.rows() != n) fail("/sample/w", "size differs from h_S");
    } else {
        cfg.sample.pair_potential = RMatrix::Zero(n, n);
    }
    if (sample.contains("xi")) cfg.sample.interaction = number(sample.at("xi"), "/sample/xi");

    cfg.hopping = number(member(doc, "c_R", ""), "/c_R");

    if (doc.contains("scenario")) {
        const json& s = doc.at("scenario");
        if (s == "partitioned") {
            cfg.scenario = Scenario::partitioned;
        } else if (s == "partition_free") {
            cfg.scenario = Scenario::partition_free;
        } else {
            fail("/scenario", "expected \"partitioned\" or \"partition_free\"");
        }
    }
    const bool pf = cfg.scenario == Scenario::partition_free;
    if (doc.contains("beta")) cfg.beta_eq = number(doc.at("beta"), "/beta");
    if (doc.contains("mu")) cfg.mu_eq = number(doc.at("mu"), "/mu");
    if (pf && !doc.contains("beta")) fail("/beta", "missing (required for partition_free)");

    const json& leads = member(doc, "leads", "");
    if (!leads.is_array()) fail("/leads", "expected an array");
    for (std::size_t j = 0; j < leads.size(); ++j) {
        const auto lp = "/leads/" + std::to_string(j);
        const json& l = leads[j];
        if (!l.is_object()) fail(lp, "expected an object");
        LeadSpec lead;
        lead.coupling = number(member(l, "d", lp), lp + "/d");
        lead.contact = complex_vector(member(l, "phi", lp), lp + "/phi");
        if (lead.contact.size() != n) fail(lp + "/phi", "length differs from the number of sample sites");
        lead.bias = l.contains("v") ? number(l.at("v"), lp + "/v") : 0.0;
        if (pf) {
            lead.beta = l.contains("beta") ? number(l.at("beta"), lp + "/beta") : cfg.beta_eq;
            lead.mu = l.contains("mu") ? number(l.at("mu"), lp + "/mu") : cfg.mu_eq;
        } else {
            lead.beta = number(member(l, "beta", lp), lp + "/beta");
            lead.mu = number(member(l, "mu", lp), lp + "/mu");
        }
        cfg.leads.push_back(lead);
    }
    return cfg;
}

SystemConfig parse_config(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("JSON parse error: ") + e.what());
    }
    return config_from_json(doc);
}

SystemConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

json config_to_json(const SystemConfig& config)
{
    json doc;
    json h = json::array();
    for (Eigen::Index i = 0; i < config.sample.hamiltonian.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < config.sample.hamiltonian.cols(); ++j)
            row.push_back(complex_to_json(config.sample.hamiltonian(i, j)));
        h.push_back(row);
    }
    json w = json::array();
    for (Eigen::Index i = 0; i < config.sample.pair_potential.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < config.sample.pair_potential.cols(); ++j) row.push_back(config.sample.pair_potential(i, j));
        w.push_back(row);
    }
    doc["sample"] = {{"h_S", h}, {"w", w}, {"xi", config.sample.interaction}};
    doc["c_R"] = config.hopping;
    doc["scenario"] = config.scenario == Scenario::partitioned ? "partitioned" : "partition_free";
    if (config.scenario == Scenario::partition_free) {
        doc["beta"] = config.beta_eq;
        doc["mu"] = config.mu_eq;
    }
    json leads = json::array();
    for (const auto& lead : config.leads) {
        json phi = json::array();
        for (Eigen::Index i = 0; i < lead.contact.size(); ++i) phi.push_back(complex_to_json(lead.contact(i)));
        leads.push_back({{"d", lead.coupling}, {"phi", phi}, {"v", lead.bias}, {"beta", lead.beta}, {"mu", lead.mu}});
    }
    doc["leads"] = leads;
    return doc;
}

std::uint64_t config_hash(const SystemConfig& config)
{
    const std::string text = config_to_json(config).dump();
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex_hash(std::uint64_t h)
{
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

} // namespace neqt
