#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "seqmodel/mps.hpp"

namespace seqmodel {

namespace {

constexpr const char* kFormatTag = "mps-seqmodel/1";

std::string render_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void save_mps(const Mps& m, const std::string& path) {
    validate_chain(m);
    for (const SiteTensor& t : m.sites)
        for (double v : t.data)
            if (!std::isfinite(v)) throw contract_error("save_mps: non-finite tensor entry");
    std::ofstream out(path);
    if (!out) throw io_error("cannot write model file: " + path);

    out << "{\n";
    out << "  \"format\": \"" << kFormatTag << "\",\n";
    out << "  \"length\": " << m.length() << ",\n";
    out << "  \"phys_dim\": " << m.phys_dim() << ",\n";
    out << "  \"sites\": [\n";
    for (int k = 0; k < m.length(); ++k) {
        const SiteTensor& t = m.sites[k];
        out << "    {\"bond_in\": " << t.bond_in << ", \"phys\": " << t.phys
            << ", \"bond_out\": " << t.bond_out << ", \"data\": [";
        for (std::size_t i = 0; i < t.data.size(); ++i) {
            if (i) out << ", ";
            out << render_double(t.data[i]);
        }
        out << "]}" << (k + 1 < m.length() ? "," : "") << "\n";
    }
    out << "  ]\n}\n";
    if (!out) throw io_error("failed while writing model file: " + path);
}

Mps load_mps(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open model file: " + path);

    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw io_error("malformed model file " + path + ": " + e.what());
    }

    try {
        if (j.at("format").get<std::string>() != kFormatTag)
            throw io_error("model file " + path + " has unsupported format tag");
        const int n = j.at("length").get<int>();
        const int d = j.at("phys_dim").get<int>();
        const auto& sites = j.at("sites");
        if (!sites.is_array() || static_cast<int>(sites.size()) != n)
            throw io_error("model file " + path + " has inconsistent site count");

        Mps m;
        m.sites.reserve(n);
        for (const auto& js : sites) {
            SiteTensor t(js.at("bond_in").get<int>(), js.at("phys").get<int>(),
                         js.at("bond_out").get<int>());
            if (t.phys != d) throw io_error("model file " + path + " has inconsistent physical dims");
            const auto& data = js.at("data");
            if (data.size() != t.data.size())
                throw io_error("model file " + path + " has a site with wrong entry count");
            for (std::size_t i = 0; i < t.data.size(); ++i) t.data[i] = data[i].get<double>();
            m.sites.push_back(std::move(t));
        }
        validate_chain(m);
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw io_error("malformed model file " + path + ": " + e.what());
    }
}

}  // namespace seqmodel
