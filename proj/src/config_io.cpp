#include "simalign/config_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "text_util.hpp"

namespace simalign {

using detail::parse_double;
using detail::parse_int;
using detail::split;
using detail::trim;

Configuration read_configuration_csv(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError(source, 1, "missing header");
    ++lineno;
    const auto header = split(line);
    const bool header_ok = (header.size() == 5 || header.size() == 6) && header[0] == "id" && header[1] == "seq" &&
                           header[2] == "group" && header[3] == "x" && header[4] == "y" &&
                           (header.size() == 5 || header[5] == "z");
    if (!header_ok) throw ParseError(source, lineno, "expected header id,seq,group,x,y[,z]");
    const int dim = static_cast<int>(header.size()) - 3;

    std::string id;
    std::vector<std::vector<double>> rows;
    std::vector<std::optional<long long>> seqs, groups;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split(line);
        if (fields.size() != header.size()) {
            throw ParseError(source, lineno, "expected " + std::to_string(header.size()) + " fields");
        }
        if (rows.empty()) {
            id = std::string(fields[0]);
        } else if (fields[0] != id) {
            throw ParseError(source, lineno, "id changes within one configuration");
        }
        std::optional<long long> seq, group;
        if (!fields[1].empty()) {
            seq = parse_int(fields[1]);
            if (!seq) throw ParseError(source, lineno, "bad seq value");
        }
        if (!fields[2].empty()) {
            group = parse_int(fields[2]);
            if (!group || (*group != 0 && *group != 1)) throw ParseError(source, lineno, "group must be 0, 1 or empty");
        }
        std::vector<double> coords;
        for (int c = 0; c < dim; ++c) {
            const auto v = parse_double(fields[3 + c]);
            if (!v) throw ParseError(source, lineno, "bad coordinate");
            coords.push_back(*v);
        }
        rows.push_back(std::move(coords));
        seqs.push_back(seq);
        groups.push_back(group);
    }

    PointMatrix<double> pts(static_cast<Eigen::Index>(rows.size()), dim);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (int c = 0; c < dim; ++c) pts(static_cast<Eigen::Index>(i), c) = rows[i][c];
    }

    auto collect = [&](const std::vector<std::optional<long long>>& col, const char* name) {
        std::optional<std::vector<int>> out;
        std::size_t present = 0;
        for (const auto& v : col) present += v.has_value();
        if (present == 0) return out;
        if (present != col.size()) {
            throw ParseError(source, lineno, std::string(name) + " must be given for every row or for none");
        }
        out.emplace();
        for (const auto& v : col) out->push_back(static_cast<int>(*v));
        return out;
    };
    auto seq = collect(seqs, "seq");
    auto group = collect(groups, "group");
    try {
        return Configuration(id, std::move(pts), std::move(seq), std::move(group));
    } catch (const InvalidArgument& e) {
        throw ParseError(source, lineno, e.what());
    }
}

Configuration read_configuration_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open configuration file: " + path.string());
    return read_configuration_csv(in, path.string());
}

void write_configuration_csv(std::ostream& out, const Configuration& cfg) {
    out << "id,seq,group,x,y";
    if (cfg.dim() == 3) out << ",z";
    out << '\n';
    for (int i = 0; i < cfg.size(); ++i) {
        out << cfg.id() << ',';
        if (cfg.seq()) out << (*cfg.seq())[i];
        out << ',';
        if (cfg.group()) out << (*cfg.group())[i];
        for (int c = 0; c < cfg.dim(); ++c) out << ',' << detail::format_double(cfg.points()(i, c));
        out << '\n';
    }
}

void write_configuration_csv(const std::filesystem::path& path, const Configuration& cfg) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write configuration file: " + path.string());
    write_configuration_csv(out, cfg);
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace simalign
