#include "simalign/trace_io.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "text_util.hpp"

namespace simalign {

using detail::format_double;
using detail::parse_double;
using detail::parse_int;
using detail::split;
using detail::trim;

namespace {

std::vector<std::string> column_names(int d, int g) {
    std::vector<std::string> cols{"iteration", "log_post", "L"};
    for (int i = 0; i < g; ++i) cols.push_back("c" + std::to_string(i));
    for (int i = 0; i < g; ++i) cols.push_back("sigma2_" + std::to_string(i));
    for (int i = 0; i < g; ++i) {
        for (int a = 0; a < d; ++a) cols.push_back("tau" + std::to_string(i) + "_" + std::to_string(a + 1));
    }
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) cols.push_back("a" + std::to_string(r + 1) + std::to_string(c + 1));
    }
    cols.insert(cols.end(), {"pairs", "labels_x", "labels_y"});
    return cols;
}

std::string counter_text(const MoveCounter& c) { return std::to_string(c.accepted) + "/" + std::to_string(c.proposed); }

std::string labels_text(const std::vector<int>& labels) {
    std::string s;
    for (int l : labels) s.push_back(static_cast<char>('0' + l));
    return s;
}

}  // namespace

void write_trace(std::ostream& out, const ChainOutput& output) {
    const int d = output.dim;
    const int g = output.n_scales;
    out << "# simalign-trace dim=" << d << " m=" << output.m << " n=" << output.n << " scales=" << g
        << " acc_matching=" << counter_text(output.acceptance.matching)
        << " acc_rotation=" << counter_text(output.acceptance.rotation)
        << " acc_scale=" << counter_text(output.acceptance.scale)
        << " acc_labels=" << counter_text(output.acceptance.labels) << "\n";
    const auto cols = column_names(d, g);
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << "\n";
    for (const auto& s : output.samples) {
        out << s.iteration << ',' << format_double(s.log_posterior) << ',' << s.pairs.size();
        for (double c : s.scales) out << ',' << format_double(c);
        for (double v : s.noise_vars) out << ',' << format_double(v);
        for (const auto& t : s.translation) {
            for (Eigen::Index a = 0; a < t.size(); ++a) out << ',' << format_double(t(a));
        }
        for (int r = 0; r < d; ++r) {
            for (int c = 0; c < d; ++c) out << ',' << format_double(s.rotation(r, c));
        }
        out << ',';
        for (std::size_t i = 0; i < s.pairs.size(); ++i) {
            out << (i ? ";" : "") << s.pairs[i].first + 1 << ':' << s.pairs[i].second + 1;
        }
        out << ',' << labels_text(s.labels_x) << ',' << labels_text(s.labels_y) << "\n";
    }
}

void write_trace(const std::filesystem::path& path, const ChainOutput& output) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path.string());
    write_trace(f, output);
    if (!f) throw IoError("error while writing " + path.string());
}

ChainOutput read_trace(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(in, line)) throw ParseError(source, 1, "empty trace");
    std::istringstream meta(line);
    std::string token;
    meta >> token;
    if (token != "#") throw ParseError(source, 1, "missing trace header comment");
    meta >> token;
    if (token != "simalign-trace") throw ParseError(source, 1, "not a simalign trace");
    std::map<std::string, std::string> kv;
    while (meta >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) throw ParseError(source, 1, "bad header field '" + token + "'");
        kv[token.substr(0, eq)] = token.substr(eq + 1);
    }
    auto int_field = [&](const char* key) {
        const auto it = kv.find(key);
        if (it == kv.end()) throw ParseError(source, 1, std::string("header lacks ") + key);
        const auto v = parse_int(it->second);
        if (!v) throw ParseError(source, 1, std::string("bad header value for ") + key);
        return static_cast<int>(*v);
    };
    auto counter_field = [&](const char* key) {
        MoveCounter c;
        const auto it = kv.find(key);
        if (it == kv.end()) return c;
        const auto parts = split(it->second, '/');
        const auto a = parts.size() == 2 ? parse_int(parts[0]) : std::nullopt;
        const auto p = parts.size() == 2 ? parse_int(parts[1]) : std::nullopt;
        if (!a || !p) throw ParseError(source, 1, std::string("bad counter ") + key);
        c.accepted = static_cast<long>(*a);
        c.proposed = static_cast<long>(*p);
        return c;
    };

    ChainOutput out;
    out.dim = int_field("dim");
    out.m = int_field("m");
    out.n = int_field("n");
    out.n_scales = int_field("scales");
    if ((out.dim != 2 && out.dim != 3) || (out.n_scales != 1 && out.n_scales != 2) || out.m < 0 || out.n < 0) {
        throw ParseError(source, 1, "header describes an unsupported problem");
    }
    out.acceptance.matching = counter_field("acc_matching");
    out.acceptance.rotation = counter_field("acc_rotation");
    out.acceptance.scale = counter_field("acc_scale");
    out.acceptance.labels = counter_field("acc_labels");

    const auto cols = column_names(out.dim, out.n_scales);
    if (!std::getline(in, line)) throw ParseError(source, 2, "missing column header");
    ++lineno;
    const auto header = split(line);
    if (header.size() != cols.size()) throw ParseError(source, lineno, "unexpected column header");
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (header[i] != cols[i]) throw ParseError(source, lineno, "unexpected column '" + std::string(header[i]) + "'");
    }

    const int d = out.dim;
    const int g = out.n_scales;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto f = split(line);
        if (f.size() != cols.size()) throw ParseError(source, lineno, "wrong number of fields");
        std::size_t pos = 0;
        auto num = [&]() {
            const auto v = parse_double(f[pos]);
            if (!v) throw ParseError(source, lineno, "bad number in column " + cols[pos]);
            ++pos;
            return *v;
        };
        Sample s;
        const auto it = parse_int(f[pos++]);
        if (!it) throw ParseError(source, lineno, "bad iteration");
        s.iteration = static_cast<long>(*it);
        s.log_posterior = num();
        const auto L = parse_int(f[pos++]);
        if (!L) throw ParseError(source, lineno, "bad L");
        for (int i = 0; i < g; ++i) s.scales.push_back(num());
        for (int i = 0; i < g; ++i) s.noise_vars.push_back(num());
        for (int i = 0; i < g; ++i) {
            Vector t(d);
            for (int a = 0; a < d; ++a) t(a) = num();
            s.translation.push_back(std::move(t));
        }
        s.rotation.resize(d, d);
        for (int r = 0; r < d; ++r) {
            for (int c = 0; c < d; ++c) s.rotation(r, c) = num();
        }
        if (!f[pos].empty()) {
            for (const auto pair : split(f[pos], ';')) {
                const auto jk = split(pair, ':');
                const auto j = jk.size() == 2 ? parse_int(jk[0]) : std::nullopt;
                const auto k = jk.size() == 2 ? parse_int(jk[1]) : std::nullopt;
                if (!j || !k || *j < 1 || *j > out.m || *k < 1 || *k > out.n) {
                    throw ParseError(source, lineno, "bad pair '" + std::string(pair) + "'");
                }
                s.pairs.emplace_back(static_cast<int>(*j - 1), static_cast<int>(*k - 1));
            }
        }
        ++pos;
        if (static_cast<long long>(s.pairs.size()) != *L) throw ParseError(source, lineno, "L disagrees with pairs");
        for (int which = 0; which < 2; ++which) {
            auto& labels = which == 0 ? s.labels_x : s.labels_y;
            const std::size_t expect = g == 2 ? static_cast<std::size_t>(which == 0 ? out.m : out.n) : 0;
            const auto text = f[pos++];
            if (text.size() != expect) throw ParseError(source, lineno, "label string has the wrong length");
            for (char ch : text) {
                if (ch != '0' && ch != '1') throw ParseError(source, lineno, "labels must be 0 or 1");
                labels.push_back(ch - '0');
            }
        }
        out.samples.push_back(std::move(s));
    }
    return out;
}

ChainOutput read_trace(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path.string());
    return read_trace(f, path.string());
}

nlohmann::json summary_to_json(const PosteriorSummary& summary) {
    using nlohmann::json;
    json j;
    j["n_samples"] = summary.n_samples;
    json matches = json::array();
    for (const auto& p : summary.matches) {
        json e{{"j", p.j}, {"k", p.k}, {"prob", p.prob}};
        e["f0"] = p.f0 ? json(*p.f0) : json(nullptr);
        matches.push_back(std::move(e));
    }
    j["matches"] = std::move(matches);
    json scales = json::array();
    for (const auto& s : summary.scales) {
        scales.push_back({{"median", s.median}, {"lo", s.lo}, {"hi", s.hi}, {"mean", s.mean}});
    }
    j["scales"] = std::move(scales);
    const Matrix& A = summary.mean_rotation.matrix();
    json rot = json::array();
    for (Eigen::Index r = 0; r < A.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < A.cols(); ++c) row.push_back(A(r, c));
        rot.push_back(std::move(row));
    }
    j["rotation"] = std::move(rot);
    json tr = json::array();
    for (const auto& t : summary.mean_translation) tr.push_back(std::vector<double>(t.data(), t.data() + t.size()));
    j["translation"] = std::move(tr);
    j["noise_var"] = summary.mean_noise_var;
    j["acceptance"] = summary.acceptance;
    json lp = json::object();
    for (const auto& [l, p] : summary.L_posterior) lp[std::to_string(l)] = p;
    j["L_posterior"] = std::move(lp);
    return j;
}

}  // namespace simalign
