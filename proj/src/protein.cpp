#include "simalign/protein.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "text_util.hpp"

namespace simalign {

using detail::format_double;
using detail::parse_double;
using detail::parse_int;
using detail::split;
using detail::trim;

namespace {

// Relative gap below which the two leading eigenvalues count as tied.
constexpr double kEigenTieTolerance = 1e-12;

}  // namespace

const char* to_string(SseKind kind) { return kind == SseKind::strand ? "strand" : "helix"; }

void SSERecord::validate() const {
    if (residues.size() < 2) {
        throw InvalidArgument("element " + std::to_string(element_index) + " has fewer than two residues");
    }
    if (!res_seq.empty() && res_seq.size() != residues.size()) {
        throw InvalidArgument("element " + std::to_string(element_index) + ": res_seq length mismatch");
    }
    for (const auto& r : residues) {
        if (r.size() != 3 || !r.allFinite()) {
            throw InvalidArgument("element " + std::to_string(element_index) + ": residues must be finite 3-vectors");
        }
    }
}

Vector principal_axis_vector(const SSERecord& sse) {
    sse.validate();
    const auto n = static_cast<Eigen::Index>(sse.residues.size());
    const Vector& first = sse.residues.front();
    const Vector& last = sse.residues.back();
    if (n == 2) {
        if ((last - first).squaredNorm() == 0) {
            throw DegenerateElement("element " + std::to_string(sse.element_index) + " has coincident residues");
        }
        return last - first;  // the axis passes through both points
    }

    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto& r : sse.residues) mean += r;
    mean /= static_cast<double>(n);
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& r : sse.residues) {
        const Eigen::Vector3d v = r - mean;
        cov += v * v.transpose();
    }
    cov /= static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    const Eigen::Vector3d lambda = eig.eigenvalues();  // ascending
    if (!(lambda(2) > 0)) {
        throw DegenerateElement("element " + std::to_string(sse.element_index) + " has coincident residues");
    }
    if (lambda(2) - lambda(1) <= kEigenTieTolerance * lambda(2)) {
        throw DegenerateElement("element " + std::to_string(sse.element_index) +
                                " has no unique principal axis (tied eigenvalues)");
    }
    const Eigen::Vector3d u = eig.eigenvectors().col(2);
    // Projection difference; the sign follows first -> last automatically.
    return ((last - first).dot(u)) * u;
}

Configuration configuration_from_sses(const std::vector<SSERecord>& domain, const std::string& id) {
    PointMatrix<double> pts(static_cast<Eigen::Index>(domain.size()), 3);
    std::vector<int> seq;
    for (std::size_t i = 0; i < domain.size(); ++i) {
        if (i > 0 && domain[i].element_index <= domain[i - 1].element_index) {
            throw InvalidArgument("element_index must be strictly increasing across a domain");
        }
        pts.row(static_cast<Eigen::Index>(i)) = principal_axis_vector(domain[i]).transpose();
        seq.push_back(domain[i].element_index);
    }
    return Configuration(id, std::move(pts), std::move(seq));
}

std::vector<SSERecord> parse_sse_file(std::istream& in, const std::string& source) {
    std::vector<SSERecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto f = split(t);
        if (out.empty() && f[0] == "element_index") {
            if (f.size() != 6 || f[1] != "kind" || f[2] != "res_seq" || f[3] != "x" || f[4] != "y" || f[5] != "z") {
                throw ParseError(source, lineno, "expected header element_index,kind,res_seq,x,y,z");
            }
            continue;
        }
        if (f.size() != 6) throw ParseError(source, lineno, "expected 6 fields");
        const auto idx = parse_int(f[0]);
        if (!idx) throw ParseError(source, lineno, "bad element_index");
        std::string kind_text(f[1]);
        std::transform(kind_text.begin(), kind_text.end(), kind_text.begin(),
                       [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
        SseKind kind;
        if (kind_text == "strand" || kind_text == "e") {
            kind = SseKind::strand;
        } else if (kind_text == "helix" || kind_text == "h") {
            kind = SseKind::helix;
        } else {
            throw ParseError(source, lineno, "kind must be strand or helix");
        }
        const auto rs = parse_int(f[2]);
        if (!rs) throw ParseError(source, lineno, "bad res_seq");
        Vector p(3);
        for (int c = 0; c < 3; ++c) {
            const auto v = parse_double(f[3 + c]);
            if (!v || !std::isfinite(*v)) throw ParseError(source, lineno, "bad coordinate");
            p(c) = *v;
        }

        if (out.empty() || out.back().element_index != *idx) {
            if (!out.empty() && *idx < out.back().element_index) {
                throw InvalidArgument(source + ":" + std::to_string(lineno) +
                                      ": element_index must be strictly increasing (got " + std::to_string(*idx) +
                                      " after " + std::to_string(out.back().element_index) + ")");
            }
            SSERecord r;
            r.element_index = static_cast<int>(*idx);
            r.kind = kind;
            out.push_back(std::move(r));
        } else if (out.back().kind != kind) {
            throw ParseError(source, lineno, "kind changes within an element");
        }
        auto& rec = out.back();
        if (!rec.res_seq.empty() && *rs <= rec.res_seq.back()) {
            throw ParseError(source, lineno, "res_seq must increase within an element");
        }
        rec.res_seq.push_back(static_cast<int>(*rs));
        rec.residues.push_back(std::move(p));
    }
    for (const auto& r : out) {
        try {
            r.validate();
        } catch (const InvalidArgument& e) {
            throw InvalidArgument(source + ": " + e.what());
        }
    }
    return out;
}

std::vector<SSERecord> parse_sse_file(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path.string());
    return parse_sse_file(f, path.string());
}

void write_sse_file(std::ostream& out, const std::vector<SSERecord>& records) {
    out << "element_index,kind,res_seq,x,y,z\n";
    for (const auto& r : records) {
        for (std::size_t i = 0; i < r.residues.size(); ++i) {
            const int rs = r.res_seq.empty() ? static_cast<int>(i + 1) : r.res_seq[i];
            out << r.element_index << ',' << to_string(r.kind) << ',' << rs;
            for (int c = 0; c < 3; ++c) out << ',' << format_double(r.residues[i](c));
            out << '\n';
        }
    }
}

}  // namespace simalign
