#include "simalign/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "simalign/config_io.hpp"
#include "simalign/matrix_fisher.hpp"
#include "simalign/protein.hpp"
#include "simalign/trace_io.hpp"
#include "text_util.hpp"

namespace simalign {

namespace fs = std::filesystem;
using detail::format_double;
using detail::parse_double;
using detail::parse_int;
using detail::split;
using detail::trim;

const std::vector<std::string>& prior_flag_names() {
    static const std::vector<std::string> names{"kappa", "alpha-c",  "lambda-c", "alpha",         "beta",
                                                "sigma-tau", "mu-tau", "f0",      "no-translation"};
    return names;
}

const std::vector<std::string>& chain_flag_names() {
    static const std::vector<std::string> names{"iters",           "burnin",  "thin",       "seed",
                                                "scales",          "order-preserving", "labeled", "match-moves"};
    return names;
}

namespace {

double to_double(const std::string& key, const std::string& value) {
    const auto v = parse_double(value);
    if (!v) throw InvalidArgument("--" + key + ": expected a number, got '" + value + "'");
    return *v;
}

long long to_int(const std::string& key, const std::string& value) {
    const auto v = parse_int(value);
    if (!v) throw InvalidArgument("--" + key + ": expected an integer, got '" + value + "'");
    return *v;
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value.empty()) return true;
    if (value == "false" || value == "0") return false;
    throw InvalidArgument("--" + key + ": expected true or false, got '" + value + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    for (auto part : split(value)) out.push_back(to_double(key, std::string(part)));
    return out;
}

}  // namespace

bool apply_prior_setting(PriorSpec& priors, const std::string& key, const std::string& value) {
    if (key == "kappa") {
        priors.kappa = to_double(key, value);
    } else if (key == "alpha-c") {
        priors.alpha_c = to_double(key, value);
    } else if (key == "lambda-c") {
        priors.lambda_c = to_double(key, value);
    } else if (key == "alpha") {
        priors.alpha = to_double(key, value);
    } else if (key == "beta") {
        priors.beta = to_double(key, value);
    } else if (key == "sigma-tau") {
        priors.sigma_tau = to_double(key, value);
    } else if (key == "mu-tau") {
        if (value == "auto") return true;
        const auto v = to_list(key, value);
        if (v.size() != 2 && v.size() != 3) throw InvalidArgument("--mu-tau: expected auto or 2-3 numbers");
        priors.mu_tau = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    } else if (key == "f0") {
        const auto v = to_list(key, value);
        const int d = v.size() == 4 ? 2 : v.size() == 9 ? 3 : 0;
        if (d == 0) throw InvalidArgument("--f0: expected 4 or 9 numbers (row-major)");
        priors.F0.resize(d, d);
        for (int r = 0; r < d; ++r) {
            for (int c = 0; c < d; ++c) priors.F0(r, c) = v[static_cast<std::size_t>(r * d + c)];
        }
    } else if (key == "no-translation") {
        priors.translation_enabled = !to_bool(key, value);
    } else {
        throw InvalidArgument("unknown prior setting '" + key + "'");
    }
    return false;
}

void apply_chain_setting(ChainSettings& settings, const std::string& key, const std::string& value) {
    if (key == "iters") {
        settings.iterations = static_cast<long>(to_int(key, value));
    } else if (key == "burnin") {
        settings.burnin = static_cast<long>(to_int(key, value));
    } else if (key == "thin") {
        settings.thin = static_cast<long>(to_int(key, value));
    } else if (key == "seed") {
        const auto v = to_int(key, value);
        if (v < 0) throw InvalidArgument("--seed must be nonnegative");
        settings.seed = static_cast<std::uint64_t>(v);
    } else if (key == "scales") {
        settings.n_scales = static_cast<int>(to_int(key, value));
    } else if (key == "order-preserving") {
        settings.order_constrained = to_bool(key, value);
    } else if (key == "labeled") {
        settings.labeled = to_bool(key, value);
    } else if (key == "match-moves") {
        settings.match_moves = static_cast<int>(to_int(key, value));
    } else {
        throw InvalidArgument("unknown chain setting '" + key + "'");
    }
}

std::vector<std::pair<std::string, std::string>> read_settings_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open settings file " + path);
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos) throw ParseError(path, lineno, "expected key=value");
        std::string key(trim(t.substr(0, eq)));
        if (key.rfind("--", 0) == 0) key.erase(0, 2);
        std::replace(key.begin(), key.end(), '_', '-');
        out.emplace_back(std::move(key), std::string(trim(t.substr(eq + 1))));
    }
    return out;
}

namespace {

void require_file(const std::string& path) {
    if (!fs::exists(path)) throw IoError("input file not found: " + path);
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir);
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path.string());
    return f;
}

// Options shared by commands that build PriorSpec / ChainSettings.
struct ModelOptions {
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    std::string priors_file;
    int chains{1};

    void add_to(CLI::App& app) {
        const std::map<std::string, std::string> help{
            {"kappa", "matching propensity kappa (default 1)"},
            {"alpha-c", "gamma prior shape on c (default 1)"},
            {"lambda-c", "gamma prior rate on c (default 1)"},
            {"alpha", "gamma prior shape on the noise precision (default 1)"},
            {"beta", "gamma prior rate on the noise precision (default 1)"},
            {"sigma-tau", "prior s.d. of each translation coordinate (default 1000)"},
            {"mu-tau", "prior translation mean: auto (centroid difference) or x,y[,z] (default auto)"},
            {"f0", "matrix-Fisher prior concentration, row-major list (default 0)"},
            {"no-translation", "fix tau = 0 and drop its prior"},
            {"iters", "sweeps to run (default 100000)"},
            {"burnin", "sweeps discarded before retaining (default 10000)"},
            {"thin", "keep every thin-th sweep after burn-in (default 10)"},
            {"seed", "RNG seed; chain i uses seed + i (default 1)"},
            {"scales", "1 or 2 scale groups (default 1)"},
            {"order-preserving", "restrict matchings to sequence order"},
            {"labeled", "fix the matching to (j, j); requires m = n"},
            {"match-moves", "matching proposals per sweep, 0 = max(m, n) (default 0)"},
        };
        auto add = [&](const std::string& key, bool is_flag) {
            CLI::Option* opt = is_flag ? app.add_flag("--" + key, help.at(key))
                                       : app.add_option("--" + key, values[key], help.at(key));
            options[key] = opt;
        };
        for (const auto& k : prior_flag_names()) add(k, k == "no-translation");
        for (const auto& k : chain_flag_names()) add(k, k == "order-preserving" || k == "labeled");
        app.add_option("--priors", priors_file, "file of key=value lines using the flag names above");
        app.add_option("--chains", chains, "independent chains to run in parallel (default 1)")->check(
            CLI::PositiveNumber);
    }

    // Returns true unless mu-tau was given as explicit coordinates.
    bool build(PriorSpec& priors, ChainSettings& settings) const {
        bool auto_mu = true;
        auto apply = [&](const std::string& key, const std::string& value) {
            const auto& pk = prior_flag_names();
            if (std::find(pk.begin(), pk.end(), key) != pk.end()) {
                const bool a = apply_prior_setting(priors, key, value);
                if (key == "mu-tau") auto_mu = a;
            } else {
                apply_chain_setting(settings, key, value);
            }
        };
        if (!priors_file.empty()) {
            require_file(priors_file);
            for (const auto& [k, v] : read_settings_file(priors_file)) apply(k, v);
        }
        for (const auto& [key, opt] : options) {
            if (opt->count() == 0) continue;
            const bool is_flag = key == "no-translation" || key == "order-preserving" || key == "labeled";
            apply(key, is_flag ? "true" : values.at(key));
        }
        return auto_mu;
    }
};

nlohmann::json matrix_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        std::vector<double> row(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
        rows.push_back(row);
    }
    return rows;
}

std::vector<ChainOutput> run_chains(const Configuration& X, const Configuration& Y, const PriorSpec& priors,
                                    const ChainSettings& settings, int n_chains) {
    std::vector<ChainOutput> outputs(static_cast<std::size_t>(n_chains));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_chains));
    auto work = [&](int i) {
        try {
            ChainSettings s = settings;
            s.seed = settings.seed + static_cast<std::uint64_t>(i);
            outputs[i] = run_chain(X, Y, priors, s);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    if (n_chains == 1) {
        work(0);
    } else {
        std::vector<std::thread> threads;
        for (int i = 0; i < n_chains; ++i) threads.emplace_back(work, i);
        for (auto& t : threads) t.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return outputs;
}

void write_superposition(const fs::path& path, const Configuration& X, const Configuration& Y,
                         const PosteriorSummary& summary, const std::vector<int>& y_groups) {
    auto f = open_out(path);
    const int d = X.dim();
    f << "set,index,group,x,y" << (d == 3 ? ",z" : "") << "\n";
    for (int j = 0; j < X.size(); ++j) {
        f << "X," << j + 1 << ",";
        for (int a = 0; a < d; ++a) f << ',' << format_double(X.point(j)(a));
        f << "\n";
    }
    const Matrix& A = summary.mean_rotation.matrix();
    for (int k = 0; k < Y.size(); ++k) {
        const int g = summary.scales.size() == 2 ? y_groups[k] : 0;
        const Vector yhat = summary.scales[g].mean * (A * Y.point(k)) + summary.mean_translation[g];
        f << "Yhat," << k + 1 << ',' << (summary.scales.size() == 2 ? std::to_string(g) : std::string());
        for (int a = 0; a < d; ++a) f << ',' << format_double(yhat(a));
        f << "\n";
    }
}

int cmd_align(const std::string& x_path, const std::string& y_path, const std::string& out_dir, int dims,
              const ModelOptions& model, std::ostream& out) {
    require_file(x_path);
    require_file(y_path);
    const Configuration X = read_configuration_csv(fs::path(x_path));
    const Configuration Y = read_configuration_csv(fs::path(y_path));
    if (X.dim() != Y.dim()) throw InvalidArgument("X and Y have different dimensions");
    if (dims != 0 && dims != X.dim()) {
        throw InvalidArgument("--dims " + std::to_string(dims) + " does not match the data (d = " +
                              std::to_string(X.dim()) + ")");
    }
    PriorSpec priors;
    ChainSettings settings;
    if (model.build(priors, settings)) priors.mu_tau = centroid(X) - centroid(Y);
    settings.validate();
    priors.validate(X.dim());

    const auto outputs = run_chains(X, Y, priors, settings, model.chains);
    const ChainOutput merged = merge_chains(outputs);
    const PosteriorSummary summary = summarize(merged);

    ensure_dir(out_dir);
    const fs::path dir(out_dir);
    {
        auto f = open_out(dir / "summary.json");
        f << summary_to_json(summary).dump(2) << "\n";
    }
    {
        auto f = open_out(dir / "matching.csv");
        f << "j,k,posterior_probability\n";
        for (const auto& p : summary.matches) f << p.j << ',' << p.k << ',' << format_double(p.prob) << "\n";
    }
    write_trace(dir / "trace.csv", merged);
    write_superposition(dir / "superposition.csv", X, Y, summary, modal_labels_y(merged));

    out << "retained samples: " << summary.n_samples << "\n";
    for (std::size_t g = 0; g < summary.scales.size(); ++g) {
        const auto& s = summary.scales[g];
        out << "c" << (summary.scales.size() == 2 ? std::to_string(g) : std::string()) << " median "
            << std::setprecision(6) << s.median << " (" << s.lo << ", " << s.hi << ")\n";
    }
    for (const auto& p : summary.matches) {
        if (p.prob >= 0.5) out << "match " << p.j << " -> " << p.k << "  p = " << std::setprecision(4) << p.prob << "\n";
    }
    return kExitOk;
}

struct SimulateOptions {
    int m{10};
    int dims{3};
    double scale{1.0};
    double noise{0.0};
    std::uint64_t seed{1};
    double box{1.0};
    std::string translation;
    std::string rotation{"random"};
    bool shuffle{true};
    int extra{0};
    std::string out_dir{"."};
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
    if (o.m < 1) throw InvalidArgument("--m must be at least 1");
    if (o.dims != 2 && o.dims != 3) throw InvalidArgument("--dims must be 2 or 3");
    if (!(o.scale > 0) || !std::isfinite(o.scale)) throw InvalidArgument("--scale must be positive");
    if (!(o.noise >= 0) || !std::isfinite(o.noise)) throw InvalidArgument("--noise must be nonnegative");
    if (!(o.box > 0) || !std::isfinite(o.box)) throw InvalidArgument("--box must be positive");
    if (o.extra < 0) throw InvalidArgument("--extra must be nonnegative");
    const int d = o.dims;

    Rng rng(o.seed);
    Vector t = Vector::Zero(d);
    if (!o.translation.empty()) {
        const auto v = to_list("translation", o.translation);
        if (static_cast<int>(v.size()) != d) throw InvalidArgument("--translation needs one value per dimension");
        for (int a = 0; a < d; ++a) t(a) = v[static_cast<std::size_t>(a)];
    }
    RotationMatrix R = RotationMatrix::identity(d);
    if (o.rotation == "random") {
        R = random_rotation(d, rng);
    } else if (o.rotation != "identity") {
        const auto v = to_list("rotation", o.rotation);
        if (static_cast<int>(v.size()) != (d == 2 ? 1 : 3)) {
            throw InvalidArgument("--rotation takes random, identity, or 1 (d=2) / 3 (d=3) Euler angles");
        }
        R = rotation_from_euler<double>(v);
    }

    PointMatrix<double> xs(o.m, d);
    for (int j = 0; j < o.m; ++j) {
        for (int a = 0; a < d; ++a) xs(j, a) = o.box * uniform01(rng);
    }
    const int n = o.m + o.extra;
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) order[static_cast<std::size_t>(k)] = k;
    if (o.shuffle) std::shuffle(order.begin(), order.end(), rng);

    // Row order[i] of Y holds the image of X row i (i < m) or an extra point.
    PointMatrix<double> ys(n, d);
    for (int i = 0; i < n; ++i) {
        Vector y(d);
        if (i < o.m) {
            y = o.scale * (R.matrix() * xs.row(i).transpose()) + t;
        } else {
            for (int a = 0; a < d; ++a) y(a) = o.box * uniform01(rng);
            y = o.scale * (R.matrix() * y) + t;
        }
        for (int a = 0; a < d; ++a) y(a) += o.noise * standard_normal(rng);
        ys.row(order[static_cast<std::size_t>(i)]) = y.transpose();
    }

    ensure_dir(o.out_dir);
    const fs::path dir(o.out_dir);
    write_configuration_csv(dir / "X.csv", Configuration("X", xs));
    write_configuration_csv(dir / "Y.csv", Configuration("Y", ys));

    nlohmann::json truth;
    truth["generator"] = {{"description", "Y = scale * R * X + translation + noise"},
                          {"scale", o.scale},
                          {"rotation", matrix_json(R.matrix())},
                          {"translation", std::vector<double>(t.data(), t.data() + d)},
                          {"noise_sd", o.noise},
                          {"seed", o.seed},
                          {"box", o.box}};
    const Matrix Rt = R.matrix().transpose();
    const Vector model_t = -(Rt * t) / o.scale;
    truth["model"] = {{"description", "X = c * A * Y + tau (the alignment's parametrization)"},
                      {"scale", 1.0 / o.scale},
                      {"rotation", matrix_json(Rt)},
                      {"translation", std::vector<double>(model_t.data(), model_t.data() + d)}};
    nlohmann::json pairs = nlohmann::json::array();
    for (int j = 0; j < o.m; ++j) pairs.push_back({j + 1, order[static_cast<std::size_t>(j)] + 1});
    truth["pairs"] = pairs;
    auto f = open_out(dir / "truth.json");
    f << truth.dump(2) << "\n";
    out << "wrote " << (dir / "X.csv").string() << ", " << (dir / "Y.csv").string() << ", "
        << (dir / "truth.json").string() << "\n";
    return kExitOk;
}

int cmd_extract_sse(const std::string& in_path, const std::string& out_path, std::string id, std::ostream& out) {
    require_file(in_path);
    const auto records = parse_sse_file(fs::path(in_path));
    if (records.empty()) throw InvalidArgument(in_path + ": no secondary-structure elements");
    if (id.empty()) id = fs::path(in_path).stem().string();
    const Configuration cfg = configuration_from_sses(records, id);
    write_configuration_csv(fs::path(out_path), cfg);
    out << "wrote " << cfg.size() << " element vectors to " << out_path << "\n";
    return kExitOk;
}

int cmd_summarize(const std::vector<std::string>& traces, const std::string& out_path, std::ostream& out) {
    std::vector<ChainOutput> outputs;
    for (const auto& t : traces) {
        require_file(t);
        outputs.push_back(read_trace(fs::path(t)));
    }
    const std::string text = summary_to_json(summarize(merge_chains(outputs))).dump(2) + "\n";
    if (out_path.empty()) {
        out << text;
    } else {
        auto f = open_out(out_path);
        f << text;
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"simalign: Bayesian alignment of point configurations under similarity transformations"};
    app.name("simalign");
    app.require_subcommand(1);

    std::string x_path, y_path, out_dir{"."};
    int dims = 0;
    ModelOptions model;
    auto* align = app.add_subcommand("align", "sample the alignment posterior of Y onto X");
    align->add_option("--x", x_path, "reference configuration CSV")->required();
    align->add_option("--y", y_path, "configuration CSV to be transformed")->required();
    align->add_option("--out", out_dir, "output directory (default .)");
    align->add_option("--dims", dims, "expected dimension; checked against the data");
    model.add_to(*align);

    SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "write a synthetic X/Y pair with known truth");
    simulate->add_option("--m", sim.m, "number of points in X (default 10)");
    simulate->add_option("--dims", sim.dims, "2 or 3 (default 3)");
    simulate->add_option("--scale", sim.scale, "true scale applied to X (default 1)");
    simulate->add_option("--noise", sim.noise, "noise s.d. added to Y (default 0)");
    simulate->add_option("--seed", sim.seed, "RNG seed (default 1)");
    simulate->add_option("--box", sim.box, "X is uniform on [0, box]^d (default 1)");
    simulate->add_option("--translation", sim.translation, "translation x,y[,z] (default 0)");
    simulate->add_option("--rotation", sim.rotation, "random | identity | Euler angles (default random)");
    simulate->add_flag("--shuffle,!--no-shuffle", sim.shuffle, "permute the rows of Y (default on)");
    simulate->add_option("--extra", sim.extra, "unmatched extra points appended to Y (default 0)");
    simulate->add_option("--out", sim.out_dir, "output directory (default .)");

    std::string sse_in, sse_out, sse_id;
    auto* extract = app.add_subcommand("extract-sse", "convert an SSE fixture into element vectors");
    extract->add_option("--in", sse_in, "SSE fixture file")->required();
    extract->add_option("--out", sse_out, "configuration CSV to write")->required();
    extract->add_option("--id", sse_id, "configuration id (default: input file stem)");

    std::vector<std::string> traces;
    std::string summary_out;
    auto* summarize_cmd = app.add_subcommand("summarize", "summarize (and merge) trace files");
    summarize_cmd->add_option("traces", traces, "trace CSV files")->required();
    summarize_cmd->add_option("--out", summary_out, "summary JSON path (default stdout)");

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::Error& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (align->parsed()) return cmd_align(x_path, y_path, out_dir, dims, model, out);
        if (simulate->parsed()) return cmd_simulate(sim, out);
        if (extract->parsed()) return cmd_extract_sse(sse_in, sse_out, sse_id, out);
        if (summarize_cmd->parsed()) return cmd_summarize(traces, summary_out, out);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const InvalidOperation& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const DegenerateElement& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitInvalid;
}

}  // namespace simalign
