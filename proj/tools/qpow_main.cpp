#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qpow/berry_esseen.hpp"
#include "qpow/dissection.hpp"
#include "qpow/distribution.hpp"
#include "qpow/errors.hpp"
#include "qpow/grammar.hpp"
#include "qpow/partitions.hpp"
#include "qpow/quasi_power.hpp"
#include "qpow/version.hpp"

namespace {

std::string fmt_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<long> parse_longs(const std::string& s, const char* what) {
    std::vector<long> out;
    for (const std::string& tok : split(s, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stol(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string(what) + ": bad integer '" + tok + "'");
        }
    }
    if (out.empty()) throw std::invalid_argument(std::string(what) + ": empty list");
    return out;
}

std::vector<double> parse_doubles(const std::string& s, const char* what) {
    std::vector<double> out;
    for (const std::string& tok : split(s, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string(what) + ": bad number '" + tok + "'");
        }
    }
    if (out.empty()) throw std::invalid_argument(std::string(what) + ": empty list");
    return out;
}

std::vector<int> parse_ints(const std::string& s, const char* what) {
    std::vector<int> out;
    for (long v : parse_longs(s, what)) out.push_back(static_cast<int>(v));
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file '" + path + "'");
    out << text;
}

using ParamList = std::vector<std::pair<std::string, std::string>>;

std::string csv_header(const std::string& command, const ParamList& params,
                       const std::vector<std::string>& notes) {
    std::string s = "# command: " + command + "\n# parameters:";
    for (const auto& [k, v] : params) s += " " + k + "=" + v;
    s += "\n# version: ";
    s += qpow::version;
    s += '\n';
    for (const std::string& note : notes) s += "# note: " + note + "\n";
    return s;
}

nlohmann::json json_envelope(const std::string& command, const ParamList& params,
                             const std::vector<std::string>& notes) {
    nlohmann::json meta;
    meta["command"] = command;
    nlohmann::json p = nlohmann::json::object();
    for (const auto& [k, v] : params) p[k] = v;
    meta["parameters"] = std::move(p);
    meta["version"] = qpow::version;
    meta["notes"] = notes;
    nlohmann::json root;
    root["metadata"] = std::move(meta);
    root["rows"] = nlohmann::json::array();
    return root;
}

qpow::LatticeDistribution base_preset(const std::string& name) {
    if (name == "coin") return qpow::make_lattice_int(1, {{{-1}, 1}, {{1}, 1}});
    if (name == "asym") return qpow::make_lattice_int(1, {{{-1}, 1}, {{1}, 2}});
    if (name == "bernoulli") return qpow::make_lattice_int(1, {{{0}, 1}, {{1}, 1}});
    throw std::invalid_argument("unknown base preset '" + name +
                                "' (available: coin, asym, bernoulli)");
}

struct ModelOptions {
    std::string model = "iid";
    std::string base = "coin,coin";
    std::string grammar_file;
    std::string classes;
    int length_cap = 40;
};

qpow::DissectionSpec load_classes(const std::string& arg) {
    if (arg.empty()) throw std::invalid_argument("--classes is required for the dissection model");
    const std::string text = arg.front() == '{' ? arg : read_file(arg);
    return qpow::dissection_spec_from_json(text);
}

qpow::QuasiPowerFamily make_family(const ModelOptions& o, std::vector<std::string>& notes) {
    if (o.model == "iid") {
        const std::vector<std::string> names = split(o.base, ',');
        if (names.empty() || names.size() > 3)
            throw std::invalid_argument("--base must list 1 to 3 presets");
        qpow::LatticeDistribution base = base_preset(names[0]);
        for (std::size_t i = 1; i < names.size(); ++i)
            base = qpow::product_distribution(base, base_preset(names[i]));
        return qpow::iid_sum_family(base, 6, "iid:" + o.base);
    }
    if (o.model == "grammar") {
        if (o.grammar_file.empty())
            throw std::invalid_argument("--grammar-file is required for the grammar model");
        const qpow::Grammar g = qpow::parse_grammar(read_file(o.grammar_file));
        for (const std::string& w : g.warnings) notes.push_back("grammar warning: " + w);
        notes.push_back(
            "grammar counts are leftmost derivations; unambiguity certified by word "
            "enumeration up to length 12 and assumed beyond");
        return qpow::grammar_family(g, o.length_cap);
    }
    if (o.model == "dissection") {
        notes.push_back("probability model: uniform over dissections of the n-gon");
        return qpow::dissection_family(load_classes(o.classes));
    }
    throw std::invalid_argument("unknown model '" + o.model + "' (iid, grammar, dissection)");
}

qpow::StandardizeMode parse_mode(const std::string& s) {
    if (s == "exact") return qpow::StandardizeMode::ExactMoments;
    if (s == "analytic") return qpow::StandardizeMode::Analytic;
    throw std::invalid_argument("unknown mode '" + s + "' (exact, analytic)");
}

std::string axes_note(const std::vector<int>& kept) {
    std::string s;
    for (std::size_t i = 0; i < kept.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(kept[i] + 1);
    }
    return s;
}

void model_params(const ModelOptions& o, ParamList& params) {
    params.emplace_back("model", o.model);
    if (o.model == "iid") params.emplace_back("base", o.base);
    if (o.model == "grammar") {
        params.emplace_back("grammar-file", o.grammar_file);
        params.emplace_back("length-cap", std::to_string(o.length_cap));
    }
    if (o.model == "dissection") params.emplace_back("classes", o.classes);
}

int run_partitions(int m, const std::string& out, const std::string& format) {
    std::vector<int> ground;
    for (int i = 1; i <= m; ++i) ground.push_back(i);
    const std::vector<qpow::SetPartition> parts = qpow::enumerate_partitions(ground);

    const ParamList params{{"m", std::to_string(m)}};
    std::string text;
    if (format == "csv") {
        text = csv_header("partitions", params, {});
        text += "id,blocks,mu\n";
        for (std::size_t i = 0; i < parts.size(); ++i) {
            std::string blocks;
            for (const auto& block : parts[i].blocks) {
                blocks += '{';
                for (std::size_t j = 0; j < block.size(); ++j) {
                    if (j) blocks += ' ';
                    blocks += std::to_string(block[j]);
                }
                blocks += '}';
            }
            text += std::to_string(i) + ',' + blocks + ',' +
                    std::to_string(qpow::mobius_coefficient(parts[i])) + '\n';
        }
    } else {
        nlohmann::json root = json_envelope("partitions", params, {});
        for (std::size_t i = 0; i < parts.size(); ++i) {
            nlohmann::json row;
            row["id"] = i;
            row["blocks"] = parts[i].blocks;
            row["mu"] = qpow::mobius_coefficient(parts[i]);
            root["rows"].push_back(std::move(row));
        }
        text = root.dump(2) + '\n';
    }
    write_output(out, text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quasi-power limit laws and explicit multivariate Berry-Esseen bounds"};
    app.set_version_flag("--version", qpow::version);
    app.require_subcommand(1);

    std::string out = "-";
    std::string format = "csv";
    app.add_option("--out", out, "Output path, '-' for stdout")->capture_default_str();
    app.add_option("--format", format, "Output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    ModelOptions model;
    auto add_model_options = [&](CLI::App* cmd) {
        cmd->add_option("--model", model.model, "Distribution family: iid, grammar, dissection")
            ->capture_default_str();
        cmd->add_option("--base", model.base,
                        "iid model: comma list of per-axis presets (coin, asym, bernoulli)")
            ->capture_default_str();
        cmd->add_option("--grammar-file", model.grammar_file, "grammar model: grammar file path");
        cmd->add_option("--classes", model.classes,
                        "dissection model: JSON text or path, e.g. {\"classes\":[[3],[4]]}");
        cmd->add_option("--length-cap", model.length_cap, "grammar model: maximum word length")
            ->capture_default_str();
    };

    // partitions
    CLI::App* partitions_cmd =
        app.add_subcommand("partitions", "List set partitions with Mobius coefficients");
    partitions_cmd->fallthrough();
    int part_m = 0;
    partitions_cmd->add_option("--m", part_m, "Number of axes")->required();

    // be-bound
    CLI::App* be_cmd = app.add_subcommand(
        "be-bound", "Evaluate the explicit bound against the exact sup distance");
    be_cmd->fallthrough();
    add_model_options(be_cmd);
    long be_n = 0;
    std::string be_T;
    double be_tol = 1e-6;
    double be_cdf_tol = 1e-4;
    std::string be_mode = "exact";
    bool be_recursive = false;
    be_cmd->add_option("--n", be_n, "Family index n")->required();
    be_cmd->add_option("--T", be_T, "Comma list of cutoffs (default 2,5,10,sqrt(phi_n))");
    be_cmd->add_option("--tol", be_tol, "Quadrature relative tolerance")->capture_default_str();
    be_cmd->add_option("--cdf-tol", be_cdf_tol, "Gaussian CDF tolerance")->capture_default_str();
    be_cmd->add_option("--mode", be_mode, "Standardization: exact or analytic")
        ->capture_default_str();
    be_cmd->add_flag("--recursive", be_recursive,
                     "Fully expand marginal terms instead of exact marginal sups");

    // clt-study
    CLI::App* clt_cmd =
        app.add_subcommand("clt-study", "Kolmogorov distances of standardized families");
    clt_cmd->fallthrough();
    add_model_options(clt_cmd);
    std::string clt_n;
    std::string clt_mode = "exact";
    double clt_cdf_tol = 1e-4;
    bool clt_degenerate = false;
    clt_cmd->add_option("--n", clt_n, "Comma list of family indices");
    clt_cmd->add_option("--mode", clt_mode, "Standardization: exact or analytic")
        ->capture_default_str();
    clt_cmd->add_option("--cdf-tol", clt_cdf_tol, "Gaussian CDF tolerance")
        ->capture_default_str();
    clt_cmd->add_flag("--degenerate", clt_degenerate,
                      "Run the scaled-coin counterexample instead of a family study");

    // moments
    CLI::App* mom_cmd =
        app.add_subcommand("moments", "Exact cross-moments against the coefficient polynomials");
    mom_cmd->fallthrough();
    add_model_options(mom_cmd);
    std::string mom_k;
    std::string mom_n;
    mom_cmd->add_option("--k", mom_k, "Comma list: moment exponent per axis")->required();
    mom_cmd->add_option("--n", mom_n, "Comma list of family indices")->required();

    // dissection-counts
    CLI::App* dis_cmd =
        app.add_subcommand("dissection-counts", "Exact dissection counts by face-class vector");
    dis_cmd->fallthrough();
    std::string dis_classes;
    std::string dis_n;
    dis_cmd->add_option("--classes", dis_classes, "JSON text or path")->required();
    dis_cmd->add_option("--n", dis_n, "Comma list of polygon sizes")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(partitions_cmd)) return run_partitions(part_m, out, format);

        if (app.got_subcommand(be_cmd)) {
            std::vector<std::string> notes;
            const qpow::QuasiPowerFamily fam = make_family(model, notes);
            const qpow::StandardizeMode mode = parse_mode(be_mode);
            const qpow::StandardizedPair sp = qpow::standardized_distribution(fam, be_n, mode);
            if (static_cast<int>(sp.kept_axes.size()) < fam.dim)
                notes.push_back("degenerate coordinates dropped; kept axes " +
                                axes_note(sp.kept_axes));
            std::vector<double> T_list;
            if (be_T.empty()) {
                T_list = {2.0, 5.0, 10.0, std::sqrt(fam.phi(be_n))};
            } else {
                T_list = parse_doubles(be_T, "--T");
            }
            for (double T : T_list)
                if (!(T > 0)) throw std::invalid_argument("--T: cutoffs must be positive");

            const double lhs = qpow::kolmogorov_distance(sp.dist, sp.gaussian, be_cdf_tol);
            std::vector<qpow::BoundReport> reports;
            bool all_converged = true;
            for (double T : T_list) {
                qpow::BoundReport rep =
                    be_recursive
                        ? qpow::be_rhs_recursive(sp.dist, sp.gaussian, T, be_tol, be_cdf_tol)
                        : qpow::be_rhs(sp.dist, sp.gaussian, T, be_tol, be_cdf_tol);
                rep.lhs_sup = lhs;
                all_converged = all_converged && rep.quad_converged;
                reports.push_back(std::move(rep));
            }

            ParamList params;
            model_params(model, params);
            params.emplace_back("n", std::to_string(be_n));
            std::string tlist;
            for (std::size_t i = 0; i < T_list.size(); ++i)
                tlist += (i ? "," : "") + fmt_g(T_list[i]);
            params.emplace_back("T", tlist);
            params.emplace_back("tol", fmt_g(be_tol));
            params.emplace_back("cdf-tol", fmt_g(be_cdf_tol));
            params.emplace_back("mode", be_mode);
            params.emplace_back("recursive", be_recursive ? "1" : "0");

            std::string text;
            if (format == "csv") {
                text = csv_header("be-bound", params, notes);
                text += "T,integral_term,marginal_term,smoothing_term,rhs_total,lhs_sup,holds\n";
                for (const qpow::BoundReport& rep : reports) {
                    const bool holds =
                        *rep.lhs_sup <= rep.rhs_total + rep.quad_error + be_cdf_tol + 1e-12;
                    text += qpow::bound_report_csv_row(rep) + ',' + (holds ? "1" : "0") + '\n';
                }
            } else {
                nlohmann::json root = json_envelope("be-bound", params, notes);
                for (const qpow::BoundReport& rep : reports) {
                    nlohmann::json row = nlohmann::json::parse(qpow::bound_report_json(rep));
                    row["holds"] =
                        *rep.lhs_sup <= rep.rhs_total + rep.quad_error + be_cdf_tol + 1e-12;
                    root["rows"].push_back(std::move(row));
                }
                text = root.dump(2) + '\n';
            }
            write_output(out, text);
            return all_converged ? 0 : 3;
        }

        if (app.got_subcommand(clt_cmd)) {
            if (clt_degenerate) {
                const std::vector<long> ns =
                    clt_n.empty() ? std::vector<long>{1, 10, 100, 10000}
                                  : parse_longs(clt_n, "--n");
                const auto rows = qpow::degenerate_demo(ns);
                ParamList params;
                params.emplace_back("degenerate", "1");
                std::string nlist;
                for (std::size_t i = 0; i < ns.size(); ++i)
                    nlist += (i ? "," : "") + std::to_string(ns[i]);
                params.emplace_back("n", nlist);
                std::string text;
                if (format == "csv") {
                    text = csv_header("clt-study", params, {});
                    text += "n,distance,distance_exact\n";
                    for (const auto& row : rows)
                        text += std::to_string(row.n) + ',' + fmt_g(row.distance.get_d()) + ',' +
                                row.distance.get_str() + '\n';
                } else {
                    nlohmann::json root = json_envelope("clt-study", params, {});
                    for (const auto& row : rows) {
                        nlohmann::json r;
                        r["n"] = row.n;
                        r["distance"] = row.distance.get_d();
                        r["distance_exact"] = row.distance.get_str();
                        root["rows"].push_back(std::move(r));
                    }
                    text = root.dump(2) + '\n';
                }
                write_output(out, text);
                return 0;
            }

            if (clt_n.empty()) throw std::invalid_argument("--n is required");
            const std::vector<long> ns = parse_longs(clt_n, "--n");
            std::vector<std::string> notes;
            const qpow::QuasiPowerFamily fam = make_family(model, notes);
            const qpow::StandardizeMode mode = parse_mode(clt_mode);
            {
                const long probe = *std::min_element(ns.begin(), ns.end());
                const qpow::StandardizedPair sp =
                    qpow::standardized_distribution(fam, probe, mode);
                if (static_cast<int>(sp.kept_axes.size()) < fam.dim)
                    notes.push_back("degenerate coordinates dropped; kept axes " +
                                    axes_note(sp.kept_axes));
            }
            const auto rows = qpow::convergence_study(fam, ns, mode, clt_cdf_tol);

            ParamList params;
            model_params(model, params);
            std::string nlist;
            for (std::size_t i = 0; i < ns.size(); ++i)
                nlist += (i ? "," : "") + std::to_string(ns[i]);
            params.emplace_back("n", nlist);
            params.emplace_back("mode", clt_mode);
            params.emplace_back("cdf-tol", fmt_g(clt_cdf_tol));

            std::string text;
            if (format == "csv") {
                text = csv_header("clt-study", params, notes);
                text += "n,phi_n,distance,normalized,mode\n";
                for (const auto& row : rows)
                    text += std::to_string(row.n) + ',' + fmt_g(row.phi_n) + ',' +
                            fmt_g(row.distance) + ',' + fmt_g(row.normalized) + ',' + clt_mode +
                            '\n';
            } else {
                nlohmann::json root = json_envelope("clt-study", params, notes);
                for (const auto& row : rows) {
                    nlohmann::json r;
                    r["n"] = row.n;
                    r["phi_n"] = row.phi_n;
                    r["distance"] = row.distance;
                    r["normalized"] = row.normalized;
                    r["mode"] = clt_mode;
                    root["rows"].push_back(std::move(r));
                }
                text = root.dump(2) + '\n';
            }
            write_output(out, text);
            return 0;
        }

        if (app.got_subcommand(mom_cmd)) {
            const std::vector<int> k = parse_ints(mom_k, "--k");
            const std::vector<long> ns = parse_longs(mom_n, "--n");
            std::vector<std::string> notes;
            const qpow::QuasiPowerFamily fam = make_family(model, notes);
            const auto rows = qpow::moment_check(fam, k, ns);

            ParamList params;
            model_params(model, params);
            std::string klist;
            for (std::size_t i = 0; i < k.size(); ++i)
                klist += (i ? "," : "") + std::to_string(k[i]);
            params.emplace_back("k", klist);
            std::string nlist;
            for (std::size_t i = 0; i < ns.size(); ++i)
                nlist += (i ? "," : "") + std::to_string(ns[i]);
            params.emplace_back("n", nlist);

            std::string kcell;
            for (std::size_t i = 0; i < k.size(); ++i)
                kcell += (i ? " " : "") + std::to_string(k[i]);

            std::string text;
            if (format == "csv") {
                text = csv_header("moments", params, notes);
                text += "n,k,lhs,rhs,abs_error\n";
                for (const auto& row : rows)
                    text += std::to_string(row.n) + ',' + kcell + ',' + row.lhs.get_str() + ',' +
                            row.rhs.get_str() + ',' + row.abs_error.get_str() + '\n';
            } else {
                nlohmann::json root = json_envelope("moments", params, notes);
                for (const auto& row : rows) {
                    nlohmann::json r;
                    r["n"] = row.n;
                    r["k"] = k;
                    r["lhs"] = row.lhs.get_str();
                    r["rhs"] = row.rhs.get_str();
                    r["abs_error"] = row.abs_error.get_str();
                    root["rows"].push_back(std::move(r));
                }
                text = root.dump(2) + '\n';
            }
            write_output(out, text);
            return 0;
        }

        if (app.got_subcommand(dis_cmd)) {
            const qpow::DissectionSpec spec = load_classes(dis_classes);
            const std::vector<long> ns = parse_longs(dis_n, "--n");
            for (long n : ns)
                if (n < 2) throw std::invalid_argument("--n: polygon sizes must be >= 2");
            const long max_n = *std::max_element(ns.begin(), ns.end());
            const auto solved = qpow::solve_dissection_series(
                spec, std::max(static_cast<int>(max_n) - 1, 1));
            const std::size_t t = spec.classes.size();

            ParamList params;
            params.emplace_back("classes", dis_classes);
            std::string nlist;
            for (std::size_t i = 0; i < ns.size(); ++i)
                nlist += (i ? "," : "") + std::to_string(ns[i]);
            params.emplace_back("n", nlist);
            const std::vector<std::string> notes{
                "probability model: uniform over dissections of the n-gon"};

            std::string text;
            if (format == "csv") {
                text = csv_header("dissection-counts", params, notes);
                text += "n";
                for (std::size_t i = 1; i <= t; ++i) text += ",r" + std::to_string(i);
                text += ",count\n";
                for (long n : ns)
                    for (const auto& [r, c] :
                         qpow::dissection_counts(solved, static_cast<int>(n))) {
                        text += std::to_string(n);
                        for (int v : r) text += ',' + std::to_string(v);
                        text += ',' + c.get_str() + '\n';
                    }
            } else {
                nlohmann::json root = json_envelope("dissection-counts", params, notes);
                for (long n : ns)
                    for (const auto& [r, c] :
                         qpow::dissection_counts(solved, static_cast<int>(n))) {
                        nlohmann::json row;
                        row["n"] = n;
                        row["r"] = r;
                        row["count"] = c.get_str();
                        root["rows"].push_back(std::move(row));
                    }
                text = root.dump(2) + '\n';
            }
            write_output(out, text);
            return 0;
        }

        throw std::invalid_argument("no subcommand selected");
    } catch (const qpow::capacity_error& e) {
        std::cerr << "capacity error: " << e.what() << '\n';
        return 2;
    } catch (const qpow::convergence_error& e) {
        std::cerr << "convergence error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
