#include "kummer/cli.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kummer/characterize.hpp"
#include "kummer/distributions.hpp"
#include "kummer/errors.hpp"
#include "kummer/parallel.hpp"
#include "kummer/report.hpp"
#include "kummer/specfun.hpp"
#include "kummer/transforms.hpp"
#include "kummer/trees.hpp"
#include "kummer/verify.hpp"

namespace kummer::cli {

namespace {

using nlohmann::json;

constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;

// default master seed: 0xC0FFEE, overridable via the environment
std::uint64_t master_seed() {
    const char* env = std::getenv("KUMMER_FORGE_SEED");
    if (env == nullptr || *env == '\0') return kDefaultSeed;
    if (*env == '-') throw InputError("KUMMER_FORGE_SEED must be a non-negative integer");
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 0);
    if (end == env || *end != '\0')
        throw InputError("KUMMER_FORGE_SEED must be a non-negative integer");
    return v;
}

std::string fmt(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

// ---- file and JSON plumbing -------------------------------------------------

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// path "-" means standard output
void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        std::fflush(stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << text;
}

json parse_json(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(origin + ": " + e.what());
    }
}

// ---- CSV plumbing (exact header required; errors carry line numbers) -------

struct CsvTable {
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> lines;  // 1-based source line of each row
};

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string s;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) s += sep;
        s += parts[i];
    }
    return s;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

CsvTable read_csv(const std::string& path, const std::vector<std::string>& header) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    std::string line;
    std::size_t lineno = 1;
    auto fail = [&](const std::string& msg) {
        throw InputError(path + ":" + std::to_string(lineno) + ": " + msg);
    };
    if (!std::getline(in, line)) fail("empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string want = join(header, ',');
    if (line != want) fail("expected header '" + want + "'");

    CsvTable t;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;  // tolerate blank lines
        const auto fields = split(line, ',');
        if (fields.size() != header.size())
            fail("expected " + std::to_string(header.size()) + " fields, got " +
                 std::to_string(fields.size()));
        std::vector<double> row(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const std::string& tok = fields[i];
            char* end = nullptr;
            row[i] = std::strtod(tok.c_str(), &end);
            if (tok.empty() || end != tok.c_str() + tok.size())
                fail("'" + tok + "' is not a number");
        }
        t.rows.push_back(std::move(row));
        t.lines.push_back(lineno);
    }
    if (t.rows.empty()) throw InputError(path + ": no data rows");
    return t;
}

void require_positive(const std::string& path, std::size_t lineno, const std::string& col,
                      double v) {
    if (!std::isfinite(v) || v <= 0.0)
        throw InputError(path + ":" + std::to_string(lineno) + ": " + col +
                         " must be positive (got " + fmt(v, 17) + ")");
}

void require_unit_interval(const std::string& path, std::size_t lineno, const std::string& col,
                           double v) {
    if (!std::isfinite(v) || v <= 0.0 || v >= 1.0)
        throw InputError(path + ":" + std::to_string(lineno) + ": " + col +
                         " must lie in (0,1) (got " + fmt(v, 17) + ")");
}

void write_csv_columns(const std::string& path, const std::vector<std::string>& header,
                       const std::vector<const std::vector<double>*>& cols) {
    std::string s = join(header, ',');
    s += '\n';
    const std::size_t n = cols.empty() ? 0 : cols.front()->size();
    s.reserve(s.size() + n * cols.size() * 26);
    char buf[64];
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", (*cols[j])[i]);
            if (j) s += ',';
            s += buf;
        }
        s += '\n';
    }
    write_text(path, s);
}

// SuiteReport to --report target; pass/fail becomes the exit code
int emit_report(const report::SuiteReport& rep, const std::string& report_path) {
    write_text(report_path, rep.to_json_string());
    return rep.pass() ? 0 : 1;
}

// ---- config-or-flag parameter resolution for `verify` -----------------------

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    const json cfg = parse_json(read_file(path), path);
    if (!cfg.is_object()) throw InputError(path + ": config must be a JSON object");
    return cfg;
}

double pick_num(const json& cfg, const CLI::Option* opt, double flag_value, const char* key,
                const char* flag, std::optional<double> fallback = std::nullopt) {
    if (opt != nullptr && opt->count() > 0) return flag_value;
    if (cfg.contains(key)) {
        const auto& v = cfg.at(key);
        if (!v.is_number())
            throw InputError(std::string("config key '") + key + "' must be a number");
        return v.get<double>();
    }
    if (fallback) return *fallback;
    throw InputError(std::string("missing ") + flag + " (or config key '" + key + "')");
}

std::vector<double> number_array(const json& v, const char* key) {
    if (!v.is_array()) throw InputError(std::string("config key '") + key + "' must be an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if (!e.is_number())
            throw InputError(std::string("config key '") + key + "' must hold numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

// ---- pair CSV <-> transform plumbing ----------------------------------------

struct PairColumns {
    std::vector<double> first, second;
};

PairColumns read_pair_csv(const std::string& path, const std::array<std::string, 2>& cols,
                          bool first_in_unit_interval) {
    const CsvTable t = read_csv(path, {cols[0], cols[1]});
    PairColumns pc;
    pc.first.resize(t.rows.size());
    pc.second.resize(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const double a = t.rows[i][0], b = t.rows[i][1];
        if (first_in_unit_interval)
            require_unit_interval(path, t.lines[i], cols[0], a);
        else
            require_positive(path, t.lines[i], cols[0], a);
        require_positive(path, t.lines[i], cols[1], b);
        pc.first[i] = a;
        pc.second[i] = b;
    }
    return pc;
}

int run_transform(maps::PairFamily family, bool inverse, const std::string& in_path,
                  const std::string& out_path) {
    const std::array<std::string, 2> in_cols =
        inverse ? std::array<std::string, 2>{"u", "v"} : std::array<std::string, 2>{"x", "y"};
    const std::array<std::string, 2> out_cols =
        inverse ? std::array<std::string, 2>{"x", "y"} : std::array<std::string, 2>{"u", "v"};
    const bool unit = family == maps::PairFamily::kv && inverse;
    const PairColumns in = read_pair_csv(in_path, in_cols, unit);
    std::vector<double> c(in.first.size()), d(in.first.size());
    if (family == maps::PairFamily::hv) {
        if (inverse)
            maps::hv_inverse_batch(in.first, in.second, c, d);
        else
            maps::hv_forward_batch(in.first, in.second, c, d);
    } else {
        if (inverse)
            maps::kv_inverse_batch(in.first, in.second, c, d);
        else
            maps::kv_forward_batch(in.first, in.second, c, d);
    }
    write_csv_columns(out_path, {out_cols[0], out_cols[1]}, {&c, &d});
    return 0;
}

// ---- tree plumbing -----------------------------------------------------------

std::vector<std::string> tree_header(const trees::TreeSpec& tree) {
    std::vector<std::string> h;
    h.reserve(tree.size());
    for (int id : tree.ids()) h.push_back("x" + std::to_string(id));
    return h;
}

void check_a_size(const std::vector<double>& a, const trees::TreeSpec& tree) {
    if (a.size() != tree.size())
        throw InputError("--a needs one value per node (" + std::to_string(tree.size()) +
                         "), got " + std::to_string(a.size()));
}

int run_tree_transform(const trees::TreeSpec& tree, int root, bool inverse,
                       const std::string& in_path, const std::string& out_path) {
    const auto header = tree_header(tree);
    const CsvTable t = read_csv(in_path, header);
    const std::size_t p = tree.size();
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        for (std::size_t j = 0; j < p; ++j)
            require_positive(in_path, t.lines[i], header[j], t.rows[i][j]);
    std::vector<std::vector<double>> cols(p, std::vector<double>(t.rows.size()));
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const std::vector<double> out = inverse ? trees::phi_inverse(tree, root, t.rows[i])
                                                : trees::phi_forward(tree, root, t.rows[i]);
        for (std::size_t j = 0; j < p; ++j) cols[j][i] = out[j];
    }
    std::vector<const std::vector<double>*> ptrs;
    for (const auto& cvec : cols) ptrs.push_back(&cvec);
    write_csv_columns(out_path, header, ptrs);
    return 0;
}

// ---- recover / characterize output -------------------------------------------

int print_recovered(const characterize::RecoveredPair& rp) {
    nlohmann::ordered_json out;
    out["x"] = dist::DistributionSpec::kummer(rp.x.a, rp.x.b, rp.x.c).to_json();
    out["y"] = dist::DistributionSpec::gamma(rp.y.shape, rp.y.rate).to_json();
    write_text("-", out.dump(2) + "\n");
    return 0;
}

void add_fit_rows(report::SuiteReport& rep, const char* side, const dist::DistributionSpec& s) {
    const json j = s.to_json();
    for (const auto& [key, val] : j.items())
        if (val.is_number())
            rep.add_info(std::string("fit_") + side + "_" + key, val.get<double>());
}

int run_cli_impl(int argc, const char* const* argv) {
    CLI::App app{"Kummer/gamma independence-property toolkit"};
    app.name("kummer");
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "help for every subcommand");

    int workers = 0;
    const auto* workers_opt =
        app.add_option("--workers", workers, "worker threads (default: hardware)")
            ->check(CLI::PositiveNumber);

    auto verb = [](CLI::App* parent, const std::string& name, const std::string& desc) {
        CLI::App* s = parent->add_subcommand(name, desc);
        s->fallthrough();
        return s;
    };

    // leaf verbs registered with their actions; dispatched after parsing
    std::vector<std::pair<const CLI::App*, std::function<int()>>> actions;
    auto act = [&actions](const CLI::App* sub, std::function<int()> fn) {
        actions.emplace_back(sub, std::move(fn));
    };

    const std::uint64_t seed0 = master_seed();

    // ---- specfun u -----------------------------------------------------------
    auto* sf = verb(&app, "specfun", "special-function evaluation");
    sf->require_subcommand(1);
    auto* sfu = verb(sf, "u", "Tricomi confluent hypergeometric U(a,b,z)");
    struct {
        double a = 0, b = 0, z = 0;
        bool use_log = false;
    } su;
    sfu->add_option("--a", su.a, "first parameter (> 0)")->required();
    sfu->add_option("--b", su.b, "second parameter (any real)")->required();
    sfu->add_option("--z", su.z, "argument (> 0)")->required();
    sfu->add_flag("--log", su.use_log, "print log U instead of U");
    act(sfu, [&] {
        const double v = su.use_log ? specfun::log_tricomi_u(su.a, su.b, su.z)
                                    : specfun::tricomi_u(su.a, su.b, su.z);
        write_text("-", fmt(v, 15) + "\n");
        return 0;
    });

    // ---- dist ------------------------------------------------------------------
    auto* ds = verb(&app, "dist", "distribution evaluation and sampling");
    ds->require_subcommand(1);
    struct {
        std::string spec_text;
        double x = 0, s = 0;
        std::uint64_t n = 0, seed = 0;
        std::string out = "-";
    } dv;
    dv.seed = seed0;
    auto add_spec = [&](CLI::App* sub) {
        sub->add_option("--spec", dv.spec_text,
                        R"(distribution JSON, e.g. {"family":"kummer","a":2,"b":1,"c":1})")
            ->required();
    };
    auto parse_spec = [&] {
        return dist::DistributionSpec::from_json(parse_json(dv.spec_text, "--spec"));
    };

    auto* d_pdf = verb(ds, "pdf", "density at a point");
    add_spec(d_pdf);
    d_pdf->add_option("--x", dv.x, "evaluation point")->required();
    act(d_pdf, [&] {
        write_text("-", fmt(std::exp(dist::log_pdf(parse_spec(), dv.x)), 15) + "\n");
        return 0;
    });

    auto* d_cdf = verb(ds, "cdf", "distribution function at a point");
    add_spec(d_cdf);
    d_cdf->add_option("--x", dv.x, "evaluation point")->required();
    act(d_cdf, [&] {
        write_text("-", fmt(dist::cdf(parse_spec(), dv.x), 15) + "\n");
        return 0;
    });

    auto* d_mom = verb(ds, "moment", "E X^s (errors if the moment does not exist)");
    add_spec(d_mom);
    d_mom->add_option("--s", dv.s, "moment order (any real)")->required();
    act(d_mom, [&] {
        write_text("-", fmt(dist::moment(parse_spec(), dv.s), 15) + "\n");
        return 0;
    });

    auto* d_smp = verb(ds, "sample", "i.i.d. draws as CSV (header 'value')");
    add_spec(d_smp);
    d_smp->add_option("--n", dv.n, "number of draws")->required()->check(CLI::PositiveNumber);
    d_smp->add_option("--seed", dv.seed, "RNG seed")->capture_default_str();
    d_smp->add_option("--out", dv.out, "output path, '-' for stdout")->capture_default_str();
    act(d_smp, [&] {
        const auto batch = dist::sample(parse_spec(), dv.n, dv.seed, 0);
        write_csv_columns(dv.out, {"value"}, {&batch.values});
        return 0;
    });

    // ---- transform ---------------------------------------------------------------
    auto* tf = verb(&app, "transform", "HV / KV pair transforms on CSV data");
    tf->require_subcommand(1);
    struct {
        bool inverse = false;
        std::string in, out = "-";
    } tv;
    auto add_tf = [&](CLI::App* sub) {
        sub->add_flag("--inverse", tv.inverse, "apply the inverse map (input columns u,v)");
        sub->add_option("--in", tv.in, "input CSV with header x,y (u,v for --inverse)")
            ->required();
        sub->add_option("--out", tv.out, "output path, '-' for stdout")->capture_default_str();
    };
    auto* tf_hv = verb(tf, "hv", "u = y/(1+x), v = x(1+u)");
    add_tf(tf_hv);
    act(tf_hv, [&] { return run_transform(maps::PairFamily::hv, tv.inverse, tv.in, tv.out); });
    auto* tf_kv = verb(tf, "kv", "v = x+y, u = x(1+v)/(v(1+x))");
    add_tf(tf_kv);
    act(tf_kv, [&] { return run_transform(maps::PairFamily::kv, tv.inverse, tv.in, tv.out); });

    // ---- tree ----------------------------------------------------------------------
    auto* tr = verb(&app, "tree", "directed-tree transform, sampling, and verification");
    tr->require_subcommand(1);
    struct {
        std::string tree_path, in, out = "-", report = "-";
        int root = 0;
        bool inverse = false;
        std::vector<double> a;
        double c = 1.0;
        std::uint64_t n = 100000, seed = 0;
        std::uint32_t n_perm = 999;
    } trv;
    trv.seed = seed0;
    auto load_tree = [&] {
        return trees::TreeSpec::from_json(parse_json(read_file(trv.tree_path), trv.tree_path));
    };

    auto* tr_tf = verb(tr, "transform", "apply Phi_root (or its inverse) to CSV vectors");
    tr_tf->add_option("--tree", trv.tree_path, "tree JSON file")->required();
    tr_tf->add_option("--root", trv.root, "root node id")->required();
    tr_tf->add_flag("--inverse", trv.inverse, "apply the inverse transform");
    tr_tf->add_option("--in", trv.in, "input CSV; one column x<id> per node")->required();
    tr_tf->add_option("--out", trv.out, "output path, '-' for stdout")->capture_default_str();
    act(tr_tf,
        [&] { return run_tree_transform(load_tree(), trv.root, trv.inverse, trv.in, trv.out); });

    auto* tr_smp = verb(tr, "sample", "joint sample whose Phi_root image is independent");
    tr_smp->add_option("--tree", trv.tree_path, "tree JSON file")->required();
    tr_smp->add_option("--root", trv.root, "reference leaf id")->required();
    tr_smp->add_option("--a", trv.a, "per-node shape parameters, id-ascending order")
        ->required()
        ->delimiter(',');
    tr_smp->add_option("--c", trv.c, "global rate multiplier")->capture_default_str();
    tr_smp->add_option("--n", trv.n, "number of draws")->capture_default_str();
    tr_smp->add_option("--seed", trv.seed, "RNG seed")->capture_default_str();
    tr_smp->add_option("--out", trv.out, "output path, '-' for stdout")->capture_default_str();
    act(tr_smp, [&] {
        const auto tree = load_tree();
        check_a_size(trv.a, tree);
        const auto sample =
            trees::tree_joint_sample(tree, trv.root, trv.a, trv.c, trv.n, trv.seed);
        std::vector<const std::vector<double>*> ptrs;
        for (const auto& cvec : sample.values) ptrs.push_back(&cvec);
        write_csv_columns(trv.out, tree_header(tree), ptrs);
        return 0;
    });

    auto* tr_vf = verb(tr, "verify", "independence + marginal suite at every non-reference leaf");
    tr_vf->add_option("--tree", trv.tree_path, "tree JSON file")->required();
    tr_vf->add_option("--a", trv.a, "per-node shape parameters, id-ascending order")
        ->required()
        ->delimiter(',');
    tr_vf->add_option("--c", trv.c, "global rate multiplier")->capture_default_str();
    tr_vf->add_option("--n", trv.n, "sample size")->capture_default_str();
    tr_vf->add_option("--seed", trv.seed, "RNG seed")->capture_default_str();
    tr_vf->add_option("--n-perm", trv.n_perm, "permutations per independence test")
        ->capture_default_str();
    tr_vf->add_option("--report", trv.report, "report path, '-' for stdout")
        ->capture_default_str();
    act(tr_vf, [&] {
        const auto tree = load_tree();
        check_a_size(trv.a, tree);
        return emit_report(
            verify::run_tree_suite(tree, trv.a, trv.c, trv.n, trv.seed, trv.n_perm), trv.report);
    });

    // ---- recover ---------------------------------------------------------------
    auto* rc = verb(&app, "recover", "parameter recovery from regression/ratio constants");
    rc->require_subcommand(1);
    struct {
        double alpha = 0, beta = 0, r = 0, c = 0;
    } rv;
    auto add_rc = [&](CLI::App* sub, bool ratio) {
        sub->add_option("--alpha", rv.alpha,
                        ratio ? "ratio constant E(.^r|.) / E(.^{r-1}|.)"
                              : "constant of E(. | .)")
            ->required();
        sub->add_option("--beta", rv.beta,
                        ratio ? "ratio constant E(.^{r+1}|.) / E(.^r|.)"
                              : "constant of E(.^{-1} | .)")
            ->required();
        if (ratio) sub->add_option("--r", rv.r, "moment order r")->required();
        sub->add_option("--c", rv.c, "free rate-like constant")->required();
    };
    auto* rc_hr = verb(rc, "hv-reg", "HV side: E(V|U), E(V^{-1}|U) constants");
    add_rc(rc_hr, false);
    act(rc_hr, [&] {
        return print_recovered(characterize::recover_hv_regression({rv.alpha, rv.beta, rv.c}));
    });
    auto* rc_ha = verb(rc, "hv-ratio", "HV side: E(V^r|U), E(V^{r+1}|U) constants");
    add_rc(rc_ha, true);
    act(rc_ha, [&] {
        return print_recovered(characterize::recover_hv_ratio({rv.r, rv.alpha, rv.beta, rv.c}));
    });
    auto* rc_kr = verb(rc, "kv-reg", "KV side: E(U|V), E(U^{-1}|V) constants");
    add_rc(rc_kr, false);
    act(rc_kr, [&] {
        return print_recovered(characterize::recover_kv_regression({rv.alpha, rv.beta, rv.c}));
    });
    auto* rc_ka = verb(rc, "kv-ratio", "KV side: E(U^r|V), E(U^{r+1}|V) constants");
    add_rc(rc_ka, true);
    act(rc_ka, [&] {
        return print_recovered(characterize::recover_kv_ratio({rv.r, rv.alpha, rv.beta, rv.c}));
    });

    // ---- characterize -------------------------------------------------------------
    auto* ch = verb(&app, "characterize", "fit the product laws implied by an (x,y) pair sample");
    struct {
        std::string family, in, report = "-";
        std::uint64_t seed = 0;
    } cv;
    cv.seed = seed0;
    ch->add_option("--family", cv.family, "pair transform family")
        ->required()
        ->check(CLI::IsMember({"hv", "kv"}));
    ch->add_option("--in", cv.in, "input CSV with header x,y")->required();
    ch->add_option("--seed", cv.seed, "RNG seed")->capture_default_str();
    ch->add_option("--report", cv.report, "report path, '-' for stdout")->capture_default_str();
    act(ch, [&] {
        const PairColumns pc = read_pair_csv(cv.in, {"x", "y"}, false);
        std::vector<maps::PositivePair> pairs(pc.first.size());
        for (std::size_t i = 0; i < pairs.size(); ++i) pairs[i] = {pc.first[i], pc.second[i]};
        const auto fam = cv.family == "hv" ? maps::PairFamily::hv : maps::PairFamily::kv;
        auto res = characterize::characterize_from_samples(pairs, fam, cv.seed);
        if (res.x_law) add_fit_rows(res.report, "x", *res.x_law);
        if (res.y_law) add_fit_rows(res.report, "y", *res.y_law);
        return emit_report(res.report, cv.report);
    });

    // ---- verify -----------------------------------------------------------------
    auto* vf = verb(&app, "verify", "identity/property verification suites");
    vf->require_subcommand(1);
    struct {
        std::string config, report = "-";
        std::uint64_t seed = 0, n = 100000;
        double a = 0, b = 0, c = 0, A = 0, p = 0;
        int k_max = 0, n_perm = 0;
        std::vector<double> z, tree_a;
        std::string tree_path;
    } vv;
    vv.seed = seed0;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", vv.config, "suite config JSON (flags win over keys)");
        sub->add_option("--seed", vv.seed, "RNG seed")->capture_default_str();
        sub->add_option("--n", vv.n, "sample size")->capture_default_str();
        sub->add_option("--report", vv.report, "report path, '-' for stdout")
            ->capture_default_str();
    };

    struct PropOpts {
        CLI::Option *a = nullptr, *b = nullptr, *c = nullptr, *n_perm = nullptr;
    };
    auto* vf_hv = verb(vf, "hv", "HV independence-property suite");
    auto* vf_kv = verb(vf, "kv", "KV independence-property suite");
    PropOpts po_hv, po_kv;
    for (auto [sub, po] : {std::pair<CLI::App*, PropOpts*>{vf_hv, &po_hv}, {vf_kv, &po_kv}}) {
        add_common(sub);
        po->a = sub->add_option("--a", vv.a, "input Kummer shape a");
        po->b = sub->add_option("--b", vv.b, "input gamma shape b");
        po->c = sub->add_option("--c", vv.c, "common rate c");
        po->n_perm = sub->add_option("--n-perm", vv.n_perm, "permutations (default 999)");
    }
    auto run_property = [&](maps::PairFamily fam, const PropOpts& po) {
        const json cfg = load_config(vv.config);
        verify::PropertyOptions opt;
        opt.n_perm =
            static_cast<int>(pick_num(cfg, po.n_perm, vv.n_perm, "n_perm", "--n-perm", 999.0));
        return emit_report(
            verify::run_property_suite(fam, pick_num(cfg, po.a, vv.a, "a", "--a"),
                                       pick_num(cfg, po.b, vv.b, "b", "--b"),
                                       pick_num(cfg, po.c, vv.c, "c", "--c"), vv.n, vv.seed, opt),
            vv.report);
    };
    act(vf_hv, [&] { return run_property(maps::PairFamily::hv, po_hv); });
    act(vf_kv, [&] { return run_property(maps::PairFamily::kv, po_kv); });

    auto* vf_rec = verb(vf, "recurrences", "survival-moment recurrence suite");
    add_common(vf_rec);
    PropOpts ro;
    ro.a = vf_rec->add_option("--A", vv.A, "Kummer shape A (alpha = A/p)");
    ro.c = vf_rec->add_option("--c", vv.c, "gamma shape c");
    ro.b = vf_rec->add_option("--p", vv.p, "common rate p");
    auto* ro_kmax = vf_rec->add_option("--k-max", vv.k_max, "largest k checked (default 10)");
    act(vf_rec, [&, ro_kmax] {
        const json cfg = load_config(vv.config);
        return emit_report(
            verify::check_moment_recurrences(
                pick_num(cfg, ro.a, vv.A, "A", "--A"), pick_num(cfg, ro.c, vv.c, "c", "--c"),
                pick_num(cfg, ro.b, vv.p, "p", "--p"),
                static_cast<int>(pick_num(cfg, ro_kmax, vv.k_max, "k_max", "--k-max", 10.0)),
                vv.n, vv.seed),
            vv.report);
    });

    auto* vf_gen = verb(vf, "genfn", "generating-function suite (series vs integral, ODE table)");
    add_common(vf_gen);
    PropOpts go;
    go.a = vf_gen->add_option("--A", vv.A, "Kummer shape A");
    go.c = vf_gen->add_option("--c", vv.c, "gamma shape c");
    go.b = vf_gen->add_option("--p", vv.p, "common rate p");
    vf_gen->add_option("--z", vv.z, "evaluation points in (-0.9,0.9) \\ {0}")->delimiter(',');
    act(vf_gen, [&] {
        const json cfg = load_config(vv.config);
        std::vector<double> zs = vv.z;
        if (zs.empty() && cfg.contains("z_grid")) zs = number_array(cfg.at("z_grid"), "z_grid");
        if (zs.empty()) zs = {-0.75, -0.5, -0.25, 0.25, 0.5, 0.75};
        return emit_report(
            verify::check_generating_function(pick_num(cfg, go.a, vv.A, "A", "--A"),
                                              pick_num(cfg, go.c, vv.c, "c", "--c"),
                                              pick_num(cfg, go.b, vv.p, "p", "--p"), zs),
            vv.report);
    });

    auto* vf_kou = verb(vf, "koudou", "weighted-moment factorization suite");
    add_common(vf_kou);
    PropOpts ko;
    ko.a = vf_kou->add_option("--a", vv.a, "Kummer shape a");
    ko.b = vf_kou->add_option("--b", vv.b, "second shape b");
    ko.c = vf_kou->add_option("--c", vv.c, "common rate c");
    act(vf_kou, [&] {
        const json cfg = load_config(vv.config);
        verify::KoudouGrid grid = verify::default_koudou_grid();
        if (cfg.contains("points")) {
            const auto& pts = cfg.at("points");
            if (!pts.is_array()) throw InputError("config key 'points' must be an array");
            grid.points.clear();
            for (const auto& e : pts) {
                const auto vals = number_array(e, "points");
                if (vals.size() != 3)
                    throw InputError("config key 'points' needs [alpha,beta,sigma] triples");
                grid.points.push_back({vals[0], vals[1], vals[2]});
            }
        }
        if (cfg.contains("s_values")) grid.s_values = number_array(cfg.at("s_values"), "s_values");
        return emit_report(
            verify::check_koudou_identities(pick_num(cfg, ko.a, vv.a, "a", "--a"),
                                            pick_num(cfg, ko.b, vv.b, "b", "--b"),
                                            pick_num(cfg, ko.c, vv.c, "c", "--c"), grid, vv.n,
                                            vv.seed),
            vv.report);
    });

    auto* vf_tree = verb(vf, "tree", "tree-transform suite");
    add_common(vf_tree);
    PropOpts to;
    to.a = vf_tree->add_option("--tree", vv.tree_path, "tree JSON file");
    vf_tree->add_option("--a", vv.tree_a, "per-node shape parameters")->delimiter(',');
    to.c = vf_tree->add_option("--c", vv.c, "global rate multiplier");
    to.n_perm = vf_tree->add_option("--n-perm", vv.n_perm, "permutations (default 999)");
    act(vf_tree, [&] {
        const json cfg = load_config(vv.config);
        const trees::TreeSpec tree = [&]() -> trees::TreeSpec {
            if (to.a->count() > 0)
                return trees::TreeSpec::from_json(
                    parse_json(read_file(vv.tree_path), vv.tree_path));
            if (cfg.contains("tree")) return trees::TreeSpec::from_json(cfg.at("tree"));
            throw InputError("missing --tree (or config key 'tree')");
        }();
        std::vector<double> a = vv.tree_a;
        if (a.empty() && cfg.contains("a")) a = number_array(cfg.at("a"), "a");
        if (a.empty()) throw InputError("missing --a (or config key 'a')");
        check_a_size(a, tree);
        const auto n_perm = static_cast<std::uint32_t>(
            pick_num(cfg, to.n_perm, vv.n_perm, "n_perm", "--n-perm", 999.0));
        return emit_report(
            verify::run_tree_suite(tree, a, pick_num(cfg, to.c, vv.c, "c", "--c", 1.0), vv.n,
                                   vv.seed, n_perm),
            vv.report);
    });

    // ---- parse and dispatch ------------------------------------------------------
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "kummer: " << e.what() << "\nRun with --help for usage.\n";
        return 2;
    }
    if (workers_opt->count() > 0) par::set_worker_count(workers);
    for (const auto& [sub, fn] : actions)
        if (sub->parsed()) return fn();
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    try {
        return run_cli_impl(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "kummer: error: " << e.what() << "\n";
        return 2;
    }
}

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace kummer::cli
