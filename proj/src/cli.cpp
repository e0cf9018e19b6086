#include "wcs/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "wcs/exact.hpp"
#include "wcs/generators.hpp"
#include "wcs/graph.hpp"
#include "wcs/io.hpp"
#include "wcs/metrics.hpp"
#include "wcs/model.hpp"
#include "wcs/propagation.hpp"
#include "wcs/sampling.hpp"

namespace wcs::cli {

std::string fnv1a_hex(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

// Registers options on a CLI11 app and remembers how to dump their resolved
// values, so a run can be written to and rebuilt from a manifest.
class Flags {
public:
    explicit Flags(CLI::App* app) : app_(app) {}

    template <class T>
    CLI::Option* option(const std::string& name, T& ref, const std::string& desc) {
        dump_.push_back([name, &ref](json& j) { j[name] = ref; });
        return app_->add_option("--" + name, ref, desc)->capture_default_str();
    }
    CLI::Option* flag(const std::string& name, bool& ref, const std::string& desc) {
        dump_.push_back([name, &ref](json& j) { j[name] = ref; });
        return app_->add_flag("--" + name, ref, desc);
    }
    json params() const {
        json j = json::object();
        for (const auto& d : dump_) d(j);
        return j;
    }

private:
    CLI::App* app_;
    std::vector<std::function<void(json&)>> dump_;
};

std::vector<std::string> to_args(const json& params) {
    std::vector<std::string> args;
    for (const auto& [k, v] : params.items()) {
        if (v.is_boolean()) {
            if (v.get<bool>()) args.push_back("--" + k);
        } else if (v.is_string()) {
            auto s = v.get<std::string>();
            if (!s.empty()) args.push_back("--" + k + "=" + s);
        } else if (v.is_number()) {
            args.push_back("--" + k + "=" + v.dump());
        } else {
            throw ValidationError("unsupported value for parameter '" + k + "'");
        }
    }
    return args;
}

std::string absolute(const std::string& path) {
    if (path.empty()) return path;
    return fs::absolute(path).lexically_normal().string();
}

struct Inputs {
    json j = json::object();

    std::string load(const std::string& key, const std::string& path) {
        std::string text = read_file(path);
        j[key] = {{"path", path}, {"fnv1a64", fnv1a_hex(text)}};
        return text;
    }
};

void write_manifest(const fs::path& dir, const std::string& command, const json& params, std::uint64_t seed,
                    const Inputs& inputs) {
    json m = {{"command", command},
              {"parameters", params},
              {"seed", seed},
              {"inputs", inputs.j},
              {"version", kVersion}};
    write_file((dir / "manifest.json").string(), m.dump(2) + "\n");
}

fs::path prepare_dir(const std::string& out) {
    fs::path dir(out);
    fs::create_directories(dir);
    return dir;
}

std::string names(const Network& net, const std::vector<int>& vars) {
    std::string s;
    for (std::size_t k = 0; k < vars.size(); ++k) {
        if (k) s += ' ';
        s += net.variable(vars[k]).name;
    }
    return s;
}

class KeyValueCsv {
public:
    KeyValueCsv() { s_ << "key,value\n"; }
    void add(const std::string& k, const std::string& v) { s_ << k << ',' << v << '\n'; }
    void add(const std::string& k, double v) { add(k, format_double(v)); }
    void add(const std::string& k, std::uint64_t v) { add(k, std::to_string(v)); }
    void add(const std::string& k, int v) { add(k, std::to_string(v)); }
    std::string str() const { return s_.str(); }

private:
    std::ostringstream s_;
};

Cutset make_cutset(const Network& net, const Evidence& e, const std::string& mode, int w, bool nested) {
    if (mode == "loop") return find_loop_cutset(net, e);
    if (w < 1) throw ValidationError("w must be at least 1");
    if (nested) return nested_w_cutsets(net, e, 1, w).back();
    return find_w_cutset(net, e, w);
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
    std::string family;
    GenSpec spec;
    int evidence_count = 0;
    std::string evidence_policy = "leaves";
};

void bind(Flags& f, GenerateArgs& a) {
    f.option("family", a.family, "multipartite | two-layer | grid | coding")
        ->required()
        ->check(CLI::IsMember({"multipartite", "two-layer", "grid", "coding"}));
    f.option("seed", a.spec.seed, "random seed");
    f.option("n-root", a.spec.n_root, "multipartite: root count");
    f.option("n-total", a.spec.n_total, "multipartite: variable count");
    f.option("parents", a.spec.parents, "multipartite: parents per non-root");
    f.option("roots", a.spec.roots, "two-layer: root count");
    f.option("leaves", a.spec.leaves, "two-layer: leaf count");
    f.option("min-parents", a.spec.min_parents, "two-layer: fewest parents per leaf");
    f.option("max-parents", a.spec.max_parents, "two-layer: most parents per leaf");
    f.option("rows", a.spec.rows, "grid rows");
    f.option("cols", a.spec.cols, "grid columns");
    f.option("code-bits", a.spec.code_bits, "coding: number of code bits K");
    f.option("sigma", a.spec.sigma, "coding: channel noise");
    f.option("flip", a.spec.flip, "coding: channel flip probability (negative derives it from sigma)");
    f.option("evidence-count", a.evidence_count, "observed variables (not for coding)");
    f.option("evidence-policy", a.evidence_policy, "leaves | any")->check(CLI::IsMember({"leaves", "any"}));
}

void cmd_generate(GenerateArgs& a, const json& params, const fs::path& dir, std::ostream& out) {
    a.spec.family = parse_family(a.family);
    a.spec.validate();
    auto inst = generate(a.spec);
    if (a.evidence_count != 0) {
        if (a.spec.family == Family::coding) throw ValidationError("coding networks carry their own evidence");
        auto policy = a.evidence_policy == "any" ? EvidencePolicy::any : EvidencePolicy::leaves;
        inst.evidence = pick_evidence(inst.net, policy, a.evidence_count, splitmix64(a.spec.seed));
    }
    write_file((dir / "network.json").string(), serialize_network(inst.net));
    write_file((dir / "evidence.json").string(), serialize_evidence(inst.evidence, inst.net));
    write_manifest(dir, "generate", params, a.spec.seed, Inputs{});
    out << "network.json: " << inst.net.size() << " variables\n"
        << "evidence.json: " << inst.evidence.size() << " bindings\n";
}

// ---------------------------------------------------------------- cutset

struct CutsetArgs {
    std::string net, evidence, mode = "loop";
    int w = 1;
    bool nested = false;
};

void bind(Flags& f, CutsetArgs& a) {
    f.option("net", a.net, "network file")->required();
    f.option("evidence", a.evidence, "evidence file");
    f.option("mode", a.mode, "loop | w")->check(CLI::IsMember({"loop", "w"}));
    f.option("w", a.w, "width bound for --mode w");
    f.flag("nested", a.nested, "report the nested chain C_1 ⊇ ... ⊇ C_w");
}

struct Loaded {
    Network net;
    Evidence e;
};

Loaded load(Inputs& in, const std::string& net, const std::string& evidence) {
    Loaded l;
    l.net = parse_network(in.load("net", net));
    if (!evidence.empty()) l.e = parse_evidence(in.load("evidence", evidence), l.net);
    return l;
}

void cmd_cutset(CutsetArgs& a, const json& params, const fs::path& dir, std::ostream& out) {
    Inputs in;
    auto [net, e] = load(in, a.net, a.evidence);
    if (a.mode == "w" && a.w < 1) throw ValidationError("w must be at least 1");
    if (a.nested && a.mode != "w") throw ValidationError("--nested requires --mode w");

    std::vector<std::pair<std::string, Cutset>> chain;
    if (a.mode == "loop") {
        chain.emplace_back("", find_loop_cutset(net, e));
    } else if (a.nested) {
        auto cs = nested_w_cutsets(net, e, 1, a.w);
        for (std::size_t k = 0; k < cs.size(); ++k) chain.emplace_back(std::to_string(k + 1), cs[k]);
    } else {
        chain.emplace_back(std::to_string(a.w), find_w_cutset(net, e, a.w));
    }

    std::ostringstream cut, clusters;
    cut << "kind,w,size,certified_width,proper_subset_of_previous,members\n";
    clusters << "kind,w,cluster_size,count\n";
    const Cutset* prev = nullptr;
    for (const auto& [w, c] : chain) {
        std::string subset;
        if (prev) {
            bool sub = c.members.size() < prev->members.size() &&
                       std::includes(prev->members.begin(), prev->members.end(), c.members.begin(), c.members.end());
            subset = sub ? "1" : "0";
        }
        cut << a.mode << ',' << w << ',' << c.members.size() << ',' << c.certified_width << ',' << subset << ','
            << names(net, c.members) << '\n';

        std::vector<int> conditioned = c.members;
        for (int v : e.variables()) conditioned.push_back(v);
        std::sort(conditioned.begin(), conditioned.end());
        conditioned.erase(std::unique(conditioned.begin(), conditioned.end()), conditioned.end());
        auto tree = build_join_tree(net, conditioned);
        std::map<std::size_t, int> hist;
        for (const auto& cl : tree.clusters) ++hist[cl.size()];
        for (auto [size, count] : hist) clusters << a.mode << ',' << w << ',' << size << ',' << count << '\n';
        prev = &c;
    }
    write_file((dir / "cutset.csv").string(), cut.str());
    write_file((dir / "clusters.csv").string(), clusters.str());
    write_manifest(dir, "cutset", params, 0, in);
    out << cut.str();
}

// ---------------------------------------------------------------- infer

struct InferArgs {
    std::string net, evidence, method = "exact", cutset_mode = "loop";
    int w = 1;
    bool nested = false;
    int max_iters = 25;
    double tol = 1e-8;
};

void bind(Flags& f, InferArgs& a) {
    f.option("net", a.net, "network file")->required();
    f.option("evidence", a.evidence, "evidence file");
    f.option("method", a.method, "exact | ibp | cutset-cond")->check(CLI::IsMember({"exact", "ibp", "cutset-cond"}));
    f.option("cutset-mode", a.cutset_mode, "loop | w")->check(CLI::IsMember({"loop", "w"}));
    f.option("w", a.w, "width bound for --cutset-mode w");
    f.flag("nested", a.nested, "take the w-cutset from the nested chain starting at w = 1");
    f.option("max-iters", a.max_iters, "ibp: iteration limit");
    f.option("tol", a.tol, "ibp: convergence tolerance");
}

void cmd_infer(InferArgs& a, const json& params, const fs::path& dir, std::ostream& out) {
    Inputs in;
    auto [net, e] = load(in, a.net, a.evidence);
    KeyValueCsv summary;
    summary.add("method", a.method);
    Marginals m;
    if (a.method == "ibp") {
        IbpOptions opts;
        opts.max_iters = a.max_iters;
        opts.tol = a.tol;
        auto r = ibp_posteriors(net, e, opts);
        m = std::move(r.marginals);
        summary.add("iterations", r.iterations);
        summary.add("converged", r.converged ? 1 : 0);
        summary.add("zero_belief", static_cast<int>(r.zero_belief.size()));
    } else {
        if (a.method == "exact") {
            m = jtc_posteriors(net, e);
        } else {
            auto c = make_cutset(net, e, a.cutset_mode, a.w, a.nested);
            summary.add("cutset_size", static_cast<int>(c.members.size()));
            summary.add("certified_width", c.certified_width);
            m = cutset_conditioning(net, e, c);
        }
        double pe = m.evidence_probability ? *m.evidence_probability : evidence_probability(net, e);
        summary.add("p_evidence", pe);
    }
    write_file((dir / "marginals.csv").string(), marginals_csv(m, net));
    write_file((dir / "summary.csv").string(), summary.str());
    write_manifest(dir, "infer", params, 0, in);
    out << summary.str();
}

// ---------------------------------------------------------------- sample

struct SampleArgs {
    std::string net, evidence, method = "cutset", cutset_mode = "loop";
    int w = 1;
    bool nested = false;
    int chains = 10;
    int samples = 1000;
    int burn_in = 0;
    std::uint64_t seed = 0;
    std::string estimator = "mixture", scan = "systematic", init = "ibp";
    bool naive = false;
    int posterior_every = 1;
    int threads = 1;
    int update_interval = 2500;
    int max_updates = 10;
    double alpha = 0.1;
    std::string exact_ref;
};

void bind(Flags& f, SampleArgs& a) {
    f.option("net", a.net, "network file")->required();
    f.option("evidence", a.evidence, "evidence file");
    f.option("method", a.method, "gibbs | cutset | lw | aisbn")
        ->check(CLI::IsMember({"gibbs", "cutset", "lw", "aisbn"}));
    f.option("cutset-mode", a.cutset_mode, "loop | w")->check(CLI::IsMember({"loop", "w"}));
    f.option("w", a.w, "width bound for --cutset-mode w");
    f.flag("nested", a.nested, "take the w-cutset from the nested chain starting at w = 1");
    f.option("chains", a.chains, "independent chains M");
    f.option("samples", a.samples, "samples per chain T");
    f.option("burn-in", a.burn_in, "discarded samples per chain");
    f.option("seed", a.seed, "random seed");
    f.option("estimator", a.estimator, "mixture | histogram")->check(CLI::IsMember({"mixture", "histogram"}));
    f.option("scan", a.scan, "systematic | random")->check(CLI::IsMember({"systematic", "random"}));
    f.option("init", a.init, "ibp | uniform")->check(CLI::IsMember({"ibp", "uniform"}));
    f.flag("naive", a.naive, "cutset: repropagate the whole tree for every candidate value");
    f.option("posterior-every", a.posterior_every, "cutset: accumulate non-cutset posteriors every k-th sample");
    f.option("threads", a.threads, "worker threads (results do not depend on it)");
    f.option("update-interval", a.update_interval, "aisbn: samples between table updates");
    f.option("max-updates", a.max_updates, "aisbn: number of table updates");
    f.option("alpha", a.alpha, "confidence level is 1 - alpha");
    f.option("exact-ref", a.exact_ref, "exact marginals CSV to score against");
}

struct SampleOutcome {
    SamplerResult result;
    std::optional<Cutset> cutset;
};

SampleOutcome run_sampler(const Network& net, const Evidence& e, const SampleArgs& a) {
    SamplingConfig cfg;
    cfg.chains = a.chains;
    cfg.samples = a.samples;
    cfg.burn_in = a.burn_in;
    cfg.seed = a.seed;
    cfg.estimator = a.estimator == "histogram" ? EstimatorKind::histogram : EstimatorKind::mixture;
    cfg.scan = a.scan == "random" ? ScanOrder::random : ScanOrder::systematic;
    cfg.init = a.init == "uniform" ? InitMode::uniform : InitMode::ibp;
    cfg.incremental = !a.naive;
    cfg.posterior_every = a.posterior_every;
    cfg.threads = a.threads;
    cfg.update_interval = a.update_interval;
    cfg.max_updates = a.max_updates;
    cfg.validate();

    SampleOutcome o;
    if (a.method == "gibbs") {
        o.result = gibbs_run(net, e, cfg);
    } else if (a.method == "cutset") {
        o.cutset = make_cutset(net, e, a.cutset_mode, a.w, a.nested);
        o.result = cutset_gibbs_run(net, e, *o.cutset, cfg);
    } else if (a.method == "lw") {
        o.result = likelihood_weighting_run(net, e, cfg);
    } else {
        o.result = aisbn_run(net, e, cfg);
    }
    return o;
}

struct Scores {
    std::optional<MetricsReport> report;
    std::optional<ChainStatistics> chains;
};

Scores score(const Evidence& e, const SampleArgs& a, const SamplerResult& r,
             const Marginals* exact) {
    Scores s;
    if (r.per_chain.size() >= 2) s.chains = batch_means_ci(r.per_chain, a.alpha, e);
    if (exact) s.report = compare_marginals(*exact, r.pooled, e);
    return s;
}

void add_stats(KeyValueCsv& kv, const SampleArgs& a, const SampleOutcome& o, const Scores& s) {
    const auto& r = o.result;
    kv.add("method", a.method);
    kv.add("sampling_set_size", static_cast<int>(r.sampled.size()));
    if (o.cutset) kv.add("certified_width", o.cutset->certified_width);
    kv.add("chains", a.chains);
    kv.add("samples_per_chain", a.samples);
    kv.add("total_samples", r.total_samples);
    kv.add("unique_tuples", r.unique_tuples);
    kv.add("dead_ends", r.dead_ends);
    kv.add("frozen", static_cast<int>(r.frozen.size()));
    kv.add("non_ergodic", r.frozen.empty() ? 0 : 1);
    kv.add("messages", r.messages);
    if (a.method == "lw" || a.method == "aisbn") {
        kv.add("weight_mean", r.weight_mean);
        kv.add("weight_stderr", r.weight_stderr);
    }
    if (s.chains) kv.add("delta_90", s.chains->mean_half_width);
    if (s.report) {
        kv.add("mse", s.report->mse);
        kv.add("avg_abs", s.report->avg_abs);
        kv.add("kl", s.report->kl);
        kv.add("hellinger", s.report->hellinger);
        kv.add("kl_infinite", static_cast<int>(s.report->kl_infinite.size()));
    }
}

json timing(const SamplerResult& r) {
    return {{"seconds", r.seconds}, {"samples_per_second", r.samples_per_second}};
}

void cmd_sample(SampleArgs& a, const json& params, const fs::path& dir, std::ostream& out) {
    Inputs in;
    auto [net, e] = load(in, a.net, a.evidence);
    std::optional<Marginals> exact;
    if (!a.exact_ref.empty()) exact = parse_marginals_csv(in.load("exact-ref", a.exact_ref), net);

    auto o = run_sampler(net, e, a);
    auto s = score(e, a, o.result, exact ? &*exact : nullptr);
    KeyValueCsv kv;
    add_stats(kv, a, o, s);

    write_file((dir / "estimates.csv").string(), marginals_csv(o.result.pooled, net));
    if (s.chains) write_file((dir / "chains.csv").string(), chain_statistics_csv(*s.chains, net));
    if (s.report) write_file((dir / "metrics.csv").string(), metrics_csv(*s.report, net, e));
    write_file((dir / "stats.csv").string(), kv.str());
    write_file((dir / "timing.json").string(), timing(o.result).dump(2) + "\n");
    write_manifest(dir, "sample", params, a.seed, in);
    out << kv.str();
}

// ---------------------------------------------------------------- benchmark

struct BenchmarkArgs {
    std::string suite;
};

void bind(Flags& f, BenchmarkArgs& a) { f.option("suite", a.suite, "JSON array of sample run descriptors")->required(); }

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

void cmd_benchmark(BenchmarkArgs& a, const json& params, const fs::path& dir, std::ostream& out) {
    Inputs in;
    json suite;
    try {
        suite = json::parse(in.load("suite", a.suite));
    } catch (const json::parse_error& ex) {
        throw ParseError(std::string("suite: ") + ex.what());
    }
    if (!suite.is_array()) throw ParseError("suite must be a JSON array of run descriptors");
    const fs::path base = fs::path(a.suite).parent_path();

    std::ostringstream table;
    table << "run,name,network,method,cutset_mode,w,sampling_set_size,certified_width,chains,samples,"
             "unique_tuples,non_ergodic,mse,avg_abs,kl,hellinger,delta_90\n";
    json times = json::array();
    std::map<std::string, Marginals> exact_cache;

    for (std::size_t i = 0; i < suite.size(); ++i) {
        json d = suite[i];
        if (!d.is_object()) throw ParseError("run " + std::to_string(i) + " is not an object");
        std::string name = d.value("name", "run" + std::to_string(i));
        d.erase("name");
        for (const char* key : {"net", "evidence", "exact-ref"})
            if (d.contains(key) && d[key].is_string()) {
                fs::path p(d[key].get<std::string>());
                if (p.is_relative()) p = base / p;
                d[key] = absolute(p.string());
            }

        SampleArgs sa;
        CLI::App app("run " + std::to_string(i));
        Flags f(&app);
        bind(f, sa);
        auto args = to_args(d);
        std::reverse(args.begin(), args.end());
        try {
            app.parse(std::move(args));
        } catch (const CLI::ParseError& ex) {
            throw ValidationError("run " + std::to_string(i) + " (" + name + "): " + ex.what());
        }

        const std::string tag = "run" + std::to_string(i);
        Network net = parse_network(in.load(tag + ".net", sa.net));
        Evidence e;
        if (!sa.evidence.empty()) e = parse_evidence(in.load(tag + ".evidence", sa.evidence), net);
        const Marginals* exact = nullptr;
        std::optional<Marginals> ref;
        if (!sa.exact_ref.empty()) {
            ref = parse_marginals_csv(in.load(tag + ".exact-ref", sa.exact_ref), net);
            exact = &*ref;
        } else {
            const std::string key = sa.net + "\n" + sa.evidence;
            auto it = exact_cache.find(key);
            if (it == exact_cache.end()) {
                try {
                    it = exact_cache.emplace(key, jtc_posteriors(net, e)).first;
                } catch (const ResourceCapError&) {
                }
            }
            if (it != exact_cache.end()) exact = &it->second;
        }

        auto o = run_sampler(net, e, sa);
        auto s = score(e, sa, o.result, exact);
        std::optional<double> mse, abs, kl, hel, d90;
        if (s.report) {
            mse = s.report->mse;
            abs = s.report->avg_abs;
            kl = s.report->kl;
            hel = s.report->hellinger;
        }
        if (s.chains) d90 = s.chains->mean_half_width;
        const bool cutset = sa.method == "cutset";
        table << i << ',' << name << ',' << fs::path(sa.net).filename().string() << ',' << sa.method << ','
              << (cutset ? sa.cutset_mode : "") << ',' << (cutset && sa.cutset_mode == "w" ? std::to_string(sa.w) : "")
              << ',' << o.result.sampled.size() << ',' << (o.cutset ? std::to_string(o.cutset->certified_width) : "")
              << ',' << sa.chains << ',' << sa.samples << ',' << o.result.unique_tuples << ','
              << (o.result.frozen.empty() ? 0 : 1) << ',' << cell(mse) << ',' << cell(abs) << ',' << cell(kl) << ','
              << cell(hel) << ',' << cell(d90) << '\n';

        auto run_dir = dir / "runs" / (std::to_string(i) + "_" + name);
        fs::create_directories(run_dir);
        write_file((run_dir / "estimates.csv").string(), marginals_csv(o.result.pooled, net));
        json t = timing(o.result);
        t["run"] = i;
        t["name"] = name;
        times.push_back(t);
    }
    write_file((dir / "benchmark.csv").string(), table.str());
    write_file((dir / "timing.json").string(), times.dump(2) + "\n");
    write_manifest(dir, "benchmark", params, 0, in);
    out << table.str();
}

// ---------------------------------------------------------------- driver

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth);

struct ReplayArgs {
    std::string manifest;
};

void cmd_replay(const ReplayArgs& a, const std::string& out_dir, std::ostream& out, std::ostream& err, int depth,
                int& code) {
    json m;
    try {
        m = json::parse(read_file(a.manifest));
    } catch (const json::parse_error& ex) {
        throw ParseError(std::string("manifest: ") + ex.what());
    }
    if (!m.contains("command") || !m.contains("parameters")) throw ParseError("manifest lacks command or parameters");
    if (m.contains("inputs"))
        for (const auto& [key, input] : m["inputs"].items()) {
            auto path = input.at("path").get<std::string>();
            if (fnv1a_hex(read_file(path)) != input.at("fnv1a64").get<std::string>())
                throw ValidationError("input '" + key + "' (" + path + ") changed since the manifest was written");
        }
    if (m.value("version", "") != kVersion)
        err << "warning: manifest written by version " << m.value("version", "?") << ", replaying with " << kVersion
            << "\n";
    std::vector<std::string> args{m["command"].get<std::string>()};
    auto rest = to_args(m["parameters"]);
    args.insert(args.end(), rest.begin(), rest.end());
    args.push_back("--out=" + out_dir);
    code = dispatch(args, out, err, depth + 1);
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth) {
    CLI::App app("Cutset sampling and exact inference for discrete Bayesian networks", "wcs");
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string out_dir;
    auto add_out = [&](CLI::App* sub) { sub->add_option("--out", out_dir, "output directory")->required(); };

    GenerateArgs ga;
    auto* gen = app.add_subcommand("generate", "generate a benchmark network");
    Flags gf(gen);
    bind(gf, ga);
    add_out(gen);

    CutsetArgs ca;
    auto* cut = app.add_subcommand("cutset", "find a loop-cutset or w-cutset");
    Flags cf(cut);
    bind(cf, ca);
    add_out(cut);

    InferArgs ia;
    auto* inf = app.add_subcommand("infer", "exact or propagation-based posteriors");
    Flags inff(inf);
    bind(inff, ia);
    add_out(inf);

    SampleArgs sa;
    auto* smp = app.add_subcommand("sample", "sampling-based posteriors");
    Flags sf(smp);
    bind(sf, sa);
    add_out(smp);

    BenchmarkArgs ba;
    auto* bench = app.add_subcommand("benchmark", "run a suite of sampling runs");
    Flags bf(bench);
    bind(bf, ba);
    add_out(bench);

    ReplayArgs ra;
    auto* rep = app.add_subcommand("replay", "re-run a manifest");
    rep->add_option("--manifest", ra.manifest, "manifest.json of an earlier run")->required();
    add_out(rep);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(std::move(rev));
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, er;
        int code = app.exit(e, o, er);
        out << o.str();
        err << er.str();
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*rep) {
            if (depth > 0) throw ValidationError("a manifest cannot replay another manifest");
            int code = kOk;
            cmd_replay(ra, out_dir, out, err, depth, code);
            return code;
        }
        auto dir = prepare_dir(out_dir);
        if (*gen) {
            cmd_generate(ga, gf.params(), dir, out);
        } else if (*cut) {
            ca.net = absolute(ca.net);
            ca.evidence = absolute(ca.evidence);
            cmd_cutset(ca, cf.params(), dir, out);
        } else if (*inf) {
            ia.net = absolute(ia.net);
            ia.evidence = absolute(ia.evidence);
            cmd_infer(ia, inff.params(), dir, out);
        } else if (*smp) {
            sa.net = absolute(sa.net);
            sa.evidence = absolute(sa.evidence);
            sa.exact_ref = absolute(sa.exact_ref);
            cmd_sample(sa, sf.params(), dir, out);
        } else if (*bench) {
            ba.suite = absolute(ba.suite);
            cmd_benchmark(ba, bf.params(), dir, out);
        }
    } catch (const ZeroEvidenceError& e) {
        err << "error: " << e.what() << "\n";
        return kZeroEvidence;
    } catch (const ResourceCapError& e) {
        err << "error: resource cap: " << e.what() << "\n";
        return kResourceCap;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    return dispatch(args, out, err, 0);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

}  // namespace wcs::cli
