#include <disc/disc.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Core>

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct KernelOpts {
    std::string kernel = "rbf_self_tuning";
    int knn_k = 0;
    double epsilon = 1.0;
    bool zscore = false;
};

void add_kernel_opts(CLI::App* cmd, KernelOpts& opts) {
    cmd->add_option("--kernel", opts.kernel, "rbf_self_tuning or rbf_fixed")
        ->check(CLI::IsMember({"rbf_self_tuning", "rbf_fixed"}));
    cmd->add_option("--knn-k", opts.knn_k, "neighbor index for self-tuning bandwidth (0 = ceil(log p))");
    cmd->add_option("--epsilon", opts.epsilon, "bandwidth for the fixed kernel");
    cmd->add_flag("--zscore", opts.zscore, "standardize feature columns before building the graph");
}

disc::KernelSpec make_kernel(const KernelOpts& opts) {
    disc::KernelSpec spec;
    spec.kind = opts.kernel == "rbf_fixed" ? disc::KernelKind::rbf_fixed
                                           : disc::KernelKind::rbf_self_tuning;
    spec.knn_k = opts.knn_k;
    spec.epsilon = opts.epsilon;
    return spec;
}

std::string checksum_hex(const fs::path& path) {
    std::ostringstream out;
    out << "fnv1a:" << std::hex << std::setw(16) << std::setfill('0') << disc::fnv1a_file(path);
    return out.str();
}

json kernel_json(const KernelOpts& opts, Eigen::Index p) {
    json j;
    j["kernel"] = opts.kernel;
    j["knn_k"] = opts.kernel == "rbf_fixed"
                     ? opts.knn_k
                     : (opts.knn_k > 0 ? opts.knn_k : disc::default_knn(p));
    j["epsilon"] = opts.epsilon;
    j["zscore"] = opts.zscore;
    return j;
}

void write_cells_csv(const fs::path& path, const std::vector<disc::ExperimentCell>& cells) {
    disc::detail::AtomicFile file(path);
    auto& out = file.stream();
    out << "alpha,l,trial,quantity,value\n";
    for (const auto& c : cells)
        out << disc::detail::format_value(c.alpha) << ',' << c.l << ',' << c.trial << ','
            << c.quantity << ',' << disc::detail::format_value(c.value) << '\n';
    file.commit();
}

int cmd_run(const std::string& path_a, const std::string& path_b, const fs::path& out_dir,
            int d_a, int d_b, int r, int k_clusters, uint64_t seed, bool no_header,
            const KernelOpts& kopts) {
    disc::DataMatrix a = disc::load_csv(path_a, !no_header);
    disc::DataMatrix b_raw = disc::load_csv(path_b, !no_header);
    auto perm = disc::align(a, b_raw);
    disc::DataMatrix b = disc::apply_alignment(b_raw, perm, a.feature_ids);

    Eigen::MatrixXd xa = kopts.zscore ? disc::zscore_columns(a.values) : a.values;
    Eigen::MatrixXd xb = kopts.zscore ? disc::zscore_columns(b.values) : b.values;

    disc::KernelSpec kernel = make_kernel(kopts);
    disc::PairResult res = disc::disc_pair(xa, xb, kernel, d_a, d_b, r);

    fs::create_directories(out_dir);
    json summary = kernel_json(kopts, a.p());
    summary["d_a"] = d_a;
    summary["d_b"] = d_b;
    summary["r"] = static_cast<int>(res.a.sigma.size());
    summary["seed"] = seed;
    summary["n_a"] = static_cast<long>(a.n());
    summary["n_b"] = static_cast<long>(b.n());
    summary["p"] = static_cast<long>(a.p());
    summary["elbow_a"] = disc::significance_elbow(res.a.sigma);
    summary["elbow_b"] = disc::significance_elbow(res.b.sigma);
    summary["inputs"] = {{"a", {{"path", path_a}, {"checksum", checksum_hex(path_a)}}},
                         {"b", {{"path", path_b}, {"checksum", checksum_hex(path_b)}}}};
    summary["k_clusters"] = k_clusters;

    disc::save_loadings(out_dir / "v_a.csv", a.feature_ids, res.a.v);
    disc::save_loadings(out_dir / "v_b.csv", a.feature_ids, res.b.v);
    disc::save_sigma(out_dir / "sigma_a.csv", res.a.sigma);
    disc::save_sigma(out_dir / "sigma_b.csv", res.b.sigma);

    if (k_clusters > 0) {
        auto ca = disc::cluster_features(res.a.v, k_clusters, seed);
        auto cb = disc::cluster_features(res.b.v, k_clusters, seed);
        disc::detail::AtomicFile file(out_dir / "clusters.csv");
        auto& out = file.stream();
        out << "feature_id,cluster_a,cluster_b\n";
        for (Eigen::Index i = 0; i < a.p(); ++i)
            out << a.feature_ids[static_cast<std::size_t>(i)] << ','
                << ca.labels[static_cast<std::size_t>(i)] << ','
                << cb.labels[static_cast<std::size_t>(i)] << '\n';
        file.commit();
        summary["inertia_a"] = ca.inertia;
        summary["inertia_b"] = cb.inertia;
    }
    disc::save_json(out_dir / "summary.json", summary);
    std::cout << "wrote " << out_dir.string() << " (elbow_a=" << summary["elbow_a"]
              << ", elbow_b=" << summary["elbow_b"] << ")\n";
    return 0;
}

int cmd_multi(const std::vector<std::string>& inputs, const fs::path& out_dir, int d, int r,
              uint64_t seed, bool no_header, const KernelOpts& kopts) {
    if (inputs.size() < 2) throw disc::ValidationError("need at least 2 input files");
    std::vector<disc::DataMatrix> data;
    data.push_back(disc::load_csv(inputs[0], !no_header));
    for (std::size_t i = 1; i < inputs.size(); ++i) {
        disc::DataMatrix raw = disc::load_csv(inputs[i], !no_header);
        auto perm = disc::align(data[0], raw);
        data.push_back(disc::apply_alignment(raw, perm, data[0].feature_ids));
    }

    disc::KernelSpec kernel = make_kernel(kopts);
    std::vector<disc::FeatureGraph> graphs;
    graphs.reserve(data.size());
    for (const auto& m : data)
        graphs.push_back(disc::build_graph(
            kopts.zscore ? disc::zscore_columns(m.values) : m.values, kernel));
    disc::MultiResult res = disc::disc_multi(graphs, d, r);

    fs::create_directories(out_dir);
    json summary = kernel_json(kopts, data[0].p());
    summary["d"] = d;
    summary["r"] = static_cast<int>(res.results[0].sigma.size());
    summary["seed"] = seed;
    summary["p"] = static_cast<long>(data[0].p());
    summary["datasets"] = json::array();
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const std::string tag = std::to_string(i + 1);
        disc::save_loadings(out_dir / ("v_" + tag + ".csv"), data[0].feature_ids, res.results[i].v);
        disc::save_sigma(out_dir / ("sigma_" + tag + ".csv"), res.results[i].sigma);
        summary["datasets"].push_back({{"path", inputs[i]},
                                       {"checksum", checksum_hex(inputs[i])},
                                       {"n", static_cast<long>(data[i].n())},
                                       {"dropped_basis_columns", res.dropped[i]},
                                       {"elbow", disc::significance_elbow(res.results[i].sigma)}});
    }
    disc::save_json(out_dir / "summary.json", summary);
    std::cout << "wrote " << out_dir.string() << " for " << inputs.size() << " datasets\n";
    return 0;
}

int cmd_synth(const std::string& problem, Eigen::Index n, uint64_t seed, double rho,
              const fs::path& out_dir) {
    disc::ToySpec spec;
    spec.problem = disc::parse_problem(problem);
    spec.n = n;
    spec.seed = seed;
    spec.rho = rho;
    disc::ToyOutput toy = disc::generate(spec);

    fs::create_directories(out_dir);
    json gt;
    for (std::size_t i = 0; i < toy.datasets.size(); ++i) {
        disc::save_csv(out_dir / ("data_" + toy.names[i] + ".csv"), toy.datasets[i]);
        gt[toy.names[i]] = toy.ground_truth[i];
    }
    disc::save_json(out_dir / "ground_truth.json", gt);
    std::cout << "wrote " << toy.datasets.size() << " datasets (p=" << toy.datasets[0].p()
              << ", n=" << n << ") to " << out_dir.string() << "\n";
    return 0;
}

int cmd_sbm_validate(const std::vector<int>& l_grid, const std::vector<double>& alpha_grid,
                     double p, double q, int trials, uint64_t seed, const fs::path& out_dir) {
    disc::SlopeExperiment slopes = disc::slope_experiment(l_grid, alpha_grid, p, q, trials, seed);

    json summary;
    summary["l_grid"] = l_grid;
    summary["alpha_grid"] = alpha_grid;
    summary["p"] = p;
    summary["q"] = q;
    summary["trials"] = trials;
    summary["seed"] = seed;
    summary["slopes"] = json::array();
    for (const auto& fit : slopes.fits)
        summary["slopes"].push_back({{"alpha", fit.alpha},
                                     {"quantity", fit.quantity},
                                     {"fitted", fit.fitted},
                                     {"theoretical", fit.theoretical}});

    std::vector<disc::ExperimentCell> cells = slopes.cells;
    summary["recovery"] = json::array();
    for (double alpha : alpha_grid) {
        disc::RecoveryExperiment rec = disc::recovery_experiment(l_grid, alpha, p, q, trials, seed);
        cells.insert(cells.end(), rec.cells.begin(), rec.cells.end());
        json entry;
        entry["alpha"] = alpha;
        entry["mean_error_rates"] = rec.mean_error_rates;
        summary["recovery"].push_back(entry);
    }

    fs::create_directories(out_dir);
    write_cells_csv(out_dir / "results.csv", cells);
    disc::save_json(out_dir / "summary.json", summary);
    std::cout << "wrote " << cells.size() << " cells to " << (out_dir / "results.csv").string()
              << "\n";
    for (const auto& fit : slopes.fits)
        std::cout << "alpha=" << fit.alpha << " " << fit.quantity << ": fitted=" << fit.fitted
                  << " theoretical=" << fit.theoretical << "\n";
    return 0;
}

int cmd_cluster(const std::string& input, int k, uint64_t seed, const fs::path& out_dir) {
    disc::Loadings loadings = disc::load_loadings(input);
    disc::KmeansResult km = disc::cluster_features(loadings.v, k, seed);

    fs::create_directories(out_dir);
    {
        disc::detail::AtomicFile file(out_dir / "clusters.csv");
        auto& out = file.stream();
        out << "feature_id,cluster\n";
        for (std::size_t i = 0; i < loadings.feature_ids.size(); ++i)
            out << loadings.feature_ids[i] << ',' << km.labels[i] << '\n';
        file.commit();
    }
    json summary;
    summary["input"] = input;
    summary["checksum"] = checksum_hex(input);
    summary["k_clusters"] = k;
    summary["seed"] = seed;
    summary["inertia"] = km.inertia;
    disc::save_json(out_dir / "summary.json", summary);
    std::cout << "inertia=" << km.inertia << "\n";
    return 0;
}

int cmd_eval(const std::vector<std::string>& train, const std::vector<std::string>& test, int d,
             int r, int k_clusters, uint64_t seed, bool no_header, const KernelOpts& kopts,
             const fs::path& out_dir) {
    if (train.size() < 2) throw disc::ValidationError("need at least 2 classes");
    if (train.size() != test.size())
        throw disc::ValidationError("train and test class counts differ");

    std::vector<disc::DataMatrix> train_data, test_data;
    train_data.push_back(disc::load_csv(train[0], !no_header));
    const std::vector<std::string> ids = train_data[0].feature_ids;
    for (std::size_t c = 1; c < train.size(); ++c) {
        disc::DataMatrix raw = disc::load_csv(train[c], !no_header);
        train_data.push_back(disc::apply_alignment(raw, disc::align(train_data[0], raw), ids));
    }
    for (std::size_t c = 0; c < test.size(); ++c) {
        disc::DataMatrix raw = disc::load_csv(test[c], !no_header);
        test_data.push_back(disc::apply_alignment(raw, disc::align(train_data[0], raw), ids));
    }

    disc::KernelSpec kernel = make_kernel(kopts);
    std::vector<disc::FeatureGraph> graphs;
    for (const auto& m : train_data)
        graphs.push_back(disc::build_graph(
            kopts.zscore ? disc::zscore_columns(m.values) : m.values, kernel));
    disc::MultiResult res = disc::disc_multi(graphs, d, r);

    const std::size_t classes = train.size();
    std::vector<Eigen::MatrixXd> train_meta(classes), test_meta(classes);
    for (std::size_t c = 0; c < classes; ++c) {
        disc::KmeansResult km = disc::cluster_features(res.results[c].v, k_clusters,
                                                       disc::derive_seed(seed, c));
        for (std::size_t m = 0; m < classes; ++m) {
            Eigen::MatrixXd tr_cols =
                disc::cluster_mean_features(train_data[m].values, km.labels, k_clusters);
            Eigen::MatrixXd te_cols =
                disc::cluster_mean_features(test_data[m].values, km.labels, k_clusters);
            if (c == 0) {
                train_meta[m].resize(train_data[m].n(), static_cast<Eigen::Index>(classes) * k_clusters);
                test_meta[m].resize(test_data[m].n(), static_cast<Eigen::Index>(classes) * k_clusters);
            }
            train_meta[m].middleCols(static_cast<Eigen::Index>(c) * k_clusters, k_clusters) = tr_cols;
            test_meta[m].middleCols(static_cast<Eigen::Index>(c) * k_clusters, k_clusters) = te_cols;
        }
    }

    Eigen::Index n_train = 0, n_test = 0;
    for (std::size_t c = 0; c < classes; ++c) {
        n_train += train_meta[c].rows();
        n_test += test_meta[c].rows();
    }
    Eigen::MatrixXd xtr(n_train, train_meta[0].cols()), xte(n_test, test_meta[0].cols());
    std::vector<int> ytr, yte;
    Eigen::Index at = 0;
    for (std::size_t c = 0; c < classes; ++c) {
        xtr.middleRows(at, train_meta[c].rows()) = train_meta[c];
        ytr.insert(ytr.end(), static_cast<std::size_t>(train_meta[c].rows()), static_cast<int>(c));
        at += train_meta[c].rows();
    }
    at = 0;
    for (std::size_t c = 0; c < classes; ++c) {
        xte.middleRows(at, test_meta[c].rows()) = test_meta[c];
        yte.insert(yte.end(), static_cast<std::size_t>(test_meta[c].rows()), static_cast<int>(c));
        at += test_meta[c].rows();
    }

    disc::LogisticReport rep = disc::logistic_eval(xtr, ytr, xte, yte);
    std::cout << "class count: " << classes << "\n";
    std::cout << "train accuracy: " << rep.train_accuracy << "\n";
    std::cout << "test accuracy: " << rep.test_accuracy << "\n";

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        json summary = kernel_json(kopts, train_data[0].p());
        summary["d"] = d;
        summary["r"] = r;
        summary["k_clusters"] = k_clusters;
        summary["seed"] = seed;
        summary["train_accuracy"] = rep.train_accuracy;
        summary["test_accuracy"] = rep.test_accuracy;
        summary["inputs"] = json::array();
        for (std::size_t c = 0; c < classes; ++c)
            summary["inputs"].push_back({{"train", train[c]},
                                         {"train_checksum", checksum_hex(train[c])},
                                         {"test", test[c]},
                                         {"test_checksum", checksum_hex(test[c])}});
        disc::save_json(out_dir / "summary.json", summary);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    if (const char* threads = std::getenv("DISC_THREADS")) {
        const int n = std::atoi(threads);
        if (n > 0) Eigen::setNbThreads(n);
    }

    CLI::App app{"differential spectral comparison of feature dependency structure"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "compare two datasets");
    std::string run_a, run_b, run_out = "disc_out";
    int run_da = 20, run_db = 20, run_r = 10, run_k = 0;
    uint64_t run_seed = 0;
    bool run_no_header = false;
    KernelOpts run_kernel;
    run->add_option("--a", run_a, "CSV for dataset A")->required();
    run->add_option("--b", run_b, "CSV for dataset B")->required();
    run->add_option("--out", run_out, "output directory");
    run->add_option("--d-a", run_da, "basis size for A");
    run->add_option("--d-b", run_db, "basis size for B");
    run->add_option("--r", run_r, "differential vectors to keep");
    run->add_option("--k-clusters", run_k, "cluster the differential vectors (0 = off)");
    run->add_option("--seed", run_seed, "seed for clustering");
    run->add_flag("--no-header", run_no_header, "inputs have no header row");
    add_kernel_opts(run, run_kernel);

    // multi
    auto* multi = app.add_subcommand("multi", "compare three or more datasets");
    std::vector<std::string> multi_inputs;
    std::string multi_out = "disc_out";
    int multi_d = 20, multi_r = 10;
    uint64_t multi_seed = 0;
    bool multi_no_header = false;
    KernelOpts multi_kernel;
    multi->add_option("--inputs", multi_inputs, "CSV per dataset")->required()->expected(-2);
    multi->add_option("--out", multi_out, "output directory");
    multi->add_option("--d", multi_d, "basis size per dataset");
    multi->add_option("--r", multi_r, "differential vectors to keep");
    multi->add_option("--seed", multi_seed, "seed");
    multi->add_flag("--no-header", multi_no_header, "inputs have no header row");
    add_kernel_opts(multi, multi_kernel);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic problem");
    std::string synth_problem, synth_out = "synth_out";
    long synth_n = 10000;
    uint64_t synth_seed = 0;
    double synth_rho = 1.0;
    synth
        ->add_option("--problem", synth_problem,
                     "newly_connected, split_groups, split_both, multi3, partial_corr")
        ->required();
    synth->add_option("--n", synth_n, "samples per dataset");
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--rho", synth_rho, "correlation decay (partial_corr)");
    synth->add_option("--out", synth_out, "output directory");

    // sbm-validate
    auto* sbm = app.add_subcommand("sbm-validate", "run the block-model slope and recovery study");
    std::vector<int> sbm_l{500, 1000, 2000};
    std::vector<double> sbm_alpha{0.6, 0.7, 0.8, 0.9};
    double sbm_p = 0.8, sbm_q = 0.2;
    int sbm_trials = 10;
    uint64_t sbm_seed = 0;
    std::string sbm_out = "sbm_out";
    sbm->add_option("--l", sbm_l, "community size grid")->delimiter(',');
    sbm->add_option("--alpha", sbm_alpha, "gamma-size exponents")->delimiter(',');
    sbm->add_option("--p", sbm_p, "intra-community edge probability");
    sbm->add_option("--q", sbm_q, "inter-community edge probability");
    sbm->add_option("--trials", sbm_trials, "trials per grid point");
    sbm->add_option("--seed", sbm_seed, "master seed");
    sbm->add_option("--out", sbm_out, "output directory");

    // cluster
    auto* cluster = app.add_subcommand("cluster", "k-means on saved differential vectors");
    std::string cluster_in, cluster_out = "cluster_out";
    int cluster_k = 2;
    uint64_t cluster_seed = 0;
    cluster->add_option("--v", cluster_in, "loadings CSV (v_a.csv style)")->required();
    cluster->add_option("--k", cluster_k, "cluster count")->required();
    cluster->add_option("--seed", cluster_seed, "seed");
    cluster->add_option("--out", cluster_out, "output directory");

    // eval
    auto* eval = app.add_subcommand("eval", "per-class differential features -> meta-features -> accuracy");
    std::vector<std::string> eval_train, eval_test;
    int eval_d = 20, eval_r = 10, eval_k = 10;
    uint64_t eval_seed = 0;
    bool eval_no_header = false;
    std::string eval_out;
    KernelOpts eval_kernel;
    eval->add_option("--train", eval_train, "training CSV per class")->required()->expected(-2);
    eval->add_option("--test", eval_test, "test CSV per class")->required()->expected(-2);
    eval->add_option("--d", eval_d, "basis size per class");
    eval->add_option("--r", eval_r, "differential vectors per class");
    eval->add_option("--k-clusters", eval_k, "clusters per class");
    eval->add_option("--seed", eval_seed, "seed");
    eval->add_flag("--no-header", eval_no_header, "inputs have no header row");
    eval->add_option("--out", eval_out, "output directory (optional)");
    add_kernel_opts(eval, eval_kernel);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run->parsed())
            return cmd_run(run_a, run_b, run_out, run_da, run_db, run_r, run_k, run_seed,
                           run_no_header, run_kernel);
        if (multi->parsed())
            return cmd_multi(multi_inputs, multi_out, multi_d, multi_r, multi_seed,
                             multi_no_header, multi_kernel);
        if (synth->parsed())
            return cmd_synth(synth_problem, synth_n, synth_seed, synth_rho, synth_out);
        if (sbm->parsed())
            return cmd_sbm_validate(sbm_l, sbm_alpha, sbm_p, sbm_q, sbm_trials, sbm_seed, sbm_out);
        if (cluster->parsed()) return cmd_cluster(cluster_in, cluster_k, cluster_seed, cluster_out);
        if (eval->parsed())
            return cmd_eval(eval_train, eval_test, eval_d, eval_r, eval_k, eval_seed,
                            eval_no_header, eval_kernel, eval_out);
    } catch (const disc::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const disc::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
