#include <CLI11.hpp>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "nbg/certificate_io.hpp"
#include "nbg/graph_io.hpp"
#include "nbg/growth.hpp"
#include "nbg/multigraph.hpp"
#include "nbg/stallings.hpp"
#include "nbg/synthesis.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvalidInput = 1;
constexpr int kResourceLimits = 2;
constexpr int kVerificationFailure = 3;

std::string fmt(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw nbg::io::ParseError("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw nbg::io::ParseError("cannot write '" + path + "'");
    out << bytes;
    if (!out) throw nbg::io::ParseError("write to '" + path + "' failed");
}

/// Loads the graph from either a graph document or a certificate (whose
/// embedded graph is used); certificates are recognized by their
/// params/eigenvalue envelope.
nbg::io::GraphDoc load_graph_doc(const std::string& path) {
    const std::string bytes = read_file(path);
    nbg::io::Json j;
    try {
        j = nbg::io::Json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw nbg::io::ParseError("'" + path + "': " + e.what());
    }
    if (j.is_object() && j.contains("params") && j.contains("eigenvalue")) {
        nbg::Certificate cert = nbg::io::certificate_from_json(j);
        return nbg::io::GraphDoc{std::move(cert.graph), std::nullopt, std::nullopt};
    }
    return nbg::io::graph_from_json(j);
}

struct SynthConfig {
    std::uint32_t rank = 0;
    double target = 0.0;
    double eps = 0.0;
    std::uint64_t seed = 0;
    nbg::SynthesisLimits limits;
    std::optional<std::uint64_t> girth_override;
    std::string out_path;
    bool quiet = false;
};

int run_synth(const SynthConfig& cfg) {
    nbg::SynthesisOutcome outcome;
    try {
        outcome = nbg::synthesize(cfg.rank, cfg.target, cfg.eps, cfg.seed, cfg.limits,
                                  cfg.girth_override);
    } catch (const nbg::ResourceError& e) {
        std::cerr << "synth: " << e.what() << "\n";
        return kResourceLimits;
    } catch (const std::invalid_argument& e) {
        std::cerr << "synth: " << e.what() << "\n";
        return kInvalidInput;
    }
    switch (outcome.status) {
        case nbg::SynthStatus::ok:
            break;
        case nbg::SynthStatus::limits_exceeded:
        case nbg::SynthStatus::eigensolver_failed:
            std::cerr << "synth: [" << outcome.stage << "] " << outcome.message << "\n";
            return kResourceLimits;
        case nbg::SynthStatus::cover_failed:
        case nbg::SynthStatus::not_landed:
            std::cerr << "synth: [" << outcome.stage << "] " << outcome.message << "\n";
            return kVerificationFailure;
    }
    const nbg::Certificate& cert = *outcome.certificate;
    if (!cfg.out_path.empty()) write_file(cfg.out_path, nbg::io::encode_certificate(cert));
    if (!cfg.quiet) {
        std::cout << "alpha=" << fmt(cert.params.alpha) << " lambda=["
                  << fmt(cert.eigenvalue.lower) << "," << fmt(cert.eigenvalue.upper)
                  << "] eps=" << fmt(cert.params.eps) << " vertices=" << cert.stats.vertices
                  << " steps=" << cert.stats.sweep_steps << "\n";
    }
    return kOk;
}

int run_spectrum(const std::string& in_path, double tol, std::uint64_t max_iters, bool quiet) {
    const nbg::io::GraphDoc doc = load_graph_doc(in_path);
    const nbg::Multigraph& g = doc.graph;
    const nbg::SpectralEstimate est = nbg::growth_rate(g, tol, max_iters);
    if (!est.converged) {
        std::cerr << "spectrum: enclosure width " << fmt(est.width()) << " after "
                  << est.iterations << " iterations; raise --max-iters\n";
        return kResourceLimits;
    }
    if (quiet) return kOk;
    std::cout << "lambda=[" << fmt(est.lower) << "," << fmt(est.upper) << "]"
              << (nbg::is_cycle(g) ? " (cycle)" : "") << "\n";
    const auto gr = nbg::girth(g);
    std::cout << "girth=" << (gr ? std::to_string(*gr) : std::string("infinity")) << "\n";
    std::cout << "degrees=";
    const auto hist = nbg::degree_histogram(g);
    for (std::size_t i = 0; i < hist.size(); ++i) {
        if (i > 0) std::cout << " ";
        std::cout << hist[i].first << ":" << hist[i].second;
    }
    std::cout << "\n";
    const bool strong =
        g.edge_count() > 0 && nbg::is_nb_strongly_connected(nbg::nb_operator(g));
    std::cout << "strongly_connected=" << (strong ? "true" : "false") << "\n";
    return kOk;
}

int run_subgroup(const std::string& in_path, std::uint32_t rank, std::uint32_t nmax,
                 const std::string& out_path, bool quiet) {
    const nbg::io::GraphDoc doc = load_graph_doc(in_path);
    const nbg::VertexId basepoint = doc.basepoint.value_or(0);
    const nbg::stallings::SubgroupReport rep =
        nbg::stallings::subgroup_report(doc.graph, rank, basepoint, nmax);
    if (!out_path.empty())
        write_file(out_path,
                   nbg::stallings::encode_generators(rep.rank, rank, rep.basepoint,
                                                     rep.generators));
    if (!quiet) {
        std::cout << "rank=" << rep.rank << "\n";
        std::cout << "basepoint=" << rep.basepoint << "\n";
        for (const auto& w : rep.generators)
            std::cout << "generator " << nbg::stallings::render_word(w) << "\n";
        std::cout << "gamma=";
        for (std::size_t k = 0; k < rep.gamma.size(); ++k) {
            if (k > 0) std::cout << ",";
            std::cout << rep.gamma[k].str();
        }
        std::cout << "\n";
        std::cout << "omega=" << fmt(rep.omega_estimate) << "\n";
        std::cout << "lambda=[" << fmt(rep.lambda.lower) << "," << fmt(rep.lambda.upper)
                  << "]\n";
    }
    return kOk;
}

int run_verify(const std::string& in_path, bool quiet) {
    const nbg::Certificate cert = nbg::io::decode_certificate(read_file(in_path));
    const nbg::io::VerifyReport rep = nbg::io::verify_certificate(cert);
    if (rep.ok) {
        if (!quiet)
            std::cout << "ok: lambda=[" << fmt(rep.fresh.lower) << "," << fmt(rep.fresh.upper)
                      << "] within eps=" << fmt(cert.params.eps) << " of alpha="
                      << fmt(cert.params.alpha) << "\n";
        return kOk;
    }
    for (const auto& f : rep.failures) std::cerr << "verify: " << f << "\n";
    return kVerificationFailure;
}

int run_export(const std::string& in_path, const std::string& format,
               const std::string& out_path) {
    const nbg::io::GraphDoc doc = load_graph_doc(in_path);
    const std::string bytes = format == "dot" ? nbg::io::to_dot(doc) : nbg::io::encode(doc);
    if (out_path.empty())
        std::cout << bytes;
    else
        write_file(out_path, bytes);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-backtracking growth synthesis toolkit"};
    app.require_subcommand(1);

    SynthConfig synth_cfg;
    std::uint64_t girth_override = 0;
    auto* synth = app.add_subcommand(
        "synth", "Synthesize a graph whose growth rate lands within eps of the target");
    synth->add_option("--rank", synth_cfg.rank, "Free group rank r >= 2")->required();
    synth->add_option("--target", synth_cfg.target, "Target growth rate in (1, 2r-1)")
        ->required();
    synth->add_option("--eps", synth_cfg.eps, "Enclosure tolerance (> 0)")->required();
    synth->add_option("--seed", synth_cfg.seed, "Random seed (default 0)");
    synth->add_option("--out", synth_cfg.out_path, "Certificate output path");
    synth->add_option("--max-vertices", synth_cfg.limits.max_vertices,
                      "Vertex budget (default 100000)");
    synth->add_option("--max-iters", synth_cfg.limits.max_eigen_iters,
                      "Eigensolver iteration budget per call (default 1000000)");
    synth->add_option("--max-cover-attempts", synth_cfg.limits.max_cover_attempts,
                      "Cover search attempt budget (default 5000)");
    auto* go = synth->add_option("--girth-override", girth_override,
                                 "Override the girth target (>= 3)");
    synth->add_flag("--quiet", synth_cfg.quiet, "Suppress the summary line");

    std::string spectrum_in;
    double spectrum_tol = 1e-9;
    std::uint64_t spectrum_iters = 1000000;
    bool spectrum_quiet = false;
    auto* spectrum = app.add_subcommand(
        "spectrum", "Report the growth-rate enclosure and shape statistics of a graph");
    spectrum->add_option("--in", spectrum_in, "Graph or certificate document")->required();
    spectrum->add_option("--eps", spectrum_tol, "Enclosure tolerance (default 1e-9)");
    spectrum->add_option("--max-iters", spectrum_iters,
                         "Eigensolver iteration budget (default 1000000)");
    spectrum->add_flag("--quiet", spectrum_quiet, "Suppress the report");

    std::string subgroup_in, subgroup_out;
    std::uint32_t subgroup_rank = 0, subgroup_nmax = 60;
    bool subgroup_quiet = false;
    auto* subgroup = app.add_subcommand(
        "subgroup", "Extract free-subgroup generators and growth data from a graph");
    subgroup->add_option("--in", subgroup_in, "Graph or certificate document")->required();
    subgroup->add_option("--rank", subgroup_rank, "Ambient free group rank r")->required();
    subgroup->add_option("--nmax", subgroup_nmax, "Ball table depth (default 60)");
    subgroup->add_option("--out", subgroup_out, "Generators file output path");
    subgroup->add_flag("--quiet", subgroup_quiet, "Suppress the report");

    std::string verify_in;
    bool verify_quiet = false;
    auto* verify = app.add_subcommand("verify", "Re-check a certificate from scratch");
    verify->add_option("--in", verify_in, "Certificate path")->required();
    verify->add_flag("--quiet", verify_quiet, "Suppress the success line");

    std::string export_in, export_out, export_format = "graph-json";
    auto* exp = app.add_subcommand("export", "Re-encode a graph document");
    exp->add_option("--in", export_in, "Graph or certificate document")->required();
    exp->add_option("--out", export_out, "Output path (default: stdout)");
    exp->add_option("--format", export_format, "Output format")
        ->check(CLI::IsMember({"graph-json", "dot"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalidInput;
    }

    try {
        if (synth->parsed()) {
            if (go->count() > 0) synth_cfg.girth_override = girth_override;
            return run_synth(synth_cfg);
        }
        if (spectrum->parsed())
            return run_spectrum(spectrum_in, spectrum_tol, spectrum_iters, spectrum_quiet);
        if (subgroup->parsed())
            return run_subgroup(subgroup_in, subgroup_rank, subgroup_nmax, subgroup_out,
                                subgroup_quiet);
        if (verify->parsed()) return run_verify(verify_in, verify_quiet);
        if (exp->parsed()) return run_export(export_in, export_format, export_out);
    } catch (const nbg::ResourceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kResourceLimits;
    } catch (const nbg::io::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInvalidInput;
    }
    return kInvalidInput;
}
