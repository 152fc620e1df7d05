// ptgrid command-line tool: encode/decode point clouds, and run the
// analysis utilities (information content, convergence, edge weights,
// recovery, synthetic data, benchmarks).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ptgrid/bench.hpp"
#include "ptgrid/codec.hpp"
#include "ptgrid/convergence.hpp"
#include "ptgrid/edge_weights.hpp"
#include "ptgrid/info_content.hpp"
#include "ptgrid/io/container.hpp"
#include "ptgrid/io/csv.hpp"
#include "ptgrid/io/synth.hpp"
#include "ptgrid/recovery.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Globals {
    std::size_t resolution = 128;
    int dim = 2;
    std::string precision = "f64";
    std::uint64_t seed = 1;
    std::string output = "out";
    bool jsonl = false;

    [[nodiscard]] ptgrid::ScalarType scalar() const {
        return precision == "f32" ? ptgrid::ScalarType::f32 : ptgrid::ScalarType::f64;
    }
};

/// Human-readable lines on stdout, or one JSON object per line with --jsonl.
class Reporter {
public:
    explicit Reporter(bool jsonl) : jsonl_(jsonl) {}

    void record(const json& j, const std::string& text) const {
        if (jsonl_) {
            std::cout << j.dump() << '\n';
        } else if (!text.empty()) {
            std::cout << text << '\n';
        }
    }

    void text(const std::string& line) const {
        if (!jsonl_) std::cout << line << '\n';
    }

private:
    bool jsonl_;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string with_suffix(const std::string& prefix, const std::string& suffix) { return prefix + suffix; }

ptgrid::ShiftSpec parse_shift(const std::string& mode, const std::string& scope, std::optional<double> offset) {
    ptgrid::ShiftSpec s;
    if (mode == "none") s.mode = ptgrid::ShiftMode::none;
    else if (mode == "offset") s.mode = ptgrid::ShiftMode::offset;
    else if (mode == "minmax") s.mode = ptgrid::ShiftMode::minmax;
    else throw ptgrid::ValidationError("unknown shift mode '" + mode + "'");
    if (scope == "batch") s.scope = ptgrid::ShiftScope::batch;
    else if (scope == "per-sample") s.scope = ptgrid::ShiftScope::per_sample;
    else throw ptgrid::ValidationError("unknown shift scope '" + scope + "'");
    s.offset = offset;
    return s;
}

struct InputOptions {
    std::string path;
    std::string coords;
    std::string channels = "u";
    std::string sample_column;
    bool rescale = false;
    std::string ranges;
};

void add_input_options(CLI::App* sub, InputOptions& in) {
    sub->add_option("-i,--input", in.path, "PTC1 cloud or CSV file")->required();
    sub->add_option("--coords", in.coords, "CSV coordinate columns (default x,y or x,y,z per --dim)");
    sub->add_option("--channels", in.channels, "CSV response columns, comma separated (empty for none)");
    sub->add_option("--sample-column", in.sample_column, "CSV column holding the sample id");
    sub->add_flag("--rescale", in.rescale, "Map CSV coordinates into [-1,1] using their bounding box");
    sub->add_option("--range", in.ranges, "Explicit CSV rescale ranges lo:hi per axis, comma separated");
}

ptgrid::PointCloudBatch load_cloud(const InputOptions& in, const Globals& g) {
    const fs::path p(in.path);
    if (p.extension() != ".csv") return ptgrid::io::read_cloud(p);

    ptgrid::io::CsvSchema schema;
    schema.coords = in.coords.empty() ? (g.dim == 3 ? std::vector<std::string>{"x", "y", "z"}
                                                    : std::vector<std::string>{"x", "y"})
                                      : split(in.coords, ',');
    schema.channels = split(in.channels, ',');
    if (!in.sample_column.empty()) schema.sample_column = in.sample_column;
    std::optional<ptgrid::io::RescaleSpec> rescale;
    if (in.rescale || !in.ranges.empty()) {
        rescale.emplace();
        for (const auto& part : split(in.ranges, ',')) {
            const auto lh = split(part, ':');
            if (lh.size() != 2) throw ptgrid::ValidationError("--range entries must look like lo:hi");
            rescale->ranges.push_back({std::stod(lh[0]), std::stod(lh[1])});
        }
    }
    return ptgrid::io::import_csv(p, schema, rescale);
}

std::vector<std::size_t> parse_sizes(const std::string& s) {
    std::vector<std::size_t> out;
    for (const auto& item : split(s, ',')) {
        const double v = std::stod(item);
        if (!(v >= 0.0) || v != std::floor(v)) throw ptgrid::ValidationError("expected a non-negative integer, got '" + item + "'");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

void write_grid(const fs::path& path, const ptgrid::GridFieldBatch& grid, const Globals& g) {
    // Asking for f32 on the command line is the explicit narrowing request.
    ptgrid::io::write_grid(path, grid, g.scalar(), g.scalar() == ptgrid::ScalarType::f32);
}

void write_cloud(const fs::path& path, const ptgrid::PointCloudBatch& cloud, const Globals& g) {
    ptgrid::io::write_cloud(path, cloud, g.scalar(), g.scalar() == ptgrid::ScalarType::f32);
}

// ---- encode --------------------------------------------------------------

struct EncodeArgs {
    InputOptions input;
    std::string shift_mode = "none";
    std::string shift_scope = "batch";
    std::optional<double> offset;
};

void run_encode(const EncodeArgs& a, const Globals& g, const Reporter& rep) {
    auto cloud = load_cloud(a.input, g);
    if (cloud.raw_range) {
        throw ptgrid::ValidationError("input coordinates are outside [-1,1]; pass --rescale or --range");
    }
    const auto topo = ptgrid::encode_topology(cloud, g.resolution);
    const std::string go = with_suffix(g.output, "_go.grd");
    write_grid(go, topo, g);
    std::string gu;
    if (cloud.channels > 0) {
        const auto resp = ptgrid::encode_response(cloud, g.resolution, parse_shift(a.shift_mode, a.shift_scope, a.offset));
        gu = with_suffix(g.output, "_gu.grd");
        write_grid(gu, resp, g);
        cloud.shift = *resp.shift;
    }
    const std::string pc = with_suffix(g.output, "_cloud.ptc");
    write_cloud(pc, cloud, g);

    for (std::size_t m = 0; m < cloud.size(); ++m) {
        json j{{"record", "encode"}, {"sample", m}, {"points", cloud.points(m)}, {"mass", topo.sum(m, 0)}};
        rep.record(j, "sample " + std::to_string(m) + ": N=" + std::to_string(cloud.points(m)) +
                          "  sum(G_o)=" + fmt("%.12g", topo.sum(m, 0)));
    }
    json files{{"record", "files"}, {"topology", go}, {"cloud", pc}};
    if (!gu.empty()) files["response"] = gu;
    rep.record(files, "wrote " + go + (gu.empty() ? "" : ", " + gu) + ", " + pc);
}

// ---- decode --------------------------------------------------------------

struct DecodeArgs {
    std::string topology, response, cloud;
};

void run_decode(const DecodeArgs& a, const Globals& g, const Reporter& rep) {
    const auto topo = ptgrid::io::read_grid(a.topology, ptgrid::GridKind::topology);
    auto resp = ptgrid::io::read_grid(a.response, ptgrid::GridKind::response);
    const auto cloud = ptgrid::io::read_cloud(a.cloud);
    resp.shift = cloud.shift;
    auto out = ptgrid::reconstruct(topo, resp, cloud);
    out.shift = {};
    write_cloud(g.output, out, g);

    json j{{"record", "decode"}, {"samples", out.size()}, {"output", g.output}};
    std::string text = "reconstructed " + std::to_string(out.size()) + " sample(s) -> " + g.output;
    if (cloud.channels == out.channels) {
        const double err = ptgrid::edge::pointwise_rel_l2(out, cloud);
        j["rel_l2"] = err;
        text += "\npointwise relative L2 vs input responses: " + fmt("%.6e", err);
    }
    rep.record(j, text);
}

// ---- info ----------------------------------------------------------------

struct InfoArgs {
    std::size_t points = 2000;
    double delta = 1e-3;
    double eta = 0.01;
};

void run_info(const InfoArgs& a, const Globals& g, const Reporter& rep) {
    const auto r = ptgrid::info::compare_encodings(a.points, g.resolution, a.delta, a.eta);
    rep.text("N=" + std::to_string(r.n_points) + "  r=" + std::to_string(r.resolution) + "  delta=" +
             fmt("%g", r.delta) + "  eta=" + fmt("%g", r.eta) + "  h=" + fmt("%.6g", r.h));
    rep.text("encoding      bits        kbits     retention");
    const auto row = [&](const char* name, double bits, double ret) {
        json j{{"record", "info"}, {"encoding", name}, {"bits", bits}, {"retention", ret}};
        char buf[128];
        std::snprintf(buf, sizeof buf, "%-10s %11.1f %10.3f %9.1f%%", name, bits, bits / 1000.0, 100.0 * ret);
        rep.record(j, buf);
    };
    row("raw", r.raw_bits, 1.0);
    row("binary", r.binary_bits, r.retention_binary);
    row("count", r.count_bits, r.retention_count);
    row("proposed", r.proposed_bits, r.retention_proposed);
}

// ---- convergence -----------------------------------------------------------

struct ConvergenceArgs {
    std::string field = "all";
    std::string resolutions = "17,33,65,129,257";
    std::size_t density = 4;
    std::size_t eval_points = 100000;
    std::size_t margin = 1;
    std::string csv;
};

std::vector<ptgrid::convergence::SmoothnessCase> parse_fields(const std::string& s) {
    namespace cv = ptgrid::convergence;
    std::vector<cv::SmoothnessCase> out;
    for (const auto& name : split(s, ',')) {
        if (name == "all") {
            out.push_back(cv::sine_product());
            out.push_back(cv::abs_kink());
            out.push_back(cv::holder_sqrt());
        } else if (name == "sine") {
            out.push_back(cv::sine_product());
        } else if (name == "abs") {
            out.push_back(cv::abs_kink());
        } else if (name == "sqrt") {
            out.push_back(cv::holder_sqrt());
        } else if (name == "affine") {
            out.push_back(cv::affine());
        } else if (name.rfind("holder:", 0) == 0) {
            const double alpha = std::stod(name.substr(7));
            if (!(alpha > 0.0 && alpha < 1.0)) throw ptgrid::ValidationError("holder exponent must lie in (0,1)");
            out.push_back(cv::holder_derivative(alpha));
        } else {
            throw ptgrid::ValidationError("unknown field '" + name + "' (sine, abs, sqrt, affine, holder:<alpha>, all)");
        }
    }
    return out;
}

void run_convergence(const ConvergenceArgs& a, const Globals& g, const Reporter& rep) {
    namespace cv = ptgrid::convergence;
    cv::ConvergenceOptions opt;
    opt.dim = g.dim;
    opt.resolutions = parse_sizes(a.resolutions);
    opt.density = a.density;
    opt.eval_points = a.eval_points;
    opt.boundary_margin_cells = a.margin;
    opt.seed = g.seed;
    if (g.dim != 2) throw ptgrid::ValidationError("convergence fields are defined in 2D");

    std::ofstream csv;
    if (!a.csv.empty()) {
        csv.open(a.csv);
        if (!csv) throw ptgrid::FormatError(ptgrid::FormatErrc::io, "cannot write " + a.csv);
        csv << "field,resolution,h,max_abs,rms\n";
    }
    for (const auto& sc : parse_fields(a.field)) {
        const auto r = cv::run_convergence(sc, opt);
        rep.text("field " + r.field + " (" + cv::to_string(r.label) + ", expected order " +
                 fmt("%g", r.expected_order) + ")");
        rep.text("     r           h       max_abs           rms    bound");
        for (const auto& row : r.rows) {
            json j{{"record", "convergence_row"}, {"field", r.field}, {"resolution", row.resolution}, {"h", row.h},
                   {"max_abs", row.max_abs}, {"rms", row.rms}};
            if (row.pointwise_bound) j["pointwise_bound"] = *row.pointwise_bound;
            char buf[160];
            std::snprintf(buf, sizeof buf, "%6zu %11.4e %13.6e %13.6e %s", row.resolution, row.h, row.max_abs, row.rms,
                          row.pointwise_bound ? fmt("%.3e", *row.pointwise_bound).c_str() : "-");
            rep.record(j, buf);
            if (csv) csv << '"' << r.field << "\"," << row.resolution << ',' << row.h << ',' << row.max_abs << ','
                         << row.rms << '\n';
        }
        json j{{"record", "convergence_fit"}, {"field", r.field}, {"expected_order", r.expected_order},
               {"exact", r.exact}};
        std::string text;
        if (r.exact) {
            text = "  errors at the stabilizer floor at every resolution; no slope fitted";
        } else {
            j["rms_slope"] = *r.rms_slope();
            j["rms_band"] = r.rms_band();
            j["max_slope"] = *r.max_slope();
            j["r_squared"] = r.rms_fit->r_squared;
            text = "  rms slope " + fmt("%.3f", *r.rms_slope()) + " +/- " + fmt("%.3f", r.rms_band()) +
                   " (95%)   max-abs slope " + fmt("%.3f", *r.max_slope());
        }
        rep.record(j, text);
    }
}

// ---- weights ---------------------------------------------------------------

struct WeightsArgs {
    std::string response;
};

void run_weights(const WeightsArgs& a, const Globals& g, const Reporter& rep) {
    const auto resp = ptgrid::io::read_grid(a.response, ptgrid::GridKind::response);
    const auto w = ptgrid::edge::edge_weights(resp);
    write_grid(g.output, w.values, g);
    for (std::size_t m = 0; m < w.values.samples; ++m) {
        const auto f = w.values.field(m, 0);
        const double lo = *std::min_element(f.begin(), f.end());
        const double hi = *std::max_element(f.begin(), f.end());
        const double mean = std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size());
        json j{{"record", "weights"}, {"sample", m}, {"min", lo}, {"max", hi}, {"mean", mean}};
        rep.record(j, "sample " + std::to_string(m) + ": Gamma in [" + fmt("%.4f", lo) + ", " + fmt("%.4f", hi) +
                          "], mean " + fmt("%.4f", mean));
    }
    rep.record(json{{"record", "files"}, {"weights", g.output}}, "wrote " + g.output);
}

// ---- recover -----------------------------------------------------------------

struct RecoverArgs {
    std::string full, partial, response, known, truth, missing;
    std::size_t dense = 128;
};

void run_recover(const RecoverArgs& a, const Globals& g, const Reporter& rep) {
    namespace rc = ptgrid::recovery;
    const auto full = ptgrid::io::read_grid(a.full, ptgrid::GridKind::topology);
    std::optional<ptgrid::PointCloudBatch> known, truth;
    if (!a.known.empty()) known = ptgrid::io::read_cloud(a.known);
    if (!a.truth.empty()) truth = ptgrid::io::read_cloud(a.truth);
    if (a.partial.empty() && !known) throw ptgrid::ValidationError("recover needs --partial or --known");
    const auto partial = a.partial.empty() ? ptgrid::encode_topology(*known, full.resolution)
                                           : ptgrid::io::read_grid(a.partial, ptgrid::GridKind::topology);
    const auto comp = rc::complement_grid(full, partial);

    std::vector<std::size_t> counts;
    if (!a.missing.empty()) {
        counts = parse_sizes(a.missing);
        if (counts.size() == 1) counts.assign(comp.samples, counts[0]);
    } else if (truth && known) {
        for (std::size_t m = 0; m < truth->size(); ++m) counts.push_back(truth->points(m) - known->points(m));
    } else {
        // The complement mass estimates the number of missing points.
        for (std::size_t m = 0; m < comp.samples; ++m) {
            counts.push_back(static_cast<std::size_t>(std::max(1.0, std::round(comp.sum(m, 0)))));
        }
    }
    const auto found = rc::recover_points(comp, counts, a.dense);

    ptgrid::PointCloudBatch out;
    out.dim = comp.dim;
    out.samples.resize(comp.samples);
    std::vector<std::vector<double>> combined = found.coords;
    for (std::size_t m = 0; m < comp.samples; ++m) {
        if (known) {
            if (known->size() != comp.samples) throw ptgrid::ShapeError("known cloud and grids disagree on sample count");
            const auto& k = known->samples[m].coords;
            combined[m].insert(combined[m].end(), k.begin(), k.end());
        }
        out.samples[m].coords = combined[m];
        json j{{"record", "recover"}, {"sample", m}, {"recovered", counts[m]}, {"threshold", found.thresholds[m]}};
        rep.record(j, "sample " + std::to_string(m) + ": recovered " + std::to_string(counts[m]) +
                          " points, threshold " + fmt("%.6g", found.thresholds[m]));
    }
    write_cloud(g.output, out, g);

    if (truth) {
        json j{{"record", "recover_metrics"}};
        std::string text;
        if (!a.response.empty() && truth->channels > 0) {
            auto resp = ptgrid::io::read_grid(a.response, ptgrid::GridKind::response);
            resp.shift = truth->shift;
            const auto res = rc::evaluate_recovery(*truth, combined, resp, full);
            j["chamfer"] = res.chamfer;
            j["rel_l2"] = res.rel_l2;
            text = "chamfer " + fmt("%.6e", res.chamfer) + "   rel L2 " + fmt("%.6e", res.rel_l2);
        } else {
            std::vector<std::vector<double>> truth_xs;
            for (const auto& s : truth->samples) truth_xs.push_back(s.coords);
            const double ch = rc::chamfer(truth_xs, combined, truth->dim);
            j["chamfer"] = ch;
            text = "chamfer " + fmt("%.6e", ch);
        }
        rep.record(j, text);
    }
    rep.record(json{{"record", "files"}, {"recovered", g.output}}, "wrote " + g.output);
}

// ---- synth / noise -------------------------------------------------------------

struct SynthArgs {
    std::string kind = "gaussian-bumps";
    std::size_t samples = 10;
    std::size_t points = 500;
    double dropout = 0.0;
    std::string known_output;
};

void run_synth(const SynthArgs& a, const Globals& g, const Reporter& rep) {
    const auto kind = ptgrid::io::parse_synth_kind(a.kind);
    const auto cloud = ptgrid::io::synth_dataset(kind, a.samples, a.points, g.seed, g.dim);
    write_cloud(g.output, cloud, g);
    json j{{"record", "synth"}, {"kind", a.kind}, {"samples", a.samples}, {"points", a.points}, {"seed", g.seed},
           {"output", g.output}};
    rep.record(j, "wrote " + std::to_string(a.samples) + " " + a.kind + " sample(s) of " + std::to_string(a.points) +
                      " points -> " + g.output);
    if (a.known_output.empty()) return;
    const auto partial = ptgrid::recovery::make_partial(cloud, a.dropout, g.seed + 1);
    write_cloud(a.known_output, partial.known, g);
    rep.record(json{{"record", "synth_known"}, {"dropout", a.dropout}, {"output", a.known_output}},
               "wrote known subset (dropout " + fmt("%g", a.dropout) + ") -> " + a.known_output);
}

struct NoiseArgs {
    InputOptions input;
    double sigma = 0.0;
};

void run_noise(const NoiseArgs& a, const Globals& g, const Reporter& rep) {
    const auto cloud = load_cloud(a.input, g);
    const auto noisy = ptgrid::io::add_coordinate_noise(cloud, a.sigma, g.seed);
    write_cloud(g.output, noisy, g);
    rep.record(json{{"record", "noise"}, {"sigma", a.sigma}, {"seed", g.seed}, {"output", g.output}},
               "wrote " + g.output + " (sigma " + fmt("%g", a.sigma) + ")");
}

// ---- bench ---------------------------------------------------------------------

struct BenchArgs {
    std::string points = "10000,30000,100000,300000,1000000";
    std::size_t repeats = 5;
    std::size_t recon_points = 100000;
    std::string recon_resolutions = "64,256,512,1024,1536,2048";
    bool skip_reconstruction = false;
};

void run_bench(const BenchArgs& a, const Globals& g, const Reporter& rep) {
    namespace bn = ptgrid::bench;
    const auto enc = bn::bench_encoding(parse_sizes(a.points), g.resolution, a.repeats, g.seed);
    rep.text("topology encoding, r=" + std::to_string(g.resolution));
    for (const auto& row : enc.rows) {
        json j{{"record", "bench_encoding"}, {"points", row.x}, {"median_s", row.median}, {"seconds", row.seconds}};
        char buf[96];
        std::snprintf(buf, sizeof buf, "  N=%-9zu median %.6f s", row.x, row.median);
        rep.record(j, buf);
    }
    rep.record(json{{"record", "bench_encoding_fit"}, {"exponent", enc.exponent()}, {"r_squared", enc.fit.r_squared}},
               "  fitted exponent " + fmt("%.3f", enc.exponent()) + " (R^2 " + fmt("%.4f", enc.fit.r_squared) + ")");
    if (a.skip_reconstruction) return;

    const auto rec = bn::bench_reconstruction(a.recon_points, parse_sizes(a.recon_resolutions), a.repeats, g.seed);
    rep.text("reconstruction, N=" + std::to_string(a.recon_points));
    for (const auto& row : rec.rows) {
        json j{{"record", "bench_reconstruction"}, {"resolution", row.x}, {"median_s", row.median},
               {"seconds", row.seconds}};
        char buf[96];
        std::snprintf(buf, sizeof buf, "  r=%-6zu median %.6f s", row.x, row.median);
        rep.record(j, buf);
    }
    rep.record(json{{"record", "bench_reconstruction_fit"}, {"intercept_s", rec.fit.intercept},
                    {"r2_coefficient", rec.r2_coefficient()}, {"t_stat", rec.r2_t_stat()}},
               "  time = " + fmt("%.4e", rec.fit.intercept) + " + " + fmt("%.4e", rec.r2_coefficient()) +
                   " r^2   (t = " + fmt("%.1f", rec.r2_t_stat()) + ")");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ptgrid: grid encoding of scattered point clouds"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("-r,--resolution", g.resolution, "Grid vertices per axis")
        ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 16));
    app.add_option("-d,--dim", g.dim, "Spatial dimension")->check(CLI::IsMember({2, 3}));
    app.add_option("-p,--precision", g.precision, "Scalar type of written containers")
        ->check(CLI::IsMember({"f32", "f64"}));
    app.add_option("-s,--seed", g.seed, "Random seed");
    app.add_option("-o,--output", g.output, "Output path (encode: file prefix)");
    app.add_flag("--jsonl", g.jsonl, "Emit one JSON record per line instead of text");

    EncodeArgs enc;
    auto* s_enc = app.add_subcommand("encode", "Encode a cloud into topology and response grids");
    add_input_options(s_enc, enc.input);
    s_enc->add_option("--shift", enc.shift_mode, "Response shift: none, offset, minmax")
        ->check(CLI::IsMember({"none", "offset", "minmax"}));
    s_enc->add_option("--shift-scope", enc.shift_scope, "Shift fitted per batch or per sample")
        ->check(CLI::IsMember({"batch", "per-sample"}));
    s_enc->add_option("--offset", enc.offset, "Fixed additive offset (offset mode)");

    DecodeArgs dec;
    auto* s_dec = app.add_subcommand("decode", "Reconstruct point responses from grids");
    s_dec->add_option("--topology", dec.topology, "Topology grid (GRD1)")->required();
    s_dec->add_option("--response", dec.response, "Response grid (GRD1)")->required();
    s_dec->add_option("--cloud", dec.cloud, "Query cloud with shift record (PTC1)")->required();

    InfoArgs inf;
    auto* s_info = app.add_subcommand("info", "Information content of the encodings");
    s_info->add_option("-n,--points", inf.points, "Number of points")->check(CLI::PositiveNumber);
    s_info->add_option("--delta", inf.delta, "Coordinate quantization")->check(CLI::PositiveNumber);
    s_info->add_option("--eta", inf.eta, "Sub-cell resolution factor")->check(CLI::NonNegativeNumber);

    ConvergenceArgs conv;
    auto* s_conv = app.add_subcommand("convergence", "Interpolation error against grid spacing");
    s_conv->add_option("--field", conv.field, "sine, abs, sqrt, affine, holder:<alpha>, all (comma separated)");
    s_conv->add_option("--resolutions", conv.resolutions, "Comma separated resolutions");
    s_conv->add_option("--density", conv.density, "Encoding points per cell");
    s_conv->add_option("--eval-points", conv.eval_points, "Evaluation points per resolution");
    s_conv->add_option("--margin", conv.margin, "Boundary margin in cells");
    s_conv->add_option("--csv", conv.csv, "Also write (h, error) rows to this CSV file");

    WeightsArgs wts;
    auto* s_w = app.add_subcommand("weights", "Edge-aware loss weights from a response grid");
    s_w->add_option("--response", wts.response, "Response grid (GRD1, 2D, one channel)")->required();

    RecoverArgs rec;
    auto* s_rec = app.add_subcommand("recover", "Recover missing point locations from topology grids");
    s_rec->add_option("--full", rec.full, "Full topology grid (GRD1)")->required();
    s_rec->add_option("--partial", rec.partial, "Partial topology grid (GRD1); encoded from --known if omitted");
    s_rec->add_option("--response", rec.response, "Response grid used to score responses (GRD1)");
    s_rec->add_option("--known", rec.known, "Known points (PTC1); appended to the output");
    s_rec->add_option("--truth", rec.truth, "Ground-truth cloud for metrics (PTC1)");
    s_rec->add_option("--missing", rec.missing, "Missing points per sample (one value or comma list)");
    s_rec->add_option("--dense", rec.dense, "Dense candidate resolution")->check(CLI::PositiveNumber);

    SynthArgs syn;
    auto* s_syn = app.add_subcommand("synth", "Generate a synthetic dataset");
    s_syn->add_option("--kind", syn.kind, "gaussian-bumps, annulus, airfoil-like");
    s_syn->add_option("-m,--samples", syn.samples, "Number of samples")->check(CLI::PositiveNumber);
    s_syn->add_option("-n,--points", syn.points, "Points per sample")->check(CLI::PositiveNumber);
    s_syn->add_option("--dropout", syn.dropout, "Fraction of points to drop for --known-output")
        ->check(CLI::Range(0.0, 0.999));
    s_syn->add_option("--known-output", syn.known_output, "Also write the kept subset to this PTC1 file");

    NoiseArgs noi;
    auto* s_noise = app.add_subcommand("noise", "Add Gaussian coordinate noise to a cloud");
    add_input_options(s_noise, noi.input);
    s_noise->add_option("--sigma", noi.sigma, "Noise standard deviation")->required();

    BenchArgs ben;
    auto* s_bench = app.add_subcommand("bench", "Time encoding and reconstruction");
    s_bench->add_option("--points", ben.points, "Comma separated point counts for encoding");
    s_bench->add_option("--repeats", ben.repeats, "Timed repeats per size")->check(CLI::PositiveNumber);
    s_bench->add_option("--recon-points", ben.recon_points, "Point count for reconstruction timing");
    s_bench->add_option("--recon-resolutions", ben.recon_resolutions, "Comma separated resolutions");
    s_bench->add_flag("--skip-reconstruction", ben.skip_reconstruction, "Only time encoding");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(ptgrid::ExitCode::validation);
    }

    const Reporter rep(g.jsonl);
    try {
        if (s_enc->parsed()) run_encode(enc, g, rep);
        else if (s_dec->parsed()) run_decode(dec, g, rep);
        else if (s_info->parsed()) run_info(inf, g, rep);
        else if (s_conv->parsed()) run_convergence(conv, g, rep);
        else if (s_w->parsed()) run_weights(wts, g, rep);
        else if (s_rec->parsed()) run_recover(rec, g, rep);
        else if (s_syn->parsed()) run_synth(syn, g, rep);
        else if (s_noise->parsed()) run_noise(noi, g, rep);
        else if (s_bench->parsed()) run_bench(ben, g, rep);
    } catch (const ptgrid::FormatError& e) {
        std::cerr << "format error: " << e.what() << '\n';
        return static_cast<int>(e.exit_code());
    } catch (const ptgrid::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(e.exit_code());
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: malformed number in arguments (" << e.what() << ")\n";
        return static_cast<int>(ptgrid::ExitCode::validation);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return static_cast<int>(ptgrid::ExitCode::internal);
    }
    return 0;
}
