// Command line front end: evaluate invariants, verify closed forms against
// the jet pipeline, emit composition tables, run the block-data decision
// procedure, list built-in surfaces, and export meshes.
//
// Exit codes: 0 success / ACCEPT, 1 a check failed, 2 invalid input.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include <affinv/manifest.hpp>

using namespace affinv;

namespace {

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParameter("cannot open file: " + path);
    json j;
    in >> j;
    return j;
}

VecD parse_point(const std::string& csv) {
    VecD out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    if (out.empty()) throw InvalidParameter("empty point");
    return out;
}

void emit(const json& report, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << report.dump(2) << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) throw InvalidParameter("cannot write file: " + out_path);
        out << report.dump(2) << "\n";
    }
}

double default_tol() {
    if (const char* env = std::getenv("AFFSPHERE_TOL")) return std::stod(env);
    return 1e-6;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

// Worst deviation between pipeline output and the ground truth for the spec.
double closed_form_deviation(const Manifest& m, const VecD& p, const PointInvariants& inv) {
    double dev = 0.0;
    auto upd = [&](double d) { dev = std::max(dev, std::fabs(d)); };
    if (m.spec.composition) {
        ClosedFormInvariants cf = closed_form_invariants(*m.spec.composition, p);
        upd(inv.L1 - cf.L1);
        for (int i = 0; i < inv.n; ++i)
            for (int j = 0; j < inv.n; ++j) upd(inv.g(i, j) - cf.g(i, j));
        for (int i = 0; i < inv.n; ++i)
            for (int j = 0; j < inv.n; ++j)
                for (int k = 0; k < inv.n; ++k) upd(inv.A(i, j, k) - cf.A(i, j, k));
        return dev;
    }
    std::string type = m.spec_json.at("type").get<std::string>();
    if (type == "flat") {
        FlatClosedForms cf = flat_closed_forms(m.spec.dim, m.spec_json.value("c0", 1.0));
        upd(inv.L1 - cf.L1);
        for (int i = 0; i < inv.n; ++i)
            for (int j = 0; j < inv.n; ++j) upd(inv.g(i, j) - cf.g(i, j));
        for (int i = 0; i < inv.n; ++i)
            for (int j = 0; j < inv.n; ++j)
                for (int k = 0; k < inv.n; ++k) upd(inv.A(i, j, k) - cf.A(i, j, k));
        if (cf.J && inv.J) upd(*inv.J - *cf.J);
    } else { // quadric
        upd(inv.L1 - QuadricHypersphere::kL1);
        upd(max_abs(inv.A));
        for (int i = 0; i < inv.n; ++i)
            for (int k = 0; k < inv.n; ++k)
                upd(inv.B(k, i) - (i == k ? QuadricHypersphere::kL1 : 0.0));
    }
    return dev;
}

int cmd_invariants(const std::string& spec_path, const std::string& point_csv,
                   const std::string& out_path) {
    Manifest m = parse_manifest(load_json(spec_path));
    VecD p = parse_point(point_csv);
    if (static_cast<int>(p.size()) != m.spec.dim)
        throw InvalidParameter("point dimension does not match the spec");
    Timer timer;
    PointInvariants inv = point_invariants(*m.spec.immersion, p);
    json rep;
    rep["command"] = "invariants";
    rep["spec"] = m.spec_json;
    rep["point"] = p;
    rep["invariants"] = to_json(inv);
    rep["wall_time_ms"] = timer.ms();
    emit(rep, out_path);
    return 0;
}

int cmd_verify(const std::string& spec_path, int samples, uint64_t seed, double tol,
               const std::string& out_path) {
    Manifest m = parse_manifest(load_json(spec_path));
    if (m.tolerances.count("residual")) tol = m.tolerances.at("residual");
    Timer timer;
    std::vector<VecD> pts = resolve_points(m, samples, seed);
    json per_point = json::array();
    bool pass = true;
    for (const VecD& p : pts) {
        PointInvariants inv = point_invariants(*m.spec.immersion, p);
        double worst = 0.0;
        for (const auto& [name, r] : inv.residuals) worst = std::max(worst, r);
        double dev = closed_form_deviation(m, p, inv);
        bool ok = worst < tol && dev < tol;
        pass = pass && ok;
        json e;
        e["point"] = p;
        e["max_residual"] = worst;
        e["closed_form_deviation"] = dev;
        e["residuals"] = inv.residuals;
        e["pass"] = ok;
        per_point.push_back(std::move(e));
    }
    json rep;
    rep["command"] = "verify";
    rep["spec"] = m.spec_json;
    rep["tolerance"] = tol;
    rep["points"] = per_point;
    rep["verdict"] = pass ? "PASS" : "FAIL";
    rep["wall_time_ms"] = timer.ms();
    emit(rep, out_path);
    return pass ? 0 : 1;
}

int cmd_compose_table(const std::string& spec_path, const std::string& point_csv,
                      const std::string& out_path) {
    Manifest m = parse_manifest(load_json(spec_path));
    if (!m.spec.composition)
        throw InvalidParameter("compose-table requires a composition spec");
    VecD p(m.spec.dim, 0.0);
    if (!point_csv.empty()) p = parse_point(point_csv);
    if (static_cast<int>(p.size()) != m.spec.dim)
        throw InvalidParameter("point dimension does not match the spec");
    Timer timer;
    ClosedFormInvariants cf = closed_form_invariants(*m.spec.composition, p);
    json rep;
    rep["command"] = "compose-table";
    rep["spec"] = m.spec_json;
    rep["point"] = p;
    rep["table"] = to_json(cf);
    rep["wall_time_ms"] = timer.ms();
    emit(rep, out_path);
    return 0;
}

int cmd_characterize(const std::string& spec_path, const std::string& data_path, int samples,
                     uint64_t seed, double tol, const std::string& out_path) {
    if (spec_path.empty() == data_path.empty())
        throw InvalidParameter("characterize needs exactly one of --spec or --data");
    Timer timer;
    DecompositionData dd;
    json echo;
    if (!spec_path.empty()) {
        Manifest m = parse_manifest(load_json(spec_path));
        if (!m.spec.composition)
            throw InvalidParameter("characterize --spec requires a composition spec");
        if (m.tolerances.count("residual")) tol = m.tolerances.at("residual");
        if (m.use_sampler) {
            samples = m.sample_count;
            seed = m.seed;
        }
        dd = sample_blocks(*m.spec.composition, samples, seed);
        echo = m.spec_json;
    } else {
        dd = decomposition_from_json(load_json(data_path));
        echo = json{{"data", data_path}};
    }
    CharacterizeOptions opt;
    opt.tol = tol;
    CharacterizationReport cr = characterize(dd, opt);
    json rep;
    rep["command"] = "characterize";
    rep["spec"] = echo;
    rep["samples"] = static_cast<int>(dd.samples.size());
    rep["tolerance"] = tol;
    rep["report"] = to_json(cr);
    rep["wall_time_ms"] = timer.ms();
    emit(rep, out_path);
    if (!cr.accepted)
        for (const std::string& r : cr.reject_reasons) std::cerr << "reject: " << r << "\n";
    return cr.accepted ? 0 : 1;
}

int cmd_catalog(const std::string& out_path) {
    json entries = json::array();
    for (const CatalogEntry& e : catalog_entries()) {
        json row;
        if (e.kind == CatalogEntry::Kind::Flat) {
            row["type"] = "flat";
            row["dim"] = e.dim;
            row["c0"] = e.c0;
            row["L1"] = flat_closed_forms(e.dim, e.c0).L1;
        } else {
            row["type"] = "quadric";
            row["dim"] = e.dim;
            row["L1"] = QuadricHypersphere::kL1;
        }
        entries.push_back(std::move(row));
    }
    json rep;
    rep["command"] = "catalog";
    rep["entries"] = entries;
    emit(rep, out_path);
    return 0;
}

int cmd_sample_surface(const std::string& spec_path, int grid, const std::string& out_path) {
    Manifest m = parse_manifest(load_json(spec_path));
    if (m.spec.dim != 2)
        throw InvalidParameter("sample-surface supports two-dimensional specs only");
    if (grid < 1) throw InvalidParameter("grid must be positive");
    if (out_path.empty()) throw InvalidParameter("sample-surface requires --out");
    std::ofstream out(out_path);
    if (!out) throw InvalidParameter("cannot write file: " + out_path);
    out << "u,v,x0,x1,x2\n";
    out.precision(17);
    for (int i = 0; i <= grid; ++i)
        for (int j = 0; j <= grid; ++j) {
            double u = -m.box + 2.0 * m.box * i / grid;
            double v = -m.box + 2.0 * m.box * j / grid;
            VecD x = m.spec.immersion->values({u, v});
            out << u << "," << v;
            for (double c : x) out << "," << c;
            out << "\n";
        }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"equiaffine invariants, compositions and their characterization"};
    app.require_subcommand(1);

    std::string spec_path, data_path, point_csv, out_path;
    int samples = 3, grid = 20;
    uint64_t seed = 1;
    double tol = default_tol();

    auto add_common = [&](CLI::App* c, bool need_spec) {
        auto* s = c->add_option("--spec", spec_path, "manifest file");
        if (need_spec) s->required();
        c->add_option("--out", out_path, "write the report here instead of stdout");
    };

    auto* inv = app.add_subcommand("invariants", "pointwise invariants of a spec");
    add_common(inv, true);
    inv->add_option("--point", point_csv, "comma separated chart coordinates")->required();

    auto* ver = app.add_subcommand("verify", "residuals and closed-form comparison");
    add_common(ver, true);
    ver->add_option("--samples", samples, "sample count when the manifest has no points");
    ver->add_option("--seed", seed, "sampler seed");
    ver->add_option("--tol", tol, "pass/fail tolerance");

    auto* tab = app.add_subcommand("compose-table", "closed-form composition tables");
    add_common(tab, true);
    tab->add_option("--point", point_csv, "evaluation point, defaults to the origin");

    auto* chr = app.add_subcommand("characterize", "block-data decision procedure");
    add_common(chr, false);
    chr->add_option("--data", data_path, "block dataset file");
    chr->add_option("--samples", samples, "sample count for --spec");
    chr->add_option("--seed", seed, "sampler seed for --spec");
    chr->add_option("--tol", tol, "verdict tolerance");

    auto* cat = app.add_subcommand("catalog", "list built-in surfaces");
    cat->add_option("--out", out_path, "write the report here instead of stdout");

    auto* mesh = app.add_subcommand("sample-surface", "CSV mesh export for surfaces");
    add_common(mesh, true);
    mesh->add_option("--grid", grid, "grid resolution per axis");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (inv->parsed()) return cmd_invariants(spec_path, point_csv, out_path);
        if (ver->parsed()) return cmd_verify(spec_path, samples, seed, tol, out_path);
        if (tab->parsed()) return cmd_compose_table(spec_path, point_csv, out_path);
        if (chr->parsed())
            return cmd_characterize(spec_path, data_path, samples, seed, tol, out_path);
        if (cat->parsed()) return cmd_catalog(out_path);
        if (mesh->parsed()) return cmd_sample_surface(spec_path, grid, out_path);
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
