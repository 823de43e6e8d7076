#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "spreadout/oracle/verify.hpp"

namespace spreadout {

/// A self-contained randomized oracle instance: a small graph over lattice
/// sites, nested regions S ⊆ Λ, marked points, and a pair of connectivity
/// events. Everything needed to replay a failed check.
struct OracleInstance {
    int d = 1;
    int L = 1;
    double beta = 0.5;
    FiniteGraph g;
    int inner_radius = 1;
    int outer_radius = -1;  // -1 encodes the full lattice
    Point o, x, a, b;
    ConnEvent A, B;

    Region inner() const { return Box{Point::zero(d), inner_radius}; }
    Region outer() const {
        if (outer_radius < 0) return Full{};
        return Box{Point::zero(d), outer_radius};
    }
};

/// Randomized generator: an Erdős–Rényi subsample of the spread-out edges of
/// a small box, plus (with probability 1/2) an adversarial long edge crossing
/// the boundary of S — those exercise the double-pivot constraint of the
/// reversed inequality. Marked points always include the origin inside S and
/// a target in the outer region.
inline OracleInstance generate_instance(CounterRng& rng, size_t max_edges = 12) {
    OracleInstance inst;
    inst.d = 1 + static_cast<int>(rng.below(2));
    inst.L = 1 + static_cast<int>(rng.below(3));
    const double betas[4] = {0.1, 0.5, 1.0, 1.5};
    inst.beta = betas[rng.below(4)];
    SpreadOutModel m(inst.d, inst.L, inst.beta);

    const int box_r = inst.d == 1 ? 2 + static_cast<int>(rng.below(2)) : 1;
    inst.inner_radius = 1;
    inst.outer_radius = box_r;

    // sites: the full outer box (small: at most 9 in d=2, 7 in d=1)
    std::vector<Point> sites;
    Point off(inst.d);
    for (int i = 0; i < inst.d; ++i) off.c[i] = -box_r;
    for (;;) {
        sites.push_back(off);
        int i = inst.d - 1;
        while (i >= 0 && off.c[i] == box_r) off.c[i--] = -box_r;
        if (i < 0) break;
        ++off.c[i];
    }
    inst.g.sites = sites;

    // candidate kernel edges, kept with probability ~2/3, capped
    std::vector<std::pair<int, int>> candidates;
    for (int i = 0; i < inst.g.size(); ++i)
        for (int j = i + 1; j < inst.g.size(); ++j)
            if (m.edge_probability(sites[static_cast<size_t>(i)], sites[static_cast<size_t>(j)]) > 0)
                candidates.emplace_back(i, j);
    // adversarial long edges crossing the boundary of S first, so they
    // survive the cap
    std::vector<std::pair<int, int>> ordered;
    Region S = inst.inner();
    for (auto& c : candidates) {
        bool in1 = contains(S, sites[static_cast<size_t>(c.first)]);
        bool in2 = contains(S, sites[static_cast<size_t>(c.second)]);
        if (in1 != in2 && rng.bernoulli(0.5)) ordered.push_back(c);
    }
    for (auto& c : candidates)
        if (rng.bernoulli(0.67)) ordered.push_back(c);
    for (auto& c : ordered) {
        if (inst.g.edges.size() >= max_edges) break;
        bool dup = false;
        for (const auto& e : inst.g.edges)
            if ((e.a == c.first && e.b == c.second) || (e.a == c.second && e.b == c.first)) dup = true;
        if (dup) continue;
        inst.g.edges.push_back(
            {c.first, c.second,
             m.edge_probability(sites[static_cast<size_t>(c.first)], sites[static_cast<size_t>(c.second)])});
    }

    auto pick_in = [&](const Region& r) {
        for (;;) {
            const Point& p = sites[rng.below(sites.size())];
            if (contains(r, p)) return p;
        }
    };
    inst.o = Point::zero(inst.d);
    inst.x = pick_in(inst.outer());
    inst.a = pick_in(S);
    inst.b = pick_in(S);
    inst.A = {pick_in(inst.outer()), pick_in(inst.outer())};
    inst.B = {pick_in(inst.outer()), pick_in(inst.outer())};
    return inst;
}

/// Runs the four exact checks on one instance.
inline std::vector<InequalityReport> verify_instance(const OracleInstance& inst) {
    std::vector<InequalityReport> reps;
    reps.push_back(verify_bk(inst.g, inst.A, inst.B));
    reps.push_back(verify_tree_bound(inst.g, inst.inner(), inst.o, inst.a, inst.b));
    reps.push_back(verify_simon_lieb(inst.g, inst.inner(), inst.outer(), inst.o, inst.x));
    reps.push_back(verify_reversed(inst.g, inst.inner(), inst.outer(), inst.o, inst.x));
    return reps;
}

// ---------------------------------------------------------------------------
// Replay files: plain-text, one instance per file.
// ---------------------------------------------------------------------------

inline void write_point(std::ostream& os, const Point& p) {
    for (int i = 0; i < p.dim; ++i) os << (i ? " " : "") << p[i];
}

inline void save_instance(const OracleInstance& inst, std::ostream& os) {
    os.precision(17);  // round-trip exact doubles
    os << "spreadout-instance v1\n";
    os << "model " << inst.d << " " << inst.L << " " << inst.beta << "\n";
    os << "regions " << inst.inner_radius << " " << inst.outer_radius << "\n";
    os << "sites " << inst.g.sites.size() << "\n";
    for (const auto& s : inst.g.sites) {
        write_point(os, s);
        os << "\n";
    }
    os << "edges " << inst.g.edges.size() << "\n";
    for (const auto& e : inst.g.edges) os << e.a << " " << e.b << " " << e.p << "\n";
    auto idx = [&](const Point& p) { return inst.g.index_of(p); };
    os << "points " << idx(inst.o) << " " << idx(inst.x) << " " << idx(inst.a) << " " << idx(inst.b)
       << "\n";
    os << "events " << idx(inst.A.x) << " " << idx(inst.A.y) << " " << idx(inst.B.x) << " "
       << idx(inst.B.y) << "\n";
}

inline OracleInstance load_instance(std::istream& is) {
    OracleInstance inst;
    std::string header;
    std::getline(is, header);
    if (header != "spreadout-instance v1") throw UsageError("replay: bad header: " + header);
    std::string tag;
    is >> tag >> inst.d >> inst.L >> inst.beta;
    if (tag != "model") throw UsageError("replay: expected model line");
    is >> tag >> inst.inner_radius >> inst.outer_radius;
    if (tag != "regions") throw UsageError("replay: expected regions line");
    size_t n_sites = 0;
    is >> tag >> n_sites;
    if (tag != "sites") throw UsageError("replay: expected sites line");
    for (size_t i = 0; i < n_sites; ++i) {
        Point p(inst.d);
        for (int j = 0; j < inst.d; ++j) is >> p.c[j];
        inst.g.sites.push_back(p);
    }
    size_t n_edges = 0;
    is >> tag >> n_edges;
    if (tag != "edges") throw UsageError("replay: expected edges line");
    for (size_t i = 0; i < n_edges; ++i) {
        FiniteGraph::Edge e{};
        is >> e.a >> e.b >> e.p;
        inst.g.edges.push_back(e);
    }
    int io, ix, ia, ib;
    is >> tag >> io >> ix >> ia >> ib;
    if (tag != "points") throw UsageError("replay: expected points line");
    inst.o = inst.g.sites[static_cast<size_t>(io)];
    inst.x = inst.g.sites[static_cast<size_t>(ix)];
    inst.a = inst.g.sites[static_cast<size_t>(ia)];
    inst.b = inst.g.sites[static_cast<size_t>(ib)];
    int ax, ay, bx, by;
    is >> tag >> ax >> ay >> bx >> by;
    if (tag != "events") throw UsageError("replay: expected events line");
    inst.A = {inst.g.sites[static_cast<size_t>(ax)], inst.g.sites[static_cast<size_t>(ay)]};
    inst.B = {inst.g.sites[static_cast<size_t>(bx)], inst.g.sites[static_cast<size_t>(by)]};
    return inst;
}

/// Sweep: n randomized instances; any failure is dumped to `dump_dir` (when
/// non-empty) as a replay file.
struct SweepResult {
    size_t instances = 0;
    size_t checks = 0;
    std::vector<InequalityReport> failures;
};

inline SweepResult oracle_sweep(size_t n_instances, const RngStream& stream,
                                const std::string& dump_dir = "") {
    SweepResult res;
    for (size_t i = 0; i < n_instances; ++i) {
        CounterRng rng(stream.child(i));
        OracleInstance inst = generate_instance(rng);
        auto reps = verify_instance(inst);
        ++res.instances;
        for (auto& r : reps) {
            ++res.checks;
            if (!r.passed()) {
                res.failures.push_back(r);
                if (!dump_dir.empty()) {
                    std::ofstream f(dump_dir + "/instance_" + std::to_string(i) + ".txt");
                    save_instance(inst, f);
                }
            }
        }
    }
    return res;
}

}  // namespace spreadout
