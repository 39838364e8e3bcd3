#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hmk/domain.hpp"

namespace hmk {

// Finite point set in R^dim.  Graph clouds of arcs store (s, k, x_0..x_{n-1}).
struct GraphCloud {
    int dim = 0;
    std::vector<double> pts;

    size_t size() const { return dim > 0 ? pts.size() / static_cast<size_t>(dim) : 0; }
    const double* point(size_t i) const { return pts.data() + i * static_cast<size_t>(dim); }
    void add(const double* p) { pts.insert(pts.end(), p, p + dim); }
};

// refine > 0 inserts that many interpolated points between consecutive samples
GraphCloud graph_cloud(const HybridArc& arc, int refine = 0);
GraphCloud graph_cloud(const MemoryArc& phi, int refine = 0);
GraphCloud point_cloud(const std::vector<Vec>& points);
GraphCloud translate(const GraphCloud& c, const Vec& x);
GraphCloud cloud_union(const std::vector<GraphCloud>& parts);

double point_to_cloud(const Vec& z, const GraphCloud& H);
double hausdorff(const GraphCloud& A, const GraphCloud& B);

// max |d(z,A) - d(z,B)| over the probe set: points of A, B and the extra
// probes radially clipped into the rho-ball, plus the origin
double d_rho(const GraphCloud& A, const GraphCloud& B, double rho,
             const std::vector<Vec>& probes = {});

struct QuadratureSpec {
    double h_rho = 0.01;
    double pad = 5.0;  // rho_max = largest probe norm + pad
    std::vector<Vec> probes;
};

struct DistanceReport {
    double d = 0.0;
    std::vector<std::pair<double, double>> d_rho_samples;
    double rho_max = 0.0;
    double tail_bound = 0.0;
    double hausdorff = 0.0;
};

DistanceReport integrated_distance(const GraphCloud& A, const GraphCloud& B,
                                   const QuadratureSpec& quad = {});
DistanceReport integrated_distance(const HybridArc& a, const HybridArc& b,
                                   const QuadratureSpec& quad = {});

// tol is the breakpoint tolerance for the domain comparison; the supremum is
// taken over the merged sample grids
double uniform_distance(const HybridArc& phi, const HybridArc& psi, double tol = tau_eq);
bool same_domain(const HybridArc& phi, const HybridArc& psi, double tol = tau_eq);

// minimal eps for (tau,eps)-closeness, taken over the piecewise-linear arcs
// (not only their samples); +inf if a jump index is missing from one arc
double tau_eps_closeness(const HybridArc& phi, const HybridArc& psi, double tau);

// minimal eps with gph phi ∩ rho B ⊂ gph psi + eps B and vice versa
double graph_closeness(const GraphCloud& A, const GraphCloud& B, double rho);
double graph_closeness(const HybridArc& phi, const HybridArc& psi, double rho);

struct RelationItem {
    std::string name;
    double param = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = true;
};

struct RelationReport {
    double d = 0.0;
    double m = 0.0;
    std::vector<RelationItem> items;
    bool all_pass() const;
};

struct RelationOptions {
    double slack = 1e-3;
    std::vector<double> rho_bars{0.0, 0.5, 1.0, 2.0, 3.0};
    std::vector<double> rhos{0.0, 0.5, 1.0, 2.0, 4.0};
    std::vector<double> taus{0.5, 1.0, 2.0, 4.0, 8.0};
    QuadratureSpec quad;
};

RelationReport relation_check(const HybridArc& phi, const HybridArc& psi,
                              const RelationOptions& opt = {});

struct SetLemmaReport {
    double union_lhs = 0.0;
    double union_rhs = 0.0;
    bool union_pass = true;
    double translation_lhs = 0.0;
    double translation_rhs = 0.0;
    bool translation_pass = true;
    bool all_pass() const { return union_pass && translation_pass; }
};

SetLemmaReport set_lemma_check(const std::vector<GraphCloud>& A, const std::vector<GraphCloud>& B,
                               const Vec& x, const Vec& y, double slack = 1e-9);

struct TriangleReport {
    double eps1 = 0.0;
    double eps2 = 0.0;
    double tau = 0.0;
    double eps13 = 0.0;
    bool pass = true;
};

TriangleReport closeness_triangle_check(const HybridArc& phi1, const HybridArc& phi2,
                                        const HybridArc& phi3, double tau1, double tau2);

// distance from p to the convex hull of a finite vertex set (Frank-Wolfe;
// the returned value is attained by a feasible hull point, so it is an
// upper bound that is tight to ~tol)
double hull_distance(const Vec& p, const std::vector<Vec>& vertices, double tol = 1e-12);

}  // namespace hmk
