#include "milnor/mesh_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <unordered_map>

namespace milnor {

namespace {

#include "mc_tables.inc"

// Bourke cube layout: vertex offsets in (i, j, k) and the twelve edges.
const int kCubeOffset[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 0, 1}, {0, 0, 1},
                               {0, 1, 0}, {1, 1, 0}, {1, 1, 1}, {0, 1, 1}};
const int kCubeEdge[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                              {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};

struct GridScalars {
    int m = 0;  // points per axis
    double delta = 0.0, h = 0.0;
    std::vector<double> vals;  // f - level at grid points

    double coord(int i) const { return -delta + h * i; }
};

// Roots of |p + s (q - p)| = radius in [lo, hi], ascending.
int sphere_roots(const Eigen::Vector3d& p, const Eigen::Vector3d& q, double radius, double* roots) {
    Eigen::Vector3d d = q - p;
    double a = d.squaredNorm();
    if (a == 0) return 0;
    double b = 2.0 * p.dot(d);
    double c = p.squaredNorm() - radius * radius;
    double disc = b * b - 4 * a * c;
    if (disc < 0) return 0;
    double sq = std::sqrt(disc);
    double qq = -0.5 * (b + (b >= 0 ? sq : -sq));
    double r0 = qq / a;
    double r1 = (qq != 0) ? c / qq : r0;
    if (r0 > r1) std::swap(r0, r1);
    int n = 0;
    if (r0 >= 0.0 && r0 <= 1.0) roots[n++] = r0;
    if (r1 >= 0.0 && r1 <= 1.0 && r1 != r0) roots[n++] = r1;
    return n;
}

class MeshBuilder {
  public:
    MeshBuilder(double delta, double snap) : delta_(delta), snap_(snap) {}

    int add_vertex(const Eigen::Vector3d& p) {
        verts_.push_back({p.x(), p.y(), p.z()});
        return static_cast<int>(verts_.size()) - 1;
    }

    Eigen::Vector3d pos(int v) const {
        const auto& a = verts_[static_cast<std::size_t>(v)];
        return {a[0], a[1], a[2]};
    }

    bool inside(int v) const { return pos(v).norm() <= delta_ + snap_; }

    // Cut vertex on segment (u, v); cached on the sorted pair so adjacent
    // cells share it. `towards_outside` picks the exit root when the lower
    // endpoint is inside.
    int cut_vertex(int u, int v) {
        int a = std::min(u, v), b = std::max(u, v);
        auto key = std::make_pair(a, b);
        auto it = cuts_.find(key);
        if (it != cuts_.end()) return it->second;
        Eigen::Vector3d pa = pos(a), pb = pos(b);
        double roots[2];
        int n = sphere_roots(pa, pb, delta_, roots);
        double s;
        if (n == 0) {
            // Grazing contact lost to round-off: fall back to the closest
            // approach parameter.
            Eigen::Vector3d d = pb - pa;
            s = std::clamp(-pa.dot(d) / d.squaredNorm(), 0.0, 1.0);
        } else if (n == 1) {
            s = roots[0];
        } else {
            s = inside(a) ? roots[1] : roots[0];
        }
        Eigen::Vector3d p = pa + s * (pb - pa);
        // The cut lies on the sphere by construction; renormalize to kill
        // the quadratic round-off.
        double norm = p.norm();
        if (norm > 0) p *= delta_ / norm;
        int id = add_vertex(p);
        cuts_.emplace(key, id);
        return id;
    }

    std::vector<std::array<double, 3>> take_vertices() { return std::move(verts_); }

  private:
    double delta_, snap_;
    std::vector<std::array<double, 3>> verts_;
    std::map<std::pair<int, int>, int> cuts_;
};

// ---------------------------------------------------------------- n = 1

// Marching-squares segments for one cell, as pairs of local edges
// (0 bottom, 1 right, 2 top, 3 left). Ambiguous cases decided by the
// center sample.
int square_case_segments(int idx, bool center_negative, int out[2][2]) {
    switch (idx) {
        case 0:
        case 15: return 0;
        case 1: out[0][0] = 3, out[0][1] = 0; return 1;
        case 2: out[0][0] = 0, out[0][1] = 1; return 1;
        case 3: out[0][0] = 3, out[0][1] = 1; return 1;
        case 4: out[0][0] = 1, out[0][1] = 2; return 1;
        case 5:
            if (center_negative) {
                out[0][0] = 0, out[0][1] = 1;
                out[1][0] = 2, out[1][1] = 3;
            } else {
                out[0][0] = 3, out[0][1] = 0;
                out[1][0] = 1, out[1][1] = 2;
            }
            return 2;
        case 6: out[0][0] = 0, out[0][1] = 2; return 1;
        case 7: out[0][0] = 3, out[0][1] = 2; return 1;
        case 8: out[0][0] = 2, out[0][1] = 3; return 1;
        case 9: out[0][0] = 0, out[0][1] = 2; return 1;
        case 10:
            if (center_negative) {
                out[0][0] = 3, out[0][1] = 0;
                out[1][0] = 1, out[1][1] = 2;
            } else {
                out[0][0] = 0, out[0][1] = 1;
                out[1][0] = 2, out[1][1] = 3;
            }
            return 2;
        case 11: out[0][0] = 1, out[0][1] = 2; return 1;
        case 12: out[0][0] = 1, out[0][1] = 3; return 1;
        case 13: out[0][0] = 0, out[0][1] = 1; return 1;
        case 14: out[0][0] = 3, out[0][1] = 0; return 1;
        default: return 0;
    }
}

MeshComplex build_curve(const CompiledPoly& f, double level, double delta, double resolution,
                        ExecMode exec) {
    GridScalars g;
    g.delta = delta;
    int cells = std::max(8, static_cast<int>(std::llround(2.0 * delta / resolution)));
    g.m = cells + 1;
    g.h = 2.0 * delta / cells;
    const int m = g.m;
    g.vals.resize(static_cast<std::size_t>(m) * m);
    parallel_for(static_cast<std::size_t>(m), exec, [&](std::size_t j) {
        double y = g.coord(static_cast<int>(j));
        double p[2];
        p[1] = y;
        for (int i = 0; i < m; ++i) {
            p[0] = g.coord(i);
            g.vals[j * static_cast<std::size_t>(m) + static_cast<std::size_t>(i)] = f(p) - level;
        }
    });
    auto val = [&](int i, int j) { return g.vals[static_cast<std::size_t>(j) * m + i]; };
    auto neg = [](double v) { return v < 0.0; };  // exact zeros count positive

    // Global grid-edge ids: horizontal (i,j)->(i+1,j) is 2*(j*m+i),
    // vertical (i,j)->(i,j+1) is 2*(j*m+i)+1.
    auto h_edge = [&](int i, int j) { return 2LL * (static_cast<long long>(j) * m + i); };
    auto v_edge = [&](int i, int j) { return 2LL * (static_cast<long long>(j) * m + i) + 1; };

    const double cell_reach = g.h * 1.5;
    std::vector<std::array<long long, 2>> raw;  // segments as edge-id pairs
    for (int j = 0; j < cells; ++j) {
        for (int i = 0; i < cells; ++i) {
            double cx = g.coord(i) + 0.5 * g.h, cy = g.coord(j) + 0.5 * g.h;
            if (std::hypot(cx, cy) - cell_reach > delta) continue;
            double c0 = val(i, j), c1 = val(i + 1, j), c2 = val(i + 1, j + 1), c3 = val(i, j + 1);
            int idx = (neg(c0) ? 1 : 0) | (neg(c1) ? 2 : 0) | (neg(c2) ? 4 : 0) | (neg(c3) ? 8 : 0);
            if (idx == 0 || idx == 15) continue;
            bool center_neg = false;
            if (idx == 5 || idx == 10) {
                double p[2] = {cx, cy};
                center_neg = neg(f(p) - level);
            }
            long long edge_ids[4] = {h_edge(i, j), v_edge(i + 1, j), h_edge(i, j + 1), v_edge(i, j)};
            int segs[2][2];
            int nseg = square_case_segments(idx, center_neg, segs);
            for (int s = 0; s < nseg; ++s)
                raw.push_back({edge_ids[segs[s][0]], edge_ids[segs[s][1]]});
        }
    }

    // Weld crossing points by grid edge; position computed canonically from
    // the two grid values.
    const double snap = 1e-9 * delta;
    MeshBuilder builder(delta, snap);
    std::unordered_map<long long, int> by_edge;
    auto weld = [&](long long edge_id) {
        auto it = by_edge.find(edge_id);
        if (it != by_edge.end()) return it->second;
        long long cell_lin = edge_id / 2;
        int axis = static_cast<int>(edge_id % 2);
        int i = static_cast<int>(cell_lin % m), j = static_cast<int>(cell_lin / m);
        double ga = val(i, j);
        double gb = axis == 0 ? val(i + 1, j) : val(i, j + 1);
        double t = ga / (ga - gb);
        Eigen::Vector3d p(g.coord(i) + (axis == 0 ? t * g.h : 0.0),
                          g.coord(j) + (axis == 1 ? t * g.h : 0.0), 0.0);
        int id = builder.add_vertex(p);
        by_edge.emplace(edge_id, id);
        return id;
    };

    std::vector<std::array<int, 2>> welded;
    welded.reserve(raw.size());
    for (const auto& s : raw) {
        int a = weld(s[0]), b = weld(s[1]);
        if (a != b) welded.push_back({a, b});
    }

    // Clip each segment to the disc.
    std::vector<std::array<int, 2>> clipped;
    for (const auto& s : welded) {
        bool ia = builder.inside(s[0]), ib = builder.inside(s[1]);
        if (ia && ib) {
            clipped.push_back(s);
        } else if (ia != ib) {
            int w = builder.cut_vertex(s[0], s[1]);
            clipped.push_back(ia ? std::array<int, 2>{s[0], w} : std::array<int, 2>{w, s[1]});
        } else {
            Eigen::Vector3d pa = builder.pos(s[0]), pb = builder.pos(s[1]);
            double roots[2];
            if (sphere_roots(pa, pb, delta, roots) == 2 && roots[1] - roots[0] > 1e-12) {
                Eigen::Vector3d d = pb - pa;
                int w0 = builder.add_vertex(pa + roots[0] * d);
                int w1 = builder.add_vertex(pa + roots[1] * d);
                clipped.push_back({w0, w1});
            }
        }
    }

    MeshComplex out;
    out.n = 1;
    out.delta = delta;
    out.resolution = g.h;
    out.level = level;
    out.vertices = builder.take_vertices();

    // Prune unreferenced vertices.
    std::vector<int> remap(out.vertices.size(), -1);
    std::vector<std::array<double, 3>> used;
    for (auto& s : clipped)
        for (int& v : s) {
            if (remap[static_cast<std::size_t>(v)] < 0) {
                remap[static_cast<std::size_t>(v)] = static_cast<int>(used.size());
                used.push_back(out.vertices[static_cast<std::size_t>(v)]);
            }
            v = remap[static_cast<std::size_t>(v)];
        }
    out.vertices = std::move(used);
    out.segments = std::move(clipped);

    // Manifold-with-boundary validation; degree-1 vertices are the boundary.
    std::vector<int> degree(out.vertices.size(), 0);
    for (const auto& s : out.segments) {
        ++degree[static_cast<std::size_t>(s[0])];
        ++degree[static_cast<std::size_t>(s[1])];
    }
    out.boundary_vertex.assign(out.vertices.size(), 0);
    for (std::size_t v = 0; v < out.vertices.size(); ++v) {
        if (degree[v] > 2) throw MeshError("non-manifold curve: vertex with degree > 2");
        if (degree[v] == 1) {
            double r = std::hypot(out.vertices[v][0], out.vertices[v][1]);
            if (std::abs(r - delta) > 2.0 * out.resolution)
                throw MeshError("curve endpoint away from the sphere");
            out.boundary_vertex[v] = 1;
        }
    }
    return out;
}

// ---------------------------------------------------------------- n = 2

MeshComplex build_surface(const CompiledPoly& f, double level, double delta, double resolution,
                          ExecMode exec) {
    GridScalars g;
    g.delta = delta;
    int cells = std::max(8, static_cast<int>(std::llround(2.0 * delta / resolution)));
    g.m = cells + 1;
    g.h = 2.0 * delta / cells;
    const int m = g.m;
    g.vals.resize(static_cast<std::size_t>(m) * m * m);
    parallel_for(static_cast<std::size_t>(m), exec, [&](std::size_t k) {
        double p[3];
        p[2] = g.coord(static_cast<int>(k));
        for (int j = 0; j < m; ++j) {
            p[1] = g.coord(j);
            std::size_t base = (k * static_cast<std::size_t>(m) + static_cast<std::size_t>(j)) * static_cast<std::size_t>(m);
            for (int i = 0; i < m; ++i) {
                p[0] = g.coord(i);
                g.vals[base + static_cast<std::size_t>(i)] = f(p) - level;
            }
        }
    });
    auto val = [&](int i, int j, int k) {
        return g.vals[(static_cast<std::size_t>(k) * m + static_cast<std::size_t>(j)) * m + static_cast<std::size_t>(i)];
    };
    auto point_id = [&](int i, int j, int k) {
        return (static_cast<long long>(k) * m + j) * m + i;
    };
    // Global edge id: 3 * lower-corner id + axis.
    auto edge_id = [&](int i, int j, int k, int axis) { return 3LL * point_id(i, j, k) + axis; };

    // Per-cell triangle emission (parallel over k-slabs, deterministic merge).
    struct SlabOut {
        std::vector<std::array<long long, 3>> tris;
    };
    std::vector<SlabOut> slabs(static_cast<std::size_t>(cells));
    const double cell_reach = g.h * std::sqrt(3.0);
    parallel_for(static_cast<std::size_t>(cells), exec, [&](std::size_t kz) {
        int k = static_cast<int>(kz);
        auto& sink = slabs[kz].tris;
        double vals8[8];
        long long eids[12];
        for (int j = 0; j < cells; ++j) {
            for (int i = 0; i < cells; ++i) {
                double cx = g.coord(i) + 0.5 * g.h, cy = g.coord(j) + 0.5 * g.h,
                       cz = g.coord(k) + 0.5 * g.h;
                if (std::sqrt(cx * cx + cy * cy + cz * cz) - cell_reach > delta) continue;
                int idx = 0;
                for (int v = 0; v < 8; ++v) {
                    vals8[v] = val(i + kCubeOffset[v][0], j + kCubeOffset[v][1], k + kCubeOffset[v][2]);
                    if (vals8[v] < 0.0) idx |= 1 << v;
                }
                if (kEdgeTable[idx] == 0) continue;
                for (int e = 0; e < 12; ++e) {
                    if (!(kEdgeTable[idx] & (1 << e))) continue;
                    const int* a = kCubeOffset[kCubeEdge[e][0]];
                    const int* b = kCubeOffset[kCubeEdge[e][1]];
                    int li = i + std::min(a[0], b[0]);
                    int lj = j + std::min(a[1], b[1]);
                    int lk = k + std::min(a[2], b[2]);
                    int axis = a[0] != b[0] ? 0 : (a[1] != b[1] ? 1 : 2);
                    eids[e] = edge_id(li, lj, lk, axis);
                }
                for (const int* t = kTriTable[idx]; *t != -1; t += 3) {
                    long long e0 = eids[t[0]], e1 = eids[t[1]], e2 = eids[t[2]];
                    if (e0 == e1 || e1 == e2 || e0 == e2) continue;
                    sink.push_back({e0, e1, e2});
                }
            }
        }
    });

    const double snap = 1e-9 * delta;
    MeshBuilder builder(delta, snap);
    std::unordered_map<long long, int> by_edge;
    auto weld = [&](long long eid) {
        auto it = by_edge.find(eid);
        if (it != by_edge.end()) return it->second;
        long long pid = eid / 3;
        int axis = static_cast<int>(eid % 3);
        int i = static_cast<int>(pid % m);
        int j = static_cast<int>((pid / m) % m);
        int k = static_cast<int>(pid / (static_cast<long long>(m) * m));
        double ga = val(i, j, k);
        double gb = val(i + (axis == 0), j + (axis == 1), k + (axis == 2));
        double t = ga / (ga - gb);
        Eigen::Vector3d p(g.coord(i), g.coord(j), g.coord(k));
        p[axis] += t * g.h;
        int id = builder.add_vertex(p);
        by_edge.emplace(eid, id);
        return id;
    };

    std::vector<std::array<int, 3>> welded;
    for (const auto& slab : slabs)
        for (const auto& t : slab.tris) {
            int a = weld(t[0]), b = weld(t[1]), c = weld(t[2]);
            if (a == b || b == c || a == c) continue;
            welded.push_back({a, b, c});
        }

    // Clip triangles to the ball; partially-inside triangles are
    // retriangulated, never discarded.
    std::vector<std::array<int, 3>> clipped;
    for (const auto& t : welded) {
        int in_count = 0;
        bool in[3];
        for (int v = 0; v < 3; ++v) {
            in[v] = builder.inside(t[static_cast<std::size_t>(v)]);
            if (in[v]) ++in_count;
        }
        if (in_count == 3) {
            clipped.push_back(t);
            continue;
        }
        if (in_count == 0) continue;
        // Rotate (cyclically, preserving orientation) so the pattern is
        // canonical: 1-in -> inside vertex first; 2-in -> outside vertex last.
        int rot = 0;
        if (in_count == 1) {
            while (!in[rot]) ++rot;
        } else {
            while (in[(rot + 2) % 3]) ++rot;
        }
        int a = t[static_cast<std::size_t>(rot % 3)];
        int b = t[static_cast<std::size_t>((rot + 1) % 3)];
        int c = t[static_cast<std::size_t>((rot + 2) % 3)];
        if (in_count == 1) {
            int wab = builder.cut_vertex(a, b);
            int wac = builder.cut_vertex(a, c);
            if (a != wab && wab != wac && a != wac) clipped.push_back({a, wab, wac});
        } else {
            int wbc = builder.cut_vertex(b, c);
            int wac = builder.cut_vertex(a, c);
            if (a != b && b != wbc && a != wbc) clipped.push_back({a, b, wbc});
            if (a != wbc && wbc != wac && a != wac) clipped.push_back({a, wbc, wac});
        }
    }

    MeshComplex out;
    out.n = 2;
    out.delta = delta;
    out.resolution = g.h;
    out.level = level;
    out.vertices = builder.take_vertices();

    std::vector<int> remap(out.vertices.size(), -1);
    std::vector<std::array<double, 3>> used;
    for (auto& t : clipped)
        for (int& v : t) {
            if (remap[static_cast<std::size_t>(v)] < 0) {
                remap[static_cast<std::size_t>(v)] = static_cast<int>(used.size());
                used.push_back(out.vertices[static_cast<std::size_t>(v)]);
            }
            v = remap[static_cast<std::size_t>(v)];
        }
    out.vertices = std::move(used);
    out.triangles = std::move(clipped);

    // Edge incidence: interior edges carry two triangles, boundary edges one.
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& t : out.triangles) {
        for (int e = 0; e < 3; ++e) {
            int a = t[static_cast<std::size_t>(e)], b = t[static_cast<std::size_t>((e + 1) % 3)];
            ++edge_count[std::minmax(a, b)];
        }
    }
    out.boundary_vertex.assign(out.vertices.size(), 0);
    for (const auto& [e, count] : edge_count) {
        if (count > 2) throw MeshError("non-manifold surface: edge with more than two triangles");
        out.edges.push_back({e.first, e.second});
        out.boundary_edge.push_back(count == 1);
        if (count == 1) {
            for (int v : {e.first, e.second}) {
                const auto& p = out.vertices[static_cast<std::size_t>(v)];
                double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
                if (std::abs(r - delta) > 2.0 * out.resolution)
                    throw MeshError("surface boundary edge away from the sphere");
                out.boundary_vertex[static_cast<std::size_t>(v)] = 1;
            }
        }
    }
    return out;
}

}  // namespace

int MeshComplex::num_cells(int k) const {
    if (k == 0) {
        int c = 0;
        for (std::size_t v = 0; v < vertices.size(); ++v)
            if (!boundary_vertex[v]) ++c;
        return c;
    }
    if (k == 1) {
        if (n == 1) return static_cast<int>(segments.size());
        int c = 0;
        for (std::size_t e = 0; e < edges.size(); ++e)
            if (!boundary_edge[e]) ++c;
        return c;
    }
    if (k == 2 && n == 2) return static_cast<int>(triangles.size());
    return 0;
}

long long MeshComplex::euler_characteristic_rel() const {
    long long e = 0;
    for (int k = 0; k <= n; ++k) e += (k % 2 == 0 ? 1 : -1) * num_cells(k);
    return e;
}

MeshComplex extract_fibre(const Polynomial& f_t, double level, double delta, const MeshConfig& cfg) {
    const int dim = static_cast<int>(f_t.num_variables());
    if (dim != 2 && dim != 3)
        throw MeshError("mesh oracle supports n = 1 and n = 2 only (2 or 3 variables)");
    if (delta <= 0) throw std::invalid_argument("delta must be positive");

    double resolution = cfg.resolution > 0 ? cfg.resolution : (dim == 2 ? delta / 128.0 : delta / 48.0);
    if (resolution > delta / 32.0) resolution = delta / 32.0;
    const int grid_cap = dim == 2 ? 4096 : 320;

    CompiledPoly f(f_t);
    std::string last_error;
    for (int attempt = 0; attempt <= cfg.max_refine; ++attempt) {
        if (2.0 * delta / resolution > grid_cap)
            throw MeshError("resolution floor reached: " + last_error);
        try {
            return dim == 2 ? build_curve(f, level, delta, resolution, cfg.exec)
                            : build_surface(f, level, delta, resolution, cfg.exec);
        } catch (const MeshError& err) {
            last_error = err.what();
            resolution *= 0.5;
        }
    }
    throw MeshError("mesh extraction failed after refinement: " + last_error);
}

ChainComplex relative_chain_complex(const MeshComplex& m) {
    ChainComplex cx;
    // Interior-vertex renumbering (boundary cells are quotiented away).
    std::vector<int> vmap(m.vertices.size(), -1);
    int nv = 0;
    for (std::size_t v = 0; v < m.vertices.size(); ++v)
        if (!m.boundary_vertex[v]) vmap[v] = nv++;

    if (m.n == 1) {
        cx.cells = {nv, static_cast<int>(m.segments.size())};
        cx.boundary.resize(2);
        cx.boundary[1] = SparseIntMatrix(nv, static_cast<int>(m.segments.size()));
        for (std::size_t s = 0; s < m.segments.size(); ++s) {
            int a = m.segments[s][0], b = m.segments[s][1];
            if (vmap[static_cast<std::size_t>(b)] >= 0)
                cx.boundary[1].add_entry(vmap[static_cast<std::size_t>(b)], static_cast<int>(s), 1);
            if (vmap[static_cast<std::size_t>(a)] >= 0)
                cx.boundary[1].add_entry(vmap[static_cast<std::size_t>(a)], static_cast<int>(s), -1);
        }
        cx.boundary[1].sort_entries();
        return cx;
    }

    std::map<std::pair<int, int>, int> emap;  // interior edges only
    int ne = 0;
    for (std::size_t e = 0; e < m.edges.size(); ++e)
        if (!m.boundary_edge[e]) emap[{m.edges[e][0], m.edges[e][1]}] = ne++;

    cx.cells = {nv, ne, static_cast<int>(m.triangles.size())};
    cx.boundary.resize(3);
    cx.boundary[1] = SparseIntMatrix(nv, ne);
    for (const auto& [e, idx] : emap) {
        // oriented min -> max: boundary = max - min
        if (vmap[static_cast<std::size_t>(e.second)] >= 0)
            cx.boundary[1].add_entry(vmap[static_cast<std::size_t>(e.second)], idx, 1);
        if (vmap[static_cast<std::size_t>(e.first)] >= 0)
            cx.boundary[1].add_entry(vmap[static_cast<std::size_t>(e.first)], idx, -1);
    }
    cx.boundary[2] = SparseIntMatrix(ne, static_cast<int>(m.triangles.size()));
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto& tri = m.triangles[t];
        const int face[3][2] = {{tri[1], tri[2]}, {tri[0], tri[2]}, {tri[0], tri[1]}};
        const int face_sign[3] = {1, -1, 1};
        for (int fidx = 0; fidx < 3; ++fidx) {
            int a = face[fidx][0], b = face[fidx][1];
            int orient = a < b ? 1 : -1;
            auto it = emap.find(std::minmax(a, b));
            if (it == emap.end()) continue;  // boundary edge, quotiented away
            cx.boundary[2].add_entry(it->second, static_cast<int>(t), face_sign[fidx] * orient);
        }
    }
    cx.boundary[1].sort_entries();
    cx.boundary[2].sort_entries();
    return cx;
}

HomologyReport relative_homology_mesh(const MeshComplex& m) {
    ChainComplex cx = relative_chain_complex(m);
    std::vector<DegreeHomology> h = chain_homology(cx);
    HomologyReport report;
    for (std::size_t k = 0; k < h.size(); ++k) {
        if (h[k].rank != 0) report.ranks[static_cast<int>(k)] = h[k].rank;
        if (!h[k].torsion.empty()) {
            std::vector<std::string> ts;
            for (const auto& f : h[k].torsion) ts.push_back(f.str());
            report.torsion[static_cast<int>(k)] = std::move(ts);
        }
    }
    report.euler_rel = m.euler_characteristic_rel();
    return report;
}

CompareVerdict compare(const HomologyReport& morse, const HomologyReport& mesh) {
    CompareVerdict verdict;
    int max_deg = 0;
    for (const auto& [k, r] : morse.ranks) max_deg = std::max(max_deg, k);
    for (const auto& [k, r] : mesh.ranks) max_deg = std::max(max_deg, k);
    for (int k = 0; k <= max_deg; ++k) {
        if (morse.rank(k) != mesh.rank(k)) {
            verdict.ranks_equal = false;
            verdict.agree = false;
            if (!verdict.first_mismatch_degree) verdict.first_mismatch_degree = k;
        }
    }
    if (!mesh.torsion_free()) {
        verdict.mesh_torsion_free = false;
        verdict.agree = false;
        verdict.note = "mesh homology has torsion; the handle counting predicts none";
    }
    if (morse.euler_rel != mesh.euler_rel) {
        verdict.euler_equal = false;
        verdict.agree = false;
    }
    if (verdict.agree) verdict.note = "per-degree ranks, torsion-freeness and Euler characteristic agree";
    return verdict;
}

void write_off(const MeshComplex& m, std::ostream& out) {
    char buf[128];
    out << "OFF\n";
    std::size_t nfaces = m.n == 1 ? m.segments.size() : m.triangles.size();
    out << m.vertices.size() << " " << nfaces << " 0\n";
    for (const auto& v : m.vertices) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", v[0], v[1], v[2]);
        out << buf;
    }
    if (m.n == 1) {
        for (const auto& s : m.segments) out << "2 " << s[0] << " " << s[1] << "\n";
    } else {
        for (const auto& t : m.triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
    }
    out << "# boundary-vertices:";
    for (std::size_t v = 0; v < m.vertices.size(); ++v)
        if (m.boundary_vertex[v]) out << " " << v;
    out << "\n";
    if (m.n == 2) {
        out << "# boundary-edges:";
        for (std::size_t e = 0; e < m.edges.size(); ++e)
            if (m.boundary_edge[e]) out << " " << m.edges[e][0] << "-" << m.edges[e][1];
        out << "\n";
    }
}

}  // namespace milnor
