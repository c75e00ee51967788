#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

#include "milnor/mesh_oracle.hpp"
#include "milnor/sampling.hpp"

using namespace milnor;

namespace {
const std::vector<std::string> XY = {"x", "y"};
const std::vector<std::string> XYZ = {"x", "y", "z"};

// connected components of the 1-complex via union-find
int count_components(const MeshComplex& m) {
    std::vector<int> parent(m.vertices.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int a) {
        while (parent[static_cast<std::size_t>(a)] != a) {
            parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            a = parent[static_cast<std::size_t>(a)];
        }
        return a;
    };
    auto unite = [&](int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); };
    for (const auto& s : m.segments) unite(s[0], s[1]);
    for (const auto& t : m.triangles) {
        unite(t[0], t[1]);
        unite(t[1], t[2]);
    }
    std::set<int> roots;
    for (std::size_t i = 0; i < parent.size(); ++i) roots.insert(find(static_cast<int>(i)));
    return static_cast<int>(roots.size());
}

int count_boundary_vertices(const MeshComplex& m) {
    int c = 0;
    for (char b : m.boundary_vertex) c += b != 0;
    return c;
}

}  // namespace

TEST_CASE("cusp fibre meshes as one arc with two boundary points") {
    MeshComplex m = extract_fibre(parse_polynomial("x^3 - y^2", XY), 0.01, 1.0);
    CHECK(m.n == 1);
    CHECK(count_components(m) == 1);
    CHECK(count_boundary_vertices(m) == 2);

    HomologyReport h = relative_homology_mesh(m);
    CHECK(h.rank(1) == 1);
    CHECK(h.rank(0) == 0);
    CHECK(h.torsion_free());
    CHECK(h.euler_rel == -1);
}

TEST_CASE("two-line fibre meshes as two arcs") {
    MeshComplex m = extract_fibre(parse_polynomial("x^2 - y^2", XY), 0.1, 1.0);
    CHECK(count_components(m) == 2);
    CHECK(count_boundary_vertices(m) == 4);
    HomologyReport h = relative_homology_mesh(m);
    CHECK(h.rank(1) == 2);
    CHECK(h.euler_rel == -2);
}

TEST_CASE("three-line fibre meshes as three arcs") {
    MeshComplex m = extract_fibre(parse_polynomial("x^3 - 3*x*y^2", XY), 0.1, 1.0);
    CHECK(count_components(m) == 3);
    CHECK(count_boundary_vertices(m) == 6);
    HomologyReport h = relative_homology_mesh(m);
    CHECK(h.rank(1) == 3);
}

TEST_CASE("cone fibre meshes as an annulus") {
    MeshComplex m = extract_fibre(parse_polynomial("x^2 + y^2 - z^2", XYZ), 0.1, 1.0);
    CHECK(m.n == 2);
    CHECK(count_components(m) == 1);
    CHECK(m.euler_characteristic_rel() == 0);

    // boundary circles: boundary edges form two cycles; count components of
    // the boundary subgraph
    std::map<int, std::vector<int>> adj;
    for (std::size_t e = 0; e < m.edges.size(); ++e) {
        if (!m.boundary_edge[e]) continue;
        adj[m.edges[e][0]].push_back(m.edges[e][1]);
        adj[m.edges[e][1]].push_back(m.edges[e][0]);
    }
    for (const auto& [v, nbrs] : adj) CHECK(nbrs.size() == 2);  // closed curves
    std::set<int> seen;
    int loops = 0;
    for (const auto& [v, nbrs] : adj) {
        if (seen.count(v)) continue;
        ++loops;
        std::vector<int> stack = {v};
        while (!stack.empty()) {
            int cur = stack.back();
            stack.pop_back();
            if (!seen.insert(cur).second) continue;
            for (int nb : adj[cur]) stack.push_back(nb);
        }
    }
    CHECK(loops == 2);

    HomologyReport h = relative_homology_mesh(m);
    CHECK(h.rank(1) == 1);
    CHECK(h.rank(2) == 1);
    CHECK(h.rank(0) == 0);
    CHECK(h.torsion_free());
}

TEST_CASE("manifold invariants hold on the cone mesh") {
    MeshComplex m = extract_fibre(parse_polynomial("x^2 + y^2 - z^2", XYZ), 0.1, 1.0);
    std::map<std::pair<int, int>, int> count;
    for (const auto& t : m.triangles)
        for (int e = 0; e < 3; ++e) ++count[std::minmax(t[static_cast<std::size_t>(e)], t[static_cast<std::size_t>((e + 1) % 3)])];
    int boundary = 0, interior = 0;
    for (const auto& [e, c] : count) {
        REQUIRE(c <= 2);
        REQUIRE(c >= 1);
        if (c == 1) ++boundary;
        if (c == 2) ++interior;
    }
    CHECK(boundary > 0);
    CHECK(interior > boundary);

    // every boundary-marked vertex sits near the sphere
    for (std::size_t v = 0; v < m.vertices.size(); ++v) {
        if (!m.boundary_vertex[v]) continue;
        const auto& p = m.vertices[v];
        double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        CHECK(std::abs(r - 1.0) < 2.0 * m.resolution);
    }
}

TEST_CASE("mesh vertices track the level set") {
    Polynomial f = parse_polynomial("x^2 + y^2 - z^2", XYZ);
    MeshComplex m = extract_fibre(f, 0.1, 1.0);
    PolyVector g = gradient(f);
    Rng rng(1234);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t v = rng.next_u64() % m.vertices.size();
        Eigen::Vector3d p(m.vertices[v][0], m.vertices[v][1], m.vertices[v][2]);
        double grad_bound = g.evaluate(p).norm() + 1.0;
        CHECK(std::abs(f.evaluate(p) - 0.1) < 10.0 * m.resolution * grad_bound);
    }
}

TEST_CASE("euler characteristic equals the rank alternation on meshes") {
    struct Case {
        const char* text;
        std::vector<std::string> vars;
        double eps;
    };
    const Case cases[] = {
        {"x^3 - y^2", XY, 0.01},
        {"x^2 - y^2", XY, 0.1},
        {"x^2 + y^2 - z^2", XYZ, 0.1},
    };
    for (const auto& c : cases) {
        MeshComplex m = extract_fibre(parse_polynomial(c.text, c.vars), c.eps, 1.0);
        HomologyReport h = relative_homology_mesh(m);
        long long alt = 0;
        for (const auto& [k, r] : h.ranks) alt += (k % 2 == 0 ? r : -r);
        CHECK(alt == h.euler_rel);
        CHECK(h.euler_rel == m.euler_characteristic_rel());
    }
}

TEST_CASE("ranks are stable under resolution halving") {
    for (const char* text : {"x^3 - y^2", "x^2 - y^2", "x^3 - 3*x*y^2"}) {
        Polynomial f = parse_polynomial(text, XY);
        MeshConfig coarse, fine;
        coarse.resolution = 1.0 / 128.0;
        fine.resolution = 1.0 / 256.0;
        HomologyReport hc = relative_homology_mesh(extract_fibre(f, 0.05, 1.0, coarse));
        HomologyReport hf = relative_homology_mesh(extract_fibre(f, 0.05, 1.0, fine));
        CHECK(hc.ranks == hf.ranks);
    }
    Polynomial cone = parse_polynomial("x^2 + y^2 - z^2", XYZ);
    MeshConfig coarse, fine;
    coarse.resolution = 1.0 / 48.0;
    fine.resolution = 1.0 / 96.0;
    HomologyReport hc = relative_homology_mesh(extract_fibre(cone, 0.1, 1.0, coarse));
    HomologyReport hf = relative_homology_mesh(extract_fibre(cone, 0.1, 1.0, fine));
    CHECK(hc.ranks == hf.ranks);
}

TEST_CASE("compare verdicts") {
    HomologyReport morse;
    morse.ranks[1] = 1;
    morse.euler_rel = -1;
    HomologyReport mesh;
    mesh.ranks[1] = 1;
    mesh.euler_rel = -1;
    CHECK(compare(morse, mesh).agree);

    HomologyReport corrupted;
    corrupted.ranks[1] = 2;
    corrupted.euler_rel = -2;
    CompareVerdict v = compare(corrupted, mesh);
    CHECK_FALSE(v.agree);
    REQUIRE(v.first_mismatch_degree.has_value());
    CHECK(*v.first_mismatch_degree == 1);

    HomologyReport torn = mesh;
    torn.torsion[1] = {"2"};
    CHECK_FALSE(compare(morse, torn).agree);
}

TEST_CASE("OFF export matches the advertised format") {
    MeshComplex m = extract_fibre(parse_polynomial("x^3 - y^2", XY), 0.01, 1.0);
    std::ostringstream out;
    write_off(m, out);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "OFF");
    std::size_t nv = 0, nf = 0, ne = 0;
    in >> nv >> nf >> ne;
    CHECK(nv == m.vertices.size());
    CHECK(nf == m.segments.size());
    CHECK(ne == 0);
    // vertex lines parse as three floats
    for (std::size_t i = 0; i < nv; ++i) {
        double x, y, z;
        in >> x >> y >> z;
        CHECK(in.good());
    }
    int arity = 0;
    in >> arity;
    CHECK(arity == 2);
    CHECK(out.str().find("# boundary-vertices:") != std::string::npos);
}

TEST_CASE("dimension guard") {
    CHECK_THROWS_AS(extract_fibre(parse_polynomial("x", {"x"}), 0.1, 1.0), MeshError);
    std::vector<std::string> v4 = {"x", "y", "z", "w"};
    CHECK_THROWS_AS(extract_fibre(parse_polynomial("x^2 + y^2 + z^2 - w^2", v4), 0.1, 1.0),
                    MeshError);
}
