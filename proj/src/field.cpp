#include "imcflab/field.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <json.hpp>

#include "imcflab/common.hpp"

namespace imcf {

double tensor_inner(const Sym2& Gi, const Sym2& P, const Sym2& Q) {
  // G^{ik} G^{jl} P_ij Q_kl with M = G^{-1} P, N = G^{-1} Q: trace(M N).
  const double m00 = Gi.xx * P.xx + Gi.xy * P.xy, m01 = Gi.xx * P.xy + Gi.xy * P.yy;
  const double m10 = Gi.xy * P.xx + Gi.yy * P.xy, m11 = Gi.xy * P.xy + Gi.yy * P.yy;
  const double n00 = Gi.xx * Q.xx + Gi.xy * Q.xy, n01 = Gi.xx * Q.xy + Gi.xy * Q.yy;
  const double n10 = Gi.xy * Q.xx + Gi.yy * Q.xy, n11 = Gi.xy * Q.xy + Gi.yy * Q.yy;
  return m00 * n00 + m01 * n10 + m10 * n01 + m11 * n11;
}

std::pair<double, double> relative_eigenvalues(const Sym2& P, const Sym2& G) {
  require(G.xx > 0 && G.det() > 0, "relative eigenvalues need a positive definite metric");
  // G = L L^T, eigenvalues of L^{-1} P L^{-T}
  const double l11 = std::sqrt(G.xx), l21 = G.xy / l11, l22 = std::sqrt(G.yy - l21 * l21);
  const double a = P.xx / (l11 * l11);
  const double b = (P.xy - l21 * P.xx / l11) / (l11 * l22);
  const double c = (P.yy - 2 * l21 * P.xy / l11 + l21 * l21 * P.xx / (l11 * l11)) / (l22 * l22);
  const double m = 0.5 * (a + c), r = std::hypot(0.5 * (a - c), b);
  return {m - r, m + r};
}

namespace {

AnnulusField empty_field(double r0, double T, const GridSpec& grid, std::string label) {
  require(std::isfinite(r0) && r0 > 0, "r0 must be positive");
  AnnulusField f;
  f.sphere = make_sphere_grid(grid.n_theta, grid.n_phi);
  f.time = make_time_grid(T, grid.n_t);
  f.r0 = r0;
  f.label = std::move(label);
  const long n = f.node_count();
  f.H.resize(n);
  f.g.resize(n);
  f.A.resize(n);
  return f;
}

}  // namespace

AnnulusField field_from_radial(double r0, double T, const GridSpec& grid, const RadialFn& Hfn,
                               const RadialFn& Ffn, std::string label) {
  AnnulusField f = empty_field(r0, T, grid, std::move(label));
  const auto& sg = f.sphere;
  for (int k = 0; k < f.time.n_t; ++k) {
    const double t = f.time.t(k);
    const double H = Hfn(t), F = Ffn(t);
    require(std::isfinite(H) && std::isfinite(F) && F > 0, "radial data must be finite");
    for (int i = 0; i < sg.n_theta; ++i) {
      const Sym2 g = round_metric(sg.sin_theta[i]) * (F * F);
      const Sym2 A = g * (H / 2);
      for (int j = 0; j < sg.n_phi; ++j) {
        const long n = f.index(k, i, j);
        f.H[n] = H;
        f.g[n] = g;
        f.A[n] = A;
      }
    }
  }
  f.rotsym = true;
  return f;
}

AnnulusField build_delta(double r0, double T, const GridSpec& grid) {
  return field_from_radial(
      r0, T, grid, [r0](double t) { return 2.0 / r0 * std::exp(-t / 2); },
      [r0](double t) { return r0 * std::exp(t / 2); }, "delta");
}

AnnulusField field_from_function(double r0, double T, const GridSpec& grid, const NodeFn& fn,
                                 std::string label) {
  AnnulusField f = empty_field(r0, T, grid, std::move(label));
  const auto& sg = f.sphere;
  for (int k = 0; k < f.time.n_t; ++k)
    for (int i = 0; i < sg.n_theta; ++i)
      for (int j = 0; j < sg.n_phi; ++j) {
        const long n = f.index(k, i, j);
        NodeValues v = fn(f.time.t(k), sg.theta[i], sg.phi(j));
        f.H[n] = v.H;
        f.g[n] = v.g;
        f.A[n] = v.A;
      }
  return f;
}

bool same_grid(const AnnulusField& a, const AnnulusField& b) {
  return a.sphere.n_theta == b.sphere.n_theta && a.sphere.n_phi == b.sphere.n_phi &&
         a.time.n_t == b.time.n_t && a.time.T == b.time.T;
}

void validate_field(const AnnulusField& f) {
  const long n = f.node_count();
  require(static_cast<long>(f.H.size()) == n && static_cast<long>(f.g.size()) == n &&
              static_cast<long>(f.A.size()) == n,
          "field arrays do not match the grid");
  for (long m = 0; m < n; ++m) {
    const Sym2 &g = f.g[m], &A = f.A[m];
    require(std::isfinite(f.H[m]) && std::isfinite(g.xx) && std::isfinite(g.xy) &&
                std::isfinite(g.yy) && std::isfinite(A.xx) && std::isfinite(A.xy) &&
                std::isfinite(A.yy),
            "field has a non-finite sample at node " + std::to_string(m));
    require(f.H[m] > 0, "H must be positive (node " + std::to_string(m) + ")");
    require(g.xx > 0 && g.det() > 0, "g is not positive definite at node " + std::to_string(m));
  }
}

void save_field(const AnnulusField& f, const std::string& path) {
  nlohmann::json h = {{"r0", f.r0},
                      {"T", f.time.T},
                      {"n_theta", f.sphere.n_theta},
                      {"n_phi", f.sphere.n_phi},
                      {"n_t", f.time.n_t},
                      {"rotsym", f.rotsym},
                      {"label", f.label},
                      {"nodes", f.node_count()}};
  const std::string hs = h.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write("IMCFFLD1", 8);
  const std::uint64_t len = hs.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof len);
  out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  const long n = f.node_count();
  std::vector<double> col(n);
  auto put = [&](auto get) {
    for (long m = 0; m < n; ++m) col[m] = get(m);
    out.write(reinterpret_cast<const char*>(col.data()), static_cast<std::streamsize>(n * 8));
  };
  put([&](long m) { return f.H[m]; });
  put([&](long m) { return f.g[m].xx; });
  put([&](long m) { return f.g[m].xy; });
  put([&](long m) { return f.g[m].yy; });
  put([&](long m) { return f.A[m].xx; });
  put([&](long m) { return f.A[m].xy; });
  put([&](long m) { return f.A[m].yy; });
  if (!out) throw std::runtime_error("write failed for " + path);
}

AnnulusField load_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "cannot open field file " + path);
  char magic[8];
  in.read(magic, 8);
  require(in && std::memcmp(magic, "IMCFFLD1", 8) == 0, "not an annulus field file: " + path);
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof len);
  require(in && len < (1u << 20), "corrupt field header");
  std::string hs(len, '\0');
  in.read(hs.data(), static_cast<std::streamsize>(len));
  require(static_cast<bool>(in), "truncated field header");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(hs);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("field header is not JSON: ") + e.what());
  }
  AnnulusField f;
  try {
    GridSpec gs{h.at("n_theta").get<int>(), h.at("n_phi").get<int>(), h.at("n_t").get<int>()};
    f = field_from_function(h.at("r0").get<double>(), h.at("T").get<double>(), gs,
                            [](double, double, double) { return NodeValues{1, {1, 0, 1}, {}}; },
                            h.at("label").get<std::string>());
    f.rotsym = h.at("rotsym").get<bool>();
    require(h.at("nodes").get<long>() == f.node_count(), "node count does not match grid sizes");
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad field header: ") + e.what());
  }
  const long n = f.node_count();
  const auto body_start = in.tellg();
  in.seekg(0, std::ios::end);
  const auto body = static_cast<long>(in.tellg() - body_start);
  require(body == 7 * 8 * n, "field payload length " + std::to_string(body) +
                                 " does not match header (" + std::to_string(7 * 8 * n) + ")");
  in.seekg(body_start);
  std::vector<double> col(n);
  auto get = [&](auto set) {
    in.read(reinterpret_cast<char*>(col.data()), static_cast<std::streamsize>(n * 8));
    for (long m = 0; m < n; ++m) set(m, col[m]);
  };
  get([&](long m, double v) { f.H[m] = v; });
  get([&](long m, double v) { f.g[m].xx = v; });
  get([&](long m, double v) { f.g[m].xy = v; });
  get([&](long m, double v) { f.g[m].yy = v; });
  get([&](long m, double v) { f.A[m].xx = v; });
  get([&](long m, double v) { f.A[m].xy = v; });
  get([&](long m, double v) { f.A[m].yy = v; });
  return f;
}

void validate_bounds(const ClassBounds& b) {
  require(b.H0 > 0 && b.H0 < b.H1 && std::isfinite(b.H1), "need 0 < H0 < H1 < inf");
  require(b.r0 > 0 && b.A1 > 0 && b.T > 0 && std::isfinite(b.r0) && std::isfinite(b.A1) &&
              std::isfinite(b.T),
          "need 0 < r0, A1, T < inf");
}

}  // namespace imcf
