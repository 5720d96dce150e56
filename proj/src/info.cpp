#include "swfb/info.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "swfb/errors.hpp"

namespace swfb {

namespace {

constexpr double kMassTolerance = 1e-12;

std::size_t checked_cells(const std::vector<Axis>& axes) {
  std::size_t cells = 1;
  for (const auto& a : axes) {
    if (a.size < 1) throw ValidationError("axis " + a.name + " has size < 1");
    if (cells > kMaxJointCells / static_cast<std::size_t>(a.size))
      throw ResourceError("joint alphabet exceeds " + std::to_string(kMaxJointCells) + " cells");
    cells *= static_cast<std::size_t>(a.size);
  }
  return cells;
}

std::vector<std::string> concat(const std::vector<std::string>& a,
                                const std::vector<std::string>& b) {
  std::vector<std::string> out(a);
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

void check_stochastic(std::span<const double> row, const char* what) {
  double s = 0.0;
  for (double v : row) {
    if (!(v >= 0.0)) throw ValidationError(std::string(what) + " has a negative entry");
    s += v;
  }
  if (std::abs(s - 1.0) > kMassTolerance)
    throw ValidationError(std::string(what) + " sums to " + std::to_string(s));
}

}  // namespace

JointDist::JointDist(std::vector<Axis> axes, std::vector<double> mass)
    : axes_(std::move(axes)), mass_(std::move(mass)) {
  std::set<std::string> names;
  for (const auto& a : axes_)
    if (!names.insert(a.name).second) throw ValidationError("duplicate axis " + a.name);
  if (checked_cells(axes_) != mass_.size())
    throw ValidationError("mass table size does not match axes");
  double total = 0.0;
  for (double m : mass_) {
    if (!(m >= 0.0)) throw ValidationError("negative probability mass");
    total += m;
  }
  // Tables built by summing many products drift slightly; allow 1e-9 relative
  // and renormalize.
  if (std::abs(total - 1.0) > 1e-9) throw ValidationError("total mass is " + std::to_string(total));
  if (total != 1.0)
    for (double& m : mass_) m /= total;
}

int JointDist::axis_index(const std::string& name) const {
  for (std::size_t i = 0; i < axes_.size(); ++i)
    if (axes_[i].name == name) return static_cast<int>(i);
  throw ValidationError("unknown variable " + name);
}

JointDist JointDist::marginal(const std::vector<std::string>& names) const {
  std::vector<int> idx;
  std::vector<Axis> out_axes;
  for (const auto& n : names) {
    const int i = axis_index(n);
    if (std::find(idx.begin(), idx.end(), i) != idx.end())
      throw ValidationError("variable listed twice: " + n);
    idx.push_back(i);
    out_axes.push_back(axes_[i]);
  }
  const std::size_t out_cells = checked_cells(out_axes);
  // Stride of each source axis inside the output table (0 if summed out).
  const std::size_t d = axes_.size();
  std::vector<std::size_t> out_stride(d, 0);
  {
    std::size_t s = 1;
    for (std::size_t k = idx.size(); k-- > 0;) {
      out_stride[idx[k]] = s;
      s *= static_cast<std::size_t>(out_axes[k].size);
    }
  }
  std::vector<double> out(out_cells, 0.0);
  std::vector<int> digit(d, 0);
  std::size_t target = 0;
  for (std::size_t cell = 0; cell < mass_.size(); ++cell) {
    out[target] += mass_[cell];
    for (std::size_t k = d; k-- > 0;) {
      ++digit[k];
      target += out_stride[k];
      if (digit[k] < axes_[k].size) break;
      target -= out_stride[k] * static_cast<std::size_t>(digit[k]);
      digit[k] = 0;
    }
  }
  return JointDist(std::move(out_axes), std::move(out));
}

void StructuredInputDist::validate() const {
  if (u_size < 1 || x1_size < 1 || x2_size < 1) throw ValidationError("alphabet size < 1");
  if (p_u.size() != static_cast<std::size_t>(u_size) ||
      p_x1_given_u.size() != static_cast<std::size_t>(u_size) * x1_size ||
      p_x2_given_u.size() != static_cast<std::size_t>(u_size) * x2_size)
    throw ValidationError("structured distribution tables have wrong sizes");
  check_stochastic(p_u, "P(u)");
  for (int u = 0; u < u_size; ++u) {
    check_stochastic(std::span(p_x1_given_u).subspan(static_cast<std::size_t>(u) * x1_size, x1_size),
                     "P(x1|u)");
    check_stochastic(std::span(p_x2_given_u).subspan(static_cast<std::size_t>(u) * x2_size, x2_size),
                     "P(x2|u)");
  }
}

std::vector<double> StructuredInputDist::joint() const {
  std::vector<double> q(static_cast<std::size_t>(u_size) * x1_size * x2_size);
  std::size_t k = 0;
  for (int u = 0; u < u_size; ++u)
    for (int a = 0; a < x1_size; ++a)
      for (int b = 0; b < x2_size; ++b)
        q[k++] = p_u[u] * p_x1_given_u[u * x1_size + a] * p_x2_given_u[u * x2_size + b];
  return q;
}

std::vector<double> StructuredInputDist::input_joint() const {
  std::vector<double> q(static_cast<std::size_t>(x1_size) * x2_size, 0.0);
  const auto full = joint();
  for (std::size_t i = 0; i < full.size(); ++i) q[i % q.size()] += full[i];
  return q;
}

StructuredInputDist StructuredInputDist::independent(std::span<const double> p_x1,
                                                     std::span<const double> p_x2) {
  StructuredInputDist d;
  d.u_size = 1;
  d.x1_size = static_cast<int>(p_x1.size());
  d.x2_size = static_cast<int>(p_x2.size());
  d.p_u = {1.0};
  d.p_x1_given_u.assign(p_x1.begin(), p_x1.end());
  d.p_x2_given_u.assign(p_x2.begin(), p_x2.end());
  d.validate();
  return d;
}

double entropy_bits(std::span<const double> p) noexcept {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log2(v);
  return std::max(h, 0.0);
}

double h2(double q) noexcept {
  const double p[2] = {q, 1.0 - q};
  return entropy_bits(p);
}

double entropy(const JointDist& dist, const std::vector<std::string>& vars) {
  if (vars.empty()) throw ValidationError("entropy needs at least one variable");
  return entropy_bits(dist.marginal(vars).mass());
}

double conditional_entropy(const JointDist& dist, const std::vector<std::string>& a,
                           const std::vector<std::string>& given) {
  if (given.empty()) return entropy(dist, a);
  return std::max(0.0, entropy(dist, concat(a, given)) - entropy(dist, given));
}

double conditional_mutual_information(const JointDist& dist, const std::vector<std::string>& a,
                                      const std::vector<std::string>& b,
                                      const std::vector<std::string>& c) {
  std::set<std::string> seen;
  for (const auto* group : {&a, &b, &c})
    for (const auto& v : *group)
      if (!seen.insert(v).second) throw ValidationError("variable sets overlap at " + v);
  if (a.empty() || b.empty()) throw ValidationError("mutual information needs nonempty sets");
  const double hac = entropy(dist, concat(a, c));
  const double hbc = entropy(dist, concat(b, c));
  const double habc = entropy(dist, concat(concat(a, b), c));
  const double hc = c.empty() ? 0.0 : entropy(dist, c);
  return std::max(0.0, hac + hbc - habc - hc);
}

JointDist channel_joint(const MacChannel& channel, std::span<const double> p_x1x2) {
  const int n1 = channel.x1_size(), n2 = channel.x2_size(), ny = channel.y_size();
  if (p_x1x2.size() != static_cast<std::size_t>(n1) * n2)
    throw ValidationError("input joint does not match channel alphabets");
  std::vector<double> m;
  m.reserve(static_cast<std::size_t>(n1) * n2 * ny);
  for (int x = 0; x < n1 * n2; ++x)
    for (double w : channel.row(x)) m.push_back(p_x1x2[x] * w);
  return JointDist({{"X1", n1}, {"X2", n2}, {"Y", ny}}, std::move(m));
}

JointDist induced_joint(const MacChannel& channel, const StructuredInputDist& input,
                        double switch_p) {
  input.validate();
  if (input.x1_size != channel.x1_size() || input.x2_size != channel.x2_size())
    throw ValidationError("input distribution does not match channel alphabets");
  if (!(switch_p >= 0.0 && switch_p <= 1.0)) throw ValidationError("switch probability outside [0,1]");
  const int ny = channel.y_size(), ne = channel.extended_y_size(), e = channel.erasure();
  std::vector<Axis> axes = {{"U", input.u_size}, {"X1", input.x1_size}, {"X2", input.x2_size},
                            {"Y", ny},           {"V", 2},             {"Yd", ne},
                            {"Ye", ne}};
  std::vector<double> m(checked_cells(axes), 0.0);
  const auto q = input.joint();
  const std::size_t inner = static_cast<std::size_t>(ny) * 2 * ne * ne;
  const int nx = channel.input_count();
  for (std::size_t k = 0; k < q.size(); ++k) {
    if (q[k] == 0.0) continue;
    const auto row = channel.row(static_cast<int>(k % nx));
    for (int y = 0; y < ny; ++y) {
      const double base = q[k] * row[y];
      if (base == 0.0) continue;
      const std::size_t off = k * inner + static_cast<std::size_t>(y) * 2 * ne * ne;
      // v = 0: feedback, decoder erased.
      m[off + 0 * ne * ne + static_cast<std::size_t>(e) * ne + y] += base * (1.0 - switch_p);
      m[off + 1 * ne * ne + static_cast<std::size_t>(y) * ne + e] += base * switch_p;
    }
  }
  return JointDist(std::move(axes), std::move(m));
}

JointDist decoder_joint(const MacChannel& channel, std::span<const double> p_x1x2,
                        double switch_p) {
  const int n1 = channel.x1_size(), n2 = channel.x2_size(), ny = channel.y_size();
  const int nz = n1 * n2 + 1, ne = channel.extended_y_size();
  if (p_x1x2.size() != static_cast<std::size_t>(n1) * n2)
    throw ValidationError("input joint does not match channel alphabets");
  std::vector<Axis> axes = {{"X1", n1}, {"X2", n2}, {"Z", nz}, {"Yd", ne}};
  std::vector<double> m(checked_cells(axes), 0.0);
  for (int x = 0; x < n1 * n2; ++x) {
    const std::size_t base = static_cast<std::size_t>(x) * nz * ne;
    const auto row = channel.row(x);
    for (int y = 0; y < ny; ++y)
      m[base + static_cast<std::size_t>(n1 * n2) * ne + y] += p_x1x2[x] * row[y] * switch_p;
    m[base + static_cast<std::size_t>(x) * ne + channel.erasure()] += p_x1x2[x] * (1.0 - switch_p);
  }
  return JointDist(std::move(axes), std::move(m));
}

bool counts_robustly_typical(std::span<const int> counts, std::span<const double> reference,
                             int n, double epsilon) noexcept {
  const double nn = static_cast<double>(n);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = nn * reference[i];
    if (std::abs(counts[i] - expected) > epsilon * expected * (1.0 + 1e-12) + 1e-9 * (expected > 0))
      return false;
  }
  return true;
}

bool is_robustly_typical(const std::vector<std::span<const int>>& sequences,
                         const JointDist& reference, double epsilon) {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  const auto& axes = reference.axes();
  if (sequences.size() != axes.size())
    throw ValidationError("need one sequence per axis of the reference distribution");
  const std::size_t n = sequences.empty() ? 0 : sequences.front().size();
  for (const auto& s : sequences)
    if (s.size() != n) throw ValidationError("sequence length mismatch");
  if (n == 0) throw ValidationError("empty sequences");
  std::vector<int> counts(reference.cell_count(), 0);
  for (std::size_t t = 0; t < n; ++t) {
    std::size_t cell = 0;
    for (std::size_t k = 0; k < axes.size(); ++k) {
      const int s = sequences[k][t];
      if (s < 0 || s >= axes[k].size) throw ValidationError("symbol out of range");
      cell = cell * axes[k].size + s;
    }
    ++counts[cell];
  }
  return counts_robustly_typical(counts, reference.mass(), static_cast<int>(n), epsilon);
}

}  // namespace swfb
